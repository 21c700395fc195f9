#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mprl/compat.hpp"
#include "mprl/image.hpp"
#include "mprl/metrics.hpp"
#include "mprl/pieces.hpp"
#include "mprl/solution.hpp"

namespace mprl {

// Solve parameters; flag names on the command line mirror these fields.
struct RunConfig {
    double epsilon = 1e-4;
    double alpha = 0.7;
    double k = 0.0;  // <= 0 means the per-type default: 3 (Type 1) / 1.5 (Type 2)
    Measure measure = Measure::RankedPercentile;
    std::uint64_t seed = 0;
    bool parallel_branches = false;
    bool trace = false;

    double resolved_k(PuzzleType t) const {
        if (k > 0.0) return k;
        return t == PuzzleType::Type1 ? 3.0 : 1.5;
    }
};

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

// On-disk puzzle: a directory with manifest.json, one lossless PNG per piece
// in shuffled presentation order, and the ground truth in a sibling file so
// solvers run blind by default. Schemas in docs/formats.md; all files are
// written atomically (temp + rename). Manifest rows/cols/orientations are
// 0-based / degrees at this boundary.
struct BundleManifest {
    int format_version = 1;
    PuzzleType type = PuzzleType::Type1;
    GridDims dims;
    int piece_size = 28;
    std::uint64_t seed = 0;
    double constancy_tol = 0.5;
    std::vector<std::string> piece_files;
};

struct PuzzleBundle {
    std::filesystem::path dir;
    BundleManifest manifest;
};

// Cut, shuffle (and rotate, for Type 2) with a seeded generator, write the
// bundle. The constancy tolerance records how pieces should be classified
// later: 1e-6 when the source decodes losslessly (PNG), 0.5 for JPEG input.
PuzzleBundle generate_bundle(const Image8& image, GridDims dims, int piece_size, PuzzleType type,
                             std::uint64_t seed, const std::filesystem::path& out_dir,
                             double constancy_tol);

PuzzleBundle load_bundle(const std::filesystem::path& dir);

// Decoded CIELAB pieces in presentation order, constant flags filled using
// the manifest tolerance.
PieceSet load_pieces(const PuzzleBundle& bundle);

bool has_ground_truth(const PuzzleBundle& bundle);
GroundTruth load_ground_truth(const PuzzleBundle& bundle);

void save_solution(const Solution& sol, const RunConfig& cfg, const std::filesystem::path& file);
Solution load_solution(const std::filesystem::path& file);

// Pieces pasted (rotated per placement) at their solved positions.
Image8 render_solution(const Solution& sol, const PuzzleBundle& bundle);

}  // namespace mprl
