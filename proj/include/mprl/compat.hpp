#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mprl/core.hpp"
#include "mprl/mgc.hpp"

namespace mprl {

enum class Measure {
    RankedPercentile,  // (1 - D/p_avg)^rank with percentile-prefix averaging
    QuartileExp,       // exp(-rank - D/quartile) baseline
};

// Per-source statistics for one (atom, relation): candidate dissimilarities
// sorted ascending, ties broken by atom index (lower index, lower rank).
struct RelationStats {
    std::vector<double> sorted;     // ascending dissimilarities
    std::vector<int> rank_by_atom;  // atom -> 0-based rank, -1 for same piece
    double quartile = 0.0;          // nearest-rank 25th percentile
    double prefix_avg = 0.0;        // percentile_avg for the configured k
};

RelationStats make_relation_stats(const DissimilarityTable& d, int a, Relation r, double k);

// 0-based rank of atom_j among the source's candidates.
int rank_phi(const RelationStats& st, int atom_j);

// Nearest-rank percentile value: element ceil(k/100 * count) (1-based), at
// least one element. k in (0, 100].
double nearest_rank_value(const std::vector<double>& sorted_vals, double k);

// Mean of the smallest ceil(k/100 * count) values (at least one).
double percentile_avg(const std::vector<double>& sorted_vals, double k);

// The proposed measure: 1 when D and the prefix average are both 0;
// (1 - D/prefix_avg)^phi when D <= prefix_avg > 0 (0^0 := 1); else 0.
double compat_ranked_percentile(double d, int phi, double prefix_avg);

// Baseline measure exp(-phi - D/quartile). A zero quartile degenerates to
// exp(-phi) for D = 0 and 0 otherwise (limit convention).
double compat_quartile_exp(double d, int phi, double quartile);

// Directed compatibilities before symmetrization.
struct RawCompatibility {
    PuzzleType type = PuzzleType::Type1;
    int pieces = 0;
    int atoms = 0;
    Measure measure = Measure::RankedPercentile;
    double k = 0.0;
    std::vector<double> rel[4];  // indexed by Relation, each atoms x atoms

    double at(int a, int b, Relation r) const {
        return rel[int(r)][std::size_t(atoms) * a + b];
    }
};

// Symmetric compatibility table feeding the coefficient view. All four
// relation planes are materialized for contiguous row access;
// at(a,b,R) == at(b,a,opposite(R)) holds exactly by construction.
struct CompatibilityTable {
    PuzzleType type = PuzzleType::Type1;
    int pieces = 0;
    int atoms = 0;
    Measure measure = Measure::RankedPercentile;
    double k = 0.0;
    std::vector<double> rel[4];

    int atom(int piece, Orientation th) const {
        return type == PuzzleType::Type2 ? piece * 4 + int(th) : piece;
    }
    int piece_of(int a) const { return type == PuzzleType::Type2 ? a / 4 : a; }
    bool same_piece(int a, int b) const { return piece_of(a) == piece_of(b); }

    const double* row(Relation r, int a) const {
        return rel[int(r)].data() + std::size_t(atoms) * a;
    }
    double at(int a, int b, Relation r) const { return row(r, a)[b]; }
};

RawCompatibility build_raw_compatibility(const DissimilarityTable& d, Measure measure, double k);

// C_sym(i,j,R) = (C_raw(i,j,R) + C_raw(j,i,opposite(R))) / 2. Idempotent.
CompatibilityTable symmetrize(const RawCompatibility& raw);

CompatibilityTable build_compatibility(const DissimilarityTable& d, Measure measure, double k);

// Constant-piece redraw: when the puzzle has more than two constant pieces,
// every entry with maximal compatibility through some constant piece is
// redrawn as max{0, X}, X ~ U(-4, 1) (zero with probability 0.8). One draw
// covers an entry and its symmetric partner, so symmetry is preserved
// exactly and each affected entry keeps the marginal redraw distribution.
// Deterministic for a fixed seed.
void adjust_constant(CompatibilityTable& table, const std::vector<char>& constant_flags,
                     std::uint64_t seed);

// Single redraw value; exposed so the draw distribution is testable.
double constant_redraw_value(double u01);

// Debug dump, little-endian binary: header then all entries in i-major,
// then j, then relation order. Schema in docs/formats.md.
void dump_compatibility(const CompatibilityTable& table, const std::string& path);

}  // namespace mprl
