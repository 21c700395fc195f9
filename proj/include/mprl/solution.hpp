#pragma once

#include <string>
#include <vector>

#include "mprl/core.hpp"

namespace mprl {

struct Placement {
    int row = 1, col = 1;  // 1-based
    Orientation orientation = Orientation::Deg0;
    bool operator==(const Placement&) const = default;
};

struct SolveDiagnostics {
    int phases = 0;
    long long iterations = 0;  // RL iterations across all phases of the winning branch
    int translations = 0;
    int branches = 1;          // completions explored
    std::string branch;        // lineage tag of the winning branch
    int fallback_anchors = 0;  // converged phases anchored without a supra-threshold entry
    int threshold_stops = 0;
    int converged_stops = 0;
    int maxiter_stops = 0;
    int runs = 1;              // Type 2: 2 for rectangular grids
    int anchor_piece = -1;     // Type 2 bias piece
    int theta1_degrees = 0;    // Type 2 bias orientation of the winning run
};

struct Solution {
    PuzzleType type = PuzzleType::Type1;
    GridDims dims;
    std::vector<Placement> placement;  // indexed by piece
    double alc = 0.0;
    SolveDiagnostics diag;
};

}  // namespace mprl
