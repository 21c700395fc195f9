#pragma once

#include "mprl/solution.hpp"

namespace mprl {

struct GroundTruth {
    PuzzleType type = PuzzleType::Type1;
    GridDims dims;
    std::vector<Placement> placement;  // indexed by piece
};

struct Scores {
    double dc = 0.0;
    double nc = 0.0;
    bool pr = false;
    Orientation rotation = Orientation::Deg0;  // global rotation that won (Type 2)
};

// Fraction of pieces at their ground-truth position (and orientation, for
// Type 2). No global-rotation handling here.
double direct_comparison(const Solution& sol, const GroundTruth& gt);

// Fraction of the grid's adjacent ordered pairs (canonicalized to Right and
// Down, so each seam counts once) whose piece pair, relation, and relative
// orientation also occur in the ground truth. Matching is done in the first
// piece's frame, which makes the score invariant to a global rotation.
double neighbor_comparison(const Solution& sol, const GroundTruth& gt);

// Identical placements; Type 2 solutions are compared under their best
// global rotation.
bool perfect_reconstruction(const Solution& sol, const GroundTruth& gt);

// Evaluate under every global rotation consistent with the grid (4 when
// square, 2 otherwise; only the identity for Type 1) and keep the rotation
// maximizing DC.
Scores best_rotation_scores(const Solution& sol, const GroundTruth& gt);

// Global clockwise rotation of a whole solution (positions and
// orientations); the grid transposes for quarter turns.
Solution rotate_solution(const Solution& sol, Orientation rot);

}  // namespace mprl
