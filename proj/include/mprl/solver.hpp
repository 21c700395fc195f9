#pragma once

#include <cstdint>

#include "mprl/engine.hpp"
#include "mprl/solution.hpp"

namespace mprl {

struct SolverConfig {
    PhaseConfig phase;
    std::uint64_t seed = 0;          // drives the Type 2 bias orientation
    bool parallel_branches = false;  // explore fork children concurrently
    TraceFn trace;                   // optional per-iteration diagnostics
};

// Multi-phase Type 1 driver: exactly n phases of run_phase + anchor per
// completion, growing one 4-connected block. A block abutting a grid edge is
// translated one step inward; when its extent is one short of the grid the
// run forks (translate vs stay, per axis, at most 4 completions) and the
// completion with the largest final ALC wins. Feasible by construction.
Solution solve_type1(const CompatibilityTable& table, const ProblemInstance& inst,
                     const SolverConfig& cfg);

// Piece maximizing the sum over the four sides of the best achievable
// compatibility on that side; ties go to the lower index.
int select_anchor_piece(const CompatibilityTable& table);

// Barycenter of the Type 2 search space with piece i1 restricted to
// orientation theta1 (1/n on each theta1 label, 0 on the rest).
Labeling init_labeling_type2(const ProblemInstance& inst, int i1, Orientation theta1);

// Type 2 driver. Square grids run once with a seeded random theta1;
// rectangular grids run twice (theta1 and theta1+90deg) and the run with the
// larger final ALC wins. Translation and branching work as in Type 1 on the
// position component.
Solution solve_type2(const CompatibilityTable& table, const ProblemInstance& inst,
                     const SolverConfig& cfg);

}  // namespace mprl
