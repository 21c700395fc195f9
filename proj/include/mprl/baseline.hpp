#pragma once

#include "mprl/engine.hpp"
#include "mprl/solution.hpp"

namespace mprl {

struct BaselineConfig {
    double epsilon = 1e-4;  // stop when |ALC change| falls below this
    int max_iterations = 300;
    int sinkhorn_iterations = 50;
    double sinkhorn_tol = 1e-9;
};

// Single-phase balanced-RL baseline for comparison experiments: plain RL
// updates interleaved with Sinkhorn-Knopp balancing toward a doubly
// stochastic matrix. The dynamics alone cannot guarantee a permutation, so
// the final labeling is rounded greedily (repeatedly fix the largest entry
// and strike its row and column).
Solution solve_type1_balanced(const CompatibilityTable& table, const ProblemInstance& inst,
                              const BaselineConfig& cfg = {});

}  // namespace mprl
