#pragma once

#include <functional>
#include <vector>

#include "mprl/compat.hpp"
#include "mprl/labeling.hpp"

namespace mprl {

struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(std::size_t(r) * c, 0.0) {}
    double& at(int i, int j) { return v[std::size_t(i) * cols + j]; }
    double at(int i, int j) const { return v[std::size_t(i) * cols + j]; }
};

using SupportMatrix = Mat;

// Compatibility coefficients r_ij(lambda, mu) on demand: the piece (or
// rotated-piece) compatibility when the two label positions are 4-adjacent,
// zero otherwise. Symmetric, non-negative, zero diagonal. The full n^2 m^2
// array is never materialized.
class CoefficientView {
public:
    CoefficientView(const ProblemInstance& inst, const CompatibilityTable& table);

    double r(int i, int lam, int j, int mu) const;

    const ProblemInstance& instance() const { return *inst_; }
    const CompatibilityTable& table() const { return *table_; }

private:
    const ProblemInstance* inst_;
    const CompatibilityTable* table_;
};

// q_i(lambda) = sum_j sum_mu r_ij(lambda, mu) p_j(mu), computed sparsely:
// only labels at the <= 4 neighboring positions contribute. Parallel over
// objects with a fixed per-row summation order, so results do not depend on
// the schedule.
SupportMatrix support(const Labeling& lab, const CoefficientView& cv);

// Multiplicative row update p'_i = p_i q_i / sum(p_i q_i), followed by an
// explicit row renormalization. Rows with zero denominator are left alone;
// binary rows are fixed points.
void update(Labeling& lab, const SupportMatrix& q);

// Average local consistency sum_i sum_lambda p_i(lambda) q_i(lambda).
double alc(const Labeling& lab, const SupportMatrix& q);

struct PhaseConfig {
    double epsilon = 1e-4;  // stop when the ALC increase falls below this
    double alpha = 0.7;     // anchoring confidence threshold, in (0.5, 1]
    int max_iterations = 1000;

    void validate() const;
};

enum class StopReason { ThresholdHit, Converged, MaxIterations };

struct Candidate {
    int object = -1;
    int label = -1;
    double p = 0.0;
    double q = 0.0;
};

// Candidate ordering used everywhere a single entry must be picked:
// higher p, then higher q, then lower object index, then lower label index.
bool candidate_before(const Candidate& a, const Candidate& b);

struct PhaseOutcome {
    Labeling labeling;
    int iterations = 0;
    double alc_value = 0.0;
    StopReason reason = StopReason::Converged;
    // Supra-threshold entries at allowed positions, best first; when none
    // exist (converged or iteration cap) the single best allowed entry, with
    // `fallback` set.
    std::vector<Candidate> candidates;
    bool fallback = false;
};

using TraceFn = std::function<void(int iteration, double alc_value, const Candidate& best)>;

// One RL phase: iterate support/update until some unanchored p_i(lambda)
// at an allowed position crosses alpha, the ALC increase drops below epsilon,
// or the iteration cap is hit. Internally only unanchored rows and free
// positions are computed (all skipped terms are exactly zero), so cost
// shrinks as the puzzle fills up.
PhaseOutcome run_phase(Labeling lab, const CoefficientView& cv, const PhaseConfig& cfg,
                       const std::vector<char>& allowed_positions,
                       const OrientationLock* lock = nullptr, const TraceFn& trace = {});

// Alternating row/column normalization toward a doubly stochastic matrix
// (baseline solver component). Requires a square labeling; convergence needs
// strictly positive entries.
Labeling sinkhorn_balance(Labeling lab, int iterations, double tol);

namespace ref {
// Brute-force support: the full double sum over all (j, mu) through
// CoefficientView::r. Serial; for tests and the kernel benchmark.
SupportMatrix support_dense(const Labeling& lab, const CoefficientView& cv);
}  // namespace ref

}  // namespace mprl
