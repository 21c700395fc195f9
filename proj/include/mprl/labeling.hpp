#pragma once

#include <vector>

#include "mprl/core.hpp"

namespace mprl {

// Row-stochastic assignment matrix p_i(lambda) plus anchoring bookkeeping.
// Values are owned exclusively by one solver run; all mutation happens under
// exclusive access, so no locking is needed.
struct Labeling {
    int n = 0;  // objects (rows)
    int m = 0;  // labels (columns)
    std::vector<double> p;            // n*m, row-major
    std::vector<int> anchor_label;    // per object: label index, or -1
    std::vector<int> position_owner;  // per position index: object id, or -1
    int anchored_count = 0;

    double& at(int i, int lam) { return p[std::size_t(i) * m + lam]; }
    double at(int i, int lam) const { return p[std::size_t(i) * m + lam]; }
    const double* row(int i) const { return p.data() + std::size_t(i) * m; }
    double* row(int i) { return p.data() + std::size_t(i) * m; }

    bool object_anchored(int i) const { return anchor_label[i] >= 0; }
    bool position_anchored(int pos) const { return position_owner[pos] >= 0; }
};

// Type 2 runs bias the initial labeling by restricting one piece to a single
// orientation; that restriction must survive the resets performed by anchor()
// and translate_block() until the piece itself is anchored.
struct OrientationLock {
    int piece = -1;
    Orientation orientation = Orientation::Deg0;
};

// Barycenter of the search space: every entry 1/m, no anchors.
Labeling uniform_labeling(const ProblemInstance& inst);

// Binary, one 1 per row and per column (Type 1 feasibility).
bool is_permutation(const Labeling& lab, const ProblemInstance& inst);

// Binary, one 1 per row and one 1 across each position's 4 orientation
// columns (Type 2 feasibility).
bool is_type2_permutation(const Labeling& lab, const ProblemInstance& inst);

// True when `pos` is 4-adjacent to some anchored position.
bool adjacent_to_anchored(const Labeling& lab, Pos pos, const ProblemInstance& inst);

// End-of-phase intervention: fix object i at label lam, zero out conflicting
// entries, and reset every still-undecided entry to the barycenter of the
// remaining subspace. The first anchor may land anywhere; later anchors must
// be 4-adjacent to the anchored block.
void anchor(Labeling& lab, int i, Label lam, const ProblemInstance& inst,
            const OrientationLock* lock = nullptr);

// Relabeling transformation that shifts every anchored position one step in
// `dir` (orientations preserved) and re-resets the undecided entries.
// Shifting any anchored position off-grid is a contract violation.
void translate_block(Labeling& lab, Relation dir, const ProblemInstance& inst,
                     const OrientationLock* lock = nullptr);

}  // namespace mprl
