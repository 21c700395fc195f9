#include "mprl/labeling.hpp"

#include <stdexcept>

namespace mprl {

Labeling uniform_labeling(const ProblemInstance& inst) {
    Labeling lab;
    lab.n = inst.n();
    lab.m = inst.m();
    lab.p.assign(std::size_t(lab.n) * lab.m, 1.0 / lab.m);
    lab.anchor_label.assign(lab.n, -1);
    lab.position_owner.assign(inst.n(), -1);
    return lab;
}

bool is_permutation(const Labeling& lab, const ProblemInstance& inst) {
    if (inst.type != PuzzleType::Type1) throw std::logic_error("is_permutation: Type 1 only");
    if (lab.n != lab.m) return false;
    std::vector<int> col_ones(lab.m, 0);
    for (int i = 0; i < lab.n; ++i) {
        int row_ones = 0;
        for (int lam = 0; lam < lab.m; ++lam) {
            double v = lab.at(i, lam);
            if (v == 1.0)
                ++row_ones, ++col_ones[lam];
            else if (v != 0.0)
                return false;
        }
        if (row_ones != 1) return false;
    }
    for (int c : col_ones)
        if (c != 1) return false;
    return true;
}

bool is_type2_permutation(const Labeling& lab, const ProblemInstance& inst) {
    if (inst.type != PuzzleType::Type2)
        throw std::logic_error("is_type2_permutation: Type 2 only");
    std::vector<int> group_ones(inst.n(), 0);  // per position, across 4 orientations
    for (int i = 0; i < lab.n; ++i) {
        int row_ones = 0;
        for (int lam = 0; lam < lab.m; ++lam) {
            double v = lab.at(i, lam);
            if (v == 1.0)
                ++row_ones, ++group_ones[lam / 4];
            else if (v != 0.0)
                return false;
        }
        if (row_ones != 1) return false;
    }
    for (int c : group_ones)
        if (c != 1) return false;
    return true;
}

bool adjacent_to_anchored(const Labeling& lab, Pos pos, const ProblemInstance& inst) {
    for (auto [q, r] : neighbors(pos, inst.dims))
        if (lab.position_anchored(inst.pos_index(q))) return true;
    return false;
}

namespace {

// Rewrite the whole matrix from the anchor bookkeeping: anchored rows become
// one-hot, everything else goes to the barycenter of the remaining subspace
// (1 / #free positions per allowed column group).
void reset_from_anchors(Labeling& lab, const ProblemInstance& inst, const OrientationLock* lock) {
    const int npos = inst.n();
    const int k = inst.orientations();
    int free_pos = 0;
    for (int q = 0; q < npos; ++q)
        if (!lab.position_anchored(q)) ++free_pos;

    for (int j = 0; j < lab.n; ++j) {
        double* row = lab.row(j);
        if (lab.object_anchored(j)) {
            for (int lam = 0; lam < lab.m; ++lam) row[lam] = 0.0;
            row[lab.anchor_label[j]] = 1.0;
            continue;
        }
        bool locked = lock && lock->piece == j;
        double fill = locked ? 1.0 / free_pos : 1.0 / (double(free_pos) * k);
        for (int q = 0; q < npos; ++q) {
            bool open = !lab.position_anchored(q);
            for (int t = 0; t < k; ++t) {
                double v = 0.0;
                if (open && (!locked || Orientation(t) == lock->orientation)) v = fill;
                row[q * k + t] = v;
            }
        }
    }
}

}  // namespace

void anchor(Labeling& lab, int i, Label lam, const ProblemInstance& inst,
            const OrientationLock* lock) {
    if (inst.type == PuzzleType::Type1 && lam.orientation != Orientation::Deg0)
        throw std::logic_error("anchor: Type 1 labels have fixed orientation");
    if (lab.object_anchored(i)) throw std::logic_error("anchor: object already anchored");
    int pos = inst.pos_index(lam.pos);
    if (lab.position_anchored(pos)) throw std::logic_error("anchor: position already occupied");
    if (lab.anchored_count > 0 && !adjacent_to_anchored(lab, lam.pos, inst))
        throw std::logic_error("anchor: position not adjacent to the anchored block");

    lab.anchor_label[i] = inst.label_index(lam);
    lab.position_owner[pos] = i;
    ++lab.anchored_count;
    const OrientationLock* live =
        (lock && lock->piece >= 0 && !lab.object_anchored(lock->piece)) ? lock : nullptr;
    reset_from_anchors(lab, inst, live);
}

void translate_block(Labeling& lab, Relation dir, const ProblemInstance& inst,
                     const OrientationLock* lock) {
    const int npos = inst.n();
    std::vector<int> new_owner(npos, -1);
    std::vector<int> new_anchor = lab.anchor_label;
    for (int q = 0; q < npos; ++q) {
        int owner = lab.position_owner[q];
        if (owner < 0) continue;
        Pos moved = step(inst.pos_of_index(q), dir);
        if (!in_grid(moved, inst.dims))
            throw std::logic_error("translate_block: shift leaves the grid");
        new_owner[inst.pos_index(moved)] = owner;
        Label l = inst.label_of_index(lab.anchor_label[owner]);
        l.pos = moved;
        new_anchor[owner] = inst.label_index(l);
    }
    lab.position_owner = std::move(new_owner);
    lab.anchor_label = std::move(new_anchor);
    const OrientationLock* live =
        (lock && lock->piece >= 0 && !lab.object_anchored(lock->piece)) ? lock : nullptr;
    reset_from_anchors(lab, inst, live);
}

}  // namespace mprl
