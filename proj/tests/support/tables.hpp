#pragma once

#include "mprl/compat.hpp"
#include "mprl/rng.hpp"

namespace testsupport {

// Hand-built Type 1 dissimilarity table, zero-initialized.
inline mprl::DissimilarityTable empty_t1_dissim(int n) {
    mprl::DissimilarityTable t;
    t.type = mprl::PuzzleType::Type1;
    t.pieces = n;
    t.atoms = n;
    t.right.assign(std::size_t(n) * n, 0.0);
    t.down.assign(std::size_t(n) * n, 0.0);
    return t;
}

inline mprl::CompatibilityTable empty_compat(mprl::PuzzleType type, int pieces) {
    mprl::CompatibilityTable t;
    t.type = type;
    t.pieces = pieces;
    t.atoms = type == mprl::PuzzleType::Type2 ? 4 * pieces : pieces;
    for (auto& plane : t.rel) plane.assign(std::size_t(t.atoms) * t.atoms, 0.0);
    return t;
}

// Writes one symmetric coefficient: C(a,b,R) = C(b,a,opposite(R)) = v.
inline void set_sym(mprl::CompatibilityTable& t, int a, int b, mprl::Relation r, double v) {
    t.rel[int(r)][std::size_t(t.atoms) * a + b] = v;
    t.rel[int(mprl::opposite(r))][std::size_t(t.atoms) * b + a] = v;
}

// Random symmetric non-negative table with entries in [0, 1].
inline mprl::CompatibilityTable random_sym_compat(mprl::PuzzleType type, int pieces,
                                                  mprl::Rng& rng) {
    mprl::CompatibilityTable t = empty_compat(type, pieces);
    for (int a = 0; a < t.atoms; ++a)
        for (int b = 0; b < t.atoms; ++b) {
            if (t.same_piece(a, b)) continue;
            set_sym(t, a, b, mprl::Relation::Right, rng.next_double());
            set_sym(t, a, b, mprl::Relation::Down, rng.next_double());
        }
    return t;
}

// Type 1 table whose unique value-1 entries are exactly the adjacencies of
// the identity (row-major) arrangement; everything else `off`.
inline mprl::CompatibilityTable identity_compat(mprl::GridDims dims, double off = 0.0) {
    using namespace mprl;
    CompatibilityTable t = empty_compat(PuzzleType::Type1, dims.cells());
    for (int a = 0; a < t.atoms; ++a)
        for (int b = 0; b < t.atoms; ++b) {
            if (a == b) continue;
            set_sym(t, a, b, Relation::Right, off);
            set_sym(t, a, b, Relation::Down, off);
        }
    for (int x = 1; x <= dims.rows; ++x)
        for (int y = 1; y <= dims.cols; ++y) {
            int i = (x - 1) * dims.cols + (y - 1);
            if (y < dims.cols) set_sym(t, i, i + 1, Relation::Right, 1.0);
            if (x < dims.rows) set_sym(t, i, i + dims.cols, Relation::Down, 1.0);
        }
    return t;
}

}  // namespace testsupport
