#pragma once

#include <vector>

#include "mprl/core.hpp"
#include "mprl/pieces.hpp"

namespace mprl {

// Directed boundary dissimilarity D(b_i, b_j, R): Mahalanobis distance of the
// seam gradients (across and along the shared boundary) from the gradient
// distribution predicted by each piece's own boundary columns. Zero exactly
// when the seam gradients match the predicted means.
//
// Only the Right relation is ever evaluated directly; the other relations
// reduce to it by rotating both pieces (Down -> both 270deg cw, Left -> both
// 180deg, Up -> both 90deg cw).
double mgc_dissimilarity(const PieceRaster& bi, const PieceRaster& bj, Relation r);

// Dense directed dissimilarities for all ordered pairs and relations.
// Atoms index the rows/columns: a piece for Type 1, a (piece, orientation)
// pair for Type 2 (atom = piece*4 + orientation). Same-piece entries are 0
// and never read.
struct DissimilarityTable {
    PuzzleType type = PuzzleType::Type1;
    int pieces = 0;
    int atoms = 0;
    std::vector<double> right;  // atoms x atoms
    std::vector<double> down;   // atoms x atoms, Type 1 only (Type 2 derives it)

    int atom(int piece, Orientation th) const {
        return type == PuzzleType::Type2 ? piece * 4 + int(th) : piece;
    }
    int piece_of(int a) const { return type == PuzzleType::Type2 ? a / 4 : a; }
    bool same_piece(int a, int b) const { return piece_of(a) == piece_of(b); }

    double at(int a, int b, Relation r) const {
        const std::size_t A = std::size_t(atoms);
        switch (r) {
            case Relation::Right: return right[A * a + b];
            case Relation::Left: return right[A * b + a];
            case Relation::Down:
                return type == PuzzleType::Type1 ? down[A * a + b]
                                                 : right[A * back(a) + back(b)];
            case Relation::Up:
                return type == PuzzleType::Type1 ? down[A * b + a]
                                                 : right[A * back(b) + back(a)];
        }
        return 0.0;
    }

private:
    // same piece, orientation reduced by a quarter turn
    int back(int a) const { return (a & ~3) | ((a + 3) & 3); }
};

// Parallel builder (OpenMP over rows). Piece boundary statistics are fitted
// once per rotated piece and shared across all pairs, so entries are
// deterministic regardless of the thread count.
DissimilarityTable build_dissimilarity_table(const PieceSet& set, PuzzleType type);

namespace ref {
// Serial reference: every entry is an independent mgc_dissimilarity() call
// with no shared state. Kept for tests and the kernel benchmark.
DissimilarityTable build_dissimilarity_table(const PieceSet& set, PuzzleType type);
}  // namespace ref

}  // namespace mprl
