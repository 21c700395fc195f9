#pragma once

#include "mprl/baseline.hpp"
#include "mprl/bundle.hpp"
#include "mprl/solver.hpp"

namespace mprl {

// Dissimilarities -> compatibilities (-> constant-piece redraw when more
// than two pieces are constant). All randomness derives from cfg.seed.
CompatibilityTable build_piece_compatibility(const PieceSet& set, PuzzleType type,
                                             const RunConfig& cfg);

// Full solve from decoded pieces; dispatches on the puzzle type.
Solution solve_pieces(const PieceSet& set, GridDims dims, PuzzleType type, const RunConfig& cfg,
                      const TraceFn& trace = {});

Solution solve_bundle(const PuzzleBundle& bundle, const RunConfig& cfg, const TraceFn& trace = {});

// Balanced-RL baseline over the same compatibility pipeline (Type 1 only).
Solution solve_pieces_balanced(const PieceSet& set, GridDims dims, const RunConfig& cfg);

}  // namespace mprl
