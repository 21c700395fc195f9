#include "mprl/pipeline.hpp"

#include <stdexcept>

#include "mprl/rng.hpp"

namespace mprl {

CompatibilityTable build_piece_compatibility(const PieceSet& set, PuzzleType type,
                                             const RunConfig& cfg) {
    DissimilarityTable d = build_dissimilarity_table(set, type);
    CompatibilityTable table = build_compatibility(d, cfg.measure, cfg.resolved_k(type));
    if (!set.constant_flags.empty())
        adjust_constant(table, set.constant_flags, Rng(cfg.seed).fork(0xc0).next_u64());
    return table;
}

Solution solve_pieces(const PieceSet& set, GridDims dims, PuzzleType type, const RunConfig& cfg,
                      const TraceFn& trace) {
    if (int(set.pieces.size()) != dims.cells())
        throw std::invalid_argument("piece count does not match the grid");
    CompatibilityTable table = build_piece_compatibility(set, type, cfg);
    ProblemInstance inst(dims, type);
    SolverConfig scfg;
    scfg.phase.epsilon = cfg.epsilon;
    scfg.phase.alpha = cfg.alpha;
    scfg.seed = cfg.seed;
    scfg.parallel_branches = cfg.parallel_branches;
    scfg.trace = trace;
    return type == PuzzleType::Type1 ? solve_type1(table, inst, scfg)
                                     : solve_type2(table, inst, scfg);
}

Solution solve_bundle(const PuzzleBundle& bundle, const RunConfig& cfg, const TraceFn& trace) {
    PieceSet set = load_pieces(bundle);
    return solve_pieces(set, bundle.manifest.dims, bundle.manifest.type, cfg, trace);
}

Solution solve_pieces_balanced(const PieceSet& set, GridDims dims, const RunConfig& cfg) {
    CompatibilityTable table = build_piece_compatibility(set, PuzzleType::Type1, cfg);
    ProblemInstance inst(dims, PuzzleType::Type1);
    BaselineConfig bcfg;
    bcfg.epsilon = cfg.epsilon;
    return solve_type1_balanced(table, inst, bcfg);
}

}  // namespace mprl
