#include "mprl/baseline.hpp"

#include <cmath>
#include <stdexcept>

namespace mprl {

Solution solve_type1_balanced(const CompatibilityTable& table, const ProblemInstance& inst,
                              const BaselineConfig& cfg) {
    if (inst.type != PuzzleType::Type1)
        throw std::invalid_argument("solve_type1_balanced: wrong type");
    CoefficientView cv(inst, table);
    Labeling lab = uniform_labeling(inst);
    const int n = inst.n();

    double alc_prev = 0.0;
    int iters = 0;
    while (iters < cfg.max_iterations) {
        SupportMatrix q = support(lab, cv);
        double a = alc(lab, q);
        if (iters > 0 && std::abs(a - alc_prev) < cfg.epsilon) break;
        alc_prev = a;
        update(lab, q);
        lab = sinkhorn_balance(std::move(lab), cfg.sinkhorn_iterations, cfg.sinkhorn_tol);
        ++iters;
    }

    // greedy rounding to a permutation
    std::vector<int> assigned_pos(std::size_t(n), -1);
    std::vector<char> pos_used(std::size_t(n), 0), obj_used(std::size_t(n), 0);
    for (int step = 0; step < n; ++step) {
        int bi = -1, bl = -1;
        double bv = -1.0;
        for (int i = 0; i < n; ++i) {
            if (obj_used[std::size_t(i)]) continue;
            for (int lam = 0; lam < n; ++lam) {
                if (pos_used[std::size_t(lam)]) continue;
                if (lab.at(i, lam) > bv) {
                    bv = lab.at(i, lam);
                    bi = i;
                    bl = lam;
                }
            }
        }
        obj_used[std::size_t(bi)] = 1;
        pos_used[std::size_t(bl)] = 1;
        assigned_pos[std::size_t(bi)] = bl;
    }

    Labeling rounded = uniform_labeling(inst);
    for (int i = 0; i < n; ++i) {
        double* row = rounded.row(i);
        for (int lam = 0; lam < n; ++lam) row[lam] = lam == assigned_pos[std::size_t(i)] ? 1.0 : 0.0;
    }

    Solution sol;
    sol.type = inst.type;
    sol.dims = inst.dims;
    sol.placement.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Pos p = inst.pos_of_index(assigned_pos[std::size_t(i)]);
        sol.placement[std::size_t(i)] = {p.x, p.y, Orientation::Deg0};
    }
    SupportMatrix q = support(rounded, cv);
    sol.alc = alc(rounded, q);
    sol.diag.phases = 1;
    sol.diag.iterations = iters;
    return sol;
}

}  // namespace mprl
