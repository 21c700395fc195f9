#include "mprl/solver.hpp"

#include <algorithm>
#include <future>
#include <mutex>
#include <stdexcept>

#include "mprl/rng.hpp"

namespace mprl {

namespace {

struct BBox {
    int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    bool empty = true;

    void add(Pos p) {
        if (empty) {
            min_x = max_x = p.x;
            min_y = max_y = p.y;
            empty = false;
            return;
        }
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    void shift(Relation dir) {
        Pos lo = step({min_x, min_y}, dir), hi = step({max_x, max_y}, dir);
        min_x = lo.x;
        max_x = hi.x;
        min_y = lo.y;
        max_y = hi.y;
    }
};

struct BranchState {
    Labeling lab;
    BBox box;
    bool vert_flagged = false;
    bool horz_flagged = false;
    std::string lineage;
    SolveDiagnostics diag;
};

struct Finished {
    Labeling lab;
    double alc_value = 0.0;
    SolveDiagnostics diag;
    std::string lineage;
};

// Sanity check run after every phase: decisions of earlier phases must
// never be touched again.
void verify_anchor_integrity(const Labeling& lab, const ProblemInstance& inst) {
    for (int i = 0; i < lab.n; ++i) {
        if (!lab.object_anchored(i)) continue;
        for (int lam = 0; lam < lab.m; ++lam) {
            double want = lam == lab.anchor_label[i] ? 1.0 : 0.0;
            if (lab.at(i, lam) != want)
                throw std::logic_error("solver: anchored row modified by a later phase");
        }
    }
    const int k = inst.orientations();
    for (int pos = 0; pos < inst.n(); ++pos) {
        int owner = lab.position_owner[pos];
        if (owner < 0) continue;
        for (int i = 0; i < lab.n; ++i) {
            if (i == owner) continue;
            for (int t = 0; t < k; ++t)
                if (lab.at(i, pos * k + t) != 0.0)
                    throw std::logic_error("solver: anchored position modified by a later phase");
        }
    }
}

class MultiPhaseDriver {
public:
    MultiPhaseDriver(const CoefficientView& cv, const SolverConfig& cfg,
                     const OrientationLock* lock)
        : cv_(cv), inst_(cv.instance()), cfg_(cfg), lock_(lock) {}

    // Runs every completion reachable from `st` and returns them all.
    std::vector<Finished> run_all(BranchState st) {
        run(std::move(st));
        return std::move(finished_);
    }

private:
    const OrientationLock* live_lock(const BranchState& st) const {
        if (!lock_) return nullptr;
        return st.lab.object_anchored(lock_->piece) ? nullptr : lock_;
    }

    std::vector<char> allowed_positions(const BranchState& st) const {
        std::vector<char> allowed(std::size_t(inst_.n()), 0);
        if (st.lab.anchored_count == 0) {
            std::fill(allowed.begin(), allowed.end(), 1);
            return allowed;
        }
        for (int pos = 0; pos < inst_.n(); ++pos)
            if (!st.lab.position_anchored(pos) &&
                adjacent_to_anchored(st.lab, inst_.pos_of_index(pos), inst_))
                allowed[std::size_t(pos)] = 1;
        return allowed;
    }

    void run(BranchState st) {
        const int n = inst_.n();
        while (st.lab.anchored_count < n) {
            std::vector<char> allowed = allowed_positions(st);
            const OrientationLock* lock = live_lock(st);
            PhaseOutcome outcome =
                run_phase(std::move(st.lab), cv_, cfg_.phase, allowed, lock, cfg_.trace);
            st.lab = std::move(outcome.labeling);
            st.diag.phases += 1;
            st.diag.iterations += outcome.iterations;
            switch (outcome.reason) {
                case StopReason::ThresholdHit: st.diag.threshold_stops++; break;
                case StopReason::Converged: st.diag.converged_stops++; break;
                case StopReason::MaxIterations: st.diag.maxiter_stops++; break;
            }
            if (outcome.fallback) st.diag.fallback_anchors++;

            const Candidate& pick = outcome.candidates.front();
            Label lam = inst_.label_of_index(pick.label);
            anchor(st.lab, pick.object, lam, inst_, live_lock(st));
            st.box.add(lam.pos);
            verify_anchor_integrity(st.lab, inst_);

            int pending = check_axes(st);  // applies plain translations
            if (pending) {
                fork(std::move(st), pending);
                return;
            }
        }
        finish(std::move(st));
    }

    // Per-axis edge rule. Returns a bitmask of axes that hit the
    // one-short-of-full dilemma (1 = vertical, 2 = horizontal).
    int check_axes(BranchState& st) {
        int pending = 0;
        // vertical
        if (!st.vert_flagged) {
            int extent = st.box.max_x - st.box.min_x + 1;
            bool touching = st.box.min_x == 1 || st.box.max_x == inst_.dims.rows;
            if (extent < inst_.dims.rows && touching) {
                if (extent <= inst_.dims.rows - 2) {
                    translate(st, st.box.min_x == 1 ? Relation::Down : Relation::Up);
                } else {
                    st.vert_flagged = true;
                    pending |= 1;
                }
            }
        }
        // horizontal
        if (!st.horz_flagged) {
            int extent = st.box.max_y - st.box.min_y + 1;
            bool touching = st.box.min_y == 1 || st.box.max_y == inst_.dims.cols;
            if (extent < inst_.dims.cols && touching) {
                if (extent <= inst_.dims.cols - 2) {
                    translate(st, st.box.min_y == 1 ? Relation::Right : Relation::Left);
                } else {
                    st.horz_flagged = true;
                    pending |= 2;
                }
            }
        }
        return pending;
    }

    void translate(BranchState& st, Relation dir) {
        translate_block(st.lab, dir, inst_, live_lock(st));
        st.box.shift(dir);
        st.diag.translations++;
    }

    void fork(BranchState st, int pending) {
        std::vector<BranchState> children;
        children.push_back(std::move(st));
        if (pending & 1) split(children, true);
        if (pending & 2) split(children, false);
        if (cfg_.parallel_branches && children.size() > 1) {
            std::vector<std::future<void>> futs;
            for (BranchState& c : children)
                futs.push_back(std::async(std::launch::async,
                                          [this](BranchState b) { run(std::move(b)); },
                                          std::move(c)));
            for (auto& f : futs) f.get();
        } else {
            for (BranchState& c : children) run(std::move(c));
        }
    }

    // Duplicates every pending state into a stay child and a translate child.
    void split(std::vector<BranchState>& children, bool vertical) {
        std::vector<BranchState> next;
        for (BranchState& c : children) {
            BranchState stay = c;
            stay.lineage += vertical ? "Vs" : "Hs";
            BranchState moved = std::move(c);
            moved.lineage += vertical ? "Vt" : "Ht";
            Relation dir;
            if (vertical)
                dir = moved.box.min_x == 1 ? Relation::Down : Relation::Up;
            else
                dir = moved.box.min_y == 1 ? Relation::Right : Relation::Left;
            translate(moved, dir);
            next.push_back(std::move(stay));
            next.push_back(std::move(moved));
        }
        children = std::move(next);
    }

    void finish(BranchState st) {
        SupportMatrix q = support(st.lab, cv_);
        Finished f;
        f.alc_value = alc(st.lab, q);
        f.diag = st.diag;
        f.lineage = st.lineage.empty() ? "-" : st.lineage;
        f.lab = std::move(st.lab);
        std::lock_guard<std::mutex> g(mu_);
        finished_.push_back(std::move(f));
    }

    const CoefficientView& cv_;
    const ProblemInstance& inst_;
    const SolverConfig& cfg_;
    const OrientationLock* lock_;
    std::mutex mu_;
    std::vector<Finished> finished_;
};

Solution to_solution(const Finished& f, const std::vector<Finished>& all,
                     const ProblemInstance& inst) {
    Solution sol;
    sol.type = inst.type;
    sol.dims = inst.dims;
    sol.alc = f.alc_value;
    sol.diag = f.diag;
    sol.diag.branch = f.lineage;
    sol.diag.branches = int(all.size());
    sol.placement.resize(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i) {
        Label l = inst.label_of_index(f.lab.anchor_label[i]);
        sol.placement[std::size_t(i)] = {l.pos.x, l.pos.y, l.orientation};
    }
    return sol;
}

// Deterministic winner: largest ALC, ties resolved by lineage string.
const Finished& pick_winner(const std::vector<Finished>& all) {
    const Finished* win = &all.front();
    for (const Finished& f : all) {
        if (f.alc_value > win->alc_value ||
            (f.alc_value == win->alc_value && f.lineage < win->lineage))
            win = &f;
    }
    return *win;
}

}  // namespace

Solution solve_type1(const CompatibilityTable& table, const ProblemInstance& inst,
                     const SolverConfig& cfg) {
    if (inst.type != PuzzleType::Type1) throw std::invalid_argument("solve_type1: wrong type");
    CoefficientView cv(inst, table);
    MultiPhaseDriver driver(cv, cfg, nullptr);
    BranchState start;
    start.lab = uniform_labeling(inst);
    std::vector<Finished> all = driver.run_all(std::move(start));
    const Finished& win = pick_winner(all);
    if (!is_permutation(win.lab, inst))
        throw std::logic_error("solve_type1: final labeling is not a permutation");
    return to_solution(win, all, inst);
}

int select_anchor_piece(const CompatibilityTable& table) {
    int best = 0;
    double best_sum = -1.0;
    const int k = table.type == PuzzleType::Type2 ? 4 : 1;
    for (int i = 0; i < table.pieces; ++i) {
        double sum = 0.0;
        for (Relation r : kRelations) {
            double side_best = 0.0;
            for (int t = 0; t < k; ++t) {
                const double* row = table.row(r, i * k + t);
                for (int b = 0; b < table.atoms; ++b) {
                    if (table.same_piece(i * k, b)) continue;
                    side_best = std::max(side_best, row[b]);
                }
            }
            sum += side_best;
        }
        if (sum > best_sum) {
            best_sum = sum;
            best = i;
        }
    }
    return best;
}

Labeling init_labeling_type2(const ProblemInstance& inst, int i1, Orientation theta1) {
    if (inst.type != PuzzleType::Type2)
        throw std::invalid_argument("init_labeling_type2: wrong type");
    Labeling lab = uniform_labeling(inst);
    double* row = lab.row(i1);
    for (int pos = 0; pos < inst.n(); ++pos)
        for (int t = 0; t < 4; ++t)
            row[pos * 4 + t] = Orientation(t) == theta1 ? 1.0 / inst.n() : 0.0;
    return lab;
}

Solution solve_type2(const CompatibilityTable& table, const ProblemInstance& inst,
                     const SolverConfig& cfg) {
    if (inst.type != PuzzleType::Type2) throw std::invalid_argument("solve_type2: wrong type");
    CoefficientView cv(inst, table);
    const int i1 = select_anchor_piece(table);
    Orientation theta1 = Orientation(Rng(cfg.seed).fork(0x7431).next_int(4));

    std::vector<Orientation> runs = {theta1};
    if (inst.dims.rows != inst.dims.cols)
        runs.push_back(compose(theta1, Orientation::Deg90));

    Solution best;
    bool have = false;
    for (Orientation th : runs) {
        OrientationLock lock{i1, th};
        MultiPhaseDriver driver(cv, cfg, &lock);
        BranchState start;
        start.lab = init_labeling_type2(inst, i1, th);
        std::vector<Finished> all = driver.run_all(std::move(start));
        const Finished& win = pick_winner(all);
        if (!is_type2_permutation(win.lab, inst))
            throw std::logic_error("solve_type2: final labeling is not a type 2 permutation");
        Solution sol = to_solution(win, all, inst);
        sol.diag.runs = int(runs.size());
        sol.diag.anchor_piece = i1;
        sol.diag.theta1_degrees = degrees(th);
        if (!have || sol.alc > best.alc) {
            best = std::move(sol);
            have = true;
        }
    }
    return best;
}

}  // namespace mprl
