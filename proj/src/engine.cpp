#include "mprl/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mprl {

CoefficientView::CoefficientView(const ProblemInstance& inst, const CompatibilityTable& table)
    : inst_(&inst), table_(&table) {
    if (inst.type != table.type || inst.n() != table.pieces)
        throw std::invalid_argument("coefficient view: table does not match instance");
}

double CoefficientView::r(int i, int lam, int j, int mu) const {
    if (i == j) return 0.0;
    Label li = inst_->label_of_index(lam);
    Label lj = inst_->label_of_index(mu);
    int dx = lj.pos.x - li.pos.x, dy = lj.pos.y - li.pos.y;
    Relation rel;
    if (dx == 0 && dy == 1)
        rel = Relation::Right;
    else if (dx == 1 && dy == 0)
        rel = Relation::Down;
    else if (dx == 0 && dy == -1)
        rel = Relation::Left;
    else if (dx == -1 && dy == 0)
        rel = Relation::Up;
    else
        return 0.0;
    return table_->at(table_->atom(i, li.orientation), table_->atom(j, lj.orientation), rel);
}

SupportMatrix support(const Labeling& lab, const CoefficientView& cv) {
    const ProblemInstance& inst = cv.instance();
    const CompatibilityTable& C = cv.table();
    const int n = inst.n(), m = inst.m(), npos = inst.n(), K = inst.orientations();
    if (lab.n != n || lab.m != m) throw std::invalid_argument("support: dimension mismatch");

    // weights transposed by position: w[pos][b], b = atom index j*K + t
    const int nk = n * K;
    std::vector<double> w(std::size_t(npos) * nk);
    for (int j = 0; j < n; ++j)
        for (int pos = 0; pos < npos; ++pos)
            for (int t = 0; t < K; ++t)
                w[std::size_t(pos) * nk + j * K + t] = lab.at(j, pos * K + t);

    std::vector<int> nbr_off(npos + 1, 0);
    std::vector<std::pair<int, Relation>> nbr;
    for (int pos = 0; pos < npos; ++pos) {
        for (auto [p2, rel] : neighbors(inst.pos_of_index(pos), inst.dims))
            nbr.emplace_back(inst.pos_index(p2), rel);
        nbr_off[pos + 1] = int(nbr.size());
    }

    SupportMatrix q(n, m);
    #pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int pos = 0; pos < npos; ++pos) {
            for (int e = nbr_off[pos]; e < nbr_off[pos + 1]; ++e) {
                auto [pos2, rel] = nbr[e];
                const double* wrow = w.data() + std::size_t(pos2) * nk;
                for (int t = 0; t < K; ++t) {
                    const double* crow = C.row(rel, C.atom(i, Orientation(t)));
                    double s = 0.0;
                    for (int b = 0; b < nk; ++b) s += crow[b] * wrow[b];
                    q.at(i, pos * K + t) += s;
                }
            }
        }
    }
    return q;
}

void update(Labeling& lab, const SupportMatrix& q) {
    if (q.rows != lab.n || q.cols != lab.m) throw std::invalid_argument("update: dimension mismatch");
    #pragma omp parallel for schedule(static)
    for (int i = 0; i < lab.n; ++i) {
        double* row = lab.row(i);
        const double* qrow = q.v.data() + std::size_t(i) * q.cols;
        double denom = 0.0;
        for (int lam = 0; lam < lab.m; ++lam) denom += row[lam] * qrow[lam];
        if (denom == 0.0) continue;  // update undefined; resolved later by anchoring
        double sum = 0.0;
        for (int lam = 0; lam < lab.m; ++lam) {
            row[lam] = row[lam] * qrow[lam] / denom;
            sum += row[lam];
        }
        for (int lam = 0; lam < lab.m; ++lam) row[lam] /= sum;
    }
}

double alc(const Labeling& lab, const SupportMatrix& q) {
    long double total = 0.0L;
    for (int i = 0; i < lab.n; ++i) {
        const double* row = lab.row(i);
        const double* qrow = q.v.data() + std::size_t(i) * q.cols;
        long double part = 0.0L;
        for (int lam = 0; lam < lab.m; ++lam) part += (long double)(row[lam] * qrow[lam]);
        total += part;
    }
    return double(total);
}

void PhaseConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(alpha > 0.5 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0.5, 1]");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

bool candidate_before(const Candidate& a, const Candidate& b) {
    if (a.p != b.p) return a.p > b.p;
    if (a.q != b.q) return a.q > b.q;
    if (a.object != b.object) return a.object < b.object;
    return a.label < b.label;
}

namespace {

// Workspace for the masked phase kernels: index maps between the full
// instance and the free (unanchored) subproblem, plus flattened neighbor
// lists so the inner loops stay allocation-free.
struct PhaseSpace {
    int n = 0, m = 0, npos = 0, K = 0, F = 0;  // F = free objects == free positions
    std::vector<int> free_obj, free_pos;
    std::vector<int> pos_slot;   // position -> free slot or -1
    std::vector<int> owner_atom; // position -> anchored atom or -1
    std::vector<int> nbr_off;    // npos + 1
    std::vector<std::pair<int, Relation>> nbr;  // flattened (pos2, rel)

    PhaseSpace(const Labeling& lab, const ProblemInstance& inst, const CompatibilityTable& C) {
        n = inst.n();
        m = inst.m();
        npos = inst.n();
        K = inst.orientations();
        pos_slot.assign(npos, -1);
        owner_atom.assign(npos, -1);
        for (int i = 0; i < n; ++i)
            if (!lab.object_anchored(i)) free_obj.push_back(i);
        for (int pos = 0; pos < npos; ++pos) {
            int owner = lab.position_owner[pos];
            if (owner < 0) {
                pos_slot[pos] = int(free_pos.size());
                free_pos.push_back(pos);
            } else {
                Label l = inst.label_of_index(lab.anchor_label[owner]);
                owner_atom[pos] = C.atom(owner, l.orientation);
            }
        }
        F = int(free_obj.size());
        nbr_off.assign(npos + 1, 0);
        for (int pos = 0; pos < npos; ++pos) {
            for (auto [p2, rel] : neighbors(inst.pos_of_index(pos), inst.dims))
                nbr.emplace_back(inst.pos_index(p2), rel);
            nbr_off[pos + 1] = int(nbr.size());
        }
    }
};

// Compact per-position weights over free atoms: w2[slot][fo*K + t].
void gather_weights(const Labeling& lab, const PhaseSpace& sp, std::vector<double>& w2) {
    const int fk = sp.F * sp.K;
    w2.resize(std::size_t(sp.F) * fk);
    for (int ps = 0; ps < sp.F; ++ps) {
        int pos = sp.free_pos[ps];
        double* out = w2.data() + std::size_t(ps) * fk;
        for (int fo = 0; fo < sp.F; ++fo) {
            const double* row = lab.row(sp.free_obj[fo]);
            for (int t = 0; t < sp.K; ++t) out[fo * sp.K + t] = row[pos * sp.K + t];
        }
    }
}

// Support restricted to free rows/positions, plus q at each anchored row's
// anchored label (needed by the ALC). Every skipped term is exactly zero in
// the full sum, so the result matches support() on all cells that matter.
void support_masked(const Labeling& lab, const CompatibilityTable& C, const PhaseSpace& sp,
                    const std::vector<double>& w2, SupportMatrix& q,
                    std::vector<double>& q_anchored) {
    const int fk = sp.F * sp.K;
    std::fill(q.v.begin(), q.v.end(), 0.0);

    #pragma omp parallel
    {
        std::vector<double> crow_c(std::size_t(4) * sp.K * fk);
        #pragma omp for schedule(dynamic)
        for (int io = 0; io < sp.F; ++io) {
            int i = sp.free_obj[io];
            // compact compatibility rows for every (relation, own orientation)
            for (int rel = 0; rel < 4; ++rel)
                for (int t = 0; t < sp.K; ++t) {
                    const double* full = C.row(Relation(rel), C.atom(i, Orientation(t)));
                    double* out = crow_c.data() + (std::size_t(rel) * sp.K + t) * fk;
                    for (int fo = 0; fo < sp.F; ++fo) {
                        int ja = C.atom(sp.free_obj[fo], Orientation::Deg0);
                        for (int tt = 0; tt < sp.K; ++tt) out[fo * sp.K + tt] = full[ja + tt];
                    }
                }
            double* qrow = q.v.data() + std::size_t(i) * q.cols;
            for (int ps = 0; ps < sp.F; ++ps) {
                int pos = sp.free_pos[ps];
                for (int e = sp.nbr_off[pos]; e < sp.nbr_off[pos + 1]; ++e) {
                    auto [pos2, rel] = sp.nbr[e];
                    if (sp.owner_atom[pos2] >= 0) {
                        for (int t = 0; t < sp.K; ++t)
                            qrow[pos * sp.K + t] +=
                                C.at(C.atom(i, Orientation(t)), sp.owner_atom[pos2], rel);
                    } else {
                        const double* wrow = w2.data() + std::size_t(sp.pos_slot[pos2]) * fk;
                        for (int t = 0; t < sp.K; ++t) {
                            const double* crow =
                                crow_c.data() + (std::size_t(int(rel)) * sp.K + t) * fk;
                            double s = 0.0;
                            for (int b = 0; b < fk; ++b) s += crow[b] * wrow[b];
                            qrow[pos * sp.K + t] += s;
                        }
                    }
                }
            }
        }
    }

    // anchored rows: only the anchored label's support is ever used
    q_anchored.assign(std::size_t(sp.npos), 0.0);
    for (int pos = 0; pos < sp.npos; ++pos) {
        int i = lab.position_owner[pos];
        if (i < 0) continue;
        int ai = sp.owner_atom[pos];
        double s = 0.0;
        for (int e = sp.nbr_off[pos]; e < sp.nbr_off[pos + 1]; ++e) {
            auto [pos2, rel] = sp.nbr[e];
            if (sp.owner_atom[pos2] >= 0) {
                s += C.at(ai, sp.owner_atom[pos2], rel);
            } else {
                const double* wrow = w2.data() + std::size_t(sp.pos_slot[pos2]) * (sp.F * sp.K);
                const double* crow = C.row(rel, ai);
                for (int fo = 0; fo < sp.F; ++fo) {
                    int ja = C.atom(sp.free_obj[fo], Orientation::Deg0);
                    for (int tt = 0; tt < sp.K; ++tt) s += crow[ja + tt] * wrow[fo * sp.K + tt];
                }
            }
        }
        q_anchored[pos] = s;
    }
}

double alc_masked(const Labeling& lab, const PhaseSpace& sp, const SupportMatrix& q,
                  const std::vector<double>& q_anchored) {
    long double total = 0.0L;
    for (int io = 0; io < sp.F; ++io) {
        int i = sp.free_obj[io];
        const double* row = lab.row(i);
        const double* qrow = q.v.data() + std::size_t(i) * q.cols;
        long double part = 0.0L;
        for (int ps = 0; ps < sp.F; ++ps) {
            int base = sp.free_pos[ps] * sp.K;
            for (int t = 0; t < sp.K; ++t)
                part += (long double)(row[base + t] * qrow[base + t]);
        }
        total += part;
    }
    for (int pos = 0; pos < sp.npos; ++pos)
        if (lab.position_owner[pos] >= 0) total += (long double)q_anchored[pos];
    return double(total);
}

void update_masked(Labeling& lab, const PhaseSpace& sp, const SupportMatrix& q) {
    #pragma omp parallel for schedule(static)
    for (int io = 0; io < sp.F; ++io) {
        int i = sp.free_obj[io];
        double* row = lab.row(i);
        const double* qrow = q.v.data() + std::size_t(i) * q.cols;
        double denom = 0.0;
        for (int ps = 0; ps < sp.F; ++ps) {
            int base = sp.free_pos[ps] * sp.K;
            for (int t = 0; t < sp.K; ++t) denom += row[base + t] * qrow[base + t];
        }
        if (denom == 0.0) continue;
        double sum = 0.0;
        for (int ps = 0; ps < sp.F; ++ps) {
            int base = sp.free_pos[ps] * sp.K;
            for (int t = 0; t < sp.K; ++t) {
                row[base + t] = row[base + t] * qrow[base + t] / denom;
                sum += row[base + t];
            }
        }
        for (int ps = 0; ps < sp.F; ++ps) {
            int base = sp.free_pos[ps] * sp.K;
            for (int t = 0; t < sp.K; ++t) row[base + t] /= sum;
        }
    }
}

bool label_locked_out(int i, int t, const OrientationLock* lock) {
    return lock && lock->piece == i && Orientation(t) != lock->orientation;
}

}  // namespace

PhaseOutcome run_phase(Labeling lab, const CoefficientView& cv, const PhaseConfig& cfg,
                       const std::vector<char>& allowed_positions, const OrientationLock* lock,
                       const TraceFn& trace) {
    cfg.validate();
    const ProblemInstance& inst = cv.instance();
    const CompatibilityTable& C = cv.table();
    if (int(allowed_positions.size()) != inst.n())
        throw std::invalid_argument("run_phase: allowed_positions size mismatch");

    PhaseSpace sp(lab, inst, C);
    std::vector<int> allowed;  // free positions open for anchoring
    for (int pos = 0; pos < sp.npos; ++pos)
        if (allowed_positions[pos] && sp.pos_slot[pos] >= 0) allowed.push_back(pos);
    if (allowed.empty()) throw std::invalid_argument("run_phase: no allowed free position");

    auto best_allowed = [&](const SupportMatrix& q) {
        Candidate best;
        std::vector<Candidate> supra;
        for (int io = 0; io < sp.F; ++io) {
            int i = sp.free_obj[io];
            const double* row = lab.row(i);
            const double* qrow = q.v.data() + std::size_t(i) * q.cols;
            for (int pos : allowed)
                for (int t = 0; t < sp.K; ++t) {
                    if (label_locked_out(i, t, lock)) continue;
                    Candidate c{i, pos * sp.K + t, row[pos * sp.K + t], qrow[pos * sp.K + t]};
                    if (best.object < 0 || candidate_before(c, best)) best = c;
                    if (c.p >= cfg.alpha) supra.push_back(c);
                }
        }
        std::sort(supra.begin(), supra.end(), candidate_before);
        return std::make_pair(best, supra);
    };

    SupportMatrix q(lab.n, lab.m);
    std::vector<double> w2, q_anchored;
    gather_weights(lab, sp, w2);
    support_masked(lab, C, sp, w2, q, q_anchored);
    double alc_prev = alc_masked(lab, sp, q, q_anchored);

    PhaseOutcome out;
    out.reason = StopReason::MaxIterations;
    int iters = 0;
    double alc_now = alc_prev;
    while (iters < cfg.max_iterations) {
        update_masked(lab, sp, q);
        ++iters;
        gather_weights(lab, sp, w2);
        support_masked(lab, C, sp, w2, q, q_anchored);
        alc_now = alc_masked(lab, sp, q, q_anchored);

        auto [best, supra] = best_allowed(q);
        if (trace) trace(iters, alc_now, best);
        if (!supra.empty()) {
            out.reason = StopReason::ThresholdHit;
            break;
        }
        if (alc_now - alc_prev < cfg.epsilon) {
            out.reason = StopReason::Converged;
            break;
        }
        alc_prev = alc_now;
    }

    auto [best, supra] = best_allowed(q);
    out.iterations = iters;
    out.alc_value = alc_now;
    if (supra.empty()) {
        out.fallback = true;
        out.candidates = {best};
    } else {
        out.candidates = std::move(supra);
    }
    out.labeling = std::move(lab);
    return out;
}

Labeling sinkhorn_balance(Labeling lab, int iterations, double tol) {
    if (lab.n != lab.m) throw std::invalid_argument("sinkhorn_balance: labeling must be square");
    const int n = lab.n;
    for (int it = 0; it < iterations; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += lab.at(i, j);
            if (s == 0.0) continue;
            for (int j = 0; j < n; ++j) lab.at(i, j) /= s;
        }
        double dev = 0.0;
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += lab.at(i, j);
            if (s == 0.0) continue;
            for (int i = 0; i < n; ++i) lab.at(i, j) /= s;
        }
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += lab.at(i, j);
            dev = std::max(dev, std::abs(s - 1.0));
        }
        if (dev <= tol) break;
    }
    // restore exact row stochasticity; column sums stay within tolerance
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += lab.at(i, j);
        if (s == 0.0) continue;
        for (int j = 0; j < n; ++j) lab.at(i, j) /= s;
    }
    return lab;
}

namespace ref {

SupportMatrix support_dense(const Labeling& lab, const CoefficientView& cv) {
    const int n = lab.n, m = lab.m;
    SupportMatrix q(n, m);
    for (int i = 0; i < n; ++i)
        for (int lam = 0; lam < m; ++lam) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                for (int mu = 0; mu < m; ++mu) s += cv.r(i, lam, j, mu) * lab.at(j, mu);
            q.at(i, lam) = s;
        }
    return q;
}

}  // namespace ref

}  // namespace mprl
