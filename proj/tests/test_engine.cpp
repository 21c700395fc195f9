#include <doctest.h>

#include <cmath>

#include "mprl/engine.hpp"
#include "mprl/rng.hpp"
#include "support/tables.hpp"

using namespace mprl;
using testsupport::empty_compat;
using testsupport::random_sym_compat;
using testsupport::set_sym;

namespace {

Labeling random_interior_labeling(const ProblemInstance& inst, Rng& rng) {
    Labeling lab = uniform_labeling(inst);
    for (int i = 0; i < lab.n; ++i) {
        double s = 0;
        for (int lam = 0; lam < lab.m; ++lam) {
            lab.at(i, lam) = 0.05 + rng.next_double();
            s += lab.at(i, lam);
        }
        for (int lam = 0; lam < lab.m; ++lam) lab.at(i, lam) /= s;
    }
    return lab;
}

// Brute-force average local consistency straight from the definition.
double oracle_alc(const Labeling& lab, const CoefficientView& cv) {
    double a = 0;
    for (int i = 0; i < lab.n; ++i)
        for (int lam = 0; lam < lab.m; ++lam) {
            double qi = 0;
            for (int j = 0; j < lab.n; ++j)
                for (int mu = 0; mu < lab.m; ++mu) qi += cv.r(i, lam, j, mu) * lab.at(j, mu);
            a += lab.at(i, lam) * qi;
        }
    return a;
}

}  // namespace

TEST_CASE("coefficient view implements the sparse coefficient rule") {
    ProblemInstance inst(GridDims(1, 2), PuzzleType::Type1);
    CompatibilityTable t = empty_compat(PuzzleType::Type1, 2);
    set_sym(t, 0, 1, Relation::Right, 0.6);
    CoefficientView cv(inst, t);

    int l11 = inst.label_index({{1, 1}, Orientation::Deg0});
    int l12 = inst.label_index({{1, 2}, Orientation::Deg0});
    CHECK(cv.r(0, l11, 1, l12) == 0.6);
    CHECK(cv.r(1, l12, 0, l11) == 0.6);  // symmetric
    CHECK(cv.r(0, l11, 0, l12) == 0.0);  // diagonal object
    CHECK(cv.r(0, l11, 1, l11) == 0.0);  // same position, not neighbors
    CHECK(cv.r(0, l12, 1, l11) == 0.0);  // other direction carries its own entry
}

TEST_CASE("support: hand-evaluated 1x2 example") {
    ProblemInstance inst(GridDims(1, 2), PuzzleType::Type1);
    CompatibilityTable t = empty_compat(PuzzleType::Type1, 2);
    const double c = 0.8;
    set_sym(t, 0, 1, Relation::Right, c);
    CoefficientView cv(inst, t);
    Labeling lab = uniform_labeling(inst);

    SupportMatrix q = support(lab, cv);
    int l11 = inst.label_index({{1, 1}, Orientation::Deg0});
    int l12 = inst.label_index({{1, 2}, Orientation::Deg0});
    CHECK(q.at(0, l11) == doctest::Approx(c / 2).epsilon(1e-15));
    CHECK(q.at(1, l12) == doctest::Approx(c / 2).epsilon(1e-15));
    CHECK(q.at(0, l12) == 0.0);
    CHECK(q.at(1, l11) == 0.0);
}

TEST_CASE("support: binary labeling collapses the sum onto assigned labels") {
    ProblemInstance inst(GridDims(2, 2), PuzzleType::Type1);
    Rng rng(2);
    CompatibilityTable t = random_sym_compat(PuzzleType::Type1, 4, rng);
    CoefficientView cv(inst, t);

    Labeling lab = uniform_labeling(inst);
    for (int i = 0; i < 4; ++i)
        for (int lam = 0; lam < 4; ++lam) lab.at(i, lam) = i == lam ? 1.0 : 0.0;

    SupportMatrix q = support(lab, cv);
    for (int i = 0; i < 4; ++i)
        for (int lam = 0; lam < 4; ++lam) {
            double expect = 0;
            for (int j = 0; j < 4; ++j) expect += cv.r(i, lam, j, j);
            CHECK(q.at(i, lam) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("support equals the dense brute force (type 1 and type 2)") {
    Rng rng(31);
    for (auto [rows, cols] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {2, 3}, {3, 3}}) {
        ProblemInstance inst(GridDims(rows, cols), PuzzleType::Type1);
        CompatibilityTable t = random_sym_compat(PuzzleType::Type1, inst.n(), rng);
        CoefficientView cv(inst, t);
        Labeling lab = random_interior_labeling(inst, rng);
        SupportMatrix fast = support(lab, cv);
        SupportMatrix slow = ref::support_dense(lab, cv);
        for (int i = 0; i < lab.n; ++i)
            for (int lam = 0; lam < lab.m; ++lam)
                CHECK(std::abs(fast.at(i, lam) - slow.at(i, lam)) <= 1e-12);
    }
    ProblemInstance inst2(GridDims(2, 2), PuzzleType::Type2);
    CompatibilityTable t2 = random_sym_compat(PuzzleType::Type2, 4, rng);
    CoefficientView cv2(inst2, t2);
    Labeling lab2 = random_interior_labeling(inst2, rng);
    SupportMatrix fast2 = support(lab2, cv2);
    SupportMatrix slow2 = ref::support_dense(lab2, cv2);
    for (int i = 0; i < lab2.n; ++i)
        for (int lam = 0; lam < lab2.m; ++lam)
            CHECK(std::abs(fast2.at(i, lam) - slow2.at(i, lam)) <= 1e-12);
}

TEST_CASE("support: zero table gives zero support; linearity holds") {
    ProblemInstance inst(GridDims(2, 2), PuzzleType::Type1);
    CompatibilityTable zero = empty_compat(PuzzleType::Type1, 4);
    CoefficientView cv0(inst, zero);
    Labeling lab = uniform_labeling(inst);
    for (double v : support(lab, cv0).v) CHECK(v == 0.0);

    Rng rng(8);
    CompatibilityTable t = random_sym_compat(PuzzleType::Type1, 4, rng);
    CoefficientView cv(inst, t);
    Labeling a = random_interior_labeling(inst, rng);
    Labeling b = random_interior_labeling(inst, rng);
    double w = 0.3;
    Labeling mix = a;
    for (std::size_t k = 0; k < mix.p.size(); ++k) mix.p[k] = w * a.p[k] + (1 - w) * b.p[k];
    SupportMatrix qa = support(a, cv), qb = support(b, cv), qm = support(mix, cv);
    for (std::size_t k = 0; k < qm.v.size(); ++k)
        CHECK(qm.v[k] == doctest::Approx(w * qa.v[k] + (1 - w) * qb.v[k]).epsilon(1e-9));
}

TEST_CASE("update: hand rows, fixed points, zero denominator") {
    Labeling lab;
    lab.n = 3;
    lab.m = 2;
    lab.p = {1.0, 0.0, 0.5, 0.5, 0.5, 0.5};
    lab.anchor_label.assign(3, -1);
    lab.position_owner.assign(2, -1);
    SupportMatrix q(3, 2);
    q.at(0, 0) = 2.0;
    q.at(0, 1) = 7.0;
    q.at(1, 0) = 2.0;
    q.at(1, 1) = 1.0;
    q.at(2, 0) = 0.0;
    q.at(2, 1) = 0.0;

    update(lab, q);
    CHECK(lab.at(0, 0) == 1.0);  // binary rows cannot move
    CHECK(lab.at(0, 1) == 0.0);
    CHECK(lab.at(1, 0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(lab.at(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(lab.at(2, 0) == 0.5);  // zero denominator: untouched
    CHECK(lab.at(2, 1) == 0.5);
}

TEST_CASE("update: uniform row with equal supports stays uniform") {
    Labeling lab;
    lab.n = 1;
    lab.m = 4;
    lab.p.assign(4, 0.25);
    lab.anchor_label.assign(1, -1);
    lab.position_owner.assign(4, -1);
    SupportMatrix q(1, 4);
    for (int lam = 0; lam < 4; ++lam) q.at(0, lam) = 3.7;
    update(lab, q);
    for (int lam = 0; lam < 4; ++lam) CHECK(lab.at(0, lam) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("update preserves row stochasticity") {
    Rng rng(12);
    ProblemInstance inst(GridDims(3, 3), PuzzleType::Type1);
    CompatibilityTable t = random_sym_compat(PuzzleType::Type1, 9, rng);
    CoefficientView cv(inst, t);
    Labeling lab = random_interior_labeling(inst, rng);
    for (int it = 0; it < 5; ++it) {
        SupportMatrix q = support(lab, cv);
        update(lab, q);
        for (int i = 0; i < lab.n; ++i) {
            double s = 0;
            for (int lam = 0; lam < lab.m; ++lam) {
                s += lab.at(i, lam);
                CHECK(lab.at(i, lam) >= 0.0);
            }
            CHECK(std::abs(s - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("alc: zero support, hand example, permutation oracle") {
    ProblemInstance inst(GridDims(1, 2), PuzzleType::Type1);
    CompatibilityTable t = empty_compat(PuzzleType::Type1, 2);
    CoefficientView cv0(inst, t);
    Labeling lab = uniform_labeling(inst);
    CHECK(alc(lab, support(lab, cv0)) == 0.0);

    const double c = 0.9;
    set_sym(t, 0, 1, Relation::Right, c);
    CoefficientView cv(inst, t);
    double a = alc(lab, support(lab, cv));
    CHECK(a == doctest::Approx(oracle_alc(lab, cv)).epsilon(1e-12));
    CHECK(a == doctest::Approx(c / 2).epsilon(1e-12));

    // permutation labeling: twice the sum of realized adjacent compatibilities
    ProblemInstance i22(GridDims(2, 2), PuzzleType::Type1);
    Rng rng(3);
    CompatibilityTable t22 = random_sym_compat(PuzzleType::Type1, 4, rng);
    CoefficientView cv22(i22, t22);
    Labeling perm = uniform_labeling(i22);
    for (int i = 0; i < 4; ++i)
        for (int lam = 0; lam < 4; ++lam) perm.at(i, lam) = i == lam ? 1.0 : 0.0;
    double seams = t22.at(0, 1, Relation::Right) + t22.at(2, 3, Relation::Right) +
                   t22.at(0, 2, Relation::Down) + t22.at(1, 3, Relation::Down);
    double a22 = alc(perm, support(perm, cv22));
    CHECK(a22 == doctest::Approx(2.0 * seams).epsilon(1e-12));
    CHECK(a22 == doctest::Approx(oracle_alc(perm, cv22)).epsilon(1e-12));
}

TEST_CASE("one update step never decreases the ALC") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        int rows = 1 + rng.next_int(3), cols = 1 + rng.next_int(3);
        if (rows * cols < 2) cols = 2;
        ProblemInstance inst(GridDims(rows, cols), PuzzleType::Type1);
        CompatibilityTable t = random_sym_compat(PuzzleType::Type1, inst.n(), rng);
        CoefficientView cv(inst, t);
        Labeling lab = random_interior_labeling(inst, rng);
        SupportMatrix q = support(lab, cv);
        double before = alc(lab, q);
        Labeling next = lab;
        update(next, q);
        double after = alc(next, support(next, cv));
        CHECK(after - before >= -1e-12);
        double disp = 0;
        for (std::size_t k = 0; k < lab.p.size(); ++k)
            disp = std::max(disp, std::abs(lab.p[k] - next.p[k]));
        if (disp > 1e-9) CHECK(after > before);
    }
}

TEST_CASE("run_phase with zero coefficients converges immediately to a fallback") {
    ProblemInstance inst(GridDims(2, 2), PuzzleType::Type1);
    CompatibilityTable t = empty_compat(PuzzleType::Type1, 4);
    CoefficientView cv(inst, t);
    std::vector<char> allowed(4, 1);
    PhaseOutcome out = run_phase(uniform_labeling(inst), cv, {}, allowed);
    CHECK(out.reason == StopReason::Converged);
    CHECK(out.iterations == 1);
    CHECK(out.fallback);
    REQUIRE(out.candidates.size() == 1);
    CHECK(out.candidates[0].object == 0);  // tie-break: lowest object, lowest label
    CHECK(out.candidates[0].label == 0);
    CHECK(out.alc_value == 0.0);
}

TEST_CASE("run_phase: engineered 3x3 anchors the center piece first") {
    GridDims dims(3, 3);
    ProblemInstance inst(dims, PuzzleType::Type1);
    CompatibilityTable t = testsupport::identity_compat(dims, 0.05);
    CoefficientView cv(inst, t);
    std::vector<char> allowed(9, 1);
    PhaseConfig cfg;  // epsilon 1e-4, alpha 0.7
    PhaseOutcome out = run_phase(uniform_labeling(inst), cv, cfg, allowed);

    CHECK(out.reason == StopReason::ThresholdHit);
    CHECK_FALSE(out.fallback);
    CHECK(out.iterations <= 10);
    const Candidate& best = out.candidates.front();
    CHECK(best.object == 4);  // center piece b5
    CHECK(best.label == inst.label_index({{2, 2}, Orientation::Deg0}));
    CHECK(best.p >= cfg.alpha);

    // the anchoring intervention then yields the documented structure
    Labeling lab = std::move(out.labeling);
    anchor(lab, best.object, inst.label_of_index(best.label), inst);
    for (int i = 0; i < 9; ++i)
        for (int lam = 0; lam < 9; ++lam) {
            double v = lab.at(i, lam);
            if (i == 4)
                CHECK(v == (lam == best.label ? 1.0 : 0.0));
            else
                CHECK(v == (lam == best.label ? 0.0 : 1.0 / 8));
        }
}

TEST_CASE("run_phase leaves anchored rows and zeroed columns invariant") {
    GridDims dims(3, 3);
    ProblemInstance inst(dims, PuzzleType::Type1);
    Rng rng(5);
    CompatibilityTable t = random_sym_compat(PuzzleType::Type1, 9, rng);
    CoefficientView cv(inst, t);

    Labeling lab = uniform_labeling(inst);
    anchor(lab, 4, {{2, 2}, Orientation::Deg0}, inst);
    anchor(lab, 1, {{2, 3}, Orientation::Deg0}, inst);

    std::vector<char> allowed(9, 0);
    for (int pos = 0; pos < 9; ++pos)
        if (!lab.position_anchored(pos) && adjacent_to_anchored(lab, inst.pos_of_index(pos), inst))
            allowed[std::size_t(pos)] = 1;

    PhaseOutcome out = run_phase(lab, cv, {}, allowed);
    const Labeling& fin = out.labeling;
    CHECK(fin.at(4, inst.label_index({{2, 2}, Orientation::Deg0})) == 1.0);
    CHECK(fin.at(1, inst.label_index({{2, 3}, Orientation::Deg0})) == 1.0);
    for (int i = 0; i < 9; ++i) {
        if (i != 4) CHECK(fin.at(i, inst.label_index({{2, 2}, Orientation::Deg0})) == 0.0);
        if (i != 1) CHECK(fin.at(i, inst.label_index({{2, 3}, Orientation::Deg0})) == 0.0);
    }
    // candidates never point at an anchored position
    for (const Candidate& c : out.candidates)
        CHECK(allowed[std::size_t(c.label / inst.orientations())] == 1);
}

TEST_CASE("masked phase step equals the public kernels") {
    Rng rng(21);
    for (int trial = 0; trial < 6; ++trial) {
        PuzzleType type = trial % 2 == 0 ? PuzzleType::Type1 : PuzzleType::Type2;
        GridDims dims = type == PuzzleType::Type1 ? GridDims(3, 3) : GridDims(2, 2);
        ProblemInstance inst(dims, type);
        CompatibilityTable t = random_sym_compat(type, inst.n(), rng);
        CoefficientView cv(inst, t);

        Labeling lab = uniform_labeling(inst);
        Orientation th = type == PuzzleType::Type2 ? Orientation::Deg90 : Orientation::Deg0;
        anchor(lab, 0, {{1, 1}, Orientation::Deg0}, inst);
        if (trial >= 2) anchor(lab, 2, {{1, 2}, th}, inst);

        std::vector<char> allowed(std::size_t(inst.n()), 0);
        for (int pos = 0; pos < inst.n(); ++pos)
            if (!lab.position_anchored(pos) &&
                adjacent_to_anchored(lab, inst.pos_of_index(pos), inst))
                allowed[std::size_t(pos)] = 1;

        // one masked iteration
        PhaseConfig cfg;
        cfg.max_iterations = 1;
        cfg.alpha = 1.0;  // keep the threshold out of the way
        PhaseOutcome out = run_phase(lab, cv, cfg, allowed);

        // same step through the public kernels
        Labeling manual = lab;
        SupportMatrix q = support(manual, cv);
        update(manual, q);
        for (std::size_t k = 0; k < manual.p.size(); ++k)
            CHECK(out.labeling.p[k] == doctest::Approx(manual.p[k]).epsilon(1e-12));
        double a = alc(manual, support(manual, cv));
        CHECK(out.alc_value == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("sinkhorn balancing") {
    ProblemInstance inst(GridDims(2, 2), PuzzleType::Type1);
    Labeling perm = uniform_labeling(inst);
    for (int i = 0; i < 4; ++i)
        for (int lam = 0; lam < 4; ++lam) perm.at(i, lam) = i == lam ? 1.0 : 0.0;
    Labeling balanced = sinkhorn_balance(perm, 100, 1e-12);
    for (int i = 0; i < 4; ++i)
        for (int lam = 0; lam < 4; ++lam) CHECK(balanced.at(i, lam) == perm.at(i, lam));

    Labeling uni = uniform_labeling(inst);
    Labeling ubal = sinkhorn_balance(uni, 100, 1e-12);
    for (double v : ubal.p) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    // positive random 3x3
    ProblemInstance i33(GridDims(1, 3), PuzzleType::Type1);
    Rng rng(4);
    Labeling r = uniform_labeling(i33);
    for (double& v : r.p) v = 0.05 + rng.next_double();
    Labeling b = sinkhorn_balance(r, 1000, 1e-8);
    for (int i = 0; i < 3; ++i) {
        double rs = 0, cs = 0;
        for (int j = 0; j < 3; ++j) {
            rs += b.at(i, j);
            cs += b.at(j, i);
        }
        CHECK(std::abs(rs - 1.0) <= 1e-6);
        CHECK(std::abs(cs - 1.0) <= 1e-6);
    }
}

TEST_CASE("phase config validation") {
    PhaseConfig bad;
    bad.alpha = 0.4;
    CHECK_THROWS(bad.validate());
    bad.alpha = 0.7;
    bad.epsilon = 0.0;
    CHECK_THROWS(bad.validate());
    bad.epsilon = 1e-4;
    bad.max_iterations = 0;
    CHECK_THROWS(bad.validate());
}
