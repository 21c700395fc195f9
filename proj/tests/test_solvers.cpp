#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "mprl/baseline.hpp"
#include "mprl/metrics.hpp"
#include "mprl/pipeline.hpp"
#include "mprl/rng.hpp"
#include "support/synth.hpp"
#include "support/tables.hpp"

using namespace mprl;
using testsupport::identity_compat;
using testsupport::random_sym_compat;

namespace {

GroundTruth identity_gt(GridDims dims, PuzzleType type) {
    GroundTruth gt;
    gt.type = type;
    gt.dims = dims;
    for (int x = 1; x <= dims.rows; ++x)
        for (int y = 1; y <= dims.cols; ++y) gt.placement.push_back({x, y, Orientation::Deg0});
    return gt;
}

// Sum of symmetric compatibilities over the seams realized by a placement.
double placement_score(const std::vector<Placement>& placement, GridDims dims,
                       const CompatibilityTable& t) {
    std::vector<int> grid(std::size_t(dims.cells()), -1);
    for (std::size_t i = 0; i < placement.size(); ++i)
        grid[std::size_t((placement[i].row - 1) * dims.cols + placement[i].col - 1)] = int(i);
    double sum = 0;
    for (int pos = 0; pos < dims.cells(); ++pos) {
        Pos p{pos / dims.cols + 1, pos % dims.cols + 1};
        for (Relation rel : {Relation::Right, Relation::Down}) {
            Pos q = step(p, rel);
            if (!in_grid(q, dims)) continue;
            int a = grid[std::size_t(pos)];
            int b = grid[std::size_t((q.x - 1) * dims.cols + q.y - 1)];
            sum += t.at(t.atom(a, placement[std::size_t(a)].orientation),
                        t.atom(b, placement[std::size_t(b)].orientation), rel);
        }
    }
    return sum;
}

// Exhaustive search over all n! Type 1 placements.
double brute_force_best(GridDims dims, const CompatibilityTable& t) {
    const int n = dims.cells();
    std::vector<int> pos_of(static_cast<std::size_t>(n));
    std::iota(pos_of.begin(), pos_of.end(), 0);
    double best = -1;
    do {
        std::vector<Placement> placement(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            placement[std::size_t(i)] = {pos_of[std::size_t(i)] / dims.cols + 1,
                                         pos_of[std::size_t(i)] % dims.cols + 1,
                                         Orientation::Deg0};
        best = std::max(best, placement_score(placement, dims, t));
    } while (std::next_permutation(pos_of.begin(), pos_of.end()));
    return best;
}

}  // namespace

TEST_CASE("type 1 solver reconstructs unique-match synthetic tables up to 4x4") {
    for (auto [rows, cols] :
         std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}}) {
        GridDims dims(rows, cols);
        ProblemInstance inst(dims, PuzzleType::Type1);
        CompatibilityTable t = identity_compat(dims);
        Solution sol = solve_type1(t, inst, {});
        GroundTruth gt = identity_gt(dims, PuzzleType::Type1);
        CHECK(direct_comparison(sol, gt) == 1.0);
        CHECK(sol.diag.phases == dims.cells());
    }
}

TEST_CASE("branch structure: 2x2 forks four ways, 1x2 forks two ways") {
    {
        GridDims dims(2, 2);
        ProblemInstance inst(dims, PuzzleType::Type1);
        Solution sol = solve_type1(identity_compat(dims), inst, {});
        CHECK(sol.diag.branches == 4);  // both axes hit the dilemma at the first anchor
    }
    {
        GridDims dims(1, 2);
        ProblemInstance inst(dims, PuzzleType::Type1);
        Solution sol = solve_type1(identity_compat(dims), inst, {});
        CHECK(sol.diag.branches == 2);  // the length-1 axis is already resolved
    }
}

TEST_CASE("2x2 image puzzle: perfect and brute-force optimal") {
    Image8 img = testsupport::synth_natural_image(56, 56, 2024);
    PieceSet set = cut_image(img, GridDims(2, 2), 28);
    set.constant_flags = detect_constant_pieces(set, 1e-6);

    RunConfig cfg;
    GridDims dims(2, 2);
    CompatibilityTable t = build_piece_compatibility(set, PuzzleType::Type1, cfg);
    ProblemInstance inst(dims, PuzzleType::Type1);
    Solution sol = solve_type1(t, inst, {});

    GroundTruth gt = identity_gt(dims, PuzzleType::Type1);
    CHECK(direct_comparison(sol, gt) == 1.0);
    CHECK(placement_score(sol.placement, dims, t) ==
          doctest::Approx(brute_force_best(dims, t)).epsilon(1e-9));
}

TEST_CASE("solver score vs exhaustive optimum on random 2x3 tables (gap reported)") {
    Rng rng(6);
    GridDims dims(2, 3);
    ProblemInstance inst(dims, PuzzleType::Type1);
    double worst_gap = 0;
    for (int trial = 0; trial < 5; ++trial) {
        CompatibilityTable t = random_sym_compat(PuzzleType::Type1, 6, rng);
        Solution sol = solve_type1(t, inst, {});
        double got = placement_score(sol.placement, dims, t);
        double best = brute_force_best(dims, t);
        CHECK(got <= best + 1e-9);
        worst_gap = std::max(worst_gap, (best - got) / best);
    }
    // heuristic: the gap is measured, not asserted to be zero
    MESSAGE("worst relative optimality gap over 5 random 2x3 tables: ", worst_gap);
}

TEST_CASE("candidate ordering rule") {
    Candidate a{3, 5, 0.9, 1.0}, b{7, 2, 0.8, 2.0};
    CHECK(candidate_before(a, b));
    Candidate c{3, 5, 0.9, 2.0};
    CHECK(candidate_before(c, a));  // higher q wins at equal p
    Candidate d{2, 9, 0.9, 1.0};
    CHECK(candidate_before(d, a));  // lower object at equal (p, q)
    Candidate e{3, 4, 0.9, 1.0};
    CHECK(candidate_before(e, a));  // lower label last
}

TEST_CASE("select_anchor_piece prefers the best-connected piece") {
    CompatibilityTable t = testsupport::empty_compat(PuzzleType::Type1, 4);
    // piece 2 holds a perfect partner on each of its four sides; the partners
    // only inherit one or two good sides through symmetry
    testsupport::set_sym(t, 2, 0, Relation::Right, 1.0);
    testsupport::set_sym(t, 2, 1, Relation::Left, 1.0);
    testsupport::set_sym(t, 2, 3, Relation::Down, 1.0);
    testsupport::set_sym(t, 2, 0, Relation::Up, 1.0);
    CHECK(select_anchor_piece(t) == 2);

    // all-equal table: ties resolve to the first piece
    CompatibilityTable flat = testsupport::empty_compat(PuzzleType::Type1, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (a != b) {
                testsupport::set_sym(flat, a, b, Relation::Right, 0.5);
                testsupport::set_sym(flat, a, b, Relation::Down, 0.5);
            }
    CHECK(select_anchor_piece(flat) == 0);

    // brute-force oracle on a random table
    Rng rng(9);
    CompatibilityTable r = random_sym_compat(PuzzleType::Type2, 5, rng);
    int expect = -1;
    double best_sum = -1;
    for (int i = 0; i < 5; ++i) {
        double sum = 0;
        for (Relation rel : kRelations) {
            double side = 0;
            for (int th = 0; th < 4; ++th)
                for (int b = 0; b < r.atoms; ++b)
                    if (!r.same_piece(i * 4, b)) side = std::max(side, r.at(i * 4 + th, b, rel));
            sum += side;
        }
        if (sum > best_sum) {
            best_sum = sum;
            expect = i;
        }
    }
    CHECK(select_anchor_piece(r) == expect);
}

TEST_CASE("type 2 initial labeling") {
    ProblemInstance inst(GridDims(2, 2), PuzzleType::Type2);
    Labeling lab = init_labeling_type2(inst, 1, Orientation::Deg90);
    for (int i = 0; i < 4; ++i) {
        double s = 0;
        for (int lam = 0; lam < 16; ++lam) s += lab.at(i, lam);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int pos = 0; pos < 4; ++pos)
        for (int th = 0; th < 4; ++th)
            CHECK(lab.at(1, pos * 4 + th) == (th == 1 ? 0.25 : 0.0));
    for (int lam = 0; lam < 16; ++lam) CHECK(lab.at(0, lam) == 1.0 / 16);
}

TEST_CASE("type 2 solver: rotated pieces of a textured image, perfect up to rotation") {
    Image8 img = testsupport::synth_natural_image(48, 48, 31337);
    GridDims dims(3, 3);
    PieceSet cutset = cut_image(img, dims, 16);

    // simulate unknown orientations: rotate each piece by a known amount
    Rng rng(555);
    PieceSet shuffled;
    shuffled.piece_size = 16;
    GroundTruth gt;
    gt.type = PuzzleType::Type2;
    gt.dims = dims;
    for (int i = 0; i < 9; ++i) {
        Orientation applied = Orientation(rng.next_int(4));
        shuffled.pieces.push_back(rotate_cw(cutset.pieces[std::size_t(i)], applied));
        gt.placement.push_back({i / 3 + 1, i % 3 + 1, inverse(applied)});
    }
    shuffled.constant_flags = detect_constant_pieces(shuffled, 1e-6);

    RunConfig cfg;
    Solution sol = solve_pieces(shuffled, dims, PuzzleType::Type2, cfg);
    CHECK(sol.diag.runs == 1);  // square grid: single run
    Scores s = best_rotation_scores(sol, gt);
    CHECK(s.pr);
    CHECK(s.dc == 1.0);
    CHECK(s.nc == 1.0);

    // the bias piece ends up at its bias orientation
    CHECK(degrees(sol.placement[std::size_t(sol.diag.anchor_piece)].orientation) ==
          sol.diag.theta1_degrees);
}

TEST_CASE("type 2 rectangular grids run twice") {
    Image8 img = testsupport::synth_natural_image(32, 48, 99);
    GridDims dims(2, 3);
    PieceSet set = cut_image(img, dims, 16);
    set.constant_flags = detect_constant_pieces(set, 1e-6);
    RunConfig cfg;
    Solution sol = solve_pieces(set, dims, PuzzleType::Type2, cfg);
    CHECK(sol.diag.runs == 2);
    CHECK(sol.dims == dims);
    // feasibility: every position occupied exactly once
    std::vector<char> used(6, 0);
    for (const Placement& pl : sol.placement) {
        int pos = (pl.row - 1) * 3 + pl.col - 1;
        CHECK(!used[std::size_t(pos)]);
        used[std::size_t(pos)] = 1;
    }
}

TEST_CASE("balanced baseline produces a feasible permutation") {
    Image8 img = testsupport::synth_natural_image(48, 48, 4);
    GridDims dims(3, 3);
    PieceSet set = cut_image(img, dims, 16);
    set.constant_flags = detect_constant_pieces(set, 1e-6);
    RunConfig cfg;
    Solution sol = solve_pieces_balanced(set, dims, cfg);
    std::vector<char> used(9, 0);
    for (const Placement& pl : sol.placement) {
        int pos = (pl.row - 1) * 3 + pl.col - 1;
        CHECK(!used[std::size_t(pos)]);
        used[std::size_t(pos)] = 1;
    }
    CHECK(sol.alc >= 0.0);
}

TEST_CASE("solver determinism: same table, same outcome") {
    Rng rng(13);
    GridDims dims(3, 3);
    ProblemInstance inst(dims, PuzzleType::Type1);
    CompatibilityTable t = random_sym_compat(PuzzleType::Type1, 9, rng);
    Solution a = solve_type1(t, inst, {});
    Solution b = solve_type1(t, inst, {});
    CHECK(a.placement == b.placement);
    CHECK(a.alc == b.alc);
    CHECK(a.diag.branch == b.diag.branch);
}
