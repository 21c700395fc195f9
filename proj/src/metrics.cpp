#include "mprl/metrics.hpp"

#include <stdexcept>
#include <unordered_set>

namespace mprl {

namespace {

void check_dims(const Solution& sol, const GroundTruth& gt) {
    if (!(sol.dims == gt.dims) || sol.placement.size() != gt.placement.size())
        throw std::invalid_argument("metrics: solution and ground truth dims differ");
}

// position (1-based row-major index) -> piece, from a placement list
std::vector<int> position_to_piece(const std::vector<Placement>& placement, GridDims dims) {
    std::vector<int> grid(std::size_t(dims.cells()), -1);
    for (std::size_t i = 0; i < placement.size(); ++i) {
        const Placement& pl = placement[i];
        grid[std::size_t((pl.row - 1) * dims.cols + (pl.col - 1))] = int(i);
    }
    return grid;
}

std::uint64_t pack_pair(int a, int b, Relation rel_in_a_frame, int dth) {
    return (std::uint64_t(std::uint32_t(a)) << 34) | (std::uint64_t(std::uint32_t(b)) << 4) |
           std::uint64_t(int(rel_in_a_frame) << 2) | std::uint64_t(dth);
}

// Directed pair triple in the first piece's frame: relation and orientation
// difference as seen after rotating the scene so the first piece sits at 0deg.
std::uint64_t pair_key(int a, Orientation tha, int b, Orientation thb, Relation rel) {
    Relation rel_rot = Relation((int(rel) - int(tha) + 4) % 4);
    int dth = (int(thb) - int(tha) + 4) % 4;
    return pack_pair(a, b, rel_rot, dth);
}

}  // namespace

double direct_comparison(const Solution& sol, const GroundTruth& gt) {
    check_dims(sol, gt);
    int hits = 0;
    for (std::size_t i = 0; i < sol.placement.size(); ++i) {
        const Placement& s = sol.placement[i];
        const Placement& g = gt.placement[i];
        bool same_pos = s.row == g.row && s.col == g.col;
        bool same_th = gt.type == PuzzleType::Type1 || s.orientation == g.orientation;
        if (same_pos && same_th) ++hits;
    }
    return double(hits) / double(sol.placement.size());
}

double neighbor_comparison(const Solution& sol, const GroundTruth& gt) {
    check_dims(sol, gt);
    const GridDims d = sol.dims;
    const int seams = d.rows * (d.cols - 1) + (d.rows - 1) * d.cols;
    if (seams == 0) return 1.0;  // single piece: vacuously perfect

    std::vector<int> gt_grid = position_to_piece(gt.placement, d);
    std::unordered_set<std::uint64_t> gt_pairs;
    for (int pos = 0; pos < d.cells(); ++pos) {
        Pos p{pos / d.cols + 1, pos % d.cols + 1};
        for (Relation rel : {Relation::Right, Relation::Down}) {
            Pos q = step(p, rel);
            if (!in_grid(q, d)) continue;
            int u = gt_grid[std::size_t(pos)];
            int v = gt_grid[std::size_t((q.x - 1) * d.cols + (q.y - 1))];
            Orientation tu = gt.placement[std::size_t(u)].orientation;
            Orientation tv = gt.placement[std::size_t(v)].orientation;
            gt_pairs.insert(pair_key(u, tu, v, tv, rel));
            gt_pairs.insert(pair_key(v, tv, u, tu, opposite(rel)));
        }
    }

    std::vector<int> sol_grid = position_to_piece(sol.placement, d);
    int hits = 0;
    for (int pos = 0; pos < d.cells(); ++pos) {
        Pos p{pos / d.cols + 1, pos % d.cols + 1};
        for (Relation rel : {Relation::Right, Relation::Down}) {
            Pos q = step(p, rel);
            if (!in_grid(q, d)) continue;
            int u = sol_grid[std::size_t(pos)];
            int v = sol_grid[std::size_t((q.x - 1) * d.cols + (q.y - 1))];
            Orientation tu = sol.placement[std::size_t(u)].orientation;
            Orientation tv = sol.placement[std::size_t(v)].orientation;
            if (gt_pairs.count(pair_key(u, tu, v, tv, rel))) ++hits;
        }
    }
    return double(hits) / double(seams);
}

Solution rotate_solution(const Solution& sol, Orientation rot) {
    Solution out = sol;
    if (rot == Orientation::Deg0) return out;
    const int n = sol.dims.rows, m = sol.dims.cols;
    if (rot != Orientation::Deg180) out.dims = GridDims(m, n);
    for (std::size_t i = 0; i < sol.placement.size(); ++i) {
        const Placement& pl = sol.placement[i];
        Placement& o = out.placement[i];
        switch (rot) {
            case Orientation::Deg90: o.row = pl.col, o.col = n + 1 - pl.row; break;
            case Orientation::Deg180: o.row = n + 1 - pl.row, o.col = m + 1 - pl.col; break;
            case Orientation::Deg270: o.row = m + 1 - pl.col, o.col = pl.row; break;
            default: break;
        }
        o.orientation = compose(pl.orientation, rot);
    }
    return out;
}

Scores best_rotation_scores(const Solution& sol, const GroundTruth& gt) {
    std::vector<Orientation> rotations = {Orientation::Deg0};
    if (gt.type == PuzzleType::Type2) {
        rotations.push_back(Orientation::Deg180);
        if (sol.dims.rows == sol.dims.cols) {
            rotations.push_back(Orientation::Deg90);
            rotations.push_back(Orientation::Deg270);
        }
    }
    Scores best;
    bool have = false;
    for (Orientation rot : rotations) {
        Solution r = rotate_solution(sol, rot);
        Scores s;
        s.rotation = rot;
        s.dc = direct_comparison(r, gt);
        s.nc = neighbor_comparison(r, gt);
        s.pr = s.dc == 1.0;
        if (!have || s.dc > best.dc) {
            best = s;
            have = true;
        }
    }
    return best;
}

bool perfect_reconstruction(const Solution& sol, const GroundTruth& gt) {
    return best_rotation_scores(sol, gt).pr;
}

}  // namespace mprl
