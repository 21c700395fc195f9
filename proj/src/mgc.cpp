#include "mprl/mgc.hpp"

#include <omp.h>

#include <array>
#include <stdexcept>

namespace mprl {

namespace {

struct GradStats {
    double mean[3] = {0, 0, 0};
    double icov[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
};

// Mean over the raw samples; covariance over the deviations from that mean
// augmented with the zero gradient and the three unit gradients, then
// S' = S + 1e-6 I. The augmentation bounds the condition number on constant
// regions without shifting the mean, so exact gradient continuations still
// score zero.
GradStats fit_stats(const std::vector<std::array<double, 3>>& samples) {
    GradStats st;
    const int k = int(samples.size());
    if (k > 0) {
        for (const auto& s : samples)
            for (int c = 0; c < 3; ++c) st.mean[c] += s[c];
        for (int c = 0; c < 3; ++c) st.mean[c] /= k;
    }
    double cov[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    for (const auto& s : samples) {
        double d[3] = {s[0] - st.mean[0], s[1] - st.mean[1], s[2] - st.mean[2]};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) cov[a * 3 + b] += d[a] * d[b];
    }
    double denom = k + 4.0;  // zero gradient + three unit gradients
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double v = cov[a * 3 + b] + (a == b ? 1.0 : 0.0);
            cov[a * 3 + b] = v / denom + (a == b ? 1e-6 : 0.0);
        }

    // 3x3 inverse via adjugate; the matrix is positive definite by
    // construction, so det > 0.
    double det = cov[0] * (cov[4] * cov[8] - cov[5] * cov[7]) -
                 cov[1] * (cov[3] * cov[8] - cov[5] * cov[6]) +
                 cov[2] * (cov[3] * cov[7] - cov[4] * cov[6]);
    double inv_det = 1.0 / det;
    st.icov[0] = (cov[4] * cov[8] - cov[5] * cov[7]) * inv_det;
    st.icov[1] = (cov[2] * cov[7] - cov[1] * cov[8]) * inv_det;
    st.icov[2] = (cov[1] * cov[5] - cov[2] * cov[4]) * inv_det;
    st.icov[3] = (cov[5] * cov[6] - cov[3] * cov[8]) * inv_det;
    st.icov[4] = (cov[0] * cov[8] - cov[2] * cov[6]) * inv_det;
    st.icov[5] = (cov[2] * cov[3] - cov[0] * cov[5]) * inv_det;
    st.icov[6] = (cov[3] * cov[7] - cov[4] * cov[6]) * inv_det;
    st.icov[7] = (cov[1] * cov[6] - cov[0] * cov[7]) * inv_det;
    st.icov[8] = (cov[0] * cov[4] - cov[1] * cov[3]) * inv_det;
    return st;
}

inline double quad_form(const GradStats& st, double g0, double g1, double g2) {
    double d0 = g0 - st.mean[0], d1 = g1 - st.mean[1], d2 = g2 - st.mean[2];
    return d0 * (st.icov[0] * d0 + st.icov[1] * d1 + st.icov[2] * d2) +
           d1 * (st.icov[3] * d0 + st.icov[4] * d1 + st.icov[5] * d2) +
           d2 * (st.icov[6] * d0 + st.icov[7] * d1 + st.icov[8] * d2);
}

// Predicted gradient distributions at a piece's vertical boundary columns,
// for use as the left or the right piece of a horizontal seam.
struct EdgeModel {
    GradStats left_across, left_along;    // as left piece: last column
    GradStats right_across, right_along;  // as right piece: first column
};

EdgeModel build_edge_model(const PieceRaster& pc) {
    const int p = pc.size;
    std::vector<std::array<double, 3>> across, along;
    across.reserve(static_cast<std::size_t>(p));
    along.reserve(static_cast<std::size_t>(p));

    EdgeModel em;
    // last column, gradients pointing out to the right
    if (p >= 2) {
        for (int r = 0; r < p; ++r)
            across.push_back({pc.at(r, p - 1, 0) - pc.at(r, p - 2, 0),
                              pc.at(r, p - 1, 1) - pc.at(r, p - 2, 1),
                              pc.at(r, p - 1, 2) - pc.at(r, p - 2, 2)});
    }
    for (int r = 0; r + 1 < p; ++r)
        along.push_back({pc.at(r + 1, p - 1, 0) - pc.at(r, p - 1, 0),
                         pc.at(r + 1, p - 1, 1) - pc.at(r, p - 1, 1),
                         pc.at(r + 1, p - 1, 2) - pc.at(r, p - 1, 2)});
    em.left_across = fit_stats(across);
    em.left_along = fit_stats(along);

    // first column, gradients pointing out to the left
    across.clear();
    along.clear();
    if (p >= 2) {
        for (int r = 0; r < p; ++r)
            across.push_back({pc.at(r, 0, 0) - pc.at(r, 1, 0), pc.at(r, 0, 1) - pc.at(r, 1, 1),
                              pc.at(r, 0, 2) - pc.at(r, 1, 2)});
    }
    for (int r = 0; r + 1 < p; ++r)
        along.push_back({pc.at(r + 1, 0, 0) - pc.at(r, 0, 0), pc.at(r + 1, 0, 1) - pc.at(r, 0, 1),
                         pc.at(r + 1, 0, 2) - pc.at(r, 0, 2)});
    em.right_across = fit_stats(across);
    em.right_along = fit_stats(along);
    return em;
}

// D for "b to the right of a": seam gradients scored under a's last-column
// model plus the mirrored term under b's first-column model.
double mgc_right(const PieceRaster& a, const PieceRaster& b, const EdgeModel& ma,
                 const EdgeModel& mb) {
    const int p = a.size;
    double d = 0.0;
    for (int r = 0; r < p; ++r) {
        double g0 = b.at(r, 0, 0) - a.at(r, p - 1, 0);
        double g1 = b.at(r, 0, 1) - a.at(r, p - 1, 1);
        double g2 = b.at(r, 0, 2) - a.at(r, p - 1, 2);
        d += quad_form(ma.left_across, g0, g1, g2);
        d += quad_form(mb.right_across, -g0, -g1, -g2);
    }
    for (int r = 0; r + 1 < p; ++r) {
        // along-boundary continuation: each side's seam column is scored
        // under the other side's along-gradient distribution
        d += quad_form(ma.left_along, b.at(r + 1, 0, 0) - b.at(r, 0, 0),
                       b.at(r + 1, 0, 1) - b.at(r, 0, 1), b.at(r + 1, 0, 2) - b.at(r, 0, 2));
        d += quad_form(mb.right_along, a.at(r + 1, p - 1, 0) - a.at(r, p - 1, 0),
                       a.at(r + 1, p - 1, 1) - a.at(r, p - 1, 1),
                       a.at(r + 1, p - 1, 2) - a.at(r, p - 1, 2));
    }
    return d;
}

Orientation reduction_turn(Relation r) {
    switch (r) {
        case Relation::Right: return Orientation::Deg0;
        case Relation::Down: return Orientation::Deg270;
        case Relation::Left: return Orientation::Deg180;
        case Relation::Up: return Orientation::Deg90;
    }
    return Orientation::Deg0;
}

}  // namespace

double mgc_dissimilarity(const PieceRaster& bi, const PieceRaster& bj, Relation r) {
    if (bi.size != bj.size) throw std::invalid_argument("piece sizes differ");
    Orientation turn = reduction_turn(r);
    if (turn == Orientation::Deg0) {
        EdgeModel ma = build_edge_model(bi), mb = build_edge_model(bj);
        return mgc_right(bi, bj, ma, mb);
    }
    PieceRaster a = rotate_cw(bi, turn), b = rotate_cw(bj, turn);
    EdgeModel ma = build_edge_model(a), mb = build_edge_model(b);
    return mgc_right(a, b, ma, mb);
}

DissimilarityTable build_dissimilarity_table(const PieceSet& set, PuzzleType type) {
    const int n = int(set.pieces.size());
    if (n < 2) throw std::invalid_argument("need at least 2 pieces");

    DissimilarityTable t;
    t.type = type;
    t.pieces = n;

    if (type == PuzzleType::Type1) {
        t.atoms = n;
        t.right.assign(std::size_t(n) * n, 0.0);
        t.down.assign(std::size_t(n) * n, 0.0);
        std::vector<PieceRaster> ccw(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) ccw[i] = rotate_cw(set.pieces[i], Orientation::Deg270);
        std::vector<EdgeModel> m0(static_cast<std::size_t>(n)), m3(static_cast<std::size_t>(n));
        #pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            m0[i] = build_edge_model(set.pieces[i]);
            m3[i] = build_edge_model(ccw[i]);
        }
        #pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                t.right[std::size_t(n) * i + j] =
                    mgc_right(set.pieces[i], set.pieces[j], m0[i], m0[j]);
                t.down[std::size_t(n) * i + j] = mgc_right(ccw[i], ccw[j], m3[i], m3[j]);
            }
        return t;
    }

    const int a = 4 * n;
    t.atoms = a;
    t.right.assign(std::size_t(a) * a, 0.0);
    std::vector<PieceRaster> rot(static_cast<std::size_t>(a));
    std::vector<EdgeModel> models(static_cast<std::size_t>(a));
    #pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int th = 0; th < 4; ++th) {
            rot[i * 4 + th] = rotate_cw(set.pieces[i], Orientation(th));
            models[i * 4 + th] = build_edge_model(rot[i * 4 + th]);
        }
    #pragma omp parallel for schedule(static)
    for (int ai = 0; ai < a; ++ai)
        for (int bj = 0; bj < a; ++bj) {
            if (ai / 4 == bj / 4) continue;
            t.right[std::size_t(a) * ai + bj] = mgc_right(rot[ai], rot[bj], models[ai], models[bj]);
        }
    return t;
}

namespace ref {

DissimilarityTable build_dissimilarity_table(const PieceSet& set, PuzzleType type) {
    const int n = int(set.pieces.size());
    if (n < 2) throw std::invalid_argument("need at least 2 pieces");
    DissimilarityTable t;
    t.type = type;
    t.pieces = n;
    if (type == PuzzleType::Type1) {
        t.atoms = n;
        t.right.assign(std::size_t(n) * n, 0.0);
        t.down.assign(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                t.right[std::size_t(n) * i + j] =
                    mgc_dissimilarity(set.pieces[i], set.pieces[j], Relation::Right);
                t.down[std::size_t(n) * i + j] =
                    mgc_dissimilarity(set.pieces[i], set.pieces[j], Relation::Down);
            }
        return t;
    }
    const int a = 4 * n;
    t.atoms = a;
    t.right.assign(std::size_t(a) * a, 0.0);
    for (int ai = 0; ai < a; ++ai)
        for (int bj = 0; bj < a; ++bj) {
            if (ai / 4 == bj / 4) continue;
            t.right[std::size_t(a) * ai + bj] =
                mgc_dissimilarity(rotate_cw(set.pieces[ai / 4], Orientation(ai % 4)),
                                  rotate_cw(set.pieces[bj / 4], Orientation(bj % 4)),
                                  Relation::Right);
        }
    return t;
}

}  // namespace ref

}  // namespace mprl
