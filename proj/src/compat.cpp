#include "mprl/compat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "mprl/rng.hpp"

namespace mprl {

RelationStats make_relation_stats(const DissimilarityTable& d, int a, Relation r, double k) {
    RelationStats st;
    std::vector<std::pair<double, int>> vals;
    vals.reserve(static_cast<std::size_t>(d.atoms));
    for (int b = 0; b < d.atoms; ++b) {
        if (d.same_piece(a, b)) continue;
        vals.emplace_back(d.at(a, b, r), b);
    }
    std::sort(vals.begin(), vals.end());  // ties resolved by atom index
    st.sorted.reserve(vals.size());
    st.rank_by_atom.assign(std::size_t(d.atoms), -1);
    for (std::size_t rank = 0; rank < vals.size(); ++rank) {
        st.sorted.push_back(vals[rank].first);
        st.rank_by_atom[std::size_t(vals[rank].second)] = int(rank);
    }
    st.quartile = nearest_rank_value(st.sorted, 25.0);
    st.prefix_avg = percentile_avg(st.sorted, k);
    return st;
}

int rank_phi(const RelationStats& st, int atom_j) {
    int r = st.rank_by_atom[std::size_t(atom_j)];
    if (r < 0) throw std::invalid_argument("rank_phi: not a candidate");
    return r;
}

namespace {

std::size_t prefix_count(std::size_t count, double k) {
    if (k <= 0.0 || k > 100.0) throw std::invalid_argument("percentile k must be in (0,100]");
    auto c = std::size_t(std::ceil(k / 100.0 * double(count)));
    return std::clamp<std::size_t>(c, 1, count);
}

}  // namespace

double nearest_rank_value(const std::vector<double>& sorted_vals, double k) {
    if (sorted_vals.empty()) throw std::invalid_argument("empty value list");
    return sorted_vals[prefix_count(sorted_vals.size(), k) - 1];
}

double percentile_avg(const std::vector<double>& sorted_vals, double k) {
    if (sorted_vals.empty()) throw std::invalid_argument("empty value list");
    std::size_t c = prefix_count(sorted_vals.size(), k);
    double sum = std::accumulate(sorted_vals.begin(), sorted_vals.begin() + std::ptrdiff_t(c), 0.0);
    return sum / double(c);
}

double compat_ranked_percentile(double d, int phi, double prefix_avg) {
    if (d == 0.0 && prefix_avg == 0.0) return 1.0;
    if (d <= prefix_avg && prefix_avg > 0.0) {
        if (phi == 0) return 1.0;  // includes the 0^0 := 1 convention
        return std::pow(1.0 - d / prefix_avg, double(phi));
    }
    return 0.0;
}

double compat_quartile_exp(double d, int phi, double quartile) {
    if (quartile > 0.0) return std::exp(-double(phi) - d / quartile);
    return d == 0.0 ? std::exp(-double(phi)) : 0.0;
}

RawCompatibility build_raw_compatibility(const DissimilarityTable& d, Measure measure, double k) {
    RawCompatibility raw;
    raw.type = d.type;
    raw.pieces = d.pieces;
    raw.atoms = d.atoms;
    raw.measure = measure;
    raw.k = k;
    for (auto& plane : raw.rel) plane.assign(std::size_t(d.atoms) * d.atoms, 0.0);

    #pragma omp parallel for schedule(static)
    for (int a = 0; a < d.atoms; ++a)
        for (Relation r : kRelations) {
            RelationStats st = make_relation_stats(d, a, r, k);
            double* out = raw.rel[int(r)].data() + std::size_t(d.atoms) * a;
            for (int b = 0; b < d.atoms; ++b) {
                if (d.same_piece(a, b)) continue;
                int phi = st.rank_by_atom[std::size_t(b)];
                double dv = d.at(a, b, r);
                out[b] = measure == Measure::RankedPercentile
                             ? compat_ranked_percentile(dv, phi, st.prefix_avg)
                             : compat_quartile_exp(dv, phi, st.quartile);
            }
        }
    return raw;
}

CompatibilityTable symmetrize(const RawCompatibility& raw) {
    CompatibilityTable t;
    t.type = raw.type;
    t.pieces = raw.pieces;
    t.atoms = raw.atoms;
    t.measure = raw.measure;
    t.k = raw.k;
    const std::size_t A = std::size_t(raw.atoms);
    for (auto& plane : t.rel) plane.assign(A * A, 0.0);
    for (int a = 0; a < raw.atoms; ++a)
        for (int b = 0; b < raw.atoms; ++b) {
            double v_r = 0.5 * (raw.at(a, b, Relation::Right) + raw.at(b, a, Relation::Left));
            double v_d = 0.5 * (raw.at(a, b, Relation::Down) + raw.at(b, a, Relation::Up));
            t.rel[int(Relation::Right)][A * a + b] = v_r;
            t.rel[int(Relation::Left)][A * b + a] = v_r;
            t.rel[int(Relation::Down)][A * a + b] = v_d;
            t.rel[int(Relation::Up)][A * b + a] = v_d;
        }
    return t;
}

CompatibilityTable build_compatibility(const DissimilarityTable& d, Measure measure, double k) {
    return symmetrize(build_raw_compatibility(d, measure, k));
}

double constant_redraw_value(double u01) { return std::max(0.0, -4.0 + 5.0 * u01); }

void adjust_constant(CompatibilityTable& table, const std::vector<char>& constant_flags,
                     std::uint64_t seed) {
    int constant_pieces = 0;
    for (char f : constant_flags) constant_pieces += f ? 1 : 0;
    if (constant_pieces <= 2) return;

    std::vector<int> constant_atoms;
    for (int pc = 0; pc < table.pieces; ++pc) {
        if (!constant_flags[std::size_t(pc)]) continue;
        int k = table.type == PuzzleType::Type2 ? 4 : 1;
        for (int t = 0; t < k; ++t) constant_atoms.push_back(pc * k + t);
    }

    const std::size_t A = std::size_t(table.atoms);
    Rng rng(seed);
    // The affected set is decided on the pre-redraw values; one draw covers a
    // symmetric entry pair, in a fixed (relation, a, b) order.
    for (Relation r : {Relation::Right, Relation::Down}) {
        std::vector<std::pair<int, int>> affected;
        for (int a = 0; a < table.atoms; ++a)
            for (int b = 0; b < table.atoms; ++b) {
                if (table.same_piece(a, b)) continue;
                for (int kc : constant_atoms) {
                    if (table.same_piece(kc, a) || table.same_piece(kc, b)) continue;
                    if (table.at(a, kc, r) == 1.0 && table.at(kc, b, r) == 1.0) {
                        affected.emplace_back(a, b);
                        break;
                    }
                }
            }
        std::vector<double>& plane = table.rel[int(r)];
        std::vector<double>& mirror = table.rel[int(opposite(r))];
        for (auto [a, b] : affected) {
            double v = constant_redraw_value(rng.next_double());
            plane[A * a + b] = v;
            mirror[A * b + a] = v;
        }
    }
}

void dump_compatibility(const CompatibilityTable& table, const std::string& path) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    std::FILE* f = std::fopen(tmp.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    auto put_i32 = [&](std::int32_t v) { std::fwrite(&v, sizeof v, 1, f); };
    std::fwrite("MPRLCMP1", 1, 8, f);
    put_i32(std::int32_t(table.type));
    put_i32(table.pieces);
    put_i32(table.atoms);
    put_i32(std::int32_t(table.measure));
    std::fwrite(&table.k, sizeof table.k, 1, f);
    for (int a = 0; a < table.atoms; ++a)
        for (int b = 0; b < table.atoms; ++b)
            for (Relation r : kRelations) {
                double v = table.at(a, b, r);
                std::fwrite(&v, sizeof v, 1, f);
            }
    std::fclose(f);
    std::filesystem::rename(tmp, target);
}

}  // namespace mprl
