// Timings for the two data-parallel kernels against their serial references:
// dissimilarity table construction and the RL support computation.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "mprl/engine.hpp"
#include "mprl/mgc.hpp"
#include "mprl/rng.hpp"

using namespace mprl;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

PieceSet random_pieces(int count, int side, Rng& rng) {
    PieceSet set;
    set.piece_size = side;
    for (int i = 0; i < count; ++i) {
        PieceRaster p(side);
        for (double& v : p.lab) v = 60.0 * rng.next_double();
        set.pieces.push_back(std::move(p));
    }
    set.constant_flags.assign(std::size_t(count), 0);
    return set;
}

}  // namespace

int main() {
    const int max_threads = omp_get_max_threads();
    Rng rng(1);

    std::printf("kernel benchmark (max threads: %d)\n\n", max_threads);

    {
        PieceSet set = random_pieces(48, 28, rng);
        double serial = time_of([&] { ref::build_dissimilarity_table(set, PuzzleType::Type1); }, 2);
        omp_set_num_threads(1);
        double one = time_of([&] { build_dissimilarity_table(set, PuzzleType::Type1); }, 2);
        omp_set_num_threads(max_threads);
        double par = time_of([&] { build_dissimilarity_table(set, PuzzleType::Type1); }, 2);
        std::printf("dissimilarity table, 48 pieces of 28px (type 1)\n");
        std::printf("  reference (per-pair, serial) : %8.3f ms\n", serial * 1e3);
        std::printf("  shared-stats builder, 1 thread: %8.3f ms\n", one * 1e3);
        std::printf("  shared-stats builder, %d threads: %7.3f ms  (x%.2f vs 1 thread)\n\n",
                    max_threads, par * 1e3, one / par);
    }

    {
        GridDims dims(8, 8);
        ProblemInstance inst(dims, PuzzleType::Type1);
        PieceSet set = random_pieces(dims.cells(), 12, rng);
        DissimilarityTable d = build_dissimilarity_table(set, PuzzleType::Type1);
        CompatibilityTable table = build_compatibility(d, Measure::RankedPercentile, 3.0);
        CoefficientView cv(inst, table);
        Labeling lab = uniform_labeling(inst);

        double dense = time_of([&] { ref::support_dense(lab, cv); }, 2);
        omp_set_num_threads(1);
        double one = time_of([&] { support(lab, cv); }, 20);
        omp_set_num_threads(max_threads);
        double par = time_of([&] { support(lab, cv); }, 20);
        std::printf("support, 8x8 type 1 (n=64, m=64)\n");
        std::printf("  reference (dense double sum) : %8.3f ms\n", dense * 1e3);
        std::printf("  sparse kernel, 1 thread      : %8.3f ms  (x%.1f vs dense)\n", one * 1e3,
                    dense / one);
        std::printf("  sparse kernel, %d threads     : %8.3f ms  (x%.2f vs 1 thread)\n",
                    max_threads, par * 1e3, one / par);
    }

    return 0;
}
