#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mprl {

// splitmix64 stream. A fixed algorithm keeps seeded runs byte-reproducible
// across compilers; std::uniform_* distributions are implementation-defined
// and would not be.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, bound), bound > 0. Modulo bias is < 1e-15 for any bound
    // used in this project.
    int next_int(int bound) { return int(next_u64() % std::uint64_t(bound)); }

    // independent stream for a named purpose, derived from the current state
    Rng fork(std::uint64_t tag) const {
        Rng r(state_ ^ (0x632be59bd9b4e019ULL * (tag + 1)));
        r.next_u64();
        return r;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = int(v.size()) - 1; i > 0; --i)
            std::swap(v[std::size_t(i)], v[std::size_t(next_int(i + 1))]);
    }

private:
    std::uint64_t state_;
};

}  // namespace mprl
