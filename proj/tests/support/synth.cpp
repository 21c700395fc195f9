#include "support/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mprl/rng.hpp"

namespace testsupport {

using mprl::Image8;
using mprl::Rng;

Image8 synth_natural_image(int height, int width, std::uint64_t seed) {
    Rng rng(seed);
    struct Wave {
        double fx, fy, phase, amp;
    };
    const double pi = 3.14159265358979323846;

    std::vector<std::vector<double>> field(3, std::vector<double>(std::size_t(height) * width, 0.0));
    for (int ch = 0; ch < 3; ++ch) {
        std::vector<Wave> waves;
        for (int k = 0; k < 14; ++k) {
            // wavelengths log-uniform between ~6 and ~300 px, 1/f-ish amplitudes
            double lambda = 6.0 * std::pow(50.0, rng.next_double());
            double angle = 2.0 * pi * rng.next_double();
            double f = 2.0 * pi / lambda;
            waves.push_back({f * std::cos(angle), f * std::sin(angle),
                             2.0 * pi * rng.next_double(), std::sqrt(lambda)});
        }
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                double v = 0.0;
                for (const Wave& w : waves) v += w.amp * std::cos(w.fx * c + w.fy * r + w.phase);
                field[std::size_t(ch)][std::size_t(r) * width + c] = v;
            }
    }

    Image8 img(height, width);
    for (int ch = 0; ch < 3; ++ch) {
        auto& f = field[std::size_t(ch)];
        double mean = 0.0;
        for (double v : f) mean += v;
        mean /= double(f.size());
        double var = 0.0;
        for (double v : f) var += (v - mean) * (v - mean);
        double sd = std::sqrt(var / double(f.size()));
        if (sd == 0.0) sd = 1.0;
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                double z = (f[std::size_t(r) * width + c] - mean) / sd;
                int v = int(std::lround(128.0 + 52.0 * z));
                img.at(r, c, ch) = std::uint8_t(std::clamp(v, 0, 255));
            }
    }
    return img;
}

Image8 synth_natural_image_with_sky(int height, int width, std::uint64_t seed, int band_rows) {
    Image8 img = synth_natural_image(height, width, seed);
    for (int r = 0; r < std::min(band_rows, height); ++r)
        for (int c = 0; c < width; ++c) {
            img.at(r, c, 0) = 251;
            img.at(r, c, 1) = 251;
            img.at(r, c, 2) = 253;
        }
    return img;
}

Image8 crop(const Image8& img, int height, int width) {
    Image8 out(height, width);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = img.at(r, c, ch);
    return out;
}

}  // namespace testsupport
