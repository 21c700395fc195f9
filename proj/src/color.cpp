#include "mprl/color.hpp"

#include <cmath>

namespace mprl {

namespace {

double srgb_to_linear(std::uint8_t c8) {
    double c = c8 / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double cube = 216.0 / 24389.0;  // (6/29)^3
    constexpr double scale = 841.0 / 108.0;   // (29/6)^2 / 3
    return t > cube ? std::cbrt(t) : scale * t + 4.0 / 29.0;
}

}  // namespace

Lab srgb_to_cielab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    double r = srgb_to_linear(r8), g = srgb_to_linear(g8), b = srgb_to_linear(b8);

    // sRGB -> XYZ, D65 white
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    double fx = lab_f(x / 0.95047);
    double fy = lab_f(y / 1.00000);
    double fz = lab_f(z / 1.08883);

    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

}  // namespace mprl
