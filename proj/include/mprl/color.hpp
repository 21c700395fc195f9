#pragma once

#include <cstdint>

namespace mprl {

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

// sRGB (8-bit, IEC 61966-2-1 transfer function) -> linear RGB -> XYZ (D65
// reference white) -> CIE L*a*b*. Constants are listed in docs/formats.md.
Lab srgb_to_cielab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace mprl
