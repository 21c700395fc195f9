#pragma once

#include <cstdint>

#include "mprl/image.hpp"

namespace testsupport {

// Deterministic multi-scale random field, one spectrum per channel. Every
// neighborhood is distinct and gradients are smooth, which gives boundary
// statistics the same character as photographic content.
mprl::Image8 synth_natural_image(int height, int width, std::uint64_t seed);

// Same field, with the top `band_rows` rows replaced by one exactly constant
// color (a saturated-sky stand-in).
mprl::Image8 synth_natural_image_with_sky(int height, int width, std::uint64_t seed,
                                          int band_rows);

// Top-left crop.
mprl::Image8 crop(const mprl::Image8& img, int height, int width);

}  // namespace testsupport
