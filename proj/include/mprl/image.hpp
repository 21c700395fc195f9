#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mprl/core.hpp"

namespace mprl {

// Interleaved 8-bit RGB raster.
struct Image8 {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> rgb;  // height*width*3, row-major

    Image8() = default;
    Image8(int h, int w) : height(h), width(w), rgb(std::size_t(h) * w * 3, 0) {}

    std::uint8_t& at(int r, int c, int ch) { return rgb[(std::size_t(r) * width + c) * 3 + ch]; }
    std::uint8_t at(int r, int c, int ch) const {
        return rgb[(std::size_t(r) * width + c) * 3 + ch];
    }
    bool operator==(const Image8&) const = default;
};

// Decodes PNG or JPEG to 8-bit RGB; alpha is discarded. Throws
// std::runtime_error on unreadable input.
Image8 load_image_rgb(const std::string& path);

// Lossless PNG. The file is written to a temporary name and renamed, so
// readers never observe a partial file.
void save_png_rgb(const Image8& img, const std::string& path);

// Exact pixel permutation; four applications of Deg90 restore the input.
Image8 rotate_cw(const Image8& img, Orientation by);

}  // namespace mprl
