#pragma once

#include <vector>

#include "mprl/color.hpp"
#include "mprl/core.hpp"
#include "mprl/image.hpp"

namespace mprl {

// Square piece raster in CIELAB, channels interleaved (L*, a*, b*). Channel
// ranges are the usual L* in [0,100], a*/b* roughly in [-128,128]; values are
// not clamped.
struct PieceRaster {
    int size = 0;  // side length P in pixels
    std::vector<double> lab;  // size*size*3, row-major

    PieceRaster() = default;
    explicit PieceRaster(int p) : size(p), lab(std::size_t(p) * p * 3, 0.0) {}

    double& at(int r, int c, int ch) { return lab[(std::size_t(r) * size + c) * 3 + ch]; }
    double at(int r, int c, int ch) const { return lab[(std::size_t(r) * size + c) * 3 + ch]; }
};

struct PieceSet {
    int piece_size = 0;
    std::vector<PieceRaster> pieces;
    std::vector<char> constant_flags;  // filled by detect_constant_pieces
};

PieceRaster to_cielab(const Image8& piece);

// Exact value permutation; the four rotations form a group.
PieceRaster rotate_cw(const PieceRaster& piece, Orientation by);

// Cuts dims.rows x dims.cols pieces of side `piece_size`, row-major, starting
// at the top-left corner; excess pixels on the right/bottom are cropped.
// The returned order is the ground-truth order (piece k sits at row-major
// position k). Throws if the image is smaller than the requested grid.
PieceSet cut_image(const Image8& img, GridDims dims, int piece_size);

// flag[i] true iff every channel of piece i varies by at most tol (CIELAB
// units). Use ~0.5 for photographic sources (JPEG noise), 1e-6 for synthetic.
std::vector<char> detect_constant_pieces(const PieceSet& set, double tol);

}  // namespace mprl
