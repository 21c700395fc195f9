#include "mprl/pieces.hpp"

#include <algorithm>
#include <stdexcept>

namespace mprl {

PieceRaster to_cielab(const Image8& piece) {
    PieceRaster out(piece.height);
    if (piece.height != piece.width) throw std::invalid_argument("piece must be square");
    for (int r = 0; r < piece.height; ++r)
        for (int c = 0; c < piece.width; ++c) {
            Lab v = srgb_to_cielab(piece.at(r, c, 0), piece.at(r, c, 1), piece.at(r, c, 2));
            out.at(r, c, 0) = v.L;
            out.at(r, c, 1) = v.a;
            out.at(r, c, 2) = v.b;
        }
    return out;
}

PieceRaster rotate_cw(const PieceRaster& piece, Orientation by) {
    if (by == Orientation::Deg0) return piece;
    PieceRaster cur = piece;
    const int p = piece.size;
    for (int k = 0; k < int(by); ++k) {
        PieceRaster next(p);
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c)
                for (int ch = 0; ch < 3; ++ch) next.at(r, c, ch) = cur.at(p - 1 - c, r, ch);
        cur = std::move(next);
    }
    return cur;
}

PieceSet cut_image(const Image8& img, GridDims dims, int piece_size) {
    if (piece_size < 1) throw std::invalid_argument("piece size must be positive");
    if (img.height < dims.rows * piece_size || img.width < dims.cols * piece_size)
        throw std::invalid_argument("image too small for requested grid");
    PieceSet set;
    set.piece_size = piece_size;
    set.pieces.reserve(static_cast<std::size_t>(dims.cells()));
    for (int gr = 0; gr < dims.rows; ++gr)
        for (int gc = 0; gc < dims.cols; ++gc) {
            Image8 block(piece_size, piece_size);
            for (int r = 0; r < piece_size; ++r)
                for (int c = 0; c < piece_size; ++c)
                    for (int ch = 0; ch < 3; ++ch)
                        block.at(r, c, ch) =
                            img.at(gr * piece_size + r, gc * piece_size + c, ch);
            set.pieces.push_back(to_cielab(block));
        }
    set.constant_flags.assign(set.pieces.size(), 0);
    return set;
}

std::vector<char> detect_constant_pieces(const PieceSet& set, double tol) {
    std::vector<char> flags(set.pieces.size(), 0);
    for (std::size_t i = 0; i < set.pieces.size(); ++i) {
        const PieceRaster& pc = set.pieces[i];
        bool constant = true;
        for (int ch = 0; ch < 3 && constant; ++ch) {
            double lo = pc.at(0, 0, ch), hi = lo;
            for (int r = 0; r < pc.size; ++r)
                for (int c = 0; c < pc.size; ++c) {
                    double v = pc.at(r, c, ch);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            if (hi - lo > tol) constant = false;
        }
        flags[i] = constant ? 1 : 0;
    }
    return flags;
}

}  // namespace mprl
