#pragma once

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mprl {

// Grid positions are 1-based (row x, col y) to match the usual matrix-style
// puzzle diagrams. Serialized files use 0-based indices; the conversion is
// confined to the bundle I/O layer.

struct GridDims {
    int rows = 1;  // N
    int cols = 1;  // M

    GridDims() = default;
    GridDims(int r, int c) : rows(r), cols(c) {
        if (r < 1 || c < 1) throw std::invalid_argument("grid dims must be >= 1");
    }
    int cells() const { return rows * cols; }
    bool operator==(const GridDims&) const = default;
};

// 4-neighborhood spatial relation: "b_j placed in relation R to b_i".
// The enum order is chosen so that rotating the scene clockwise by k
// quarter-turns maps relation r to (r + k) mod 4.
enum class Relation : int { Right = 0, Down = 1, Left = 2, Up = 3 };

constexpr std::array<Relation, 4> kRelations = {Relation::Right, Relation::Down,
                                                Relation::Left, Relation::Up};

constexpr Relation opposite(Relation r) { return Relation((int(r) + 2) % 4); }

// Clockwise rotation in quarter-turns.
enum class Orientation : int { Deg0 = 0, Deg90 = 1, Deg180 = 2, Deg270 = 3 };

constexpr std::array<Orientation, 4> kOrientations = {
    Orientation::Deg0, Orientation::Deg90, Orientation::Deg180, Orientation::Deg270};

constexpr Orientation compose(Orientation a, Orientation b) {
    return Orientation((int(a) + int(b)) % 4);
}
constexpr Orientation inverse(Orientation a) { return Orientation((4 - int(a)) % 4); }
constexpr int degrees(Orientation a) { return 90 * int(a); }

// Relation seen after rotating the scene clockwise by `by`.
constexpr Relation rotated(Relation r, Orientation by) {
    return Relation((int(r) + int(by)) % 4);
}

struct Pos {
    int x = 1;  // row, 1..N
    int y = 1;  // col, 1..M
    bool operator==(const Pos&) const = default;
};

inline bool in_grid(Pos p, GridDims d) {
    return p.x >= 1 && p.x <= d.rows && p.y >= 1 && p.y <= d.cols;
}

inline Pos step(Pos p, Relation r) {
    switch (r) {
        case Relation::Right: return {p.x, p.y + 1};
        case Relation::Down: return {p.x + 1, p.y};
        case Relation::Left: return {p.x, p.y - 1};
        case Relation::Up: return {p.x - 1, p.y};
    }
    return p;
}

// In-grid 4-neighborhood of p, each with the relation from p, enumerated in
// Right, Down, Left, Up order.
inline std::vector<std::pair<Pos, Relation>> neighbors(Pos p, GridDims d) {
    std::vector<std::pair<Pos, Relation>> out;
    out.reserve(4);
    for (Relation r : kRelations) {
        Pos q = step(p, r);
        if (in_grid(q, d)) out.emplace_back(q, r);
    }
    return out;
}

struct Label {
    Pos pos;
    Orientation orientation = Orientation::Deg0;  // fixed Deg0 for Type 1
    bool operator==(const Label&) const = default;
};

enum class PuzzleType : int { Type1 = 1, Type2 = 2 };

// Objects are puzzle pieces; labels are grid positions (Type 1) or
// position/orientation pairs (Type 2). Label enumeration is position-major
// (row-major positions), orientations contiguous per position, so labeling
// matrices are comparable across runs.
struct ProblemInstance {
    GridDims dims;
    PuzzleType type = PuzzleType::Type1;

    ProblemInstance() = default;
    ProblemInstance(GridDims d, PuzzleType t) : dims(d), type(t) {}

    int n() const { return dims.cells(); }
    int orientations() const { return type == PuzzleType::Type2 ? 4 : 1; }
    int m() const { return n() * orientations(); }

    int pos_index(Pos p) const { return (p.x - 1) * dims.cols + (p.y - 1); }
    Pos pos_of_index(int idx) const { return {idx / dims.cols + 1, idx % dims.cols + 1}; }

    int label_index(Label l) const {
        return pos_index(l.pos) * orientations() + int(l.orientation);
    }
    Label label_of_index(int idx) const {
        int k = orientations();
        return {pos_of_index(idx / k), Orientation(idx % k)};
    }
};

}  // namespace mprl
