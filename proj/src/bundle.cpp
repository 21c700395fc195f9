#include "mprl/bundle.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "mprl/rng.hpp"

using nlohmann::json;

namespace mprl {

namespace {

constexpr char kManifestFile[] = "manifest.json";
constexpr char kGroundTruthFile[] = "ground_truth.json";

void write_text_atomic(const std::filesystem::path& file, const std::string& text) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + file.string());
        out << text;
    }
    std::filesystem::rename(tmp, file);
}

json load_json(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed JSON in " + file.string() + ": " + e.what());
    }
    return j;
}

json placements_to_json(const std::vector<Placement>& placement) {
    json arr = json::array();
    for (std::size_t i = 0; i < placement.size(); ++i) {
        const Placement& pl = placement[i];
        arr.push_back({{"piece", i},
                       {"row", pl.row - 1},
                       {"col", pl.col - 1},
                       {"orientation", degrees(pl.orientation)}});
    }
    return arr;
}

std::vector<Placement> placements_from_json(const json& arr, int n) {
    std::vector<Placement> out(static_cast<std::size_t>(n));
    std::vector<char> seen(std::size_t(n), 0);
    for (const json& e : arr) {
        int piece = e.at("piece").get<int>();
        if (piece < 0 || piece >= n || seen[std::size_t(piece)])
            throw std::runtime_error("placement list is not a bijection over pieces");
        seen[std::size_t(piece)] = 1;
        int deg = e.at("orientation").get<int>();
        if (deg % 90 != 0 || deg < 0 || deg >= 360)
            throw std::runtime_error("orientation must be one of 0/90/180/270");
        out[std::size_t(piece)] = {e.at("row").get<int>() + 1, e.at("col").get<int>() + 1,
                                   Orientation(deg / 90)};
    }
    for (char s : seen)
        if (!s) throw std::runtime_error("placement list is missing pieces");
    return out;
}

void check_placements(const std::vector<Placement>& placement, GridDims dims) {
    std::vector<char> used(std::size_t(dims.cells()), 0);
    for (const Placement& pl : placement) {
        if (pl.row < 1 || pl.row > dims.rows || pl.col < 1 || pl.col > dims.cols)
            throw std::runtime_error("placement outside the grid");
        int pos = (pl.row - 1) * dims.cols + (pl.col - 1);
        if (used[std::size_t(pos)]) throw std::runtime_error("two pieces on one position");
        used[std::size_t(pos)] = 1;
    }
}

}  // namespace

std::string measure_name(Measure m) {
    return m == Measure::RankedPercentile ? "percentile" : "quartile";
}

Measure measure_from_name(const std::string& name) {
    if (name == "percentile") return Measure::RankedPercentile;
    if (name == "quartile") return Measure::QuartileExp;
    throw std::runtime_error("unknown measure: " + name + " (use percentile|quartile)");
}

PuzzleBundle generate_bundle(const Image8& image, GridDims dims, int piece_size, PuzzleType type,
                             std::uint64_t seed, const std::filesystem::path& out_dir,
                             double constancy_tol) {
    const int n = dims.cells();
    if (image.height < dims.rows * piece_size || image.width < dims.cols * piece_size)
        throw std::runtime_error("image too small for requested grid");

    std::filesystem::create_directories(out_dir);

    // row-major blocks; right/bottom excess is cropped
    std::vector<Image8> blocks;
    blocks.reserve(static_cast<std::size_t>(n));
    for (int gr = 0; gr < dims.rows; ++gr)
        for (int gc = 0; gc < dims.cols; ++gc) {
            Image8 block(piece_size, piece_size);
            for (int r = 0; r < piece_size; ++r)
                for (int c = 0; c < piece_size; ++c)
                    for (int ch = 0; ch < 3; ++ch)
                        block.at(r, c, ch) =
                            image.at(gr * piece_size + r, gc * piece_size + c, ch);
            blocks.push_back(std::move(block));
        }

    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[std::size_t(i)] = i;
    rng.fork(0x5u).shuffle(order);  // presentation index -> original position

    Rng rot_rng = rng.fork(0x6u);
    PuzzleBundle bundle;
    bundle.dir = out_dir;
    bundle.manifest.type = type;
    bundle.manifest.dims = dims;
    bundle.manifest.piece_size = piece_size;
    bundle.manifest.seed = seed;
    bundle.manifest.constancy_tol = constancy_tol;

    std::vector<Placement> gt(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        int orig = order[std::size_t(k)];
        Orientation applied = Orientation::Deg0;
        if (type == PuzzleType::Type2) applied = Orientation(rot_rng.next_int(4));
        Image8 img = rotate_cw(blocks[std::size_t(orig)], applied);

        char name[32];
        std::snprintf(name, sizeof name, "piece_%04d.png", k);
        save_png_rgb(img, (out_dir / name).string());
        bundle.manifest.piece_files.push_back(name);
        // the orientation a solver must assign to restore the original view
        gt[std::size_t(k)] = {orig / dims.cols + 1, orig % dims.cols + 1, inverse(applied)};
    }

    json manifest = {{"format_version", bundle.manifest.format_version},
                     {"puzzle_type", int(type)},
                     {"rows", dims.rows},
                     {"cols", dims.cols},
                     {"piece_size", piece_size},
                     {"seed", seed},
                     {"constancy_tol", constancy_tol},
                     {"pieces", bundle.manifest.piece_files}};
    write_text_atomic(out_dir / kManifestFile, manifest.dump(2) + "\n");

    json gt_json = {{"format_version", 1}, {"placements", placements_to_json(gt)}};
    write_text_atomic(out_dir / kGroundTruthFile, gt_json.dump(2) + "\n");
    return bundle;
}

PuzzleBundle load_bundle(const std::filesystem::path& dir) {
    json j = load_json(dir / kManifestFile);
    PuzzleBundle b;
    b.dir = dir;
    b.manifest.format_version = j.at("format_version").get<int>();
    if (b.manifest.format_version != 1)
        throw std::runtime_error("unsupported manifest format_version");
    int type = j.at("puzzle_type").get<int>();
    if (type != 1 && type != 2) throw std::runtime_error("puzzle_type must be 1 or 2");
    b.manifest.type = PuzzleType(type);
    b.manifest.dims = GridDims(j.at("rows").get<int>(), j.at("cols").get<int>());
    b.manifest.piece_size = j.at("piece_size").get<int>();
    b.manifest.seed = j.at("seed").get<std::uint64_t>();
    b.manifest.constancy_tol = j.at("constancy_tol").get<double>();
    b.manifest.piece_files = j.at("pieces").get<std::vector<std::string>>();
    if (int(b.manifest.piece_files.size()) != b.manifest.dims.cells())
        throw std::runtime_error("piece count does not match the grid");
    for (const std::string& f : b.manifest.piece_files)
        if (!std::filesystem::exists(dir / f))
            throw std::runtime_error("missing piece file: " + f);
    return b;
}

PieceSet load_pieces(const PuzzleBundle& bundle) {
    PieceSet set;
    set.piece_size = bundle.manifest.piece_size;
    for (const std::string& f : bundle.manifest.piece_files) {
        Image8 img = load_image_rgb((bundle.dir / f).string());
        if (img.height != set.piece_size || img.width != set.piece_size)
            throw std::runtime_error("piece has wrong size: " + f);
        set.pieces.push_back(to_cielab(img));
    }
    set.constant_flags = detect_constant_pieces(set, bundle.manifest.constancy_tol);
    return set;
}

bool has_ground_truth(const PuzzleBundle& bundle) {
    return std::filesystem::exists(bundle.dir / kGroundTruthFile);
}

GroundTruth load_ground_truth(const PuzzleBundle& bundle) {
    json j = load_json(bundle.dir / kGroundTruthFile);
    GroundTruth gt;
    gt.type = bundle.manifest.type;
    gt.dims = bundle.manifest.dims;
    gt.placement = placements_from_json(j.at("placements"), gt.dims.cells());
    check_placements(gt.placement, gt.dims);
    return gt;
}

void save_solution(const Solution& sol, const RunConfig& cfg, const std::filesystem::path& file) {
    json j = {{"format_version", 1},
              {"puzzle_type", int(sol.type)},
              {"rows", sol.dims.rows},
              {"cols", sol.dims.cols},
              {"alc", sol.alc},
              {"config",
               {{"epsilon", cfg.epsilon},
                {"alpha", cfg.alpha},
                {"k", cfg.resolved_k(sol.type)},
                {"measure", measure_name(cfg.measure)},
                {"seed", cfg.seed}}},
              {"placements", placements_to_json(sol.placement)},
              {"diagnostics",
               {{"phases", sol.diag.phases},
                {"iterations", sol.diag.iterations},
                {"translations", sol.diag.translations},
                {"branches", sol.diag.branches},
                {"branch", sol.diag.branch},
                {"fallback_anchors", sol.diag.fallback_anchors},
                {"threshold_stops", sol.diag.threshold_stops},
                {"converged_stops", sol.diag.converged_stops},
                {"maxiter_stops", sol.diag.maxiter_stops},
                {"runs", sol.diag.runs},
                {"anchor_piece", sol.diag.anchor_piece},
                {"theta1_degrees", sol.diag.theta1_degrees}}}};
    write_text_atomic(file, j.dump(2) + "\n");
}

Solution load_solution(const std::filesystem::path& file) {
    json j = load_json(file);
    if (j.at("format_version").get<int>() != 1)
        throw std::runtime_error("unsupported solution format_version");
    Solution sol;
    sol.type = PuzzleType(j.at("puzzle_type").get<int>());
    sol.dims = GridDims(j.at("rows").get<int>(), j.at("cols").get<int>());
    sol.alc = j.at("alc").get<double>();
    sol.placement = placements_from_json(j.at("placements"), sol.dims.cells());
    check_placements(sol.placement, sol.dims);
    if (j.contains("diagnostics")) {
        const json& d = j["diagnostics"];
        sol.diag.phases = d.value("phases", 0);
        sol.diag.iterations = d.value("iterations", 0LL);
        sol.diag.translations = d.value("translations", 0);
        sol.diag.branches = d.value("branches", 1);
        sol.diag.branch = d.value("branch", std::string());
        sol.diag.fallback_anchors = d.value("fallback_anchors", 0);
        sol.diag.threshold_stops = d.value("threshold_stops", 0);
        sol.diag.converged_stops = d.value("converged_stops", 0);
        sol.diag.maxiter_stops = d.value("maxiter_stops", 0);
        sol.diag.runs = d.value("runs", 1);
        sol.diag.anchor_piece = d.value("anchor_piece", -1);
        sol.diag.theta1_degrees = d.value("theta1_degrees", 0);
    }
    return sol;
}

Image8 render_solution(const Solution& sol, const PuzzleBundle& bundle) {
    const int p = bundle.manifest.piece_size;
    if (int(sol.placement.size()) != bundle.manifest.dims.cells() ||
        !(sol.dims == bundle.manifest.dims))
        throw std::runtime_error("solution does not match the bundle");
    Image8 canvas(sol.dims.rows * p, sol.dims.cols * p);
    for (std::size_t i = 0; i < sol.placement.size(); ++i) {
        Image8 img = load_image_rgb((bundle.dir / bundle.manifest.piece_files[i]).string());
        img = rotate_cw(img, sol.placement[i].orientation);
        int r0 = (sol.placement[i].row - 1) * p, c0 = (sol.placement[i].col - 1) * p;
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c)
                for (int ch = 0; ch < 3; ++ch) canvas.at(r0 + r, c0 + c, ch) = img.at(r, c, ch);
    }
    return canvas;
}

}  // namespace mprl
