// mprl: square jigsaw puzzle toolkit.
// Subcommands: generate, solve, evaluate, render, bench.
// Exit codes: 0 success, 1 usage error, 2 input/runtime error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "mprl/pipeline.hpp"
#include "mprl/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mprl;

namespace {

struct SolveFlags {
    RunConfig cfg;
    std::string measure = "percentile";
    std::string trace_file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epsilon", cfg.epsilon, "convergence threshold on the ALC increase")
            ->capture_default_str();
        cmd->add_option("--alpha", cfg.alpha, "anchoring threshold in (0.5, 1]")
            ->capture_default_str();
        cmd->add_option("--k", cfg.k, "percentile parameter (default: 3 for type 1, 1.5 for type 2)");
        cmd->add_option("--measure", measure, "compatibility measure: percentile|quartile")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "seed for all randomness")->capture_default_str();
        cmd->add_flag("--parallel-branches", cfg.parallel_branches,
                      "explore branch completions concurrently");
        cmd->add_flag("--trace", cfg.trace, "emit per-iteration records to stderr");
        cmd->add_option("--trace-file", trace_file, "write trace records to a file instead");
    }

    RunConfig resolve() {
        cfg.measure = measure_from_name(measure);
        return cfg;
    }
};

TraceFn make_trace(const RunConfig& cfg, const std::string& trace_file,
                   std::shared_ptr<std::ofstream>& keepalive) {
    if (!cfg.trace && trace_file.empty()) return {};
    std::ostream* out = &std::cerr;
    if (!trace_file.empty()) {
        keepalive = std::make_shared<std::ofstream>(trace_file);
        if (!*keepalive) throw std::runtime_error("cannot open trace file: " + trace_file);
        out = keepalive.get();
    }
    auto phase = std::make_shared<int>(0);
    return [out, phase](int iter, double alc_value, const Candidate& best) {
        if (iter == 1) ++*phase;
        (*out) << "phase=" << *phase << " iter=" << iter << " alc=" << alc_value
               << " best_obj=" << best.object << " best_label=" << best.label
               << " best_p=" << best.p << "\n";
    };
}

int cmd_generate(const std::string& image_path, const std::string& out_dir, int rows, int cols,
                 int piece_size, int type, std::uint64_t seed, double constancy_tol) {
    Image8 img = load_image_rgb(image_path);
    if (constancy_tol <= 0.0) {
        std::string ext = fs::path(image_path).extension().string();
        for (char& c : ext) c = char(std::tolower(c));
        constancy_tol = (ext == ".jpg" || ext == ".jpeg") ? 0.5 : 1e-6;
    }
    generate_bundle(img, GridDims(rows, cols), piece_size, PuzzleType(type), seed, out_dir,
                    constancy_tol);
    std::cout << "bundle written to " << out_dir << " (" << rows << "x" << cols << ", type "
              << type << ")\n";
    return 0;
}

int cmd_solve(const std::string& bundle_dir, const std::string& out_file, SolveFlags& flags,
              const std::string& dump_compat_path) {
    RunConfig cfg = flags.resolve();
    PuzzleBundle bundle = load_bundle(bundle_dir);
    PieceSet set = load_pieces(bundle);

    CompatibilityTable table = build_piece_compatibility(set, bundle.manifest.type, cfg);
    if (!dump_compat_path.empty()) dump_compatibility(table, dump_compat_path);

    ProblemInstance inst(bundle.manifest.dims, bundle.manifest.type);
    SolverConfig scfg;
    scfg.phase.epsilon = cfg.epsilon;
    scfg.phase.alpha = cfg.alpha;
    scfg.seed = cfg.seed;
    scfg.parallel_branches = cfg.parallel_branches;
    std::shared_ptr<std::ofstream> keepalive;
    scfg.trace = make_trace(cfg, flags.trace_file, keepalive);

    Solution sol = bundle.manifest.type == PuzzleType::Type1 ? solve_type1(table, inst, scfg)
                                                             : solve_type2(table, inst, scfg);
    save_solution(sol, cfg, out_file);
    std::cout << "solved " << bundle_dir << ": alc=" << sol.alc << " phases=" << sol.diag.phases
              << " branches=" << sol.diag.branches << " -> " << out_file << "\n";
    return 0;
}

int cmd_evaluate(const std::string& solution_file, const std::string& bundle_dir,
                 const std::string& out_file) {
    PuzzleBundle bundle = load_bundle(bundle_dir);
    if (!has_ground_truth(bundle))
        throw std::runtime_error("bundle has no ground truth: " + bundle_dir);
    Solution sol = load_solution(solution_file);
    GroundTruth gt = load_ground_truth(bundle);
    Scores s = best_rotation_scores(sol, gt);
    std::cout << "dc=" << s.dc << " nc=" << s.nc << " pr=" << (s.pr ? "true" : "false")
              << " rotation=" << degrees(s.rotation) << "\n";
    if (!out_file.empty()) {
        json rec = {{"dc", s.dc},
                    {"nc", s.nc},
                    {"pr", s.pr},
                    {"rotation_degrees", degrees(s.rotation)},
                    {"solution", solution_file},
                    {"bundle", bundle_dir}};
        fs::path target(out_file);
        fs::path tmp = target;
        tmp += ".tmp";
        std::ofstream out(tmp);
        out << rec.dump(2) << "\n";
        out.close();
        fs::rename(tmp, target);
    }
    return 0;
}

int cmd_render(const std::string& solution_file, const std::string& bundle_dir,
               const std::string& out_path) {
    PuzzleBundle bundle = load_bundle(bundle_dir);
    Solution sol = load_solution(solution_file);
    save_png_rgb(render_solution(sol, bundle), out_path);
    std::cout << "rendered " << out_path << "\n";
    return 0;
}

struct BenchRow {
    std::string name;
    int type = 0, pieces = 0, runs = 0;
    double dc = 0, nc = 0, pr_rate = 0, alc = 0, phases = 0, wall_s = 0;
    std::string error;
};

int cmd_bench(const std::string& corpus_dir, const std::string& out_file, int repeats,
              SolveFlags& flags) {
    RunConfig base = flags.resolve();
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(corpus_dir))
        if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());

    std::vector<BenchRow> rows(dirs.size());
    std::atomic<std::size_t> next{0};
    int workers = 1;
    if (const char* w = std::getenv("MPRL_WORKERS")) workers = std::max(1, std::atoi(w));

    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < dirs.size(); i = next.fetch_add(1)) {
            BenchRow& row = rows[i];
            row.name = dirs[i].filename().string();
            try {
                PuzzleBundle bundle = load_bundle(dirs[i]);
                PieceSet set = load_pieces(bundle);
                GroundTruth gt = load_ground_truth(bundle);
                row.type = int(bundle.manifest.type);
                row.pieces = bundle.manifest.dims.cells();
                int constants = 0;
                for (char f : set.constant_flags) constants += f ? 1 : 0;
                row.runs = constants > 2 ? repeats : 1;

                Rng bundle_rng = Rng(base.seed).fork(i);
                for (int r = 0; r < row.runs; ++r) {
                    RunConfig cfg = base;
                    cfg.seed = bundle_rng.fork(std::uint64_t(r)).next_u64();
                    auto t0 = std::chrono::steady_clock::now();
                    Solution sol = solve_pieces(set, bundle.manifest.dims, bundle.manifest.type, cfg);
                    auto t1 = std::chrono::steady_clock::now();
                    Scores s = best_rotation_scores(sol, gt);
                    row.dc += s.dc;
                    row.nc += s.nc;
                    row.pr_rate += s.pr ? 1.0 : 0.0;
                    row.alc += sol.alc;
                    row.phases += sol.diag.phases;
                    row.wall_s += std::chrono::duration<double>(t1 - t0).count();
                }
                row.dc /= row.runs;
                row.nc /= row.runs;
                row.pr_rate /= row.runs;
                row.alc /= row.runs;
                row.phases /= row.runs;
                row.wall_s /= row.runs;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::ostringstream table;
    table << "bundle\ttype\tpieces\truns\tdc\tnc\tpr_rate\talc\tphases\twall_s\n";
    double sum_dc = 0, sum_nc = 0, sum_pr = 0;
    int ok = 0;
    for (const BenchRow& r : rows) {
        if (!r.error.empty()) {
            table << r.name << "\tERROR\t" << r.error << "\n";
            continue;
        }
        table << r.name << "\t" << r.type << "\t" << r.pieces << "\t" << r.runs << "\t" << r.dc
              << "\t" << r.nc << "\t" << r.pr_rate << "\t" << r.alc << "\t" << r.phases << "\t"
              << r.wall_s << "\n";
        sum_dc += r.dc;
        sum_nc += r.nc;
        sum_pr += r.pr_rate;
        ++ok;
    }
    if (ok > 0)
        table << "aggregate\t-\t-\t" << ok << "\t" << sum_dc / ok << "\t" << sum_nc / ok << "\t"
              << sum_pr << "\t-\t-\t-\n";
    std::cout << table.str();
    if (!out_file.empty()) {
        fs::path target(out_file);
        fs::path tmp = target;
        tmp += ".tmp";
        std::ofstream out(tmp);
        out << table.str();
        out.close();
        fs::rename(tmp, target);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-phase relaxation labeling solver for square jigsaw puzzles"};
    app.require_subcommand(1);

    // generate
    std::string image_path, out_dir;
    int rows = 0, cols = 0, piece_size = 28, type = 1;
    std::uint64_t gen_seed = 0;
    double constancy_tol = 0.0;
    CLI::App* generate = app.add_subcommand("generate", "cut an image into a puzzle bundle");
    generate->add_option("image", image_path, "source image (PNG or JPEG)")->required();
    generate->add_option("outdir", out_dir, "bundle directory to create")->required();
    generate->add_option("--rows", rows, "grid rows")->required();
    generate->add_option("--cols", cols, "grid cols")->required();
    generate->add_option("--piece-size", piece_size, "piece side length in pixels")
        ->capture_default_str();
    generate->add_option("--type", type, "puzzle type: 1 (known orientation) or 2 (unknown)")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    generate->add_option("--seed", gen_seed, "shuffle/rotation seed")->capture_default_str();
    generate->add_option("--constancy-tol", constancy_tol,
                         "constant-piece tolerance (default: 1e-6, or 0.5 for JPEG input)");

    // solve
    std::string bundle_dir, solution_out = "solution.json", dump_compat_path;
    SolveFlags solve_flags;
    CLI::App* solve = app.add_subcommand("solve", "solve a puzzle bundle");
    solve->add_option("bundle", bundle_dir, "bundle directory")->required();
    solve->add_option("--out", solution_out, "solution file to write")->capture_default_str();
    solve_flags.attach(solve);
    solve->add_option("--dump-compat", dump_compat_path,
                      "also dump the compatibility table (binary, for debugging)");

    // evaluate
    std::string eval_solution, eval_bundle, eval_out;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score a solution against ground truth");
    evaluate->add_option("solution", eval_solution, "solution file")->required();
    evaluate->add_option("bundle", eval_bundle, "bundle directory")->required();
    evaluate->add_option("--out", eval_out, "also write a JSON record");

    // render
    std::string render_solution_file, render_bundle, render_out;
    CLI::App* render = app.add_subcommand("render", "paste pieces per a solution into an image");
    render->add_option("solution", render_solution_file, "solution file")->required();
    render->add_option("bundle", render_bundle, "bundle directory")->required();
    render->add_option("out", render_out, "output PNG path")->required();

    // bench
    std::string corpus_dir, bench_out;
    int repeats = 10;
    SolveFlags bench_flags;
    CLI::App* bench = app.add_subcommand("bench", "solve and score a corpus of bundles");
    bench->add_option("corpus", corpus_dir, "directory of bundle directories")->required();
    bench->add_option("--out", bench_out, "report file (tab separated)");
    bench->add_option("--repeats", repeats,
                      "runs per bundle when it has more than two constant pieces")
        ->capture_default_str();
    bench_flags.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // 0 for --help, 1 for usage errors
    }

    try {
        if (generate->parsed())
            return cmd_generate(image_path, out_dir, rows, cols, piece_size, type, gen_seed,
                                constancy_tol);
        if (solve->parsed()) return cmd_solve(bundle_dir, solution_out, solve_flags, dump_compat_path);
        if (evaluate->parsed()) return cmd_evaluate(eval_solution, eval_bundle, eval_out);
        if (render->parsed()) return cmd_render(render_solution_file, render_bundle, render_out);
        if (bench->parsed()) return cmd_bench(corpus_dir, bench_out, repeats, bench_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
