// xorsat command line: sample one instance, compare modes over a corpus,
// or histogram the compressed sizes of a samples file.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <xorsat/xorsat.hpp>

namespace fs = std::filesystem;
using namespace xorsat;

namespace {

void add_shared_options(CLI::App* sub, SampleConfig& cfg, std::string& mode_str) {
    sub->add_option("--mode", mode_str, "snap | xor-only | solver-only")
        ->default_str("snap");
    sub->add_option("--suite-size", cfg.target_size, "target suite cardinality")
        ->default_val(cfg.target_size);
    sub->add_option("--seeds", cfg.seeds, "initial solver-produced solutions")
        ->default_val(cfg.seeds);
    sub->add_option("--batch", cfg.batch, "candidates examined per iteration")
        ->default_val(cfg.batch);
    sub->add_option("--max-level", cfg.max_level, "largest XOR combination size")
        ->default_val(cfg.max_level);
    sub->add_option("--budget-steps", cfg.budget.candidates,
                    "total XOR candidates examined per run")
        ->default_val(cfg.budget.candidates);
    sub->add_option("--wall-secs", cfg.budget.wall_secs,
                    "wall clock cap; 0 switches to deterministic step accounting")
        ->default_val(cfg.budget.wall_secs);
    sub->add_option("--seed", cfg.seed, "rng seed")->default_val(cfg.seed);
    sub->add_option("--compress-level", cfg.compressor.level, "deflate level, 0-9")
        ->default_val(cfg.compressor.level);
    sub->add_option("--solve-steps", cfg.budget.solve_steps, "step budget per solver call")
        ->default_val(cfg.budget.solve_steps);
    sub->add_option("--repair-flips", cfg.budget.repair_flips, "flip budget per repair call")
        ->default_val(cfg.budget.repair_flips);
    sub->add_option("--stream-work", cfg.budget.stream_work,
                    "XOR combinations walked per draw before the pool counts as dry")
        ->default_val(cfg.budget.stream_work);
    sub->add_option("--score-threads", cfg.score_threads,
                    "worker threads for NCD scoring (never changes results)")
        ->default_val(cfg.score_threads);
}

int resolve_mode(const std::string& mode_str, SampleConfig& cfg) {
    auto m = mode_from_name(mode_str);
    if (!m) {
        std::cerr << "error: unknown mode '" << mode_str << "'\n";
        return 1;
    }
    cfg.mode = *m;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diverse, valid solution suites for DIMACS CNF instances"};
    app.require_subcommand(1);

    SampleConfig cfg;
    cfg.budget.wall_secs = 30.0;  // interactive default; tests pass --wall-secs 0

    std::string mode_str = "snap";
    std::string out_dir = ".";

    auto* sample_cmd = app.add_subcommand("sample", "run one instance and write samples + report");
    std::string sample_file;
    sample_cmd->add_option("file", sample_file, "DIMACS .cnf input")->required();
    add_shared_options(sample_cmd, cfg, mode_str);
    sample_cmd->add_option("--out", out_dir, "output directory")->default_str(".");

    auto* compare_cmd =
        app.add_subcommand("compare", "run every .cnf in a directory under each mode");
    std::string compare_dir;
    std::vector<std::string> compare_modes;
    unsigned jobs = 1;
    compare_cmd->add_option("dir", compare_dir, "directory of .cnf files")->required();
    add_shared_options(compare_cmd, cfg, mode_str);
    compare_cmd
        ->add_option("--modes", compare_modes, "modes to compare (default: all three)")
        ->delimiter(',');
    compare_cmd->add_option("--jobs", jobs, "parallel worker slots")
        ->envname("XORSAT_JOBS")
        ->default_val(1);
    compare_cmd->add_option("--out", out_dir, "output directory")->default_str(".");

    auto* hist_cmd = app.add_subcommand("hist", "C(x) histogram of a samples file");
    std::string hist_file;
    int bins = 10;
    bool hist_has_out = false;
    hist_cmd->add_option("samples", hist_file, "samples file (one assignment per line)")
        ->required();
    hist_cmd->add_option("--bins", bins, "bucket count")->default_val(10);
    hist_cmd->add_option("--compress-level", cfg.compressor.level, "deflate level, 0-9")
        ->default_val(cfg.compressor.level);
    auto* hist_out_opt = hist_cmd->add_option("--out", out_dir, "write hist.csv here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    hist_has_out = hist_out_opt->count() > 0;

    try {
        if (sample_cmd->parsed()) {
            if (resolve_mode(mode_str, cfg)) return 1;
            if (!fs::exists(sample_file)) {
                std::cerr << "error: no such file: " << sample_file << "\n";
                return 1;
            }
            bench::InstanceRun run = bench::run_instance(sample_file, cfg, out_dir);
            std::cout << run.report.status << ": " << run.report.suite_size
                      << " sample(s) -> " << run.samples_path.string() << "\n";
            return run.exit_code;
        }

        if (compare_cmd->parsed()) {
            if (!fs::is_directory(compare_dir)) {
                std::cerr << "error: no such directory: " << compare_dir << "\n";
                return 1;
            }
            bench::CompareOptions copts;
            copts.jobs = jobs;
            if (!compare_modes.empty()) {
                copts.modes.clear();
                for (const std::string& s : compare_modes) {
                    auto m = mode_from_name(s);
                    if (!m) {
                        std::cerr << "error: unknown mode '" << s << "'\n";
                        return 1;
                    }
                    copts.modes.push_back(*m);
                }
            }
            const fs::path csv = bench::run_compare(compare_dir, cfg, copts, out_dir);
            std::cout << "wrote " << csv.string() << "\n";
            return 0;
        }

        if (hist_cmd->parsed()) {
            if (!fs::exists(hist_file)) {
                std::cerr << "error: no such file: " << hist_file << "\n";
                return 1;
            }
            const Histogram h = bench::samples_histogram(hist_file, cfg.compressor, bins);
            const std::string csv = histogram_csv(h);
            if (hist_has_out) {
                fs::create_directories(out_dir);
                const fs::path p = fs::path(out_dir) / "hist.csv";
                std::ofstream out(p, std::ios::binary);
                out << csv;
                std::cout << "wrote " << p.string() << "\n";
            } else {
                std::cout << csv;
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
