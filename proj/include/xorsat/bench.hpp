#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sampler.hpp"

namespace xorsat::bench {

inline int exit_code_for(const SuiteReport& r) {
    if (r.status == "unsat") return 2;
    if (r.status == "partial") return 3;
    return 0;
}

struct InstanceRun {
    std::filesystem::path instance;
    Mode mode = Mode::Snap;
    SuiteReport report;
    int exit_code = 0;
    std::filesystem::path samples_path;
    std::filesystem::path report_path;
};

inline Formula load_formula(const std::filesystem::path& cnf_path, bool* count_mismatch = nullptr) {
    std::ifstream in(cnf_path);
    if (!in) throw std::runtime_error("cannot open " + cnf_path.string());
    ParseResult parsed = parse_dimacs(in, cnf_path.stem().string());
    if (count_mismatch) *count_mismatch = parsed.clause_count_mismatch;
    return std::move(parsed.formula);
}

// Runs one instance and writes `<stem>.samples` and `<stem>.report.json`
// into out_dir. The input file is never touched.
inline InstanceRun run_instance(const std::filesystem::path& cnf_path, const SampleConfig& cfg,
                                const std::filesystem::path& out_dir) {
    bool mismatch = false;
    const Formula f = load_formula(cnf_path, &mismatch);
    SampleOutput out = sample(f, cfg);
    if (mismatch) out.report.flags.push_back("clause_count_mismatch");

    std::filesystem::create_directories(out_dir);
    const std::string stem = cnf_path.stem().string();

    InstanceRun run;
    run.instance = cnf_path;
    run.mode = cfg.mode;
    run.samples_path = out_dir / (stem + ".samples");
    run.report_path = out_dir / (stem + ".report.json");

    {
        std::ofstream samples(run.samples_path, std::ios::binary);
        if (!samples) throw std::runtime_error("cannot write " + run.samples_path.string());
        for (const Assignment& a : out.lines) samples << serialize_assignment(a);
    }
    {
        std::ofstream report(run.report_path, std::ios::binary);
        if (!report) throw std::runtime_error("cannot write " + run.report_path.string());
        report << report_to_json(out.report).dump(2) << '\n';
    }
    run.exit_code = exit_code_for(out.report);
    run.report = std::move(out.report);
    return run;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

inline const char* compare_csv_header() {
    return "instance,mode,suite_size,credibility,uniqueness,ncd,entropy_mean,"
           "t_generate,t_verify,t_repair,t_select,t_total,status\n";
}

inline std::string compare_csv_row(const std::string& instance, const std::string& mode,
                                   const SuiteReport& r) {
    const bool steps = r.timing_unit != "seconds";
    auto t = [&](double secs, std::uint64_t count) {
        return steps ? std::to_string(count) : format_number(secs);
    };
    std::string row = csv_field(instance);
    row += ',';
    row += mode;
    row += ',';
    row += std::to_string(r.suite_size);
    row += ',';
    row += format_number(r.credibility);
    row += ',';
    row += format_number(r.uniqueness);
    row += ',';
    row += format_number(r.ncd);
    row += ',';
    row += format_number(r.entropy_mean);
    row += ',';
    row += t(r.seconds.generate, r.steps.generate);
    row += ',';
    row += t(r.seconds.verify, r.steps.verify);
    row += ',';
    row += t(r.seconds.repair, r.steps.repair);
    row += ',';
    row += t(r.seconds.select, r.steps.select);
    row += ',';
    row += t(r.seconds.total, r.steps.total);
    row += ',';
    row += r.status;
    row += '\n';
    return row;
}

struct CompareOptions {
    std::vector<Mode> modes = {Mode::Snap, Mode::XorOnly, Mode::SolverOnly};
    unsigned jobs = 1;
};

// Runs every .cnf in dir under each mode and writes compare.csv to out_dir.
// Rows are ordered by instance name, then by the given mode order,
// regardless of worker scheduling.
inline std::filesystem::path run_compare(const std::filesystem::path& dir,
                                         const SampleConfig& base_cfg,
                                         const CompareOptions& opts,
                                         const std::filesystem::path& out_dir) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".cnf")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

    struct Task {
        std::filesystem::path file;
        Mode mode;
    };
    std::vector<Task> tasks;
    for (const auto& file : files)
        for (Mode m : opts.modes) tasks.push_back({file, m});

    std::vector<std::string> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            SampleConfig cfg = base_cfg;
            cfg.mode = task.mode;
            const std::string name = task.file.stem().string();
            try {
                const Formula f = load_formula(task.file);
                SampleOutput out = sample(f, cfg);
                rows[i] = compare_csv_row(name, mode_name(task.mode), out.report);
            } catch (const std::exception&) {
                SuiteReport err;
                err.status = "error";
                err.timing_unit = cfg.budget.wall_secs > 0.0 ? "seconds" : "steps";
                rows[i] = compare_csv_row(name, mode_name(task.mode), err);
            }
        }
    };

    const unsigned jobs = std::max(1u, opts.jobs);
    if (jobs == 1 || tasks.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(jobs, tasks.size()); ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path csv_path = out_dir / "compare.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv << compare_csv_header();
    for (const std::string& row : rows) csv << row;
    return csv_path;
}

// Reads a samples file back into assignments. Lines must be canonical
// '0'/'1' text.
inline std::vector<Assignment> load_samples(const std::filesystem::path& samples_file) {
    std::ifstream in(samples_file);
    if (!in) throw std::runtime_error("cannot open " + samples_file.string());
    std::vector<Assignment> members;
    std::string line;
    while (std::getline(in, line)) members.push_back(parse_assignment(line));
    return members;
}

inline Histogram samples_histogram(const std::filesystem::path& samples_file,
                                   const CompressorConfig& cfg, int bins) {
    const std::vector<Assignment> members = load_samples(samples_file);
    if (members.empty()) throw std::runtime_error("empty samples file: " + samples_file.string());
    return cx_distribution(members, cfg, bins);
}

}  // namespace xorsat::bench
