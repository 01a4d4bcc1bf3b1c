#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cnf.hpp"
#include "diversity.hpp"
#include "metrics.hpp"
#include "mutate.hpp"
#include "rng.hpp"
#include "solver.hpp"

namespace xorsat {

enum class Mode { Snap, XorOnly, SolverOnly };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Snap: return "snap";
        case Mode::XorOnly: return "xor-only";
        default: return "solver-only";
    }
}

inline std::optional<Mode> mode_from_name(std::string_view s) {
    if (s == "snap") return Mode::Snap;
    if (s == "xor-only") return Mode::XorOnly;
    if (s == "solver-only") return Mode::SolverOnly;
    return std::nullopt;
}

struct PhaseBudget {
    std::uint64_t candidates = 65'536;       // XOR candidates emitted per run
    std::uint64_t stream_work = 16'384;      // combinations walked per draw before the pool counts as dry
    std::uint64_t solve_steps = 20'000'000;  // per solver call
    std::uint64_t repair_flips = 50'000;     // per repair call, across restarts
    double wall_secs = 0.0;                  // 0 => step accounting, fully deterministic
};

struct SampleConfig {
    std::size_t target_size = 100;
    std::size_t seeds = 8;    // initial solver-produced solutions
    std::size_t batch = 32;   // candidates examined per iteration
    int max_level = 6;        // largest XOR combination size
    PhaseBudget budget;
    std::uint64_t seed = 1;
    CompressorConfig compressor;
    Mode mode = Mode::Snap;
    double repair_noise = 0.5;
    int repair_restarts = 10;
    // Worker threads for scoring batch survivors. NCD queries are pure and
    // compressor contexts are thread-local, so results are identical at any
    // thread count; only wall time changes.
    unsigned score_threads = 1;
};

struct TestSuite {
    std::vector<Assignment> members;  // ordered, duplicate-free, every member valid
    std::string formula_name;
};

// One admission event, enough to replay the greedy argmax decision.
struct AdmissionRecord {
    std::vector<Assignment> survivors;  // batch survivors in emission order
    std::size_t chosen = 0;             // index into survivors
    bool rescue = false;                // admitted via the stagnation solver call
};

struct RunTrace {
    std::vector<Assignment> seed_models;
    std::vector<AdmissionRecord> admissions;
};

struct RunResult {
    TestSuite suite;
    SuiteReport report;
};

struct XorOnlyResult {
    std::vector<CandidateVerdict> log;
    SuiteReport report;
};

namespace detail {

inline void validate_config(const SampleConfig& cfg) {
    if (cfg.target_size < 1) throw std::invalid_argument("target_size must be >= 1");
    if (cfg.batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (cfg.max_level < 1) throw std::invalid_argument("max_level must be >= 1");
    if (cfg.mode != Mode::SolverOnly && cfg.seeds < 2)
        throw std::invalid_argument("seeds must be >= 2 when XOR mutation is used");
}

inline Budget solve_budget(const PhaseBudget& b) { return Budget{b.solve_steps, b.wall_secs}; }

inline RepairOptions repair_options(const SampleConfig& cfg) {
    RepairOptions o;
    o.max_flips = cfg.budget.repair_flips;
    o.restarts = cfg.repair_restarts;
    o.noise = cfg.repair_noise;
    o.fallback = solve_budget(cfg.budget);
    o.max_wall_secs = cfg.budget.wall_secs;
    return o;
}

inline SuiteReport report_skeleton(const Formula& f, const SampleConfig& cfg) {
    SuiteReport r;
    r.formula_name = f.name;
    r.mode = mode_name(cfg.mode);
    r.compressor = cfg.compressor;
    r.timing_unit = cfg.budget.wall_secs > 0.0 ? "seconds" : "steps";
    return r;
}

// Credibility here is measured against the formula rather than assumed from
// construction, so the reported value doubles as a self-check.
inline void fill_suite_metrics(SuiteReport& r, const Formula& f,
                               std::span<const Assignment> members,
                               const CompressorConfig& comp) {
    r.suite_size = members.size();
    if (members.empty()) return;
    std::size_t valid = 0;
    for (const Assignment& m : members) valid += evaluate(f, m) ? 1 : 0;
    r.credibility = static_cast<double>(valid) / static_cast<double>(members.size());
    r.uniqueness = uniqueness(members);
    const NcdInfo info = ncd_set_info(members, comp);
    r.ncd = info.value;
    if (info.degenerate) r.flags.push_back("ncd_degenerate_denominator");
    if (info.out_of_range) r.flags.push_back("ncd_out_of_range");
    EntropyResult ent = marginal_entropy(members);
    r.entropy_per_var = std::move(ent.per_var);
    r.entropy_mean = ent.mean;
}

}  // namespace detail

// The full pipeline: seed with solved models, propose XOR candidates,
// verify, repair failures, and greedily admit the candidate that maximizes
// the suite's multiset NCD, until the target size or a budget is reached.
inline RunResult run_snap(const Formula& f, const SampleConfig& cfg, RunTrace* trace = nullptr) {
    detail::validate_config(cfg);
    PhaseTimer timer;
    const Budget solve_b = detail::solve_budget(cfg.budget);
    const RepairOptions repair_o = detail::repair_options(cfg);

    RunResult res;
    res.suite.formula_name = f.name;
    res.report = detail::report_skeleton(f, cfg);

    std::uint64_t stream_ctr = 0;  // one seed stream per solver/repair call

    // Seed phase.
    const std::size_t want = std::min(cfg.seeds, cfg.target_size);
    SeededResult seeded;
    {
        auto g = timer.scoped(Phase::Generate);
        seeded = solve_seeded_ex(f, want, derive_seed(cfg.seed, stream_ctr++), solve_b);
        timer.add_steps(Phase::Generate, seeded.steps);
    }
    if (seeded.models.empty()) {
        res.report.status = seeded.last_status == SolveStatus::Unsat ? "unsat" : "partial";
        if (seeded.last_status != SolveStatus::Unsat) res.report.flags.push_back("seed_timeout");
        fill_timings(res.report, timer);
        return res;
    }

    BitsSet in_suite;
    for (const Assignment& m : seeded.models) {
        res.suite.members.push_back(m);
        in_suite.insert(m);
    }
    if (trace) trace->seed_models = seeded.models;

    bool exhausted = false;
    bool budget_cut = false;
    if (seeded.models.size() < want) {
        if (seeded.last_status == SolveStatus::Unsat)
            exhausted = true;  // the formula has no further solutions
        else {
            budget_cut = true;
            res.report.flags.push_back("seed_timeout");
        }
    }

    auto admit = [&](Assignment m) {
        in_suite.insert(m);
        res.suite.members.push_back(std::move(m));
    };

    std::uint64_t candidates_used = 0;
    int stagnation = 0;

    while (!exhausted && !budget_cut && res.suite.members.size() < cfg.target_size) {
        if (cfg.budget.wall_secs > 0.0 && timer.total_seconds() > cfg.budget.wall_secs) {
            budget_cut = true;
            res.report.flags.push_back("wall_budget");
            break;
        }

        // Generate: rebuild the pool around the freshest member and draw a
        // batch. Each draw walks at most stream_work combinations, so a pool
        // whose span the suite has already saturated ends the batch instead
        // of hunting forever.
        std::vector<Assignment> batch;
        {
            auto g = timer.scoped(Phase::Generate);
            const Assignment& base = res.suite.members.back();
            std::vector<Assignment> others(res.suite.members.begin(),
                                           res.suite.members.end() - 1);
            MutationPool pool{base, atomic_deltas(base, others), cfg.max_level};
            CandidateStream stream(std::move(pool));
            while (batch.size() < cfg.batch) {
                if (candidates_used >= cfg.budget.candidates) {
                    budget_cut = true;
                    break;
                }
                auto c = stream.next(stream.work() + cfg.budget.stream_work);
                if (!c) break;
                ++candidates_used;
                batch.push_back(std::move(*c));
            }
            timer.add_steps(Phase::Generate, stream.work());
        }

        // Verify, repairing what fails; drop what cannot be repaired.
        // Survivors keep batch emission order, which the tie-break relies on.
        std::vector<Assignment> survivors;
        BitsSet batch_models;
        for (Assignment& cand : batch) {
            bool ok;
            {
                auto g = timer.scoped(Phase::Verify);
                timer.add_steps(Phase::Verify, 1);
                ok = evaluate(f, cand);
            }
            Assignment model;
            if (ok) {
                model = std::move(cand);
            } else {
                auto g = timer.scoped(Phase::Repair);
                RepairOutcome rep = repair(f, cand, repair_o, derive_seed(cfg.seed, stream_ctr++));
                timer.add_steps(Phase::Repair, rep.steps);
                if (rep.status != RepairStatus::Repaired) continue;
                model = std::move(*rep.model);
            }
            if (in_suite.contains(model)) continue;
            if (!batch_models.insert(model).second) continue;  // duplicate within batch
            survivors.push_back(std::move(model));
        }

        if (survivors.empty()) {
            if (budget_cut) break;
            if (++stagnation < 2) continue;
            // Two dry batches: one fresh solver call before declaring exhaustion.
            SolveOutcome fresh;
            {
                auto g = timer.scoped(Phase::Generate);
                Formula work = f;
                for (const Assignment& m : res.suite.members) {
                    Clause block;
                    for (std::size_t i = 0; i < m.size(); ++i)
                        block.literals.push_back(Literal{static_cast<int>(i) + 1, m[i] != 0});
                    work.clauses.push_back(std::move(block));
                }
                fresh = solve(work, solve_b, derive_seed(cfg.seed, stream_ctr++));
                timer.add_steps(Phase::Generate, fresh.steps);
            }
            if (fresh.status == SolveStatus::Sat) {
                if (trace) trace->admissions.push_back({{*fresh.model}, 0, true});
                admit(std::move(*fresh.model));
                stagnation = 0;
            } else if (fresh.status == SolveStatus::Unsat) {
                exhausted = true;
            } else {
                budget_cut = true;
                res.report.flags.push_back("rescue_timeout");
            }
            continue;
        }
        stagnation = 0;

        // Select: admit the survivor with the largest suite NCD, lowest
        // emission index on ties. Gains are independent pure queries, so
        // they may be scored in parallel; the argmax scan stays sequential.
        std::size_t best = 0;
        {
            auto g = timer.scoped(Phase::Select);
            std::vector<double> gains(survivors.size());
            auto score_range = [&](std::size_t lo, std::size_t hi) {
                std::vector<Assignment> scratch = res.suite.members;
                scratch.emplace_back();
                for (std::size_t s = lo; s < hi; ++s) {
                    scratch.back() = survivors[s];
                    gains[s] = ncd_set(scratch, cfg.compressor);
                }
            };
            const std::size_t workers =
                std::min<std::size_t>(std::max(1u, cfg.score_threads), survivors.size());
            if (workers <= 1) {
                score_range(0, survivors.size());
            } else {
                std::vector<std::thread> pool;
                const std::size_t chunk = (survivors.size() + workers - 1) / workers;
                for (std::size_t w = 0; w < workers; ++w) {
                    const std::size_t lo = w * chunk;
                    const std::size_t hi = std::min(survivors.size(), lo + chunk);
                    if (lo < hi) pool.emplace_back(score_range, lo, hi);
                }
                for (std::thread& t : pool) t.join();
            }
            timer.add_steps(Phase::Select, survivors.size());
            double best_gain = -1.0;
            for (std::size_t s = 0; s < survivors.size(); ++s) {
                if (gains[s] > best_gain) {
                    best_gain = gains[s];
                    best = s;
                }
            }
        }
        if (trace) {
            AdmissionRecord rec;
            rec.survivors = survivors;
            rec.chosen = best;
            trace->admissions.push_back(std::move(rec));
        }
        admit(std::move(survivors[best]));
    }

    res.report.status = budget_cut ? "partial" : "ok";
    if (exhausted) res.report.flags.push_back("exhausted");
    detail::fill_suite_metrics(res.report, f, res.suite.members, cfg.compressor);
    fill_timings(res.report, timer);
    return res;
}

// Ungoverned XOR generation: candidates are verified and logged but never
// repaired and never selected for diversity. The log feeds the credibility
// and redundancy comparison against the governed pipeline.
inline XorOnlyResult run_xor_only(const Formula& f, const SampleConfig& cfg) {
    detail::validate_config(cfg);
    PhaseTimer timer;
    XorOnlyResult res;
    res.report = detail::report_skeleton(f, cfg);

    SeededResult seeded;
    {
        auto g = timer.scoped(Phase::Generate);
        seeded = solve_seeded_ex(f, cfg.seeds, derive_seed(cfg.seed, 0), detail::solve_budget(cfg.budget));
        timer.add_steps(Phase::Generate, seeded.steps);
    }
    if (seeded.models.empty()) {
        res.report.status = seeded.last_status == SolveStatus::Unsat ? "unsat" : "partial";
        if (seeded.last_status != SolveStatus::Unsat) res.report.flags.push_back("seed_timeout");
        fill_timings(res.report, timer);
        return res;
    }

    std::vector<Assignment> neighbors(seeded.models.begin() + 1, seeded.models.end());
    MutationPool pool{seeded.models[0], atomic_deltas(seeded.models[0], neighbors), cfg.max_level};
    CandidateStream stream(std::move(pool));
    BitsSet seen;

    bool wall_cut = false;
    while (res.log.size() < cfg.budget.candidates) {
        if (cfg.budget.wall_secs > 0.0 && timer.total_seconds() > cfg.budget.wall_secs) {
            wall_cut = true;
            res.report.flags.push_back("wall_budget");
            break;
        }
        std::optional<Assignment> c;
        {
            auto g = timer.scoped(Phase::Generate);
            const std::uint64_t before = stream.work();
            c = stream.next(before + cfg.budget.stream_work);
            timer.add_steps(Phase::Generate, stream.work() - before);
        }
        if (!c) break;
        CandidateVerdict entry;
        entry.duplicate = !seen.insert(*c).second;
        {
            auto g = timer.scoped(Phase::Verify);
            timer.add_steps(Phase::Verify, 1);
            entry.valid = evaluate(f, *c);
        }
        entry.bits = std::move(*c);
        res.log.push_back(std::move(entry));
    }

    res.report.status = wall_cut ? "partial" : "ok";
    res.report.suite_size = res.log.size();
    if (res.log.empty()) {
        res.report.flags.push_back("no_candidates");
    } else {
        res.report.credibility = credibility(res.log);
        std::vector<Assignment> all;
        all.reserve(res.log.size());
        for (const CandidateVerdict& e : res.log) all.push_back(e.bits);
        res.report.uniqueness = uniqueness(all);
        // Diversity metrics over the usable output: distinct valid candidates.
        std::vector<Assignment> valid;
        BitsSet vseen;
        for (const CandidateVerdict& e : res.log)
            if (e.valid && vseen.insert(e.bits).second) valid.push_back(e.bits);
        if (!valid.empty()) {
            const NcdInfo info = ncd_set_info(valid, cfg.compressor);
            res.report.ncd = info.value;
            if (info.degenerate) res.report.flags.push_back("ncd_degenerate_denominator");
            if (info.out_of_range) res.report.flags.push_back("ncd_out_of_range");
            EntropyResult ent = marginal_entropy(valid);
            res.report.entropy_per_var = std::move(ent.per_var);
            res.report.entropy_mean = ent.mean;
        }
    }
    fill_timings(res.report, timer);
    return res;
}

// Control arm: the suite comes entirely from repeated solving.
inline RunResult run_solver_only(const Formula& f, const SampleConfig& cfg) {
    detail::validate_config(cfg);
    PhaseTimer timer;
    RunResult res;
    res.suite.formula_name = f.name;
    res.report = detail::report_skeleton(f, cfg);

    SeededResult seeded;
    {
        auto g = timer.scoped(Phase::Generate);
        seeded = solve_seeded_ex(f, cfg.target_size, derive_seed(cfg.seed, 0),
                                 detail::solve_budget(cfg.budget));
        timer.add_steps(Phase::Generate, seeded.steps);
    }
    res.suite.members = seeded.models;

    if (seeded.models.empty()) {
        res.report.status = seeded.last_status == SolveStatus::Unsat ? "unsat" : "partial";
        if (seeded.last_status != SolveStatus::Unsat) res.report.flags.push_back("seed_timeout");
    } else if (seeded.models.size() < cfg.target_size) {
        if (seeded.last_status == SolveStatus::Unsat) {
            res.report.status = "ok";
            res.report.flags.push_back("exhausted");
        } else {
            res.report.status = "partial";
            res.report.flags.push_back("solve_timeout");
        }
    }
    detail::fill_suite_metrics(res.report, f, res.suite.members, cfg.compressor);
    fill_timings(res.report, timer);
    return res;
}

struct SampleOutput {
    std::vector<Assignment> lines;  // what goes into the samples file, in order
    SuiteReport report;
};

// Mode dispatcher used by the harness. In snap and solver-only modes the
// emitted lines are the suite (all valid); in xor-only mode they are the raw
// candidate log, invalid lines included.
inline SampleOutput sample(const Formula& f, const SampleConfig& cfg) {
    SampleOutput out;
    switch (cfg.mode) {
        case Mode::Snap: {
            RunResult r = run_snap(f, cfg);
            out.lines = std::move(r.suite.members);
            out.report = std::move(r.report);
            break;
        }
        case Mode::XorOnly: {
            XorOnlyResult r = run_xor_only(f, cfg);
            out.lines.reserve(r.log.size());
            for (CandidateVerdict& e : r.log) out.lines.push_back(std::move(e.bits));
            out.report = std::move(r.report);
            break;
        }
        case Mode::SolverOnly: {
            RunResult r = run_solver_only(f, cfg);
            out.lines = std::move(r.suite.members);
            out.report = std::move(r.report);
            break;
        }
    }
    return out;
}

}  // namespace xorsat
