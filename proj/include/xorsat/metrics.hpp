#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnf.hpp"
#include "diversity.hpp"
#include "mutate.hpp"

namespace xorsat {

// One generated candidate with its verification verdict, the unit of the
// credibility measure.
struct CandidateVerdict {
    Assignment bits;
    bool valid = false;
    bool duplicate = false;
};

// Fraction of candidates that satisfy the constraints.
inline double credibility(std::span<const CandidateVerdict> log) {
    if (log.empty()) throw std::invalid_argument("credibility: empty candidate log");
    std::size_t valid = 0;
    for (const CandidateVerdict& e : log) valid += e.valid ? 1 : 0;
    return static_cast<double>(valid) / static_cast<double>(log.size());
}

// Distinct / total, by exact bit equality. 1.0 means no redundancy.
inline double uniqueness(std::span<const Assignment> members) {
    if (members.empty()) throw std::invalid_argument("uniqueness: empty member list");
    BitsSet distinct;
    for (const Assignment& m : members) distinct.insert(m);
    return static_cast<double>(distinct.size()) / static_cast<double>(members.size());
}

struct EntropyResult {
    std::vector<double> per_var;  // each in [0, 1] bits
    double mean = 0.0;
};

// Per-variable marginal entropy in bits, the uniformity indicator: for each
// variable, H(p) with p the fraction of members setting it true.
inline EntropyResult marginal_entropy(std::span<const Assignment> members) {
    if (members.empty()) throw std::invalid_argument("marginal_entropy: empty member list");
    const std::size_t n = members[0].size();
    for (const Assignment& m : members)
        if (m.size() != n) throw std::invalid_argument("marginal_entropy: length mismatch");

    EntropyResult res;
    res.per_var.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ones = 0;
        for (const Assignment& m : members) ones += m[i] ? 1 : 0;
        const double p = static_cast<double>(ones) / static_cast<double>(members.size());
        double h = 0.0;
        if (p > 0.0) h -= p * std::log2(p);
        if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
        res.per_var[i] = h;
        sum += h;
    }
    res.mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    return res;
}

enum class Phase { Generate = 0, Verify = 1, Repair = 2, Select = 3 };

// Accumulates wall seconds and deterministic step counts per phase. A
// candidate's lifecycle charges exactly one phase at a time; nested scopes
// are a contract violation.
class PhaseTimer {
public:
    class Scoped {
    public:
        Scoped(PhaseTimer& t, Phase p) : timer_(&t), phase_(p) {
            if (timer_->active_) throw std::logic_error("PhaseTimer: nested phase scope");
            timer_->active_ = true;
            start_ = std::chrono::steady_clock::now();
        }
        ~Scoped() {
            timer_->secs_[static_cast<std::size_t>(phase_)] +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            timer_->active_ = false;
        }
        Scoped(const Scoped&) = delete;
        Scoped& operator=(const Scoped&) = delete;

    private:
        PhaseTimer* timer_;
        Phase phase_;
        std::chrono::steady_clock::time_point start_;
    };

    PhaseTimer() : begin_(std::chrono::steady_clock::now()) {}

    Scoped scoped(Phase p) { return Scoped(*this, p); }

    void add_steps(Phase p, std::uint64_t k) { steps_[static_cast<std::size_t>(p)] += k; }

    double seconds(Phase p) const { return secs_[static_cast<std::size_t>(p)]; }
    std::uint64_t steps(Phase p) const { return steps_[static_cast<std::size_t>(p)]; }

    // Whole-run wall time since construction; at least the sum of the phases.
    double total_seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_).count();
    }
    std::uint64_t total_steps() const {
        std::uint64_t t = 0;
        for (std::uint64_t s : steps_) t += s;
        return t;
    }

private:
    std::array<double, 4> secs_{};
    std::array<std::uint64_t, 4> steps_{};
    bool active_ = false;
    std::chrono::steady_clock::time_point begin_;
};

struct PhaseSeconds {
    double generate = 0, verify = 0, repair = 0, select = 0, total = 0;
    bool operator==(const PhaseSeconds&) const = default;
};

struct PhaseSteps {
    std::uint64_t generate = 0, verify = 0, repair = 0, select = 0, total = 0;
    bool operator==(const PhaseSteps&) const = default;
};

struct SuiteReport {
    std::string formula_name;
    std::string mode = "snap";
    std::string status = "ok";  // ok | unsat | partial
    std::vector<std::string> flags;
    std::size_t suite_size = 0;
    double credibility = 0.0;
    double uniqueness = 0.0;
    double ncd = 0.0;
    std::vector<double> entropy_per_var;
    double entropy_mean = 0.0;
    // "steps" for deterministic step-budget runs, "seconds" when a wall
    // budget is active. The JSON `timings` field carries whichever unit is
    // named here; wall seconds are omitted in steps mode so replays are
    // byte-identical.
    std::string timing_unit = "steps";
    PhaseSeconds seconds;
    PhaseSteps steps;
    CompressorConfig compressor;

    bool operator==(const SuiteReport&) const = default;
};

inline void fill_timings(SuiteReport& r, const PhaseTimer& t) {
    r.steps = {t.steps(Phase::Generate), t.steps(Phase::Verify), t.steps(Phase::Repair),
               t.steps(Phase::Select), t.total_steps()};
    // Wall numbers exist only in wall mode; step-budget runs must replay
    // byte-identically, reports included.
    if (r.timing_unit == "seconds")
        r.seconds = {t.seconds(Phase::Generate), t.seconds(Phase::Verify),
                     t.seconds(Phase::Repair), t.seconds(Phase::Select), t.total_seconds()};
    else
        r.seconds = {};
}

// The per-phase numbers a consumer should read, in the unit named by
// timing_unit.
inline PhaseSeconds report_timings(const SuiteReport& r) {
    if (r.timing_unit == "seconds") return r.seconds;
    return {static_cast<double>(r.steps.generate), static_cast<double>(r.steps.verify),
            static_cast<double>(r.steps.repair), static_cast<double>(r.steps.select),
            static_cast<double>(r.steps.total)};
}

inline nlohmann::json report_to_json(const SuiteReport& r) {
    nlohmann::json j;
    j["formula"] = r.formula_name;
    j["mode"] = r.mode;
    j["status"] = r.status;
    j["flags"] = r.flags;
    j["suite_size"] = r.suite_size;
    j["credibility"] = r.credibility;
    j["uniqueness"] = r.uniqueness;
    j["ncd"] = r.ncd;
    j["entropy_per_var"] = r.entropy_per_var;
    j["entropy_mean"] = r.entropy_mean;
    j["timing_unit"] = r.timing_unit;
    j["steps"] = {{"generate", r.steps.generate},
                  {"verify", r.steps.verify},
                  {"repair", r.steps.repair},
                  {"select", r.steps.select},
                  {"total", r.steps.total}};
    if (r.timing_unit == "seconds") {
        j["timings"] = {{"generate", r.seconds.generate},
                        {"verify", r.seconds.verify},
                        {"repair", r.seconds.repair},
                        {"select", r.seconds.select},
                        {"total", r.seconds.total}};
    } else {
        j["timings"] = j["steps"];
    }
    j["compressor"] = {{"algorithm", r.compressor.algorithm}, {"level", r.compressor.level}};
    return j;
}

inline SuiteReport report_from_json(const nlohmann::json& j) {
    SuiteReport r;
    r.formula_name = j.at("formula").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.flags = j.at("flags").get<std::vector<std::string>>();
    r.suite_size = j.at("suite_size").get<std::size_t>();
    r.credibility = j.at("credibility").get<double>();
    r.uniqueness = j.at("uniqueness").get<double>();
    r.ncd = j.at("ncd").get<double>();
    r.entropy_per_var = j.at("entropy_per_var").get<std::vector<double>>();
    r.entropy_mean = j.at("entropy_mean").get<double>();
    r.timing_unit = j.at("timing_unit").get<std::string>();
    const auto& s = j.at("steps");
    r.steps = {s.at("generate").get<std::uint64_t>(), s.at("verify").get<std::uint64_t>(),
               s.at("repair").get<std::uint64_t>(), s.at("select").get<std::uint64_t>(),
               s.at("total").get<std::uint64_t>()};
    if (r.timing_unit == "seconds") {
        const auto& t = j.at("timings");
        r.seconds = {t.at("generate").get<double>(), t.at("verify").get<double>(),
                     t.at("repair").get<double>(), t.at("select").get<double>(),
                     t.at("total").get<double>()};
    }
    r.compressor.algorithm = j.at("compressor").at("algorithm").get<std::string>();
    r.compressor.level = j.at("compressor").at("level").get<int>();
    return r;
}

}  // namespace xorsat
