#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cnf.hpp"
#include "rng.hpp"

namespace xorsat {

enum class SolveStatus { Sat, Unsat, Timeout };

// Budgets are step counts first (deterministic), wall clock second.
// max_wall_secs == 0 disables the wall cap.
struct Budget {
    std::uint64_t max_steps = 50'000'000;
    double max_wall_secs = 0.0;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Timeout;
    std::optional<Assignment> model;  // present iff status == Sat
    double elapsed_secs = 0.0;
    std::uint64_t steps = 0;
};

enum class RepairStatus { Repaired, Failed };

struct RepairOutcome {
    RepairStatus status = RepairStatus::Failed;
    std::optional<Assignment> model;
    std::size_t flips = 0;  // Hamming distance from the input candidate
    double elapsed_secs = 0.0;
    std::uint64_t steps = 0;
};

struct RepairOptions {
    std::uint64_t max_flips = 50'000;  // total across restarts
    int restarts = 10;
    double noise = 0.5;   // probability of a non-greedy flip
    Budget fallback;      // budget for the polarity-guided solve stage
    double max_wall_secs = 0.0;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Iterative DPLL with two-watched-literal unit propagation. No clause
// learning; branching order and polarity come from the seed, so the engine
// doubles as a cheap sampler when re-run with blocking clauses.
class DpllSolver {
public:
    DpllSolver(const Formula& f, Budget budget, std::uint64_t seed,
               std::span<const std::uint8_t> polarity_hint = {})
        : nv_(f.num_vars), budget_(budget), rng_(seed) {
        val_.assign(static_cast<std::size_t>(nv_), -1);
        watches_.assign(static_cast<std::size_t>(2 * nv_), {});
        order_.resize(static_cast<std::size_t>(nv_));
        pol_.resize(static_cast<std::size_t>(nv_));
        for (int v = 0; v < nv_; ++v) {
            order_[static_cast<std::size_t>(v)] = v;
            pol_[static_cast<std::size_t>(v)] =
                polarity_hint.empty() ? static_cast<std::uint8_t>(rng_.next() & 1)
                                      : polarity_hint[static_cast<std::size_t>(v)];
        }
        rng_.shuffle(order_);

        std::vector<int> lits;
        for (const Clause& c : f.clauses) {
            lits.clear();
            bool tautology = false;
            for (const Literal& l : c.literals) {
                int enc = 2 * (l.var - 1) + (l.negated ? 1 : 0);
                if (std::find(lits.begin(), lits.end(), enc) != lits.end()) continue;
                if (std::find(lits.begin(), lits.end(), enc ^ 1) != lits.end()) {
                    tautology = true;  // satisfied under every assignment
                    break;
                }
                lits.push_back(enc);
            }
            if (tautology) continue;
            if (lits.empty()) {
                root_conflict_ = true;
                continue;
            }
            if (lits.size() == 1) {
                root_units_.push_back(lits[0]);
                continue;
            }
            cls_.push_back(lits);
            int ci = static_cast<int>(cls_.size()) - 1;
            watches_[static_cast<std::size_t>(lits[0])].push_back(ci);
            watches_[static_cast<std::size_t>(lits[1])].push_back(ci);
        }
    }

    SolveOutcome run() {
        Stopwatch clock;
        SolveOutcome out;
        out.status = search();
        out.steps = steps_;
        out.elapsed_secs = clock.seconds();
        if (out.status == SolveStatus::Sat) {
            Assignment model(static_cast<std::size_t>(nv_));
            for (int v = 0; v < nv_; ++v)
                model[static_cast<std::size_t>(v)] = val_[static_cast<std::size_t>(v)] == 1;
            out.model = std::move(model);
        }
        return out;
    }

private:
    static int var_of(int lit) { return lit >> 1; }
    bool lit_true(int lit) const { return val_[static_cast<std::size_t>(lit >> 1)] == ((lit & 1) ? 0 : 1); }
    bool lit_false(int lit) const { return val_[static_cast<std::size_t>(lit >> 1)] == ((lit & 1) ? 1 : 0); }
    bool lit_unassigned(int lit) const { return val_[static_cast<std::size_t>(lit >> 1)] == -1; }

    void assign_true(int lit) {
        val_[static_cast<std::size_t>(lit >> 1)] = (lit & 1) ? 0 : 1;
        trail_.push_back(lit >> 1);
    }

    // Root-level enqueue that tolerates repeated units.
    bool enqueue_checked(int lit) {
        if (lit_true(lit)) return true;
        if (lit_false(lit)) return false;
        assign_true(lit);
        return true;
    }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            val_[static_cast<std::size_t>(trail_.back())] = -1;
            trail_.pop_back();
        }
        qhead_ = mark;
    }

    bool propagate() {
        while (qhead_ < trail_.size()) {
            const int v = trail_[qhead_++];
            ++steps_;
            const int flit = 2 * v + (val_[static_cast<std::size_t>(v)] == 1 ? 1 : 0);
            auto& ws = watches_[static_cast<std::size_t>(flit)];
            std::size_t i = 0, j = 0;
            bool conflict = false;
            while (i < ws.size()) {
                const int ci = ws[i];
                auto& lits = cls_[static_cast<std::size_t>(ci)];
                if (lits[0] == flit) std::swap(lits[0], lits[1]);
                if (lit_true(lits[0])) {
                    ws[j++] = ws[i++];
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < lits.size(); ++k) {
                    if (!lit_false(lits[k])) {
                        std::swap(lits[1], lits[k]);
                        watches_[static_cast<std::size_t>(lits[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) {
                    ++i;  // clause left this watch list
                    continue;
                }
                if (lit_unassigned(lits[0])) {
                    assign_true(lits[0]);  // unit
                    ws[j++] = ws[i++];
                } else {
                    while (i < ws.size()) ws[j++] = ws[i++];
                    conflict = true;
                }
            }
            ws.resize(j);
            if (conflict) return false;
        }
        return true;
    }

    bool out_of_budget() {
        if (steps_ > budget_.max_steps) return true;
        if (budget_.max_wall_secs > 0.0 && (steps_ & 1023) == 0 &&
            clock_.seconds() > budget_.max_wall_secs)
            return true;
        return false;
    }

    // Next unassigned variable in branching order; -1 when all assigned.
    int pick() {
        while (cursor_ < nv_ &&
               val_[static_cast<std::size_t>(order_[static_cast<std::size_t>(cursor_)])] != -1)
            ++cursor_;
        return cursor_ < nv_ ? order_[static_cast<std::size_t>(cursor_)] : -1;
    }

    SolveStatus search() {
        if (root_conflict_) return SolveStatus::Unsat;
        for (int u : root_units_)
            if (!enqueue_checked(u)) return SolveStatus::Unsat;
        if (!propagate()) return SolveStatus::Unsat;

        struct Frame {
            int var;
            std::size_t mark;
            int cursor;
            bool flipped;
        };
        std::vector<Frame> frames;

        for (;;) {
            if (out_of_budget()) return SolveStatus::Timeout;
            const int v = pick();
            if (v < 0) return SolveStatus::Sat;
            ++steps_;
            frames.push_back({v, trail_.size(), cursor_, false});
            assign_true(2 * v + (pol_[static_cast<std::size_t>(v)] ? 0 : 1));
            while (!propagate()) {
                bool flipped_one = false;
                while (!flipped_one) {
                    if (frames.empty()) return SolveStatus::Unsat;
                    Frame& fr = frames.back();
                    undo_to(fr.mark);
                    cursor_ = fr.cursor;
                    if (!fr.flipped) {
                        fr.flipped = true;
                        assign_true(2 * fr.var + (pol_[static_cast<std::size_t>(fr.var)] ? 1 : 0));
                        flipped_one = true;
                    } else {
                        frames.pop_back();
                    }
                }
                if (out_of_budget()) return SolveStatus::Timeout;
            }
        }
    }

    int nv_;
    Budget budget_;
    Rng rng_;
    Stopwatch clock_;
    std::vector<std::vector<int>> cls_;
    std::vector<std::vector<int>> watches_;
    std::vector<std::int8_t> val_;
    std::vector<int> trail_;
    std::size_t qhead_ = 0;
    std::vector<int> order_;
    std::vector<std::uint8_t> pol_;
    int cursor_ = 0;
    std::vector<int> root_units_;
    bool root_conflict_ = false;
    std::uint64_t steps_ = 0;
};

}  // namespace detail

// Complete DPLL search. Deterministic for a fixed (formula, seed, step
// budget); TIMEOUT only on budget exhaustion, UNSAT only after exhaustive
// search.
inline SolveOutcome solve(const Formula& f, Budget budget = {}, std::uint64_t seed = 1) {
    return detail::DpllSolver(f, budget, seed).run();
}

// Same engine, branching polarity preferring the given bits. Used as the
// repair fallback: the returned model tends to stay close to the hint.
inline SolveOutcome solve_with_hint(const Formula& f, std::span<const std::uint8_t> polarity_hint,
                                    Budget budget = {}, std::uint64_t seed = 1) {
    if (polarity_hint.size() != static_cast<std::size_t>(f.num_vars))
        throw std::invalid_argument("solve_with_hint: hint length mismatch");
    return detail::DpllSolver(f, budget, seed, polarity_hint).run();
}

struct SeededResult {
    std::vector<Assignment> models;
    SolveStatus last_status = SolveStatus::Sat;  // status of the call that ended collection
    std::uint64_t steps = 0;                     // summed over all solver calls
};

// Up to k distinct models, found by re-solving with randomized order and
// polarity while blocking every model already found. Fewer than k come back
// only when the formula has fewer than k solutions or the budget ends;
// last_status tells which.
inline SeededResult solve_seeded_ex(const Formula& f, std::size_t k, std::uint64_t seed,
                                    Budget per_call = {}) {
    SeededResult res;
    if (k == 0) return res;
    if (f.num_vars == 0) {
        // The empty assignment is the lone candidate.
        if (f.clauses.empty()) res.models.push_back({});
        res.last_status = f.clauses.empty() ? SolveStatus::Sat : SolveStatus::Unsat;
        return res;
    }
    Formula work = f;
    for (std::uint64_t attempt = 0; res.models.size() < k; ++attempt) {
        SolveOutcome out = solve(work, per_call, derive_seed(seed, attempt));
        res.last_status = out.status;
        res.steps += out.steps;
        if (out.status != SolveStatus::Sat) break;
        const Assignment& m = *out.model;
        Clause block;
        block.literals.reserve(m.size());
        for (std::size_t i = 0; i < m.size(); ++i)
            block.literals.push_back(Literal{static_cast<int>(i) + 1, m[i] != 0});
        work.clauses.push_back(std::move(block));
        res.models.push_back(m);
    }
    return res;
}

inline std::vector<Assignment> solve_seeded(const Formula& f, std::size_t k, std::uint64_t seed,
                                            Budget per_call = {}) {
    return solve_seeded_ex(f, k, seed, per_call).models;
}

namespace detail {

// WalkSAT-style repair state: occurrence lists, per-clause true-literal
// counts and an unsat stack with positional index, updated per flip.
class WalkRepair {
public:
    WalkRepair(const Formula& f, std::uint64_t seed) : nv_(f.num_vars), rng_(seed) {
        occ_.assign(static_cast<std::size_t>(nv_), {});
        for (const Clause& c : f.clauses) {
            std::vector<std::pair<int, bool>> lits;  // (0-based var, negated)
            bool tautology = false;
            for (const Literal& l : c.literals) {
                auto entry = std::make_pair(l.var - 1, l.negated);
                if (std::find(lits.begin(), lits.end(), entry) != lits.end()) continue;
                if (std::find(lits.begin(), lits.end(),
                              std::make_pair(l.var - 1, !l.negated)) != lits.end())
                    tautology = true;
                lits.push_back(entry);
            }
            taut_.push_back(tautology);
            const int ci = static_cast<int>(cls_.size());
            for (auto [v, neg] : lits) occ_[static_cast<std::size_t>(v)].push_back({ci, neg});
            cls_.push_back(std::move(lits));
        }
        num_true_.assign(cls_.size(), 0);
        unsat_pos_.assign(cls_.size(), npos);
    }

    void reset(const Assignment& start) {
        val_ = start;
        unsat_.clear();
        std::fill(unsat_pos_.begin(), unsat_pos_.end(), npos);
        for (std::size_t ci = 0; ci < cls_.size(); ++ci) {
            int t = 0;
            for (auto [v, neg] : cls_[ci]) t += lit_true(v, neg);
            num_true_[ci] = t;
            if (t == 0) push_unsat(ci);
        }
    }

    bool satisfied() const { return unsat_.empty(); }
    const Assignment& assignment() const { return val_; }

    // One WalkSAT step: random unsatisfied clause; with probability `noise`
    // a uniform variable from it, otherwise the variable breaking fewest
    // currently satisfied clauses.
    void step(double noise) {
        const std::size_t ci = unsat_[static_cast<std::size_t>(rng_.below(unsat_.size()))];
        const auto& lits = cls_[ci];
        int chosen;
        if (rng_.coin(noise)) {
            chosen = lits[static_cast<std::size_t>(rng_.below(lits.size()))].first;
        } else {
            int best_break = std::numeric_limits<int>::max();
            int ties = 0;
            chosen = lits[0].first;
            for (auto [v, neg] : lits) {
                const int b = break_count(v);
                if (b < best_break) {
                    best_break = b;
                    chosen = v;
                    ties = 1;
                } else if (b == best_break && rng_.below(static_cast<std::uint64_t>(++ties)) == 0) {
                    chosen = v;
                }
            }
        }
        flip(chosen);
    }

private:
    static constexpr std::size_t npos = SIZE_MAX;

    bool lit_true(int v, bool neg) const {
        return (val_[static_cast<std::size_t>(v)] != 0) != neg;
    }

    // Satisfied clauses that flipping v would break. Tautological clauses
    // never break.
    int break_count(int v) const {
        int b = 0;
        for (auto [ci, neg] : occ_[static_cast<std::size_t>(v)])
            if (!taut_[static_cast<std::size_t>(ci)] && num_true_[static_cast<std::size_t>(ci)] == 1 &&
                lit_true(v, neg))
                ++b;
        return b;
    }

    void push_unsat(std::size_t ci) {
        unsat_pos_[ci] = unsat_.size();
        unsat_.push_back(ci);
    }

    void drop_unsat(std::size_t ci) {
        const std::size_t pos = unsat_pos_[ci];
        unsat_pos_[unsat_.back()] = pos;
        std::swap(unsat_[pos], unsat_.back());
        unsat_.pop_back();
        unsat_pos_[ci] = npos;
    }

    void flip(int v) {
        val_[static_cast<std::size_t>(v)] ^= 1;
        for (auto [ci, neg] : occ_[static_cast<std::size_t>(v)]) {
            auto c = static_cast<std::size_t>(ci);
            if (lit_true(v, neg)) {
                if (++num_true_[c] == 1) drop_unsat(c);
            } else {
                if (--num_true_[c] == 0) push_unsat(c);
            }
        }
    }

    int nv_;
    Rng rng_;
    std::vector<std::vector<std::pair<int, bool>>> cls_;
    std::vector<bool> taut_;
    std::vector<std::vector<std::pair<int, bool>>> occ_;  // (clause index, negated)
    std::vector<int> num_true_;
    std::vector<std::size_t> unsat_;
    std::vector<std::size_t> unsat_pos_;
    Assignment val_;
};

}  // namespace detail

// Turns an invalid candidate into a valid model with few bit flips: local
// search restarting from the candidate, then a polarity-guided complete
// solve when the walk stalls. `flips` reports Hamming(candidate, model).
inline RepairOutcome repair(const Formula& f, const Assignment& candidate,
                            const RepairOptions& opts = {}, std::uint64_t seed = 1) {
    check_length(f, candidate, "repair");
    detail::Stopwatch clock;
    RepairOutcome out;

    if (evaluate(f, candidate)) {
        out.status = RepairStatus::Repaired;
        out.model = candidate;
        out.flips = 0;
        out.elapsed_secs = clock.seconds();
        return out;
    }

    const int restarts = std::max(1, opts.restarts);
    const std::uint64_t flips_per_restart =
        std::max<std::uint64_t>(1, opts.max_flips / static_cast<std::uint64_t>(restarts));

    detail::WalkRepair walk(f, derive_seed(seed, 0));
    for (int r = 0; r < restarts; ++r) {
        walk.reset(candidate);
        for (std::uint64_t i = 0; i < flips_per_restart; ++i) {
            if (walk.satisfied()) break;
            walk.step(opts.noise);
            ++out.steps;
            if (opts.max_wall_secs > 0.0 && (out.steps & 1023) == 0 &&
                clock.seconds() > opts.max_wall_secs)
                break;
        }
        if (walk.satisfied()) {
            out.status = RepairStatus::Repaired;
            out.model = walk.assignment();
            out.flips = hamming(candidate, *out.model);
            out.elapsed_secs = clock.seconds();
            return out;
        }
        if (opts.max_wall_secs > 0.0 && clock.seconds() > opts.max_wall_secs) break;
    }

    // Fallback: complete search biased towards the candidate's bits.
    SolveOutcome solved = solve_with_hint(f, candidate, opts.fallback, derive_seed(seed, 1));
    out.steps += solved.steps;
    if (solved.status == SolveStatus::Sat) {
        out.status = RepairStatus::Repaired;
        out.model = std::move(solved.model);
        out.flips = hamming(candidate, *out.model);
    }
    out.elapsed_secs = clock.seconds();
    return out;
}

// Exhaustive enumeration of all satisfying assignments, in ascending
// lexicographic order of the serialized encoding. Test oracle territory;
// hard-guarded to 20 variables.
inline std::vector<Assignment> brute_force_solutions(const Formula& f) {
    if (f.num_vars > 20)
        throw std::invalid_argument("brute_force_solutions: num_vars > 20");
    const int n = f.num_vars;
    std::vector<Assignment> out;
    Assignment a(static_cast<std::size_t>(n));
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int i = 0; i < n; ++i)
            a[static_cast<std::size_t>(i)] = (mask >> (n - 1 - i)) & 1;  // variable 1 is the msb
        if (evaluate(f, a)) out.push_back(a);
    }
    return out;
}

}  // namespace xorsat
