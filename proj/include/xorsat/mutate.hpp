#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cnf.hpp"

namespace xorsat {

// The XOR difference between two assignments; combining deltas by XOR
// proposes new candidates without solving.
using Delta = std::vector<std::uint8_t>;

struct BitsHash {
    std::size_t operator()(const std::vector<std::uint8_t>& v) const {
        std::size_t h = 1469598103934665603ULL;  // FNV-1a
        for (std::uint8_t b : v) {
            h ^= b;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

using BitsSet = std::unordered_set<std::vector<std::uint8_t>, BitsHash>;

inline Delta xor_bits(const Assignment& a, const Assignment& b) {
    if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
    Delta d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = (a[i] != 0) ^ (b[i] != 0);
    return d;
}

inline void xor_into(Assignment& acc, const Delta& d) {
    if (acc.size() != d.size()) throw std::invalid_argument("xor_into: length mismatch");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = (acc[i] != 0) ^ (d[i] != 0);
}

inline bool is_zero(const Delta& d) {
    for (std::uint8_t b : d)
        if (b) return false;
    return true;
}

// { base ^ s : s in neighbors } minus the zero delta, deduplicated.
// Output order follows first occurrence, so it is reproducible.
inline std::vector<Delta> atomic_deltas(const Assignment& base,
                                        std::span<const Assignment> neighbors) {
    std::vector<Delta> out;
    BitsSet seen;
    for (const Assignment& s : neighbors) {
        Delta d = xor_bits(base, s);
        if (is_zero(d)) continue;
        if (seen.insert(d).second) out.push_back(std::move(d));
    }
    return out;
}

struct MutationPool {
    Assignment base;             // a valid solution
    std::vector<Delta> atomics;  // distinct, nonzero
    int max_level = 6;           // largest combination size K
};

// Lazily enumerates base ^ (d_i1 ^ ... ^ d_ik) for k = 2..max_level, levels
// in ascending k and index-lexicographic order within a level. Candidates
// equal to base or to a known neighbor (base ^ d, the k = 1 products) are
// suppressed, as is anything already emitted by this stream. Emitted
// candidates are NOT guaranteed to satisfy the formula.
class CandidateStream {
public:
    explicit CandidateStream(MutationPool pool) : pool_(std::move(pool)) {
        seen_.insert(pool_.base);
        for (const Delta& d : pool_.atomics) {
            Assignment neighbor = pool_.base;
            xor_into(neighbor, d);
            seen_.insert(std::move(neighbor));
        }
        k_ = 2;
        done_ = !start_level();
    }

    // Emits the next fresh candidate, examining at most `work_limit`
    // combinations in total across calls. The deltas span a GF(2) subspace,
    // so once a suite saturates its coset every further combination is
    // stale; the limit keeps that hunt bounded. Returns nullopt when the
    // stream is exhausted or the limit is hit (state is kept, a later call
    // with a higher limit resumes).
    std::optional<Assignment> next(std::uint64_t work_limit = UINT64_MAX) {
        while (!done_ && work_ < work_limit) {
            ++work_;
            Assignment cand = prefix_;
            xor_into(cand, pool_.atomics[idx_.back()]);
            bool fresh = seen_.insert(cand).second;
            advance();
            if (fresh) return cand;
        }
        return std::nullopt;
    }

    // Combinations examined so far.
    std::uint64_t work() const { return work_; }

    // True once every combination up to max_level has been enumerated.
    bool exhausted() const { return done_; }

private:
    // Enters level k_; false when no size-k_ combination exists.
    bool start_level() {
        const std::size_t m = pool_.atomics.size();
        if (k_ > pool_.max_level || static_cast<std::size_t>(k_) > m) return false;
        idx_.resize(static_cast<std::size_t>(k_));
        for (std::size_t j = 0; j < idx_.size(); ++j) idx_[j] = j;
        rebuild_prefix();
        return true;
    }

    void advance() {
        const std::size_t m = pool_.atomics.size();
        const std::size_t k = idx_.size();
        std::size_t i = k;
        while (i-- > 0) {
            if (idx_[i] != m - k + i) break;
            if (i == 0) {  // level exhausted
                ++k_;
                done_ = !start_level();
                return;
            }
        }
        ++idx_[i];
        for (std::size_t j = i + 1; j < k; ++j) idx_[j] = idx_[j - 1] + 1;
        if (i + 1 != k) rebuild_prefix();
    }

    void rebuild_prefix() {
        prefix_ = pool_.base;
        for (std::size_t j = 0; j + 1 < idx_.size(); ++j)
            xor_into(prefix_, pool_.atomics[idx_[j]]);
    }

    MutationPool pool_;
    int k_ = 2;
    std::vector<std::size_t> idx_;
    Assignment prefix_;  // base ^ deltas at idx_[0..k-2]
    BitsSet seen_;
    bool done_ = false;
    std::uint64_t work_ = 0;
};

inline std::vector<Assignment> combine_candidates(const MutationPool& pool, std::size_t limit) {
    CandidateStream stream(pool);
    std::vector<Assignment> out;
    while (out.size() < limit) {
        auto c = stream.next();
        if (!c) break;
        out.push_back(std::move(*c));
    }
    return out;
}

}  // namespace xorsat
