#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include <xorsat/mutate.hpp>

#include "oracle.hpp"

using namespace xorsat;

namespace {

// Independent enumeration of everything a pool may emit: XOR over every
// subset of atomics of size 2..K, minus base and the k = 1 neighbors.
std::set<Assignment> enumerate_expected(const MutationPool& pool) {
    const std::size_t m = pool.atomics.size();
    std::set<Assignment> suppressed;
    suppressed.insert(pool.base);
    for (const Delta& d : pool.atomics) {
        Assignment nb = pool.base;
        xor_into(nb, d);
        suppressed.insert(nb);
    }
    std::set<Assignment> expected;
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
        const int k = __builtin_popcountll(mask);
        if (k < 2 || k > pool.max_level) continue;
        Assignment cand = pool.base;
        for (std::size_t i = 0; i < m; ++i)
            if ((mask >> i) & 1) xor_into(cand, pool.atomics[i]);
        if (!suppressed.count(cand)) expected.insert(cand);
    }
    return expected;
}

}  // namespace

TEST_CASE("xor_bits: self-inverse and involution") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng() % 65);
        const Assignment a = oracle::random_bits(rng, n);
        const Assignment b = oracle::random_bits(rng, n);
        CHECK(is_zero(xor_bits(a, a)));
        Assignment back = a;
        xor_into(back, xor_bits(a, b));  // a ^ (a ^ b) = b
        CHECK(back == b);
        Assignment roundtrip = xor_bits(a, b);
        xor_into(roundtrip, b);  // (a ^ b) ^ b = a
        CHECK(roundtrip == a);
    }
}

TEST_CASE("xor_bits: worked example and length mismatch") {
    CHECK(xor_bits({1, 0, 1}, {0, 0, 1}) == Delta{1, 0, 0});
    CHECK_THROWS_AS(xor_bits({1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("atomic_deltas: zero delta dropped, duplicates collapsed") {
    const Assignment base{1, 0, 1};
    SUBCASE("only the base") {
        std::vector<Assignment> nb{base};
        CHECK(atomic_deltas(base, nb).empty());
    }
    SUBCASE("two distinct neighbors") {
        std::vector<Assignment> nb{{0, 0, 1}, {1, 1, 1}};
        CHECK(atomic_deltas(base, nb).size() == 2);
    }
    SUBCASE("repeated neighbor") {
        std::vector<Assignment> nb{{0, 0, 1}, {0, 0, 1}, base};
        CHECK(atomic_deltas(base, nb).size() == 1);
    }
}

TEST_CASE("atomic_deltas: never more deltas than neighbors") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 16);
        const Assignment base = oracle::random_bits(rng, n);
        std::vector<Assignment> nb;
        const int count = static_cast<int>(rng() % 8);
        for (int i = 0; i < count; ++i) nb.push_back(oracle::random_bits(rng, n));
        CHECK(atomic_deltas(base, nb).size() <= nb.size());
    }
}

TEST_CASE("combine_candidates: single atomic yields nothing") {
    MutationPool pool{{0, 0}, {Delta{1, 0}}, 6};
    CHECK(combine_candidates(pool, 100).empty());
}

TEST_CASE("combine_candidates: one pair, one candidate") {
    MutationPool pool{{0, 0, 0}, {Delta{1, 0, 0}, Delta{0, 1, 0}}, 2};
    auto out = combine_candidates(pool, 100);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Assignment{1, 1, 0});
}

TEST_CASE("combine_candidates: matches exhaustive enumeration for small pools") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 8);
        const int m = 2 + static_cast<int>(rng() % 5);  // up to 6 atomics
        const Assignment base = oracle::random_bits(rng, n);
        std::vector<Assignment> nb;
        for (int i = 0; i < m; ++i) nb.push_back(oracle::random_bits(rng, n));
        MutationPool pool{base, atomic_deltas(base, nb), 2 + static_cast<int>(rng() % 5)};
        const auto expected = enumerate_expected(pool);

        const auto emitted = combine_candidates(pool, 1 << 14);
        std::set<Assignment> got(emitted.begin(), emitted.end());
        CHECK(got.size() == emitted.size());  // no duplicate ever emitted
        CHECK(got == expected);
        for (const Assignment& c : emitted) {
            CHECK(c.size() == base.size());
            CHECK(c != base);
        }
    }
}

TEST_CASE("combine_candidates: level-2 count bounded by pairs") {
    std::mt19937_64 rng(11);
    for (int m = 2; m <= 6; ++m) {
        const int n = 16;
        const Assignment base = oracle::random_bits(rng, n);
        std::vector<Assignment> nb;
        for (int i = 0; i < m; ++i) nb.push_back(oracle::random_bits(rng, n));
        MutationPool pool{base, atomic_deltas(base, nb), 2};
        const auto out = combine_candidates(pool, 1 << 14);
        CHECK(out.size() <= static_cast<std::size_t>(m * (m - 1) / 2));
    }
}

TEST_CASE("CandidateStream: ascending levels, index-lexicographic within a level") {
    // Unit-vector deltas make every subset's XOR unique: the candidate's
    // popcount equals the combination size, which pins the emission order.
    const int m = 6;
    Assignment base(m, 0);
    std::vector<Delta> atomics;
    for (int i = 0; i < m; ++i) {
        Delta d(m, 0);
        d[static_cast<std::size_t>(i)] = 1;
        atomics.push_back(d);
    }
    MutationPool pool{base, atomics, 4};
    CandidateStream stream(pool);

    std::vector<Assignment> emitted;
    while (auto c = stream.next()) emitted.push_back(*c);

    std::size_t expected_total = 0;
    for (int k = 2; k <= 4; ++k) {
        std::size_t c = 1;
        for (int i = 0; i < k; ++i) c = c * (m - i) / (i + 1);
        expected_total += c;
    }
    REQUIRE(emitted.size() == expected_total);

    int last_level = 2;
    std::vector<Assignment> level_block;
    std::map<int, std::vector<Assignment>> by_level;
    for (const Assignment& c : emitted) {
        int level = 0;
        for (auto b : c) level += b;
        CHECK(level >= last_level);  // levels never go back down
        last_level = std::max(last_level, level);
        by_level[level].push_back(c);
    }
    // Within level 2 the first combination is {d0, d1}, the last {d4, d5}.
    CHECK(by_level[2].front() == Assignment{1, 1, 0, 0, 0, 0});
    CHECK(by_level[2].back() == Assignment{0, 0, 0, 0, 1, 1});
    CHECK(by_level[2].size() == 15);
}

TEST_CASE("combine_candidates: colliding combinations collapse to one emission") {
    // d0 ^ d1 == d2 ^ d3, so the two pairs propose the same candidate.
    Delta d0{1, 0, 0, 0}, d1{0, 1, 0, 0}, d2{1, 1, 1, 0}, d3{0, 0, 1, 0};
    MutationPool pool{{0, 0, 0, 0}, {d0, d1, d2, d3}, 2};
    auto out = combine_candidates(pool, 100);
    std::size_t hits = 0;
    for (const auto& c : out) hits += c == Assignment{1, 1, 0, 0} ? 1 : 0;
    CHECK(hits == 1);
}

TEST_CASE("CandidateStream: work limit pauses, a higher limit resumes") {
    // Two atomics cancelling pairwise: d0^d1 == d2^d3 == one fresh value,
    // then everything else is stale, so the walk matters.
    const int m = 8;
    Assignment base(4, 0);
    std::vector<Delta> atomics;
    std::mt19937_64 rng(1);
    for (int i = 0; i < m; ++i) {
        Delta d(4, 0);
        d[static_cast<std::size_t>(i % 4)] = 1;
        d[static_cast<std::size_t>((i + 1) % 4)] = 1;
        if (std::find(atomics.begin(), atomics.end(), d) == atomics.end()) atomics.push_back(d);
    }
    MutationPool pool{base, atomics, 4};
    CandidateStream bounded(pool);
    CandidateStream unbounded(pool);

    // Replaying with a tiny per-call work budget yields the same sequence.
    std::vector<Assignment> seq_bounded, seq_unbounded;
    while (auto c = unbounded.next()) seq_unbounded.push_back(*c);
    for (;;) {
        auto c = bounded.next(bounded.work() + 2);
        if (c) {
            seq_bounded.push_back(*c);
        } else if (bounded.exhausted()) {
            break;
        }
        // nullopt without exhaustion: limit hit, resume
    }
    CHECK(seq_bounded == seq_unbounded);
    CHECK(bounded.work() == unbounded.work());
}

TEST_CASE("combine_candidates: limit respected") {
    std::mt19937_64 rng(3);
    const Assignment base = oracle::random_bits(rng, 24);
    std::vector<Assignment> nb;
    for (int i = 0; i < 10; ++i) nb.push_back(oracle::random_bits(rng, 24));
    MutationPool pool{base, atomic_deltas(base, nb), 6};
    CHECK(combine_candidates(pool, 7).size() == 7);
}
