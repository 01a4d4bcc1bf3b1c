#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include <xorsat/mutate.hpp>
#include <xorsat/solver.hpp>

#include "oracle.hpp"

using namespace xorsat;

TEST_CASE("solve: contradiction is UNSAT") {
    auto f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").formula;
    CHECK(solve(f).status == SolveStatus::Unsat);
}

TEST_CASE("solve: empty formula is SAT and the model evaluates") {
    Formula f;
    f.num_vars = 3;
    auto out = solve(f);
    REQUIRE(out.status == SolveStatus::Sat);
    CHECK(evaluate(f, *out.model));
}

TEST_CASE("solve: status matches brute force on random 3-CNF") {
    std::mt19937_64 rng(20260101);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 8);  // 5..12
        const double ratio = 1.0 + static_cast<double>(rng() % 401) / 100.0;
        const int m = static_cast<int>(ratio * n);
        const Formula f = oracle::random_cnf(rng, n, m);
        const bool sat = !oracle::ref_solutions(f).empty();
        auto out = solve(f, Budget{}, 1 + trial);
        REQUIRE(out.status != SolveStatus::Timeout);
        CHECK((out.status == SolveStatus::Sat) == sat);
        if (out.status == SolveStatus::Sat) CHECK(evaluate(f, *out.model));
    }
}

TEST_CASE("solve: deterministic for a fixed seed and step budget") {
    std::mt19937_64 rng(5);
    const Formula f = oracle::random_cnf(rng, 12, 30);
    auto a = solve(f, Budget{}, 42);
    auto b = solve(f, Budget{}, 42);
    CHECK(a.status == b.status);
    CHECK(a.steps == b.steps);
    CHECK(a.model == b.model);
}

TEST_CASE("solve: tiny step budget times out instead of guessing") {
    std::mt19937_64 rng(8);
    const Formula f = oracle::random_cnf(rng, 40, 170);
    auto out = solve(f, Budget{.max_steps = 5}, 1);
    CHECK(out.status == SolveStatus::Timeout);
    CHECK_FALSE(out.model.has_value());
}

TEST_CASE("solve_seeded: unique solution yields exactly one model") {
    auto f = parse_dimacs("p cnf 1 1\n1 0\n").formula;
    auto models = solve_seeded(f, 2, 7);
    REQUIRE(models.size() == 1);
    CHECK(models[0] == Assignment{1});
}

TEST_CASE("solve_seeded: full space of an empty formula") {
    Formula f;
    f.num_vars = 2;
    auto models = solve_seeded(f, 4, 3);
    REQUIRE(models.size() == 4);
    std::set<Assignment> s(models.begin(), models.end());
    CHECK(s.size() == 4);
}

TEST_CASE("solve_seeded: models valid, distinct, and within the brute-force set") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 9);  // 4..12
        const Formula f = oracle::planted_cnf(rng, n, 2 * n);
        const auto solutions = oracle::ref_solutions(f);
        const auto models = solve_seeded(f, 6, trial + 1);
        std::set<Assignment> seen;
        for (const auto& m : models) {
            CHECK(evaluate(f, m));
            CHECK(seen.insert(m).second);
            CHECK(std::find(solutions.begin(), solutions.end(), m) != solutions.end());
        }
        CHECK(models.size() == std::min<std::size_t>(6, solutions.size()));
    }
}

TEST_CASE("solve_seeded: zero-variable formula") {
    Formula f;
    auto models = solve_seeded(f, 3, 1);
    REQUIRE(models.size() == 1);
    CHECK(models[0].empty());
}

TEST_CASE("repair: valid candidate returns unchanged with zero flips") {
    auto f = parse_dimacs("p cnf 2 1\n1 2 0\n").formula;
    auto out = repair(f, {1, 0});
    REQUIRE(out.status == RepairStatus::Repaired);
    CHECK(out.flips == 0);
    CHECK(*out.model == Assignment{1, 0});
}

TEST_CASE("repair: forced single flip") {
    auto f = parse_dimacs("p cnf 1 1\n1 0\n").formula;
    auto out = repair(f, {0});
    REQUIRE(out.status == RepairStatus::Repaired);
    CHECK(*out.model == Assignment{1});
    CHECK(out.flips == 1);
}

TEST_CASE("repair: flips never beat the brute-force minimum") {
    std::mt19937_64 rng(123);
    int repaired = 0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 11);  // 5..15
        const Formula f = oracle::planted_cnf(rng, n, 2 * n);
        Assignment cand = oracle::random_bits(rng, n);
        auto out = repair(f, cand, {}, trial + 1);
        if (out.status != RepairStatus::Repaired) continue;
        ++repaired;
        CHECK(evaluate(f, *out.model));
        CHECK(out.flips == hamming(cand, *out.model));
        auto min_d = oracle::min_flip_distance(f, cand);
        REQUIRE(min_d.has_value());
        CHECK(out.flips >= *min_d);
    }
    CHECK(repaired == trials);  // planted instances, generous default budgets
}

TEST_CASE("repair: unsatisfiable formula fails") {
    auto f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").formula;
    RepairOptions opts;
    opts.max_flips = 200;
    auto out = repair(f, {0}, opts);
    CHECK(out.status == RepairStatus::Failed);
}

TEST_CASE("repair: length mismatch throws") {
    auto f = parse_dimacs("p cnf 2 1\n1 0\n").formula;
    CHECK_THROWS_AS(repair(f, {1}), std::invalid_argument);
}

TEST_CASE("brute_force_solutions: trivial cases") {
    auto f = parse_dimacs("p cnf 2 1\n1 2 0\n").formula;
    auto sols = brute_force_solutions(f);
    REQUIRE(sols.size() == 3);
    CHECK(sols[0] == Assignment{0, 1});
    CHECK(sols[1] == Assignment{1, 0});
    CHECK(sols[2] == Assignment{1, 1});

    auto contra = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").formula;
    CHECK(brute_force_solutions(contra).empty());
}

TEST_CASE("brute_force_solutions: guard at 20 variables") {
    Formula f;
    f.num_vars = 21;
    CHECK_THROWS_AS(brute_force_solutions(f), std::invalid_argument);
}

TEST_CASE("brute_force_solutions: count matches inclusion-exclusion") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);  // 2..8
        const int m = 1 + static_cast<int>(rng() % 8);  // 1..8
        const Formula f = oracle::random_cnf(rng, n, m, 2 + static_cast<int>(rng() % 2));
        CHECK(brute_force_solutions(f).size() == oracle::count_by_inclusion_exclusion(f));
    }
}

TEST_CASE("brute_force_solutions agrees with the reference enumerator") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        const Formula f = oracle::random_cnf(rng, n, 2 * n);
        CHECK(brute_force_solutions(f) == oracle::ref_solutions(f));
    }
}

TEST_CASE("solve_with_hint: model stays near the hint when possible") {
    Formula f;
    f.num_vars = 8;  // unconstrained: hint should be returned exactly
    const Assignment hint{1, 0, 1, 1, 0, 0, 1, 0};
    auto out = solve_with_hint(f, hint);
    REQUIRE(out.status == SolveStatus::Sat);
    CHECK(*out.model == hint);
}
