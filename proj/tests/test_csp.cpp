#include <doctest.h>

#include <algorithm>

#include "hcp/csp.hpp"
#include "hcp/errors.hpp"

using namespace hcp;

TEST_CASE("no pairs: the all-zero mapping is returned at once") {
    SchemeParams p{10, 1, 1, 12, 1};
    auto rep = csp_attack(p, {});
    REQUIRE(rep.success);
    CHECK(rep.sigma.digits == std::vector<Digit>(12, 0));
    CHECK(rep.backtracks == 0);
}

TEST_CASE("f_{1,1}, n=12, m=200 recovers the planted mapping") {
    SchemeParams p{10, 1, 1, 12, 1};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto inst = make_planted_instance(p, 200, seed);
        auto rep = csp_attack(p, inst.pairs);
        REQUIRE(rep.success);
        CHECK(reproduces_all(p, rep.sigma, inst.pairs));
        CHECK(rep.sigma.digits == inst.sigma.digits);
    }
}

TEST_CASE("few pairs: any consistent mapping is accepted") {
    SchemeParams p{3, 1, 2, 8, 1};
    auto inst = make_planted_instance(p, 6, 4);
    auto rep = csp_attack(p, inst.pairs);
    REQUIRE(rep.success);
    CHECK(reproduces_all(p, rep.sigma, inst.pairs));
}

TEST_CASE("contradictory pairs are reported unsatisfiable; budgets stop the search") {
    SchemeParams p{10, 1, 1, 12, 1};
    auto inst = make_planted_instance(p, 50, 9);
    auto bad = inst.pairs;
    bad.push_back(bad[0]);
    bad.back().response = static_cast<Digit>((bad[0].response + 1) % 10);
    auto rep = csp_attack(p, bad);
    CHECK_FALSE(rep.success);
    CHECK(rep.failure_reason == "no mapping satisfies every pair");

    SchemeParams big{10, 1, 1, 20, 1};
    auto hard = make_planted_instance(big, 200, 1);
    CspBudget tiny;
    tiny.max_nodes = 3;
    auto cut = csp_attack(big, hard.pairs, tiny);
    CHECK_FALSE(cut.success);
    CHECK(cut.failure_reason == "node budget exhausted");
    CHECK(cut.nodes == 3);
}

TEST_CASE("GAC pruning agrees with brute force on tiny instances") {
    // Every mapping is enumerated; the solver must find one iff one exists.
    SchemeParams p{3, 1, 1, 5, 1};
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ChallengePair> pairs;
        unsigned m = 1 + static_cast<unsigned>(rng.uniform(8));
        for (unsigned i = 0; i < m; ++i)
            pairs.push_back({gen_clause(p, rng), static_cast<Digit>(rng.uniform(3))});
        bool exists = false;
        for (unsigned code = 0; code < 243 && !exists; ++code) {
            SecretMapping s{{}, 3};
            for (unsigned c = code, i = 0; i < 5; ++i, c /= 3) s.digits.push_back(static_cast<Digit>(c % 3));
            exists = reproduces_all(p, s, pairs);
        }
        auto rep = csp_attack(p, pairs);
        CHECK(rep.success == exists);
    }
}
