#include <doctest.h>

#include <set>

#include "hcp/errors.hpp"
#include "hcp/linsolve.hpp"
#include "hcp/rng.hpp"

using namespace hcp;

namespace {

bool satisfies(const std::vector<LinearConstraint>& cs, const std::vector<Digit>& x, unsigned d) {
    for (const auto& c : cs) {
        unsigned long long s = 0;
        for (const auto& [idx, coef] : c.terms) s += static_cast<unsigned long long>(coef) * x[idx];
        if (s % d != c.constant % d) return false;
    }
    return true;
}

// Enumerates Z_d^n and collects every solution.
std::vector<std::vector<Digit>> brute_solutions(const std::vector<LinearConstraint>& cs, unsigned n, unsigned d) {
    std::vector<std::vector<Digit>> out;
    std::vector<Digit> x(n, 0);
    while (true) {
        if (satisfies(cs, x, d)) out.push_back(x);
        unsigned i = 0;
        for (; i < n; ++i) {
            if (++x[i] < d) break;
            x[i] = 0;
        }
        if (i == n) return out;
    }
}

}  // namespace

TEST_CASE("factor_modulus") {
    auto f = factor_modulus(360);
    REQUIRE(f.size() == 3);
    CHECK(f[0].q == 8);
    CHECK(f[1].q == 9);
    CHECK(f[2].q == 5);
    CHECK(factor_modulus(10).size() == 2);
    CHECK(factor_modulus(7)[0].e == 1);
    CHECK_THROWS_AS(factor_modulus(1), InputError);
}

TEST_CASE("2x = 4 mod 10 has exactly the solutions 2 and 7") {
    LinearSystem sys(1, 10);
    sys.add({{{0, 2u}}, 4});
    auto res = sys.solve();
    CHECK(res.status == SolveStatus::Family);
    CHECK(res.solution_count == 2);
    std::set<int> seen;
    sys.for_each_solution(100, [&](const std::vector<Digit>& x) {
        seen.insert(x[0]);
        return true;
    });
    CHECK(seen == std::set<int>{2, 7});

    LinearSystem bad(1, 10);
    bad.add({{{0, 2u}}, 3});
    CHECK(bad.solve().status == SolveStatus::Inconsistent);
}

TEST_CASE("solver agrees with exhaustive enumeration on random systems") {
    Rng rng(2024);
    for (unsigned d : {10u, 4u, 8u, 9u, 12u, 7u}) {
        for (int trial = 0; trial < 500; ++trial) {
            unsigned n = 1 + static_cast<unsigned>(rng.uniform(d <= 4 ? 6 : (d <= 9 ? 5 : 4)));
            unsigned m = static_cast<unsigned>(rng.uniform(n + 3));
            std::vector<LinearConstraint> cs;
            // Plant a solution half the time so consistent systems are common.
            std::vector<Digit> planted(n);
            for (auto& v : planted) v = static_cast<Digit>(rng.uniform(d));
            bool plant = rng.uniform(2) == 0;
            for (unsigned i = 0; i < m; ++i) {
                LinearConstraint c;
                unsigned long long s = 0;
                for (unsigned v = 0; v < n; ++v) {
                    if (rng.uniform(3) == 0) continue;
                    unsigned coef = static_cast<unsigned>(rng.uniform(d));
                    c.terms.emplace_back(v, coef);
                    s += static_cast<unsigned long long>(coef) * planted[v];
                }
                c.constant = plant ? static_cast<unsigned>(s % d) : static_cast<unsigned>(rng.uniform(d));
                cs.push_back(std::move(c));
            }
            auto brute = brute_solutions(cs, n, d);
            LinearSystem sys(n, d);
            for (const auto& c : cs) sys.add(c);
            auto res = sys.solve();
            if (brute.empty()) {
                REQUIRE(res.status == SolveStatus::Inconsistent);
                continue;
            }
            REQUIRE(res.status != SolveStatus::Inconsistent);
            CHECK(res.solution_count == doctest::Approx(static_cast<double>(brute.size())));
            CHECK((res.status == SolveStatus::Unique) == (brute.size() == 1));
            CHECK(satisfies(cs, res.solution, d));
            std::set<std::vector<Digit>> listed;
            sys.for_each_solution(100000, [&](const std::vector<Digit>& x) {
                listed.insert(x);
                return true;
            });
            CHECK(listed == std::set<std::vector<Digit>>(brute.begin(), brute.end()));
        }
    }
}

TEST_CASE("linear_solve_mod and early inconsistency") {
    std::vector<LinearConstraint> cs{{{{0, 1u}, {1, 1u}}, 3}, {{{0, 1u}}, 1}};
    auto res = linear_solve_mod(cs, 2, 10);
    REQUIRE(res.status == SolveStatus::Unique);
    CHECK(res.solution == std::vector<Digit>{1, 2});

    LinearSystem sys(2, 10);
    CHECK(sys.add({{{0, 1u}}, 1}));
    CHECK_FALSE(sys.add({{{0, 1u}}, 2}));
    CHECK(sys.inconsistent());
    CHECK_FALSE(sys.add({{{1, 1u}}, 2}));
    CHECK_THROWS_AS(LinearSystem(2, 10).add({{{5, 1u}}, 0}), InputError);
}
