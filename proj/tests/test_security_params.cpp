#include <doctest.h>

#include <cmath>
#include <map>

#include "hcp/errors.hpp"
#include "hcp/security_params.hpp"

using namespace hcp;

namespace {

DigitFunctionSpec sum_function(unsigned d, unsigned k) {
    return {d, k, [d, k](const Digit* x) {
                unsigned s = 0;
                for (unsigned i = 0; i < k; ++i) s += x[i];
                return static_cast<Digit>(s % d);
            }};
}

// Enumerate all of Z_d^k, calling fn on each point.
template <typename F>
void for_all_points(unsigned d, unsigned k, F fn) {
    std::vector<Digit> x(k, 0);
    while (true) {
        fn(x);
        std::size_t i = 0;
        for (; i < k; ++i) {
            if (++x[i] < d) break;
            x[i] = 0;
        }
        if (i == k) return;
    }
}

}  // namespace

TEST_CASE("Fourier coefficients of parity and constant functions") {
    auto parity = sum_function(2, 2);
    auto c = fourier_coeff_bruteforce(parity, {1, 1}, 0);
    CHECK(c.real() == doctest::Approx(1.0));
    CHECK(std::abs(c.imag()) < 1e-12);
    DigitFunctionSpec zero{3, 2, [](const Digit*) { return Digit{0}; }};
    CHECK(fourier_coeff_bruteforce(zero, {0, 0}, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(fourier_coeff_bruteforce(zero, {1, 2}, 0)) < 1e-12);
    CHECK_THROWS_AS(fourier_coeff_bruteforce(sum_function(10, 8), std::vector<Digit>(8, 0), 0), ResourceError);
    CHECK_THROWS_AS(fourier_coeff_bruteforce(parity, {1}, 0), InputError);
}

TEST_CASE("full transform agrees with per-coefficient sums; Parseval, constant term, symmetry") {
    SchemeParams p{3, 1, 1, 5, 1};
    auto fn = family_function(p);
    for (unsigned j = 0; j < 3; ++j) {
        auto all = fourier_transform_all(fn, static_cast<Digit>(j));
        double parseval = 0;
        std::vector<Digit> alpha(fn.k, 0);
        for (std::size_t idx = 0; idx < all.size(); ++idx) {
            auto direct = fourier_coeff_bruteforce(fn, alpha, static_cast<Digit>(j));
            CHECK(std::abs(direct - all[idx]) < 1e-12);
            // Exact cyclotomic zero test agrees with the floating-point tolerance.
            CHECK(fourier_coeff_is_zero_exact(fn, alpha, static_cast<Digit>(j)) ==
                  (std::abs(all[idx]) <= kZeroTolerance));
            std::vector<Digit> neg(alpha.size());
            for (std::size_t i = 0; i < alpha.size(); ++i) neg[i] = static_cast<Digit>((3 - alpha[i]) % 3);
            CHECK(std::abs(fourier_coeff_bruteforce(fn, neg, static_cast<Digit>(j)) - std::conj(all[idx])) < 1e-12);
            parseval += std::norm(all[idx]);
            for (auto& a : alpha)
                if (++a < 3) break;
                else a = 0;
        }
        CHECK(parseval == doctest::Approx(1.0).epsilon(1e-9));
        double hits = 0;
        for_all_points(3, fn.k, [&](const std::vector<Digit>& x) { hits += fn.f(x.data()) == j; });
        CHECK(all[0].real() == doctest::Approx(2.0 * hits / 243.0 - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("weight-one coefficients of f_{1,1} at d=3 vanish for every j") {
    auto fn = family_function(SchemeParams{3, 1, 1, 5, 1});
    for (unsigned j = 0; j < 3; ++j)
        for (unsigned pos = 0; pos < 5; ++pos)
            for (Digit a = 1; a < 3; ++a) {
                std::vector<Digit> alpha(5, 0);
                alpha[pos] = a;
                CHECK(std::abs(fourier_coeff_bruteforce(fn, alpha, static_cast<Digit>(j))) < 1e-12);
                CHECK(fourier_coeff_is_zero_exact(fn, alpha, static_cast<Digit>(j)));
            }
}

TEST_CASE("distributional complexity by brute force") {
    CHECK(distributional_r(family_function(SchemeParams{3, 1, 1, 5, 1})).r == 2);
    CHECK(distributional_r(family_function(SchemeParams{2, 1, 1, 4, 1})).r == 2);
    auto s = distributional_r(sum_function(3, 4));
    CHECK(s.r == 4);
    CHECK(s.alpha_min == std::vector<Digit>{1, 1, 1, 1});
    auto over = distributional_r(sum_function(10, 8), 1000);
    CHECK(over.lower_bound_only);
}

TEST_CASE("linearity gap by brute force") {
    auto g31 = linearity_g(family_function(SchemeParams{3, 1, 1, 5, 1}));
    CHECK(g31.g == 1);
    CHECK_FALSE(g31.probable);
    CHECK(linearity_g(sum_function(5, 3)).g == 0);
    CHECK(linearity_g(family_function(SchemeParams{2, 2, 1, 5, 1})).g == 2);
    // Restricting to d̂ = d only gives the same answer for prime d.
    LinearityOptions only_d;
    only_d.all_divisors = false;
    CHECK(linearity_g(family_function(SchemeParams{3, 1, 1, 5, 1}), only_d).g == 1);
    // Budget exhaustion reports a lower bound.
    LinearityOptions tiny;
    tiny.budget = 10;
    auto lb = linearity_g(family_function(SchemeParams{3, 2, 2, 7, 1}), tiny);
    CHECK(lb.lower_bound_only);
}

TEST_CASE("conditional output distribution matches enumeration") {
    SchemeParams p{3, 1, 2, 6, 1};
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::optional<Digit>> fixed(6);
        for (auto& f : fixed)
            if (rng.uniform(2)) f = static_cast<Digit>(rng.uniform(3));
        std::vector<double> counts(3, 0);
        double total = 0;
        for_all_points(3, 6, [&](const std::vector<Digit>& x) {
            for (int i = 0; i < 6; ++i)
                if (fixed[i] && *fixed[i] != x[i]) return;
            counts[eval_f_raw(p, x.data())] += 1;
            total += 1;
        });
        auto dist = conditional_output_dist(p, fixed);
        for (int o = 0; o < 3; ++o) CHECK(dist[o] == doctest::Approx(counts[o] / total).epsilon(1e-12));
    }
}

TEST_CASE("fixing up to k2 coordinates leaves the output exactly uniform") {
    for (auto p : {SchemeParams{3, 1, 1, 5, 1}, SchemeParams{3, 2, 2, 7, 1}, SchemeParams{2, 1, 2, 5, 1}}) {
        const unsigned k = p.clause_width();
        // Exact enumeration oracle over every support of size k2 and every fixing.
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            if (static_cast<unsigned>(__builtin_popcount(mask)) != p.k2) continue;
            std::vector<unsigned> supp;
            for (unsigned i = 0; i < k; ++i)
                if (mask >> i & 1) supp.push_back(i);
            for_all_points(p.d, p.k2, [&](const std::vector<Digit>& vals) {
                std::vector<double> counts(p.d, 0);
                for_all_points(p.d, k, [&](const std::vector<Digit>& x) {
                    for (std::size_t i = 0; i < supp.size(); ++i)
                        if (x[supp[i]] != vals[i]) return;
                    counts[eval_f_raw(p, x.data())] += 1;
                });
                for (double c : counts) REQUIRE(c == counts[0]);
            });
        }
    }
    SchemeParams p10{10, 2, 2, 14, 1};
    auto empty = conditional_output_dist(p10, {});
    for (double v : empty) CHECK(v == doctest::Approx(0.1));
    std::vector<std::optional<Digit>> biased(14);
    biased[0] = 0;
    biased[12] = 0;
    biased[13] = 0;
    auto dist = conditional_output_dist(p10, biased);
    CHECK(dist[0] > 0.1 + 1e-6);
    CHECK(dist[0] == doctest::Approx(0.1 * 1.0 + 0.9 * 0.1));
}

TEST_CASE("structured profile at d=10 and agreement with brute force at small d") {
    auto a = structured_profile_f(SchemeParams{10, 2, 2, 14, 1});
    CHECK(a.r == 3);
    CHECK(a.g == 2);
    CHECK(a.s == doctest::Approx(1.5));
    auto b = structured_profile_f(SchemeParams{10, 1, 3, 14, 1});
    CHECK(b.r == 4);
    CHECK(b.g == 1);
    CHECK(b.s == doctest::Approx(2.0));
    CHECK(b.g_probable);

    SchemeParams small{3, 1, 1, 5, 1};
    auto s = structured_profile_f(small);
    auto bf = bruteforce_profile(family_function(small));
    CHECK(s.r == bf.r);
    CHECK(s.g == bf.g);
    CHECK(s.s == doctest::Approx(bf.s));
    CHECK(s.g_method == "structured (exhaustive)");
}

TEST_CASE("s is nondecreasing in k1 and k2") {
    double prev_row = 0;
    for (unsigned k1 = 1; k1 <= 3; ++k1) {
        double prev = 0;
        for (unsigned k2 = 1; k2 <= 4; ++k2) {
            auto prof = structured_profile_f(SchemeParams{3, k1, k2, 20, 1});
            CHECK(prof.s >= prev);
            prev = prof.s;
            if (k2 == 4) {
                CHECK(prof.s >= prev_row);
                prev_row = prof.s;
            }
        }
    }
}

TEST_CASE("Fourier decomposition identity on tiny instances") {
    Rng rng(99);
    for (unsigned d : {2u, 3u}) {
        for (int trial = 0; trial < 5; ++trial) {
            // Random function on Z_d^3.
            std::vector<Digit> table(d * d * d);
            for (auto& v : table) v = static_cast<Digit>(rng.uniform(d));
            DigitFunctionSpec fn{d, 3, [table, d](const Digit* x) { return table[x[0] + d * (x[1] + d * x[2])]; }};
            auto sigma = gen_mapping(d, 5, rng.next());
            std::vector<double> h(60);
            for (auto& v : h) v = rng.uniform_real() * 2 - 1;
            auto res = decomposition_check(fn, 5, sigma, h, static_cast<Digit>(rng.uniform(d)));
            CHECK(res.residual < 1e-12);
        }
    }
    // r(f) = 2 (f = x1 + x2 mod d ignores x3): the ℓ = 1 term vanishes.
    for (unsigned d : {2u, 3u}) {
        DigitFunctionSpec fn{d, 3, [d](const Digit* x) { return static_cast<Digit>((x[0] + x[1]) % d); }};
        CHECK(distributional_r(fn).r == 2);
        for (int trial = 0; trial < 10; ++trial) {
            auto sigma = gen_mapping(d, 5, rng.next());
            std::vector<double> h(60);
            for (auto& v : h) v = rng.uniform_real();
            auto res = decomposition_check(fn, 5, sigma, h, 0);
            CHECK(std::abs(res.b[1]) < 1e-12);
            CHECK(res.residual < 1e-12);
        }
    }
}

TEST_CASE("decomposition with constant h: zero on average over the secret mapping") {
    // For a fixed σ the digit histogram of σ biases Δ; averaged over every
    // σ ∈ Z_2^5 both Δ and each b_ℓ vanish.
    std::vector<Digit> table{0, 1, 1, 1, 0, 0, 1, 0};
    DigitFunctionSpec fn{2, 3, [table](const Digit* x) { return table[x[0] + 2 * (x[1] + 2 * x[2])]; }};
    std::vector<double> h(60, 1.0);
    double delta_sum = 0;
    std::vector<double> b_sum(4, 0);
    for (unsigned s = 0; s < 32; ++s) {
        SecretMapping sigma{{}, 2};
        for (unsigned i = 0; i < 5; ++i) sigma.digits.push_back(static_cast<Digit>(s >> i & 1));
        auto res = decomposition_check(fn, 5, sigma, h, 1);
        CHECK(res.residual < 1e-12);
        delta_sum += res.direct;
        for (int l = 1; l <= 3; ++l) b_sum[l] += res.b[l];
    }
    CHECK(std::abs(delta_sum / 32) < 1e-12);
    for (int l = 1; l <= 3; ++l) CHECK(std::abs(b_sum[l] / 32) < 1e-12);
}
