#include "hcp/security_params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

std::uint64_t checked_pow(std::uint64_t base, unsigned exp, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (v > cap / base) return cap + 1;
        v *= base;
    }
    return v;
}

std::vector<std::complex<double>> roots_of_unity(unsigned d) {
    // w[s] = exp(−2πi s / d)
    std::vector<std::complex<double>> w(d);
    for (unsigned s = 0; s < d; ++s) w[s] = std::polar(1.0, -2.0 * std::numbers::pi * s / d);
    return w;
}

// Odometer increment over Z_d^len; returns false after the last element.
bool next_tuple(std::vector<Digit>& x, unsigned d) {
    for (auto& v : x) {
        if (++v < d) return true;
        v = 0;
    }
    return false;
}

// Next k-combination of [0, n) in lexicographic order.
bool next_combination(std::vector<unsigned>& c, unsigned n) {
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::vector<unsigned> first_combination(unsigned k) {
    std::vector<unsigned> c(k);
    for (unsigned i = 0; i < k; ++i) c[i] = i;
    return c;
}

std::vector<unsigned> divisors_above_one(unsigned d) {
    std::vector<unsigned> out;
    for (unsigned e = 2; e <= d; ++e)
        if (d % e == 0) out.push_back(e);
    return out;
}

// Residue counts c_s = Σ_{x : x·α ≡ s} Q^{f,j}(x).
std::vector<std::int64_t> residue_counts(const DigitFunctionSpec& fn, const std::vector<Digit>& alpha, Digit j) {
    std::vector<std::int64_t> c(fn.d, 0);
    std::vector<Digit> x(fn.k, 0);
    do {
        unsigned s = 0;
        for (unsigned i = 0; i < fn.k; ++i) s += static_cast<unsigned>(x[i]) * alpha[i];
        c[s % fn.d] += fn.f(x.data()) == j ? 1 : -1;
    } while (next_tuple(x, fn.d));
    return c;
}

void check_alpha(const DigitFunctionSpec& fn, const std::vector<Digit>& alpha) {
    if (alpha.size() != fn.k) throw InputError("frequency vector length must equal k");
    for (Digit a : alpha)
        if (a >= fn.d) throw InputError("frequency entry outside Z_d");
}

using Poly = std::vector<std::int64_t>;  // coefficient of X^i at index i

// Remainder of a modulo monic b.
Poly poly_mod(Poly a, const Poly& b) {
    while (a.size() >= b.size()) {
        std::int64_t lead = a.back();
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= lead * b[i];
        a.pop_back();
    }
    return a;
}

// Exact quotient of a by monic b.
Poly poly_div(Poly a, const Poly& b) {
    if (a.size() < b.size()) return {0};
    Poly q(a.size() - b.size() + 1, 0);
    while (a.size() >= b.size()) {
        std::int64_t lead = a.back();
        std::size_t shift = a.size() - b.size();
        q[shift] = lead;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= lead * b[i];
        a.pop_back();
    }
    return q;
}

Poly cyclotomic(unsigned d) {
    Poly p(d + 1, 0);
    p[0] = -1;
    p[d] = 1;
    for (unsigned e = 1; e < d; ++e)
        if (d % e == 0) p = poly_div(p, cyclotomic(e));
    return p;
}

}  // namespace

DigitFunctionSpec family_function(const SchemeParams& params) {
    params.validate_function();
    SchemeParams p = params;
    return {p.d, p.clause_width(), [p](const Digit* x) { return eval_f_raw(p, x); }};
}

std::complex<double> fourier_coeff_bruteforce(const DigitFunctionSpec& fn, const std::vector<Digit>& alpha, Digit j,
                                              std::uint64_t budget) {
    check_alpha(fn, alpha);
    const std::uint64_t size = checked_pow(fn.d, fn.k, budget);
    if (size > budget) throw ResourceError("d^k exceeds the enumeration budget");
    auto c = residue_counts(fn, alpha, j);
    auto w = roots_of_unity(fn.d);
    std::complex<double> sum = 0;
    for (unsigned s = 0; s < fn.d; ++s) sum += static_cast<double>(c[s]) * w[s];
    return sum / static_cast<double>(size);
}

bool fourier_coeff_is_zero_exact(const DigitFunctionSpec& fn, const std::vector<Digit>& alpha, Digit j) {
    check_alpha(fn, alpha);
    if (checked_pow(fn.d, fn.k, 10'000) > 10'000) throw ResourceError("exact arithmetic limited to d^k <= 10^4");
    // Σ c_s ω^{−s} vanishes iff its conjugate Σ c_s ω^{s} does, i.e. Φ_d | Σ c_s X^s.
    Poly p = residue_counts(fn, alpha, j);
    Poly rem = poly_mod(p, cyclotomic(fn.d));
    return std::all_of(rem.begin(), rem.end(), [](std::int64_t v) { return v == 0; });
}

std::vector<std::complex<double>> fourier_transform_all(const DigitFunctionSpec& fn, Digit j, std::uint64_t budget) {
    const std::uint64_t size = checked_pow(fn.d, fn.k, budget);
    if (size > budget) throw ResourceError("d^k exceeds the enumeration budget");
    const unsigned d = fn.d;
    std::vector<std::complex<double>> a(size);
    std::vector<Digit> x(fn.k, 0);
    for (std::uint64_t idx = 0; idx < size; ++idx) {
        a[idx] = fn.f(x.data()) == j ? 1.0 : -1.0;
        next_tuple(x, d);
    }
    auto w = roots_of_unity(d);
    std::vector<std::complex<double>> line(d), out(d);
    std::uint64_t stride = 1;
    for (unsigned axis = 0; axis < fn.k; ++axis, stride *= d) {
        for (std::uint64_t base = 0; base < size; ++base) {
            if ((base / stride) % d != 0) continue;
            for (unsigned xv = 0; xv < d; ++xv) line[xv] = a[base + xv * stride];
            for (unsigned al = 0; al < d; ++al) {
                std::complex<double> s = 0;
                for (unsigned xv = 0; xv < d; ++xv) s += line[xv] * w[(xv * al) % d];
                out[al] = s;
            }
            for (unsigned al = 0; al < d; ++al) a[base + al * stride] = out[al];
        }
    }
    const double scale = 1.0 / static_cast<double>(size);
    for (auto& v : a) v *= scale;
    return a;
}

DistributionalResult distributional_r(const DigitFunctionSpec& fn, std::uint64_t budget) {
    DistributionalResult res;
    const std::uint64_t size = checked_pow(fn.d, fn.k, budget);
    if (size > budget) {
        res.r = 1;
        res.lower_bound_only = true;
        return res;
    }
    unsigned best_w = fn.k + 1;
    std::vector<Digit> best_alpha;
    for (unsigned j = 0; j < fn.d; ++j) {
        auto coeffs = fourier_transform_all(fn, static_cast<Digit>(j), budget);
        res.work += size * (1 + static_cast<std::uint64_t>(fn.k) * fn.d);
        std::vector<Digit> alpha(fn.k, 0);
        for (std::uint64_t idx = 0; idx < size; ++idx, next_tuple(alpha, fn.d)) {
            if (idx == 0 || std::abs(coeffs[idx]) <= kZeroTolerance) continue;
            unsigned w = static_cast<unsigned>(std::count_if(alpha.begin(), alpha.end(), [](Digit a) { return a; }));
            if (w < best_w || (w == best_w && alpha < best_alpha)) {
                best_w = w;
                best_alpha = alpha;
                res.j_min = static_cast<Digit>(j);
                res.value = coeffs[idx];
            }
        }
    }
    // A function with no nonvanishing nonzero-frequency coefficient (constant f)
    // reports r = k + 1: no weight up to k is informative.
    res.r = best_w;
    res.alpha_min = best_alpha;
    return res;
}

RestrictionTest test_restriction_linear(const DigitFunctionSpec& fn, const std::vector<unsigned>& S,
                                        const std::vector<Digit>& fixing, unsigned d_hat,
                                        std::uint64_t exhaustive_limit, unsigned samples, Rng& rng) {
    RestrictionTest res;
    std::vector<Digit> x(fn.k, 0);
    std::vector<bool> fixed(fn.k, false);
    for (std::size_t i = 0; i < S.size(); ++i) {
        fixed[S[i]] = true;
        x[S[i]] = fixing[i];
    }
    std::vector<unsigned> free;
    for (unsigned i = 0; i < fn.k; ++i)
        if (!fixed[i]) free.push_back(i);

    auto eval = [&] {
        ++res.evaluations;
        return static_cast<unsigned>(fn.f(x.data())) % d_hat;
    };
    // Fit the affine form from the base point and unit directions.
    const unsigned c = eval();
    std::vector<unsigned> a(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) {
        x[free[i]] = 1;
        a[i] = (eval() + d_hat - c) % d_hat;
        x[free[i]] = 0;
    }
    auto predicted = [&] {
        unsigned v = c;
        for (std::size_t i = 0; i < free.size(); ++i) v += a[i] * x[free[i]];
        return v % d_hat;
    };

    const std::uint64_t space = checked_pow(fn.d, static_cast<unsigned>(free.size()), exhaustive_limit);
    if (space <= exhaustive_limit) {
        std::vector<Digit> y(free.size(), 0);
        do {
            for (std::size_t i = 0; i < free.size(); ++i) x[free[i]] = y[i];
            if (eval() != predicted()) return res;
        } while (next_tuple(y, fn.d));
    } else {
        for (unsigned s = 0; s < samples; ++s) {
            for (unsigned i : free) x[i] = static_cast<Digit>(rng.uniform(fn.d));
            if (eval() != predicted()) return res;
        }
        res.probable = true;
    }
    res.linear = true;
    res.coefficients.push_back(static_cast<Digit>(c));
    for (unsigned v : a) res.coefficients.push_back(static_cast<Digit>(v));
    return res;
}

LinearityResult linearity_g(const DigitFunctionSpec& fn, const LinearityOptions& opts) {
    LinearityResult res;
    Rng rng(opts.seed);
    const auto moduli = opts.all_divisors ? divisors_above_one(fn.d) : std::vector<unsigned>{fn.d};
    for (unsigned ell = 0; ell <= fn.k; ++ell) {
        auto S = first_combination(ell);
        do {
            std::vector<Digit> fixing(ell, 0);
            do {
                for (unsigned d_hat : moduli) {
                    auto t = test_restriction_linear(fn, S, fixing, d_hat, opts.exhaustive_limit, opts.samples, rng);
                    res.work += t.evaluations;
                    if (t.linear) {
                        res.g = ell;
                        res.S_min = S;
                        res.fixing = fixing;
                        res.d_hat = d_hat;
                        res.coefficients = t.coefficients;
                        res.probable = t.probable;
                        return res;
                    }
                    if (res.work > opts.budget) {
                        // Every level below ell was fully refuted.
                        res.g = ell;
                        res.lower_bound_only = true;
                        return res;
                    }
                }
            } while (next_tuple(fixing, fn.d));
        } while (ell > 0 && next_combination(S, fn.k));
    }
    res.g = fn.k;  // fixing everything always yields a constant; not reached
    return res;
}

std::vector<double> conditional_output_dist(const SchemeParams& p, const std::vector<std::optional<Digit>>& fixed) {
    p.validate_function();
    const unsigned d = p.d, k = p.clause_width();
    if (fixed.size() > k) throw InputError("partial assignment wider than the clause");
    auto at = [&](unsigned pos) -> std::optional<Digit> {
        if (pos < fixed.size() && fixed[pos]) {
            if (*fixed[pos] >= d) throw InputError("fixed value outside Z_d");
            return fixed[pos];
        }
        return std::nullopt;
    };
    const double u = 1.0 / d;
    // Distribution of a sum over a block of positions, by repeated convolution.
    auto sum_dist = [&](unsigned first, unsigned count) {
        std::vector<double> dist(d, 0.0);
        dist[0] = 1.0;
        std::vector<double> next(d);
        for (unsigned pos = first; pos < first + count; ++pos) {
            auto v = at(pos);
            if (v) {
                for (unsigned s = 0; s < d; ++s) next[(s + *v) % d] = dist[s];
            } else {
                std::fill(next.begin(), next.end(), 0.0);
                for (unsigned s = 0; s < d; ++s)
                    for (unsigned a = 0; a < d; ++a) next[(s + a) % d] += dist[s] * u;
            }
            dist.swap(next);
        }
        return dist;
    };
    auto index_sum = sum_dist(d, p.k1);
    auto tail_sum = sum_dist(d + p.k1, p.k2);
    std::vector<double> out(d, 0.0);
    for (unsigned j = 0; j < d; ++j) {
        if (index_sum[j] == 0.0) continue;
        auto slot = at(j);
        for (unsigned s = 0; s < d; ++s) {
            double pj = index_sum[j] * tail_sum[s];
            if (pj == 0.0) continue;
            if (slot) {
                out[(*slot + s) % d] += pj;
            } else {
                for (unsigned a = 0; a < d; ++a) out[(a + s) % d] += pj * u;
            }
        }
    }
    return out;
}

SecurityProfile structured_profile_f(const SchemeParams& params, std::uint64_t seed) {
    params.validate_function();
    SecurityProfile prof;
    const unsigned d = params.d, k = params.clause_width();
    const double u = 1.0 / d;

    // r ≥ k2+1: every fixing of exactly k2 positions leaves the output uniform.
    // Fixings of fewer positions are mixtures of these, so they are covered.
    bool all_uniform = true;
    {
        auto S = first_combination(params.k2);
        do {
            std::vector<Digit> vals(params.k2, 0);
            do {
                std::vector<std::optional<Digit>> fixed(k);
                for (unsigned i = 0; i < params.k2; ++i) fixed[S[i]] = vals[i];
                auto dist = conditional_output_dist(params, fixed);
                prof.work += static_cast<std::uint64_t>(d) * d * k;
                for (double pr : dist)
                    if (std::abs(pr - u) > 1e-12) all_uniform = false;
            } while (all_uniform && next_tuple(vals, d));
        } while (all_uniform && next_combination(S, k));
    }

    // r ≤ k2+1: witness α = 1 on slot 0 and on every tail position.
    std::vector<unsigned> support{0};
    for (unsigned i = 0; i < params.k2; ++i) support.push_back(d + params.k1 + i);
    std::vector<Digit> alpha(k, 0);
    for (unsigned pos : support) alpha[pos] = 1;
    auto w = roots_of_unity(d);
    double best_abs = 0;
    {
        std::vector<std::complex<double>> coeff(d, 0.0);
        std::vector<Digit> vals(support.size(), 0);
        const double weight = std::pow(u, static_cast<double>(support.size()));
        do {
            std::vector<std::optional<Digit>> fixed(k);
            unsigned phase = 0;
            for (std::size_t i = 0; i < support.size(); ++i) {
                fixed[support[i]] = vals[i];
                phase += vals[i];
            }
            auto dist = conditional_output_dist(params, fixed);
            prof.work += static_cast<std::uint64_t>(d) * d * k;
            for (unsigned j = 0; j < d; ++j) coeff[j] += weight * (2.0 * dist[j] - 1.0) * w[phase % d];
        } while (next_tuple(vals, d));
        for (unsigned j = 0; j < d; ++j) {
            if (std::abs(coeff[j]) > best_abs + kZeroTolerance) {
                best_abs = std::abs(coeff[j]);
                prof.alpha_j = static_cast<Digit>(j);
                prof.alpha_value = coeff[j];
            }
        }
    }
    if (all_uniform && best_abs > kZeroTolerance) {
        prof.r = params.k2 + 1;
        prof.r_method = "structured";
    } else {
        prof.r = all_uniform ? params.k2 + 2 : params.k2;  // witness failed: only a bound is known
        prof.r_method = "structured (bound only)";
    }
    prof.alpha_min = alpha;

    // g: restrictions with fewer than k1 fixings must all be non-linear; fixing
    // the index variables yields slot_j + tails, which is linear.
    auto fn = family_function(params);
    Rng rng(seed);
    const std::uint64_t exhaustive_limit = 1'000'000;
    const unsigned samples = 10'000;
    bool sampled = false;
    unsigned g = params.k1;
    for (unsigned ell = 0; ell < params.k1 && g == params.k1; ++ell) {
        auto S = first_combination(ell);
        do {
            std::vector<Digit> fixing(ell, 0);
            do {
                for (unsigned d_hat : divisors_above_one(d)) {
                    auto t = test_restriction_linear(fn, S, fixing, d_hat, exhaustive_limit, samples, rng);
                    prof.work += t.evaluations;
                    if (t.linear) {
                        g = ell;
                        prof.S_min = S;
                        prof.fixing = fixing;
                        sampled = sampled || t.probable;
                    }
                }
            } while (g == params.k1 && next_tuple(fixing, d));
        } while (g == params.k1 && ell > 0 && next_combination(S, k));
    }
    if (g == params.k1) {
        std::vector<unsigned> S;
        for (unsigned i = 0; i < params.k1; ++i) S.push_back(d + i);
        std::vector<Digit> fixing(params.k1, 0);
        auto t = test_restriction_linear(fn, S, fixing, d, exhaustive_limit, samples, rng);
        prof.work += t.evaluations;
        if (t.linear) {
            prof.S_min = S;
            prof.fixing = fixing;
            prof.g_probable = t.probable;
            sampled = sampled || t.probable;
        } else {
            g = params.k1 + 1;  // would contradict the family's structure
        }
    }
    prof.g = g;
    prof.g_method = sampled ? "structured (sampled)" : "structured (exhaustive)";
    prof.s = std::min(prof.r / 2.0, prof.g + 1.0);
    return prof;
}

SecurityProfile bruteforce_profile(const DigitFunctionSpec& fn, std::uint64_t budget) {
    SecurityProfile prof;
    auto r = distributional_r(fn, budget);
    LinearityOptions opts;
    opts.budget = budget;
    auto g = linearity_g(fn, opts);
    prof.r = r.r;
    prof.g = g.g;
    prof.r_method = r.lower_bound_only ? "brute-force (lower bound)" : "brute-force";
    prof.g_method = g.lower_bound_only ? "brute-force (lower bound)" : "brute-force";
    prof.g_probable = g.probable;
    prof.alpha_min = r.alpha_min;
    prof.alpha_j = r.j_min;
    prof.alpha_value = r.value;
    prof.S_min = g.S_min;
    prof.fixing = g.fixing;
    prof.work = r.work + g.work;
    prof.s = std::min(prof.r / 2.0, prof.g + 1.0);
    return prof;
}

std::vector<std::vector<Index>> enumerate_ordered_clauses(unsigned n, unsigned k) {
    std::vector<std::vector<Index>> out;
    if (k > n) return out;
    std::vector<Index> cur;
    std::vector<bool> used(n, false);
    auto rec = [&](auto&& self) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (Index i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = true;
            cur.push_back(i);
            self(self);
            cur.pop_back();
            used[i] = false;
        }
    };
    rec(rec);
    return out;
}

DecompositionResult decomposition_check(const DigitFunctionSpec& fn, unsigned n, const SecretMapping& sigma,
                          const std::vector<double>& h, Digit j, std::uint64_t budget) {
    const unsigned d = fn.d, k = fn.k;
    if (sigma.size() != n || sigma.d != d) throw InputError("mapping does not match (n, d)");
    if (checked_pow(d, k, budget) > budget) throw ResourceError("d^k exceeds the decomposition budget");
    const auto clauses = enumerate_ordered_clauses(n, k);
    if (clauses.size() > budget) throw ResourceError("|X_k| exceeds the decomposition budget");
    if (h.size() != clauses.size()) throw InputError("h must have one entry per ordered clause");
    const double Xk = static_cast<double>(clauses.size());

    auto coeffs = fourier_transform_all(fn, j, budget);
    auto w = roots_of_unity(d);

    // Direct side: E_C[h(C)·Q(σ(C))] − Q̂_0 · E_C[h(C)].
    double corr = 0, mean_h = 0;
    std::vector<Digit> vals(k);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
        for (unsigned i = 0; i < k; ++i) vals[i] = sigma.digits[clauses[c][i]];
        corr += h[c] * (fn.f(vals.data()) == j ? 1.0 : -1.0);
        mean_h += h[c];
    }
    corr /= Xk;
    mean_h /= Xk;
    DecompositionResult res;
    res.direct = corr - coeffs[0].real() * mean_h;

    // Decomposed side: b_ℓ = Σ_{H(α)=ℓ} Q̂_α Σ_{C_ℓ∈X_ℓ} χ̄_{α|supp}(σ(C_ℓ)) h_{supp(α)}(C_ℓ).
    std::vector<std::complex<double>> b(k + 1, 0.0);
    std::complex<double> decomposed = 0;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::vector<unsigned> supp;
        for (unsigned i = 0; i < k; ++i)
            if (mask >> i & 1) supp.push_back(i);
        const unsigned ell = static_cast<unsigned>(supp.size());
        const auto sub = enumerate_ordered_clauses(n, ell);
        const double Xl = static_cast<double>(sub.size());
        // h_S(C_ℓ) = (|X_ℓ|/|X_k|) Σ_{C : C|S = C_ℓ} h(C), keyed by base-n encoding of C_ℓ.
        auto key = [&](const std::vector<Index>& t) {
            std::uint64_t v = 0;
            for (Index i : t) v = v * n + i;
            return v;
        };
        std::vector<double> hS(checked_pow(n, ell, budget), 0.0);
        std::vector<Index> proj(ell);
        for (std::size_t c = 0; c < clauses.size(); ++c) {
            for (unsigned i = 0; i < ell; ++i) proj[i] = clauses[c][supp[i]];
            hS[key(proj)] += h[c] * Xl / Xk;
        }
        // Every α whose support is exactly S.
        std::vector<Digit> nz(ell, 1);
        do {
            std::uint64_t idx = 0, stride = 1;
            std::vector<Digit> alpha(k, 0);
            for (unsigned i = 0; i < ell; ++i) alpha[supp[i]] = nz[i];
            for (unsigned i = 0; i < k; ++i, stride *= d) idx += alpha[i] * stride;
            std::complex<double> inner = 0;
            for (const auto& t : sub) {
                unsigned phase = 0;
                for (unsigned i = 0; i < ell; ++i) phase += static_cast<unsigned>(nz[i]) * sigma.digits[t[i]];
                inner += std::conj(w[phase % d]) * hS[key(t)];  // inverse transform uses χ̄_α
            }
            b[ell] += coeffs[idx] * inner;
            decomposed += coeffs[idx] * inner / Xl;
            // advance nz over {1..d−1}^ell
            std::size_t p = 0;
            for (; p < ell; ++p) {
                if (++nz[p] < d) break;
                nz[p] = 1;
            }
            if (p == ell) break;
        } while (true);
    }
    res.decomposed = decomposed.real();
    res.residual = std::abs(std::complex<double>(res.direct, 0.0) - decomposed);
    res.b.resize(k + 1);
    for (unsigned ell = 0; ell <= k; ++ell) res.b[ell] = b[ell].real();
    return res;
}

}  // namespace hcp
