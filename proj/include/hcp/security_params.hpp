// Fourier-analytic security parameters of digit functions f: Z_d^k → Z_d.
//
// Q^{f,j}(x) = +1 if f(x) = j else −1, expanded in the characters
// χ_α(x) = exp(−2πi x·α / d). r(f) is the smallest weight of a nonzero α with a
// nonvanishing coefficient for some j; g(f) is the fewest coordinates that must
// be fixed to make f linear modulo some divisor of d; s(f) = min(r/2, g+1).
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcp/scheme.hpp"

namespace hcp {

/// Black-box digit function on a buffer of k digits.
using DigitFunction = std::function<Digit(const Digit*)>;

struct DigitFunctionSpec {
    unsigned d = 2;
    unsigned k = 1;
    DigitFunction f;
};

/// f_{k1,k2} as a black box (k = clause width).
DigitFunctionSpec family_function(const SchemeParams& params);

constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;
constexpr double kZeroTolerance = 1e-9;

/// (1/d^k) Σ_x Q^{f,j}(x)·χ_α(x). Throws ResourceError when d^k > budget.
std::complex<double> fourier_coeff_bruteforce(const DigitFunctionSpec& fn, const std::vector<Digit>& alpha,
                                              Digit j, std::uint64_t budget = kDefaultEnumerationBudget);

/// Exact zero test of the same coefficient in the cyclotomic field Q(ω_d):
/// the integer polynomial Σ_s c_s X^s is reduced modulo Φ_d. Requires d^k ≤ 10^4.
bool fourier_coeff_is_zero_exact(const DigitFunctionSpec& fn, const std::vector<Digit>& alpha, Digit j);

/// Every coefficient of Q^{f,j}, indexed by α in mixed radix (α_0 least significant).
std::vector<std::complex<double>> fourier_transform_all(const DigitFunctionSpec& fn, Digit j,
                                                        std::uint64_t budget = kDefaultEnumerationBudget);

struct DistributionalResult {
    unsigned r = 0;                ///< exact value, or the proven lower bound when `lower_bound_only`
    bool lower_bound_only = false; ///< true: "r > r − 1" only
    std::vector<Digit> alpha_min;  ///< lexicographically first witness of minimal weight
    Digit j_min = 0;
    std::complex<double> value;
    std::uint64_t work = 0;        ///< function evaluations + transform operations
};

DistributionalResult distributional_r(const DigitFunctionSpec& fn, std::uint64_t budget = kDefaultEnumerationBudget);

struct LinearityResult {
    unsigned g = 0;                ///< exact value, or ℓ_max + 1 when `lower_bound_only`
    bool lower_bound_only = false;
    std::vector<unsigned> S_min;   ///< fixed positions of the witness
    std::vector<Digit> fixing;     ///< values on S_min
    unsigned d_hat = 0;            ///< modulus of the witness restriction
    std::vector<Digit> coefficients;  ///< affine form: constant, then per free position
    bool probable = false;         ///< verified by sampling rather than exhaustively
    std::uint64_t work = 0;
};

struct LinearityOptions {
    std::uint64_t budget = kDefaultEnumerationBudget;  ///< total function evaluations
    bool all_divisors = true;       ///< search every divisor of d > 1 (false: d̂ = d only)
    std::uint64_t exhaustive_limit = 1'000'000;  ///< beyond this, restrictions are sampled
    unsigned samples = 10'000;
    std::uint64_t seed = 1;
};

LinearityResult linearity_g(const DigitFunctionSpec& fn, const LinearityOptions& opts = {});

/// Outcome of testing one restriction f_{|S,α} for affinity mod d̂.
struct RestrictionTest {
    bool linear = false;
    bool probable = false;  ///< passed sampled verification only
    std::vector<Digit> coefficients;
    std::uint64_t evaluations = 0;
};

RestrictionTest test_restriction_linear(const DigitFunctionSpec& fn, const std::vector<unsigned>& S,
                                        const std::vector<Digit>& fixing, unsigned d_hat,
                                        std::uint64_t exhaustive_limit, unsigned samples, Rng& rng);

/// Exact output distribution of f_{k1,k2} under a partial assignment of clause
/// positions (unfixed positions uniform). O(d^2 · width).
std::vector<double> conditional_output_dist(const SchemeParams& params,
                                            const std::vector<std::optional<Digit>>& fixed);

struct SecurityProfile {
    unsigned r = 0;
    unsigned g = 0;
    double s = 0;
    std::string r_method;
    std::string g_method;
    bool g_probable = false;        ///< the g ≤ k1 witness passed sampled verification only
    std::vector<Digit> alpha_min;   ///< r witness
    Digit alpha_j = 0;
    std::complex<double> alpha_value;
    std::vector<unsigned> S_min;    ///< g witness
    std::vector<Digit> fixing;
    std::uint64_t work = 0;
};

/// Structure-exploiting profile for the f_{k1,k2} family (feasible at d = 10).
SecurityProfile structured_profile_f(const SchemeParams& params, std::uint64_t seed = 1);

/// Brute-force profile from distributional_r and linearity_g.
SecurityProfile bruteforce_profile(const DigitFunctionSpec& fn, std::uint64_t budget = kDefaultEnumerationBudget);

struct DecompositionResult {
    double direct = 0;
    double decomposed = 0;
    double residual = 0;
    std::vector<double> b;  ///< b_ℓ for ℓ = 0..k (real parts; b_0 unused = 0)
};

/// Evaluates Δ^j(σ,h) directly and through the b_ℓ decomposition over ordered
/// clauses X_k of [n]. `h` is indexed by the position of C in lexicographic
/// enumeration of X_k (see enumerate_ordered_clauses).
DecompositionResult decomposition_check(const DigitFunctionSpec& fn, unsigned n, const SecretMapping& sigma,
                          const std::vector<double>& h, Digit j, std::uint64_t budget = 100'000);

/// All ordered repetition-free k-tuples of [n] in lexicographic order.
std::vector<std::vector<Index>> enumerate_ordered_clauses(unsigned n, unsigned k);

}  // namespace hcp
