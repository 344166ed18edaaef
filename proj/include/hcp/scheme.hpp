// The f_{k1,k2} challenge-response scheme over Z_d: secret mappings, clauses,
// evaluation (direct and as a 3-slot streaming program), and challenges.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcp/rng.hpp"

namespace hcp {

using Digit = std::uint8_t;
using Index = std::uint32_t;

/// (d, k1, k2, n, t). Clause layout: d table slots, k1 index vars, k2 tail vars.
struct SchemeParams {
    unsigned d = 10;
    unsigned k1 = 2;
    unsigned k2 = 2;
    unsigned n = 100;
    unsigned t = 10;

    unsigned clause_width() const { return d + k1 + k2; }
    /// Throws InputError unless d ≥ 2, 1 ≤ k1 ≤ d, k2 ≥ 1, t ≥ 1, width ≤ n, d ≤ 255.
    void validate() const;
    /// Same checks without the n ≥ width requirement (function-only uses).
    void validate_function() const;

    bool operator==(const SchemeParams&) const = default;
};

struct SecretMapping {
    std::vector<Digit> digits;
    unsigned d = 10;

    std::size_t size() const { return digits.size(); }
    Digit operator[](std::size_t i) const { return digits[i]; }
    bool operator==(const SecretMapping&) const = default;
};

struct Clause {
    std::vector<Index> indices;
    bool operator==(const Clause&) const = default;
};

struct PasswordChallenge {
    std::vector<Clause> clauses;
    std::string label;
};

/// Uniform mapping [n] → Z_d, deterministic per seed. d = 1 yields all zeros.
SecretMapping gen_mapping(unsigned d, unsigned n, std::uint64_t seed);
SecretMapping gen_mapping(const SchemeParams& params, std::uint64_t seed);

/// f_{k1,k2}: (values[j] + Σ tail values) mod d, j = (Σ index values) mod d.
Digit eval_f(const SchemeParams& params, const std::vector<Digit>& values);
/// Unchecked evaluation on a raw buffer of clause_width() digits.
Digit eval_f_raw(const SchemeParams& params, const Digit* values);

/// Streaming-model primitives (human-computability model).
enum class Primitive { Recall, Add, TableLookup };

struct TraceStep {
    Primitive op;
    unsigned argument;  ///< Recall: clause position; Add: unused; TableLookup: looked-up slot
};

struct StreamingResult {
    Digit value = 0;
    std::vector<TraceStep> trace;
    unsigned peak_slots = 0;  ///< maximum memory slots simultaneously in use
};

/// Canonical 3-slot streaming program; trace length is 2k1 + 2k2 + 1.
StreamingResult streaming_eval(const SchemeParams& params, const std::vector<Digit>& values);

/// Gather σ over a clause (values in clause order).
std::vector<Digit> clause_values(const SecretMapping& sigma, const Clause& clause);
/// σ(C) evaluated through f.
Digit respond_clause(const SchemeParams& params, const SecretMapping& sigma, const Clause& clause);

/// Index-variable indices, the selected table slot index, then tail indices.
std::vector<Index> recalled_indices(const SchemeParams& params, const SecretMapping& sigma,
                                    const Clause& clause);

/// Uniform element of X_k (ordered, repetition-free) by partial Fisher–Yates.
Clause gen_clause(const SchemeParams& params, Rng& rng);
PasswordChallenge gen_password_challenge(const SchemeParams& params, Rng& rng,
                                         std::string label = {});

/// Throws InputError for wrong width, repeated or out-of-range indices.
void validate_clause(const SchemeParams& params, const Clause& clause);

/// One digit per clause.
std::vector<Digit> respond(const SchemeParams& params, const SecretMapping& sigma,
                           const PasswordChallenge& challenge);

/// Digits rendered as base-d characters ("0-9a-z").
std::string digits_to_string(const std::vector<Digit>& digits);
std::vector<Digit> digits_from_string(const std::string& text, unsigned d);

std::size_t hamming(const SecretMapping& a, const SecretMapping& b);
/// H(σ1,σ2)/n ≤ (d−1)/d − ε.
bool is_eps_correlated(const SecretMapping& a, const SecretMapping& b, double eps);
/// max_i |H(σ, ī)/n − (d−1)/d| ≤ δ.
bool is_delta_balanced(const SecretMapping& sigma, double delta);

}  // namespace hcp
