// Reductions from weak predictions to key recovery.
//
// recover_from_labels turns per-clause predictions that beat 1/d into a mapping
// correlated with σ. It relies on the output being evenly distributed in the
// last clause position: f(x) = g(x_1, …, x_{k−1}) + x_k (mod d), so for a fixed
// prefix C⁻¹ the label differences ℓ_{(C⁻¹,j)} − ℓ_{(C⁻¹,i)} equal σ(j) − σ(i)
// whenever both labels are right.
//
// forgery_to_labels turns a whole-challenge forger into a single-clause
// predictor by hiding the target clause in a random slot of a checked challenge.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hcp/attacks.hpp"

namespace hcp {

using LabelFn = std::function<Digit(const Clause&)>;

/// Deterministic noisy labels for a planted σ: each clause is labelled
/// correctly with probability `accuracy`, otherwise with a uniform wrong digit.
/// The coin is a hash of (seed, clause), so repeated queries agree.
/// accuracy = 1/d gives uniformly random labels.
class NoisyLabelOracle {
public:
    NoisyLabelOracle(SchemeParams params, SecretMapping sigma, double accuracy, std::uint64_t seed);
    Digit operator()(const Clause& clause) const;

private:
    SchemeParams params_;
    SecretMapping sigma_;
    double accuracy_;
    std::uint64_t seed_;
};

struct LabelRecoveryOptions {
    unsigned restarts = 1;       ///< independent (prefix, pivot) draws
    unsigned validation = 200;   ///< labelled clauses used to rank candidates
    std::uint64_t seed = 1;
};

/// One (prefix, pivot) draw: all d pivot values are tried and the candidate
/// agreeing with the most validation labels is kept (ties: smallest value).
struct RestartCandidate {
    SecretMapping sigma;
    std::vector<Index> prefix;  ///< C⁻¹, k−1 distinct positions
    Index pivot = 0;
    Digit pivot_value = 0;
    std::uint64_t validation_hits = 0;
};

RestartCandidate recover_restart(const SchemeParams& params, const LabelFn& labels, unsigned validation, Rng& rng);

struct LabelRecoveryReport {
    SecretMapping sigma;
    unsigned restarts = 0;
    std::uint64_t label_queries = 0;
    std::uint64_t validation_hits = 0;  ///< of the returned candidate
    std::uint64_t validation_size = 0;
    double vote_margin = 0;             ///< mean share of the winning digit per position (restarts > 1)
};

/// restarts = 1: the single restart's candidate. restarts > 1: every restart's
/// label-difference vector is aligned to a running consensus by the shift that
/// maximises agreement, positions take the majority digit, and the global shift
/// is chosen on the validation labels.
LabelRecoveryReport recover_from_labels(const SchemeParams& params, const LabelFn& labels,
                                        const LabelRecoveryOptions& opts = {});

using Adversary = std::function<std::vector<Digit>(const PasswordChallenge&)>;

struct ForgeryLabel {
    std::optional<Digit> label;  ///< empty: abstained (retry cap reached)
    unsigned slot = 0;           ///< slot that produced the label (0-based)
    unsigned attempts = 0;
};

/// Substitutes `target` into a uniformly random slot i of the checked challenge
/// and queries the adversary; the answer is kept only if every earlier slot
/// matches its known response. Retries with a fresh slot up to 10·t·d times.
ForgeryLabel forgery_to_labels(const SchemeParams& params, const Adversary& adversary,
                               const std::vector<ChallengePair>& checked, const Clause& target, Rng& rng);

}  // namespace hcp
