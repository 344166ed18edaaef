// Planted instances and the linearization (Gaussian-elimination) attacks.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcp/linsolve.hpp"
#include "hcp/scheme.hpp"

namespace hcp {

struct ChallengePair {
    Clause clause;
    Digit response = 0;
};

/// m uniform pairs answered under a hidden σ, plus optional holdout challenges.
struct PlantedInstance {
    SchemeParams params;
    SecretMapping sigma;
    std::vector<ChallengePair> pairs;
    std::vector<PasswordChallenge> holdout;
};

PlantedInstance make_planted_instance(const SchemeParams& params, std::size_t m, std::uint64_t seed,
                                      std::size_t holdout = 0);

/// True iff σ′ answers every pair correctly.
bool reproduces_all(const SchemeParams& params, const SecretMapping& candidate,
                    const std::vector<ChallengePair>& pairs);

/// If every index variable of the clause lies in S, returns
/// σ(slot_j) + Σ σ(tail) ≡ response with guessed values moved into the constant.
/// Returns nothing when an index variable is outside S or no unknown remains.
std::optional<LinearConstraint> try_extract(const SchemeParams& params, const Clause& clause, Digit response,
                                            const std::vector<Index>& S, const std::vector<Digit>& alpha);

struct AttackBudget {
    std::uint64_t max_guesses = 0;  ///< 0: unlimited
    double time_limit_s = 0;        ///< 0: unlimited
    unsigned threads = 1;
    std::size_t family_cap = 4096;  ///< solution-family members checked per guess
};

struct AttackReport {
    bool success = false;
    SecretMapping sigma;             ///< recovered mapping when successful
    std::string failure_reason;
    std::uint64_t guesses_tried = 0;
    std::uint64_t guesses_solved = 0;     ///< reached n constraints and were solved
    std::uint64_t guesses_inconsistent = 0;
    std::uint64_t pairs_checked = 0;      ///< pairs evaluated by acceptance tests
    std::size_t max_constraints = 0;      ///< most constraints gathered by a single guess
    double search_space = 0;              ///< total guesses in the enumeration
    std::uint64_t accepted_index = 0;     ///< canonical index of the accepting guess
    std::vector<Index> guess_set;         ///< accepting guess positions (extra set, then S)
    std::vector<Digit> guess_values;
    double seconds = 0;
};

/// Guess-and-solve attack: guesses (S, α), S a g-subset of [n] in
/// lexicographic order and α ∈ Z_d^g lexicographic; extracts constraints from
/// every pair, solves once at least n constraints (including the guessed unit
/// constraints) are available, and accepts the first candidate reproducing all
/// pairs. The result does not depend on the thread count.
AttackReport gaussian_attack(const SchemeParams& params, const std::vector<ChallengePair>& pairs, unsigned g,
                             const AttackBudget& budget = {});

/// Enlarged guess: a fixed random set of ℓ positions (drawn from
/// `seed`) with values β enumerated lexicographically (outer loop), combined with
/// the (S, α) search over the remaining positions. ℓ = 0 is gaussian_attack.
/// The search space grows as d^ℓ while the pairs needed shrink.
AttackReport partial_guess_attack(const SchemeParams& params, const std::vector<ChallengePair>& pairs, unsigned g,
                                  unsigned ell, std::uint64_t seed, const AttackBudget& budget = {});

}  // namespace hcp
