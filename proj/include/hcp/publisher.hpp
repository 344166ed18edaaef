// Public challenge bundles: m answered single-digit pairs plus twenty
// unanswered password challenges, published under a fresh secret mapping that
// is sealed separately for grading.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hcp/attacks.hpp"
#include "hcp/io.hpp"

namespace hcp {

constexpr unsigned kBundleChallenges = 20;

struct ChallengeBundle {
    int version = 1;
    SchemeParams params;
    std::string commitment_algorithm;
    std::vector<std::uint8_t> seed_commitment;  ///< digest of the generation seed, never the seed
    std::vector<ChallengePair> pairs;
    std::vector<PasswordChallenge> password_challenges;
};

struct Publication {
    ChallengeBundle bundle;
    SecretMapping sealed;
};

/// One sequential generator stream defines the bundle: σ, then the m pairs,
/// then the twenty challenges. Responses are checked against σ before returning.
Publication publish(const SchemeParams& params, std::size_t m, std::uint64_t seed,
                    const std::string& commitment_algorithm = "scrypt-n16384-r8-p1");

/// Field order: version, params, commitment{algorithm, digest}, pairs[{clause, response}],
/// password_challenges[[clause]].
Json bundle_to_json(const ChallengeBundle& b);
/// Rejects invalid clauses, out-of-range responses and a wrong challenge count.
ChallengeBundle bundle_from_json(const Json& j);

/// Pairs of a bundle as an attack instance (σ unknown: an empty mapping).
PlantedInstance bundle_instance(const ChallengeBundle& b);

struct GradeVerdict {
    unsigned index = 0;
    bool win = false;
};

/// submission: challenge index → guessed t digits. Win iff every digit matches.
/// Throws InputError for an index outside [20] or a malformed digit string.
std::vector<GradeVerdict> grade(const ChallengeBundle& bundle, const SecretMapping& sealed,
                                const std::map<unsigned, std::vector<Digit>>& submission);

/// {"submissions": [{"index": i, "response": "0123456789"}, …]}
std::map<unsigned, std::vector<Digit>> submission_from_json(const Json& j, const SchemeParams& params);

}  // namespace hcp
