#include "hcp/publisher.hpp"

#include <stdexcept>

#include "hcp/account.hpp"
#include "hcp/errors.hpp"

namespace hcp {

Publication publish(const SchemeParams& params, std::size_t m, std::uint64_t seed,
                    const std::string& commitment_algorithm) {
    params.validate();
    Publication out;
    ChallengeBundle& b = out.bundle;
    b.params = params;
    b.commitment_algorithm = commitment_algorithm;
    b.seed_commitment = seed_commitment(seed, commitment_algorithm);

    Rng rng(seed);
    out.sealed = gen_mapping(params, rng.next());
    b.pairs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Clause c = gen_clause(params, rng);
        const Digit r = respond_clause(params, out.sealed, c);
        b.pairs.push_back({std::move(c), r});
    }
    for (unsigned i = 0; i < kBundleChallenges; ++i)
        b.password_challenges.push_back(gen_password_challenge(params, rng, "challenge-" + std::to_string(i)));
    if (!reproduces_all(params, out.sealed, b.pairs)) throw std::logic_error("published responses disagree with σ");
    return out;
}

Json bundle_to_json(const ChallengeBundle& b) {
    Json pairs = Json::array();
    for (const auto& p : b.pairs) pairs.push_back(Json{{"clause", clause_to_json(p.clause)}, {"response", p.response}});
    Json challenges = Json::array();
    for (const auto& ch : b.password_challenges) challenges.push_back(challenge_to_json(ch));
    return Json{{"version", b.version},
                {"params", params_to_json(b.params)},
                {"commitment", Json{{"algorithm", b.commitment_algorithm}, {"digest", to_hex(b.seed_commitment)}}},
                {"pairs", std::move(pairs)},
                {"password_challenges", std::move(challenges)}};
}

ChallengeBundle bundle_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("bundle must be an object");
    for (const char* key : {"version", "params", "commitment", "pairs", "password_challenges"})
        if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    ChallengeBundle b;
    if (!j["version"].is_number_integer() || j["version"].get<int>() != 1) throw InputError("unsupported bundle version");
    b.params = params_from_json(j["params"]);
    const Json& com = j["commitment"];
    if (!com.is_object() || !com.contains("algorithm") || !com.contains("digest") || !com["algorithm"].is_string() ||
        !com["digest"].is_string())
        throw InputError("commitment must carry algorithm and digest strings");
    b.commitment_algorithm = com["algorithm"].get<std::string>();
    b.seed_commitment = from_hex(com["digest"].get<std::string>());
    if (!j["pairs"].is_array()) throw InputError("pairs must be an array");
    for (const auto& p : j["pairs"]) {
        if (!p.is_object() || !p.contains("clause") || !p.contains("response")) throw InputError("malformed pair");
        const Json& r = p["response"];
        if (!r.is_number_integer() || r.get<long long>() < 0 || r.get<long long>() >= b.params.d)
            throw InputError("pair response out of range");
        b.pairs.push_back({clause_from_json(p["clause"], b.params), static_cast<Digit>(r.get<int>())});
    }
    const Json& chs = j["password_challenges"];
    if (!chs.is_array() || chs.size() != kBundleChallenges) throw InputError("bundle must carry 20 password challenges");
    for (std::size_t i = 0; i < chs.size(); ++i)
        b.password_challenges.push_back(challenge_from_json(chs[i], b.params, "challenge-" + std::to_string(i)));
    return b;
}

PlantedInstance bundle_instance(const ChallengeBundle& b) {
    PlantedInstance inst;
    inst.params = b.params;
    inst.sigma.d = b.params.d;
    inst.pairs = b.pairs;
    inst.holdout = b.password_challenges;
    return inst;
}

std::vector<GradeVerdict> grade(const ChallengeBundle& bundle, const SecretMapping& sealed,
                                const std::map<unsigned, std::vector<Digit>>& submission) {
    if (sealed.size() != bundle.params.n || sealed.d != bundle.params.d)
        throw InputError("sealed mapping does not match the bundle parameters");
    std::vector<GradeVerdict> out;
    for (const auto& [index, digits] : submission) {
        if (index >= bundle.password_challenges.size()) throw InputError("submission index out of range");
        if (digits.size() != bundle.params.t) throw InputError("submission must contain exactly t digits");
        for (Digit x : digits)
            if (x >= bundle.params.d) throw InputError("submission digit out of range");
        out.push_back({index, respond(bundle.params, sealed, bundle.password_challenges[index]) == digits});
    }
    return out;
}

std::map<unsigned, std::vector<Digit>> submission_from_json(const Json& j, const SchemeParams& params) {
    if (!j.is_object() || !j.contains("submissions") || !j["submissions"].is_array())
        throw InputError("submission document must carry a 'submissions' array");
    std::map<unsigned, std::vector<Digit>> out;
    for (const auto& s : j["submissions"]) {
        if (!s.is_object() || !s.contains("index") || !s.contains("response") || !s["index"].is_number_integer() ||
            !s["response"].is_string())
            throw InputError("each submission needs an integer index and a response string");
        const long long idx = s["index"].get<long long>();
        if (idx < 0 || idx >= kBundleChallenges) throw InputError("submission index out of range");
        if (out.count(static_cast<unsigned>(idx))) throw InputError("duplicate submission index");
        out[static_cast<unsigned>(idx)] = digits_from_string(s["response"].get<std::string>(), params.d);
    }
    return out;
}

}  // namespace hcp
