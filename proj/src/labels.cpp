#include "hcp/labels.hpp"

#include <algorithm>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

std::uint64_t clause_hash(std::uint64_t seed, const Clause& clause) {
    std::uint64_t h = splitmix64(seed);
    for (Index i : clause.indices) h = splitmix64(h ^ i);
    return h;
}

/// Uniform (k−1)-tuple of distinct positions plus a pivot outside it.
std::vector<Index> draw_prefix(const SchemeParams& params, Rng& rng) {
    Clause c = gen_clause(params, rng);
    c.indices.pop_back();
    return c.indices;
}

struct Validation {
    std::vector<Clause> clauses;
    std::vector<Digit> labels;
};

Validation draw_validation(const SchemeParams& params, const LabelFn& labels, unsigned size, Rng& rng) {
    Validation v;
    v.clauses.reserve(size);
    v.labels.reserve(size);
    for (unsigned i = 0; i < size; ++i) {
        v.clauses.push_back(gen_clause(params, rng));
        v.labels.push_back(labels(v.clauses.back()));
    }
    return v;
}

std::uint64_t validation_hits(const SchemeParams& params, const SecretMapping& candidate, const Validation& v) {
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < v.clauses.size(); ++i)
        hits += respond_clause(params, candidate, v.clauses[i]) == v.labels[i];
    return hits;
}

/// Label differences ℓ_{(C⁻¹,j)} − ℓ_{(C⁻¹,pivot)} for j outside the prefix;
/// prefix positions are filled from `rng`. Returns the base vector for pivot value 0.
std::vector<Digit> difference_vector(const SchemeParams& params, const LabelFn& labels,
                                     const std::vector<Index>& prefix, Index pivot, Rng& rng,
                                     std::vector<bool>& in_prefix) {
    const unsigned d = params.d;
    in_prefix.assign(params.n, false);
    for (Index p : prefix) in_prefix[p] = true;
    Clause c;
    c.indices = prefix;
    c.indices.push_back(pivot);
    const Digit base = labels(c);
    std::vector<Digit> out(params.n, 0);
    for (Index j = 0; j < params.n; ++j) {
        if (in_prefix[j]) {
            out[j] = static_cast<Digit>(rng.uniform(d));
            continue;
        }
        c.indices.back() = j;
        out[j] = static_cast<Digit>((labels(c) + d - base) % d);
    }
    return out;
}

SecretMapping shifted(const std::vector<Digit>& base, const std::vector<bool>& in_prefix, unsigned d, unsigned s) {
    SecretMapping m;
    m.d = d;
    m.digits = base;
    for (std::size_t j = 0; j < base.size(); ++j)
        if (!in_prefix[j]) m.digits[j] = static_cast<Digit>((base[j] + s) % d);
    return m;
}

}  // namespace

NoisyLabelOracle::NoisyLabelOracle(SchemeParams params, SecretMapping sigma, double accuracy, std::uint64_t seed)
    : params_(params), sigma_(std::move(sigma)), accuracy_(accuracy), seed_(seed) {
    params_.validate();
    if (!(accuracy >= 0 && accuracy <= 1)) throw InputError("label accuracy must lie in [0, 1]");
    if (sigma_.size() != params_.n || sigma_.d != params_.d) throw InputError("mapping does not match parameters");
}

Digit NoisyLabelOracle::operator()(const Clause& clause) const {
    const Digit truth = respond_clause(params_, sigma_, clause);
    Rng coin(clause_hash(seed_, clause));
    if (coin.uniform_real() < accuracy_) return truth;
    return static_cast<Digit>((truth + 1 + coin.uniform(params_.d - 1)) % params_.d);
}

RestartCandidate recover_restart(const SchemeParams& params, const LabelFn& labels, unsigned validation, Rng& rng) {
    params.validate();
    RestartCandidate out;
    out.prefix = draw_prefix(params, rng);
    std::vector<bool> in_prefix;
    do {
        out.pivot = static_cast<Index>(rng.uniform(params.n));
    } while (std::find(out.prefix.begin(), out.prefix.end(), out.pivot) != out.prefix.end());
    auto base = difference_vector(params, labels, out.prefix, out.pivot, rng, in_prefix);
    Validation v = draw_validation(params, labels, validation, rng);
    bool first = true;
    for (unsigned s = 0; s < params.d; ++s) {
        auto cand = shifted(base, in_prefix, params.d, s);
        auto hits = validation_hits(params, cand, v);
        if (first || hits > out.validation_hits) {
            out.sigma = std::move(cand);
            out.pivot_value = static_cast<Digit>(s);
            out.validation_hits = hits;
            first = false;
        }
    }
    return out;
}

LabelRecoveryReport recover_from_labels(const SchemeParams& params, const LabelFn& labels,
                                        const LabelRecoveryOptions& opts) {
    params.validate();
    if (opts.restarts == 0) throw InputError("restarts must be positive");
    const unsigned d = params.d;
    const unsigned n = params.n;
    const std::uint64_t per_restart = n - (params.clause_width() - 1);
    LabelRecoveryReport rep;
    rep.restarts = opts.restarts;
    rep.validation_size = opts.validation;
    Rng rng(opts.seed);

    if (opts.restarts == 1) {
        auto r = recover_restart(params, labels, opts.validation, rng);
        rep.sigma = std::move(r.sigma);
        rep.validation_hits = r.validation_hits;
        rep.label_queries = per_restart + opts.validation;
        return rep;
    }

    // Each restart gives σ − σ(pivot) + noise on positions outside its prefix.
    // Align every vector to the running tally by the shift with the most
    // agreement, then take per-position majorities.
    std::vector<std::vector<Digit>> bases;
    std::vector<std::vector<bool>> masks;
    for (unsigned r = 0; r < opts.restarts; ++r) {
        auto prefix = draw_prefix(params, rng);
        Index pivot;
        do {
            pivot = static_cast<Index>(rng.uniform(n));
        } while (std::find(prefix.begin(), prefix.end(), pivot) != prefix.end());
        std::vector<bool> mask;
        bases.push_back(difference_vector(params, labels, prefix, pivot, rng, mask));
        masks.push_back(std::move(mask));
    }
    rep.label_queries = per_restart * opts.restarts;

    std::vector<std::vector<std::uint32_t>> tally(n, std::vector<std::uint32_t>(d, 0));
    std::vector<unsigned> shift(opts.restarts, 0);
    auto best_shift = [&](std::size_t r) {
        unsigned best = 0;
        std::uint64_t best_score = 0;
        for (unsigned s = 0; s < d; ++s) {
            std::uint64_t score = 0;
            for (Index j = 0; j < n; ++j)
                if (!masks[r][j]) score += tally[j][(bases[r][j] + s) % d];
            if (score > best_score) best_score = score, best = s;
        }
        return best;
    };
    auto add = [&](std::size_t r, int sign) {
        for (Index j = 0; j < n; ++j)
            if (!masks[r][j]) tally[j][(bases[r][j] + shift[r]) % d] += sign;
    };
    // First pass greedily; then two refinement sweeps re-align each vector
    // against the tally of all the others.
    for (std::size_t r = 0; r < bases.size(); ++r) {
        shift[r] = r == 0 ? 0 : best_shift(r);
        add(r, +1);
    }
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t r = 0; r < bases.size(); ++r) {
            add(r, -1);
            shift[r] = best_shift(r);
            add(r, +1);
        }
    }

    std::vector<Digit> consensus(n, 0);
    std::vector<bool> none(n, false);
    double margin = 0;
    for (Index j = 0; j < n; ++j) {
        auto it = std::max_element(tally[j].begin(), tally[j].end());
        consensus[j] = static_cast<Digit>(it - tally[j].begin());
        std::uint64_t total = 0;
        for (auto c : tally[j]) total += c;
        margin += total ? static_cast<double>(*it) / static_cast<double>(total) : 0.0;
    }
    rep.vote_margin = margin / n;

    Validation v = draw_validation(params, labels, opts.validation, rng);
    rep.label_queries += opts.validation;
    bool first = true;
    for (unsigned s = 0; s < d; ++s) {
        auto cand = shifted(consensus, none, d, s);
        auto hits = validation_hits(params, cand, v);
        if (first || hits > rep.validation_hits) {
            rep.sigma = std::move(cand);
            rep.validation_hits = hits;
            first = false;
        }
    }
    return rep;
}

ForgeryLabel forgery_to_labels(const SchemeParams& params, const Adversary& adversary,
                               const std::vector<ChallengePair>& checked, const Clause& target, Rng& rng) {
    const unsigned t = static_cast<unsigned>(checked.size());
    if (t == 0) throw InputError("at least one checked pair is required");
    validate_clause(params, target);
    const unsigned cap = 10 * t * params.d;
    PasswordChallenge ch;
    ch.clauses.reserve(t);
    ForgeryLabel out;
    for (out.attempts = 1; out.attempts <= cap; ++out.attempts) {
        const unsigned i = static_cast<unsigned>(rng.uniform(t));
        ch.clauses.clear();
        for (unsigned s = 0; s < t; ++s) ch.clauses.push_back(s == i ? target : checked[s].clause);
        auto answer = adversary(ch);
        if (answer.size() != t) throw InputError("adversary returned the wrong number of digits");
        bool earlier_ok = true;
        for (unsigned s = 0; s < i && earlier_ok; ++s) earlier_ok = answer[s] == checked[s].response;
        if (earlier_ok) {
            out.label = answer[i];
            out.slot = i;
            return out;
        }
    }
    out.attempts = cap;
    return out;
}

}  // namespace hcp
