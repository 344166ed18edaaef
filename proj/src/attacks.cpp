#include "hcp/attacks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "hcp/errors.hpp"

namespace hcp {

PlantedInstance make_planted_instance(const SchemeParams& params, std::size_t m, std::uint64_t seed,
                                      std::size_t holdout) {
    params.validate();
    Rng rng(seed);
    PlantedInstance inst;
    inst.params = params;
    inst.sigma = gen_mapping(params, rng.split_seed(0));
    Rng pair_rng = rng.split(1);
    inst.pairs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        ChallengePair p;
        p.clause = gen_clause(params, pair_rng);
        p.response = respond_clause(params, inst.sigma, p.clause);
        inst.pairs.push_back(std::move(p));
    }
    Rng hold_rng = rng.split(2);
    for (std::size_t i = 0; i < holdout; ++i) inst.holdout.push_back(gen_password_challenge(params, hold_rng));
    return inst;
}

bool reproduces_all(const SchemeParams& params, const SecretMapping& candidate,
                    const std::vector<ChallengePair>& pairs) {
    for (const auto& p : pairs)
        if (respond_clause(params, candidate, p.clause) != p.response) return false;
    return true;
}

namespace {

// Extraction against a dense table of guessed values (−1 = unknown).
std::optional<LinearConstraint> extract(const SchemeParams& p, const Clause& clause, Digit response,
                                        const std::vector<int>& known) {
    unsigned j = 0;
    for (unsigned i = 0; i < p.k1; ++i) {
        int v = known[clause.indices[p.d + i]];
        if (v < 0) return std::nullopt;
        j += static_cast<unsigned>(v);
    }
    LinearConstraint lc;
    unsigned constant = response;
    auto term = [&](Index idx) {
        int v = known[idx];
        if (v >= 0) constant = (constant + p.d - static_cast<unsigned>(v)) % p.d;
        else lc.terms.emplace_back(idx, 1u);
    };
    term(clause.indices[j % p.d]);
    for (unsigned i = 0; i < p.k2; ++i) term(clause.indices[p.d + p.k1 + i]);
    if (lc.terms.empty()) return std::nullopt;
    lc.constant = constant;
    return lc;
}

double binomial(unsigned n, unsigned k) {
    double v = 1;
    for (unsigned i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return std::round(v);
}

// Enumeration (β over the extra set, then S over the remaining positions, then α)
// in canonical order, with pairs bucketed by their unguessed index variables.
class GuessSearch {
public:
    GuessSearch(const SchemeParams& p, const std::vector<ChallengePair>& pairs, std::vector<Index> extra, unsigned g)
        : p_(p), pairs_(pairs), extra_(std::move(extra)) {
        std::sort(extra_.begin(), extra_.end());
        std::vector<bool> in_extra(p.n, false);
        for (Index e : extra_) in_extra[e] = true;
        for (Index i = 0; i < p.n; ++i)
            if (!in_extra[i]) rest_.push_back(i);
        g_ = std::min<unsigned>(g, static_cast<unsigned>(rest_.size()));
        combos_ = binomial(static_cast<unsigned>(rest_.size()), g_);
        alphas_ = std::pow(static_cast<double>(p.d), g_);
        betas_ = std::pow(static_cast<double>(p.d), static_cast<double>(extra_.size()));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            std::vector<Index> outside;
            for (unsigned v = 0; v < p.k1; ++v) {
                Index idx = pairs[i].clause.indices[p.d + v];
                if (!in_extra[idx]) outside.push_back(idx);
            }
            if (outside.size() > g_) continue;
            std::sort(outside.begin(), outside.end());
            buckets_[outside].push_back(i);
        }
    }

    double total() const { return betas_ * combos_ * alphas_; }

    struct Guess {
        std::vector<Digit> beta;
        std::vector<unsigned> comb;  // positions into rest_
        std::vector<Digit> alpha;
    };

    Guess decode(std::uint64_t index) const {
        Guess gs;
        const auto per_beta = static_cast<std::uint64_t>(combos_ * alphas_);
        std::uint64_t b = index / per_beta, rem = index % per_beta;
        std::uint64_t c = rem / static_cast<std::uint64_t>(alphas_), a = rem % static_cast<std::uint64_t>(alphas_);
        gs.beta = digits_msb(b, extra_.size());
        gs.alpha = digits_msb(a, g_);
        // Unrank the c-th g-combination of rest_ in lexicographic order.
        unsigned N = static_cast<unsigned>(rest_.size()), next = 0;
        for (unsigned slot = 0; slot < g_; ++slot) {
            for (unsigned v = next;; ++v) {
                auto cnt = static_cast<std::uint64_t>(binomial(N - v - 1, g_ - slot - 1));
                if (c < cnt) {
                    gs.comb.push_back(v);
                    next = v + 1;
                    break;
                }
                c -= cnt;
            }
        }
        return gs;
    }

    void advance(Guess& gs) const {
        if (increment_msb(gs.alpha)) return;
        if (next_comb(gs.comb)) return;
        for (unsigned i = 0; i < g_; ++i) gs.comb[i] = i;
        increment_msb(gs.beta);
    }

    enum class Outcome { Insufficient, Inconsistent, Rejected, Accepted };

    struct Evaluation {
        Outcome outcome = Outcome::Insufficient;
        std::size_t constraints = 0;
        std::uint64_t pairs_checked = 0;
        SecretMapping sigma;
    };

    Evaluation evaluate(const Guess& gs, std::size_t family_cap) const {
        Evaluation ev;
        std::vector<int> known(p_.n, -1);
        LinearSystem sys(p_.n, p_.d);
        auto unit = [&](Index idx, Digit v) {
            known[idx] = v;
            sys.add({{{idx, 1u}}, v});
        };
        for (std::size_t i = 0; i < extra_.size(); ++i) unit(extra_[i], gs.beta[i]);
        std::vector<Index> S;
        for (std::size_t i = 0; i < g_; ++i) {
            S.push_back(rest_[gs.comb[i]]);
            unit(S.back(), gs.alpha[i]);
        }
        // Buckets keyed by every subset of S (S is sorted, so subsets are too).
        std::vector<std::size_t> usable;
        for (unsigned mask = 0; mask < (1u << g_); ++mask) {
            std::vector<Index> key;
            for (unsigned i = 0; i < g_; ++i)
                if (mask >> i & 1) key.push_back(S[i]);
            auto it = buckets_.find(key);
            if (it != buckets_.end()) usable.insert(usable.end(), it->second.begin(), it->second.end());
        }
        std::sort(usable.begin(), usable.end());
        for (std::size_t id : usable) {
            auto lc = extract(p_, pairs_[id].clause, pairs_[id].response, known);
            if (!lc) continue;
            if (!sys.add(*lc)) {
                ev.constraints = sys.size();
                ev.outcome = Outcome::Inconsistent;
                return ev;
            }
        }
        ev.constraints = sys.size();
        if (sys.size() < p_.n) return ev;
        auto res = sys.solve();
        if (res.status == SolveStatus::Inconsistent) {
            ev.outcome = Outcome::Inconsistent;
            return ev;
        }
        ev.outcome = Outcome::Rejected;
        sys.for_each_solution(family_cap, [&](const std::vector<Digit>& cand) {
            SecretMapping s{cand, p_.d};
            ev.pairs_checked += pairs_.size();
            if (reproduces_all(p_, s, pairs_)) {
                ev.sigma = std::move(s);
                ev.outcome = Outcome::Accepted;
                return false;
            }
            return true;
        });
        return ev;
    }

    std::vector<Index> guess_positions(const Guess& gs) const {
        std::vector<Index> out = extra_;
        for (unsigned c : gs.comb) out.push_back(rest_[c]);
        return out;
    }

private:
    std::vector<Digit> digits_msb(std::uint64_t v, std::size_t len) const {
        std::vector<Digit> out(len, 0);
        for (std::size_t i = len; i-- > 0;) {
            out[i] = static_cast<Digit>(v % p_.d);
            v /= p_.d;
        }
        return out;
    }
    bool increment_msb(std::vector<Digit>& v) const {
        for (std::size_t i = v.size(); i-- > 0;) {
            if (++v[i] < p_.d) return true;
            v[i] = 0;
        }
        return false;
    }
    bool next_comb(std::vector<unsigned>& c) const {
        const std::size_t k = c.size(), N = rest_.size();
        for (std::size_t i = k; i-- > 0;) {
            if (c[i] < N - k + i) {
                ++c[i];
                for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
                return true;
            }
        }
        return false;
    }

    const SchemeParams& p_;
    const std::vector<ChallengePair>& pairs_;
    std::vector<Index> extra_;
    std::vector<Index> rest_;
    unsigned g_ = 0;
    double combos_ = 0, alphas_ = 0, betas_ = 0;
    std::map<std::vector<Index>, std::vector<std::size_t>> buckets_;
};

AttackReport run_search(const SchemeParams& params, const std::vector<ChallengePair>& pairs,
                        std::vector<Index> extra, unsigned g, const AttackBudget& budget) {
    params.validate();
    const auto start = std::chrono::steady_clock::now();
    GuessSearch search(params, pairs, std::move(extra), g);
    AttackReport rep;
    rep.search_space = search.total();
    std::uint64_t total = rep.search_space > 1.8e19 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(rep.search_space);
    if (budget.max_guesses) total = std::min(total, budget.max_guesses);

    constexpr std::uint64_t kChunk = 1024;
    std::atomic<std::uint64_t> next_chunk{0}, best{~std::uint64_t{0}};
    std::atomic<bool> timed_out{false};
    std::mutex mu;
    std::uint64_t tried = 0, solved = 0, inconsistent = 0, checked = 0;
    std::size_t max_constraints = 0;
    SecretMapping best_sigma;

    auto worker = [&] {
        std::uint64_t my_tried = 0, my_solved = 0, my_incons = 0, my_checked = 0;
        std::size_t my_max = 0;
        while (true) {
            std::uint64_t begin = next_chunk.fetch_add(1) * kChunk;
            if (begin >= total || begin > best.load()) break;
            if (budget.time_limit_s > 0) {
                double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (el > budget.time_limit_s) {
                    timed_out = true;
                    break;
                }
            }
            std::uint64_t end = std::min(total, begin + kChunk);
            auto gs = search.decode(begin);
            for (std::uint64_t idx = begin; idx < end; ++idx, search.advance(gs)) {
                if (idx > best.load()) break;
                ++my_tried;
                auto ev = search.evaluate(gs, budget.family_cap);
                my_max = std::max(my_max, ev.constraints);
                my_checked += ev.pairs_checked;
                if (ev.outcome == GuessSearch::Outcome::Inconsistent) ++my_incons;
                if (ev.outcome == GuessSearch::Outcome::Rejected || ev.outcome == GuessSearch::Outcome::Accepted)
                    ++my_solved;
                if (ev.outcome == GuessSearch::Outcome::Accepted) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (idx < best.load()) {
                        best = idx;
                        best_sigma = ev.sigma;
                    }
                    break;
                }
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        tried += my_tried;
        solved += my_solved;
        inconsistent += my_incons;
        checked += my_checked;
        max_constraints = std::max(max_constraints, my_max);
    };

    const unsigned threads = std::max(1u, budget.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    rep.guesses_tried = tried;
    rep.guesses_solved = solved;
    rep.guesses_inconsistent = inconsistent;
    rep.pairs_checked = checked;
    rep.max_constraints = max_constraints;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (best.load() != ~std::uint64_t{0}) {
        rep.success = true;
        rep.sigma = best_sigma;
        rep.accepted_index = best.load();
        auto gs = search.decode(rep.accepted_index);
        rep.guess_set = search.guess_positions(gs);
        rep.guess_values = gs.beta;
        rep.guess_values.insert(rep.guess_values.end(), gs.alpha.begin(), gs.alpha.end());
    } else if (timed_out) {
        rep.failure_reason = "time budget exhausted";
    } else if (budget.max_guesses && total == budget.max_guesses && rep.search_space > total) {
        rep.failure_reason = "guess budget exhausted";
    } else if (max_constraints < params.n) {
        rep.failure_reason = "no guess yielded n constraints";
    } else {
        rep.failure_reason = "no candidate reproduced every pair";
    }
    return rep;
}

}  // namespace

std::optional<LinearConstraint> try_extract(const SchemeParams& params, const Clause& clause, Digit response,
                                            const std::vector<Index>& S, const std::vector<Digit>& alpha) {
    if (S.size() != alpha.size()) throw InputError("guess set and values differ in size");
    if (clause.indices.size() != params.clause_width()) throw InputError("clause width mismatch");
    std::vector<int> known(params.n, -1);
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i] >= params.n) throw InputError("guess index out of range");
        known[S[i]] = alpha[i] % params.d;
    }
    return extract(params, clause, response, known);
}

AttackReport gaussian_attack(const SchemeParams& params, const std::vector<ChallengePair>& pairs, unsigned g,
                             const AttackBudget& budget) {
    return run_search(params, pairs, {}, g, budget);
}

AttackReport partial_guess_attack(const SchemeParams& params, const std::vector<ChallengePair>& pairs, unsigned g,
                                  unsigned ell, std::uint64_t seed, const AttackBudget& budget) {
    params.validate();
    if (ell > params.n) throw InputError("guess size exceeds n");
    // Fixed random ℓ-subset via partial Fisher–Yates.
    Rng rng(seed);
    std::vector<Index> perm(params.n);
    for (Index i = 0; i < params.n; ++i) perm[i] = i;
    for (unsigned i = 0; i < ell; ++i) std::swap(perm[i], perm[i + rng.uniform(params.n - i)]);
    std::vector<Index> extra(perm.begin(), perm.begin() + ell);
    return run_search(params, pairs, std::move(extra), g, budget);
}

}  // namespace hcp
