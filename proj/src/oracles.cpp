#include "hcp/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "hcp/errors.hpp"

namespace hcp {

StatisticalOracle::StatisticalOracle(const SchemeParams& params, SecretMapping sigma, std::uint64_t seed,
                                     OracleConfig config)
    : params_(params), sigma_(std::move(sigma)), rng_(seed), config_(config) {
    params_.validate();
    if (sigma_.size() != params_.n || sigma_.d != params_.d) throw InputError("mapping does not match parameters");
    if (!(config_.delta >= 0 && config_.delta <= 2)) throw InputError("delta must lie in [0, 2]");
}

ChallengePair StatisticalOracle::draw() {
    if (config_.sample_budget && samples_.load() >= config_.sample_budget)
        throw ResourceError("sample budget exhausted");
    ++samples_;
    ChallengePair s;
    s.clause = gen_clause(params_, rng_);
    s.response = respond_clause(params_, sigma_, s.clause);
    const double delta = config_.delta;
    if (delta > 0) {
        const unsigned d = params_.d;
        const double u = rng_.uniform_real();
        if (delta <= 1) {
            if (u < delta) s.response = static_cast<Digit>(rng_.uniform(d));
        } else if (u < delta - 1) {
            s.response = static_cast<Digit>((s.response + 1 + rng_.uniform(d - 1)) % d);
        } else {
            s.response = static_cast<Digit>(rng_.uniform(d));
        }
    }
    return s;
}

unsigned StatisticalOracle::mstat(const std::function<unsigned(const ChallengePair&)>& h, unsigned L) {
    if (L == 0) throw InputError("1-MSTAT range must be positive");
    auto s = draw();
    ++mstat_;
    last_L_ = L;
    unsigned v = h(s);
    if (v >= L) throw InputError("1-MSTAT query returned a value outside its range");
    return v;
}

double StatisticalOracle::vstat(const std::function<bool(const ChallengePair&)>& h, unsigned T) {
    if (T == 0) throw InputError("VSTAT precision parameter must be positive");
    ++vstat_;
    last_T_ = T;
    std::uint64_t hits = 0, drawn = 0;
    for (; drawn < T; ++drawn) hits += h(draw());
    double p = static_cast<double>(hits) / static_cast<double>(drawn);
    const double tau = std::max(1.0 / T, std::sqrt(p * (1 - p) / T));
    const auto want = std::max<std::uint64_t>(T, static_cast<std::uint64_t>(std::ceil(1.0 / (tau * tau))));
    for (; drawn < want; ++drawn) hits += h(draw());
    p = static_cast<double>(hits) / static_cast<double>(drawn);
    last_tau_ = tau;
    if (config_.vstat_mode == VstatMode::Adversarial) p += rng_.uniform(2) ? tau : -tau;
    return std::clamp(p, 0.0, 1.0);
}

OracleStats StatisticalOracle::stats() const {
    OracleStats s;
    s.mstat_queries = mstat_.load();
    s.vstat_queries = vstat_.load();
    s.samples = samples_.load();
    s.last_L = last_L_;
    s.last_T = last_T_;
    s.last_tau = last_tau_;
    return s;
}

}  // namespace hcp
