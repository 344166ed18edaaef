// Statistical query oracles backed by a planted distribution: uniform clauses
// answered under a hidden σ, optionally with response noise.
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>

#include "hcp/attacks.hpp"
#include "hcp/rng.hpp"

namespace hcp {

enum class VstatMode {
    Simulated,    ///< empirical mean of the internal samples
    Adversarial,  ///< p̂ ± τ, the sign drawn at random per query (worst case inside the band)
};

struct OracleConfig {
    /// Response noise. Each response is kept with probability 1 − δ (δ ≤ 1) and
    /// otherwise replaced by a uniform digit. For δ > 1 a response is replaced by
    /// a uniform wrong digit with probability δ − 1 and by a uniform digit
    /// otherwise, so the response character is scaled by −(δ−1)/(d−1)
    /// (a sign flip at d = 2). δ = 1 carries no signal.
    double delta = 0;
    std::uint64_t sample_budget = 0;  ///< 0: unlimited
    VstatMode vstat_mode = VstatMode::Simulated;
};

struct OracleStats {
    std::uint64_t mstat_queries = 0;
    std::uint64_t vstat_queries = 0;
    std::uint64_t samples = 0;  ///< samples drawn by all queries
    unsigned last_L = 0;        ///< range of the latest 1-MSTAT query
    unsigned last_T = 0;        ///< precision parameter of the latest VSTAT query
    double last_tau = 0;
};

class StatisticalOracle {
public:
    StatisticalOracle(const SchemeParams& params, SecretMapping sigma, std::uint64_t seed, OracleConfig config = {});

    /// 1-MSTAT(L): one fresh sample x, returns h(x) ∈ {0..L−1}.
    unsigned mstat(const std::function<unsigned(const ChallengePair&)>& h, unsigned L);

    /// VSTAT(T) for a boolean query. Draws T samples to estimate p̂, sets
    /// τ = max(1/T, sqrt(p̂(1−p̂)/T)), tops up to max(T, ⌈1/τ²⌉) samples and
    /// returns the empirical mean (or p̂ ± τ in adversarial mode), clamped to [0, 1].
    double vstat(const std::function<bool(const ChallengePair&)>& h, unsigned T);

    OracleStats stats() const;
    const SchemeParams& params() const { return params_; }

private:
    ChallengePair draw();

    SchemeParams params_;
    SecretMapping sigma_;
    Rng rng_;
    OracleConfig config_;
    std::atomic<std::uint64_t> mstat_{0}, vstat_{0}, samples_{0};
    unsigned last_L_ = 0, last_T_ = 0;
    double last_tau_ = 0;
};

}  // namespace hcp
