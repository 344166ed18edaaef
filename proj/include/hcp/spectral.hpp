// Spectral (power-iteration) attack driven by 1-MSTAT queries, and the
// conditional-bias estimate it relies on.
//
// Positions P = (slot 0, tail 1, …, tail k2) of a clause carry the signal: when
// the index sum is 0 (probability 1/d) the response equals Σ_{p∈P} σ(C_p).
// The first c1 = ⌈r/2⌉ positions of P index the rows of a matrix and the last
// c2 = ⌊r/2⌋ index the columns (r = k2 + 1).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcp/attacks.hpp"
#include "hcp/oracles.hpp"

namespace hcp {

enum class SpectralMode {
    /// Per prime-power factor q of d: rows/columns weighted by ω_q^{response},
    /// normalised to q-th roots of unity; labels σ(R) + φ mod q.
    ResidueCharacter,
    /// Per digit value i: binary indicator problem, samples accepted when the
    /// response ≡ i·multiplier (mod d); ±1 sign normalisation and parity labels.
    DigitIndicator,
};

enum class IndicatorMultiplier { R, C1 };

/// Calibrated at n = 30, f_{1,3}, d = 10 (see the README).
constexpr double kDefaultSpectralC = 10000.0;

struct SpectralOptions {
    SpectralMode mode = SpectralMode::ResidueCharacter;
    IndicatorMultiplier multiplier = IndicatorMultiplier::R;
    double delta = 0;              ///< response noise passed to the oracle
    double c = kDefaultSpectralC;  ///< budget multiplier: c · n² · ln² n samples
    std::uint64_t samples = 0;     ///< explicit sample budget (overrides c)
    unsigned iterations = 0;       ///< 0: ⌈ln |X_r|⌉
    std::uint64_t seed = 1;
};

struct SpectralReport {
    bool success = false;
    SecretMapping sigma;
    std::string failure_reason;
    std::uint64_t samples_used = 0;
    OracleStats oracle;
    unsigned iterations = 0;
    std::vector<double> label_agreement;  ///< per component: fraction of labels the decoded σ satisfies
    std::uint64_t candidates_checked = 0;
    std::uint64_t pairs_checked = 0;
    double seconds = 0;
};

std::uint64_t spectral_sample_budget(unsigned n, double c);

/// Runs the attack against an oracle for the instance's σ; candidates are
/// accepted only if they reproduce every pair of the instance.
SpectralReport spectral_attack(const PlantedInstance& instance, const SpectralOptions& opts = {});

struct ConditionalBiasResult {
    double p_given_equal = 0;      ///< Pr[x_t + Σ tails ≡ j | f ≡ j]
    double p_given_different = 0;  ///< Pr[x_t + Σ tails ≡ j | f ≢ j]
    std::uint64_t count_equal = 0;
    std::uint64_t count_different = 0;
};

/// Monte-Carlo estimate over uniform clauses answered under a planted σ on
/// `n_planted` positions. With `j` unset every j ∈ Z_d is pooled.
ConditionalBiasResult conditional_bias(const SchemeParams& params, unsigned t, std::optional<Digit> j, std::uint64_t samples,
                       std::uint64_t seed, unsigned n_planted = 10'000);

}  // namespace hcp
