// Rehearsal-effort model: expanding rehearsal schedules, Poisson visitation
// profiles, natural-rehearsal cue coverage, the closed-form expected number of
// extra rehearsals, and a Monte-Carlo cross-check.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcp/scheme.hpp"

namespace hcp {

/// Which interval count to use: windows [t_i, t_{i+1}) for i ≤ i*.
enum class IStarReading {
    /// i* = (argmax_x t_x < horizon) − 1: only windows that close by the horizon.
    Formula,
    /// i* = argmax_x t_x < horizon: also the window straddling the horizon.
    Inclusive,
};

struct RehearsalSchedule {
    double strength = 1.0;   ///< association strength; t_i = 2^{i·strength}
    double horizon = 365.0;  ///< days

    double boundary(unsigned i) const;
    /// Index of the last counted window. Throws InputError if horizon ≤ 1 or strength ≤ 0.
    unsigned last_window(IStarReading reading = IStarReading::Formula) const;
};

struct VisitationBucket {
    double lambda = 0;  ///< visits per day
    unsigned accounts = 0;
};

struct VisitationProfile {
    std::string name;
    std::vector<VisitationBucket> buckets;
    unsigned total_accounts() const;
};

/// Very Active, Typical, Occasional, Infrequent over λ = 1, 1/3, 1/7, 1/31, 1/365.
std::vector<VisitationProfile> build_profiles();
/// Case-insensitive lookup; accepts "very-active"/"very_active". Throws InputError.
VisitationProfile profile_by_name(const std::string& name);

struct Account {
    PasswordChallenge challenge;
    double lambda = 0;
};

/// How recalls inside one account's challenge add to a cue's rate.
enum class CueAccounting {
    /// c_j is the set of recalled cues; each covering account adds λ_j once.
    Distinct,
    /// Every recall occurrence within the account's t clauses adds λ_j.
    PerRecall,
};

struct CueCoverage {
    std::vector<double> rate;          ///< λ_c per cue
    std::vector<unsigned> recalls;     ///< recall occurrences per cue over all accounts
    std::vector<std::size_t> account_cues;  ///< |c_j| per account
};

CueCoverage cue_coverage(const SchemeParams& params, const SecretMapping& sigma, const std::vector<Account>& accounts,
                         CueAccounting accounting = CueAccounting::PerRecall);

/// Per-cue expected extra rehearsals Σ_{i ≤ i*} exp(−λ_c (t_{i+1} − t_i)).
double cue_extra_rehearsals(const RehearsalSchedule& schedule, double rate,
                            IStarReading reading = IStarReading::Formula);
double expected_extra_rehearsals(const RehearsalSchedule& schedule, const CueCoverage& coverage,
                                 IStarReading reading = IStarReading::Formula);

struct SimulationResult {
    double mean = 0;
    double ci_low = 0;   ///< 95% normal-approximation interval
    double ci_high = 0;
    double stddev = 0;
    std::uint64_t trials = 0;
};

/// Poisson arrival times per visit stream; a cue's window is met when an
/// arrival of a covering stream lands inside it. Under Distinct each account is
/// one stream covering its cue set; under PerRecall each recall occurrence is
/// its own stream. Counts unmet windows i ≤ i*.
SimulationResult simulate_extra_rehearsals(const SchemeParams& params, const RehearsalSchedule& schedule,
                                           const SecretMapping& sigma, const std::vector<Account>& accounts,
                                           std::uint64_t trials, Rng& rng,
                                           CueAccounting accounting = CueAccounting::PerRecall,
                                           IStarReading reading = IStarReading::Formula);

/// One account per visit in the profile, each with a fresh length-t challenge.
std::vector<Account> draw_accounts(const SchemeParams& params, const VisitationProfile& profile, Rng& rng);

struct YearReport {
    std::string profile;
    unsigned n = 0;
    unsigned draws = 0;
    CueAccounting accounting = CueAccounting::PerRecall;
    double mean = 0;            ///< mean closed-form E[ER] over draws
    double ci_low = 0, ci_high = 0;
    double mean_inclusive = 0;  ///< same draws under IStarReading::Inclusive
    double mean_other_accounting = 0;
    /// histogram[b] = mean number of cues whose expected extra rehearsals lie in [b, b+1)
    std::vector<double> per_cue_histogram;
};

/// Draws fresh σ and per-account challenges each round and averages the closed form.
YearReport year_report(const SchemeParams& params, const VisitationProfile& profile, unsigned draws,
                           std::uint64_t seed, CueAccounting accounting = CueAccounting::PerRecall,
                           const RehearsalSchedule& schedule = {});

}  // namespace hcp
