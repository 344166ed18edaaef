#include "hcp/usability.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>

#include "hcp/errors.hpp"

namespace hcp {

double RehearsalSchedule::boundary(unsigned i) const { return std::exp2(i * strength); }

unsigned RehearsalSchedule::last_window(IStarReading reading) const {
    if (!(strength > 0)) throw InputError("association strength must be positive");
    if (!(horizon > 1)) throw InputError("horizon must exceed one day");
    unsigned x = 0;  // argmax_x t_x < horizon; t_0 = 1 < horizon
    while (boundary(x + 1) < horizon) ++x;
    if (reading == IStarReading::Inclusive) return x;
    if (x == 0) throw InputError("horizon admits no complete rehearsal window");
    return x - 1;
}

unsigned VisitationProfile::total_accounts() const {
    unsigned s = 0;
    for (const auto& b : buckets) s += b.accounts;
    return s;
}

std::vector<VisitationProfile> build_profiles() {
    const double lambdas[] = {1.0, 1.0 / 3, 1.0 / 7, 1.0 / 31, 1.0 / 365};
    const std::pair<const char*, std::array<unsigned, 5>> rows[] = {
        {"Very Active", {10, 10, 10, 10, 35}},
        {"Typical", {5, 10, 10, 10, 40}},
        {"Occasional", {2, 10, 20, 20, 23}},
        {"Infrequent", {0, 2, 5, 10, 58}},
    };
    std::vector<VisitationProfile> out;
    for (const auto& [name, counts] : rows) {
        VisitationProfile p{name, {}};
        for (int i = 0; i < 5; ++i) p.buckets.push_back({lambdas[i], counts[i]});
        out.push_back(std::move(p));
    }
    return out;
}

VisitationProfile profile_by_name(const std::string& name) {
    auto norm = [](std::string s) {
        std::string out;
        for (char c : s)
            if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(c));
        return out;
    };
    for (auto& p : build_profiles())
        if (norm(p.name) == norm(name)) return p;
    throw InputError("unknown visitation profile: " + name);
}

CueCoverage cue_coverage(const SchemeParams& params, const SecretMapping& sigma, const std::vector<Account>& accounts,
                         CueAccounting accounting) {
    CueCoverage cov;
    cov.rate.assign(params.n, 0.0);
    cov.recalls.assign(params.n, 0);
    std::vector<unsigned> seen(params.n, 0);
    unsigned stamp = 0;
    for (const auto& acct : accounts) {
        if (acct.lambda < 0) throw InputError("visit rate must be nonnegative");
        ++stamp;
        std::size_t distinct = 0;
        for (const auto& clause : acct.challenge.clauses) {
            for (Index c : recalled_indices(params, sigma, clause)) {
                ++cov.recalls[c];
                const bool first = seen[c] != stamp;
                if (first) seen[c] = stamp, ++distinct;
                if (accounting == CueAccounting::PerRecall || first) cov.rate[c] += acct.lambda;
            }
        }
        cov.account_cues.push_back(distinct);
    }
    return cov;
}

double cue_extra_rehearsals(const RehearsalSchedule& schedule, double rate, IStarReading reading) {
    const unsigned last = schedule.last_window(reading);
    double s = 0;
    for (unsigned i = 0; i <= last; ++i) s += std::exp(-rate * (schedule.boundary(i + 1) - schedule.boundary(i)));
    return s;
}

double expected_extra_rehearsals(const RehearsalSchedule& schedule, const CueCoverage& coverage,
                                 IStarReading reading) {
    double s = 0;
    for (double r : coverage.rate) s += cue_extra_rehearsals(schedule, r, reading);
    return s;
}

SimulationResult simulate_extra_rehearsals(const SchemeParams& params, const RehearsalSchedule& schedule,
                                           const SecretMapping& sigma, const std::vector<Account>& accounts,
                                           std::uint64_t trials, Rng& rng, CueAccounting accounting,
                                           IStarReading reading) {
    if (trials == 0) throw InputError("trials must be positive");
    const unsigned last = schedule.last_window(reading);
    if (last >= 63) throw InputError("too many rehearsal windows");
    std::vector<double> bounds;
    for (unsigned i = 0; i <= last + 1; ++i) bounds.push_back(schedule.boundary(i));
    const double end = bounds.back();
    const std::uint64_t all = (std::uint64_t{1} << (last + 1)) - 1;

    struct Stream {
        double lambda;
        std::vector<Index> cues;
    };
    std::vector<Stream> streams;
    std::vector<unsigned> seen(params.n, 0);
    unsigned stamp = 0;
    for (const auto& acct : accounts) {
        ++stamp;
        Stream shared{acct.lambda, {}};
        for (const auto& clause : acct.challenge.clauses)
            for (Index c : recalled_indices(params, sigma, clause)) {
                if (accounting == CueAccounting::PerRecall) {
                    streams.push_back({acct.lambda, {c}});
                } else if (seen[c] != stamp) {
                    seen[c] = stamp;
                    shared.cues.push_back(c);
                }
            }
        if (accounting == CueAccounting::Distinct) streams.push_back(std::move(shared));
    }

    std::vector<std::uint64_t> met(params.n);
    double sum = 0, sum_sq = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::fill(met.begin(), met.end(), 0);
        for (const auto& s : streams) {
            if (s.lambda <= 0) continue;
            std::uint64_t hit = 0;
            std::size_t w = 0;
            for (double tau = rng.exponential(s.lambda); tau < end && hit != all; tau += rng.exponential(s.lambda)) {
                if (tau < bounds[0]) continue;
                while (tau >= bounds[w + 1]) ++w;
                hit |= std::uint64_t{1} << w;
            }
            for (Index c : s.cues) met[c] |= hit;
        }
        double er = 0;
        for (Index c = 0; c < params.n; ++c) er += static_cast<double>(last + 1 - std::popcount(met[c] & all));
        sum += er;
        sum_sq += er * er;
    }
    SimulationResult r;
    r.trials = trials;
    r.mean = sum / static_cast<double>(trials);
    const double var = trials > 1 ? std::max(0.0, (sum_sq - sum * r.mean) / static_cast<double>(trials - 1)) : 0.0;
    r.stddev = std::sqrt(var);
    const double half = 1.96 * r.stddev / std::sqrt(static_cast<double>(trials));
    r.ci_low = r.mean - half;
    r.ci_high = r.mean + half;
    return r;
}

std::vector<Account> draw_accounts(const SchemeParams& params, const VisitationProfile& profile, Rng& rng) {
    std::vector<Account> out;
    for (const auto& b : profile.buckets)
        for (unsigned a = 0; a < b.accounts; ++a) out.push_back({gen_password_challenge(params, rng), b.lambda});
    return out;
}

YearReport year_report(const SchemeParams& params, const VisitationProfile& profile, unsigned draws,
                           std::uint64_t seed, CueAccounting accounting, const RehearsalSchedule& schedule) {
    params.validate();
    if (draws == 0) throw InputError("draws must be positive");
    const CueAccounting other =
        accounting == CueAccounting::PerRecall ? CueAccounting::Distinct : CueAccounting::PerRecall;
    YearReport r;
    r.profile = profile.name;
    r.n = params.n;
    r.draws = draws;
    r.accounting = accounting;
    r.per_cue_histogram.assign(schedule.last_window(IStarReading::Inclusive) + 2, 0.0);
    Rng master(seed);
    double sum = 0, sum_sq = 0;
    for (unsigned k = 0; k < draws; ++k) {
        Rng rng = master.split(k);
        auto sigma = gen_mapping(params, rng.next());
        auto accounts = draw_accounts(params, profile, rng);
        auto cov = cue_coverage(params, sigma, accounts, accounting);
        const double e = expected_extra_rehearsals(schedule, cov);
        sum += e;
        sum_sq += e * e;
        r.mean_inclusive += expected_extra_rehearsals(schedule, cov, IStarReading::Inclusive);
        r.mean_other_accounting += expected_extra_rehearsals(schedule, cue_coverage(params, sigma, accounts, other));
        for (double rate : cov.rate) {
            auto bin = static_cast<std::size_t>(cue_extra_rehearsals(schedule, rate));
            r.per_cue_histogram[std::min(bin, r.per_cue_histogram.size() - 1)] += 1.0;
        }
    }
    r.mean = sum / draws;
    r.mean_inclusive /= draws;
    r.mean_other_accounting /= draws;
    for (auto& h : r.per_cue_histogram) h /= draws;
    const double var = draws > 1 ? std::max(0.0, (sum_sq - sum * r.mean) / (draws - 1)) : 0.0;
    const double half = 1.96 * std::sqrt(var / draws);
    r.ci_low = r.mean - half;
    r.ci_high = r.mean + half;
    return r;
}

}  // namespace hcp
