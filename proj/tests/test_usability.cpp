#include <doctest.h>

#include <cmath>

#include "hcp/errors.hpp"
#include "hcp/usability.hpp"

using namespace hcp;

TEST_CASE("visitation profiles") {
    auto ps = build_profiles();
    REQUIRE(ps.size() == 4);
    CHECK(profile_by_name("typical").total_accounts() == 75);
    CHECK(profile_by_name("Very-Active").total_accounts() == 75);
    CHECK(profile_by_name("infrequent").buckets[0].accounts == 0);
    CHECK(profile_by_name("Infrequent").buckets[0].lambda == 1.0);
    for (const auto& p : ps)
        for (const auto& b : p.buckets) CHECK(b.lambda > 0);
    CHECK_THROWS_AS(profile_by_name("sometimes"), InputError);
}

TEST_CASE("schedule windows and the i* readings") {
    RehearsalSchedule s;
    CHECK(s.boundary(0) == 1.0);
    CHECK(s.boundary(8) == 256.0);
    CHECK(s.last_window() == 7);
    CHECK(s.last_window(IStarReading::Inclusive) == 8);
    RehearsalSchedule slow{0.5, 365};
    CHECK(slow.last_window() == 16);  // t_17 = 2^8.5 ≈ 362 < 365 ≤ t_18
    CHECK_THROWS_AS((RehearsalSchedule{1, 1}.last_window()), InputError);
    CHECK_THROWS_AS((RehearsalSchedule{0, 365}.last_window()), InputError);
}

TEST_CASE("closed form limits") {
    RehearsalSchedule s;
    CHECK(cue_extra_rehearsals(s, 0.0) == 8.0);
    CHECK(cue_extra_rehearsals(s, 1e6) < 1e-12);
    double prev = 9;
    for (double r : {0.0, 0.001, 0.01, 0.1, 1.0}) {
        double v = cue_extra_rehearsals(s, r);
        CHECK(v <= prev);
        CHECK(v <= 8.0);
        prev = v;
    }
}

TEST_CASE("cue coverage: one clause recalls five cues") {
    SchemeParams p{10, 2, 2, 100, 1};
    auto sigma = gen_mapping(p, 1);
    Rng rng(2);
    std::vector<Account> accts{{gen_password_challenge(p, rng), 0.25}};
    for (auto acc : {CueAccounting::Distinct, CueAccounting::PerRecall}) {
        auto cov = cue_coverage(p, sigma, accts, acc);
        int covered = 0;
        for (double r : cov.rate) {
            CHECK((r == 0.0 || r == 0.25));
            covered += r > 0;
        }
        CHECK(covered == 5);
        CHECK(cov.account_cues[0] == 5);
    }
}

TEST_CASE("cue coverage: ten clauses, collisions and accounting") {
    SchemeParams p{10, 2, 2, 100, 10};
    Rng rng(3);
    int below = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto sigma = gen_mapping(p, rng.next());
        std::vector<Account> accts{{gen_password_challenge(p, rng), 1.0}};
        auto d = cue_coverage(p, sigma, accts, CueAccounting::Distinct);
        auto r = cue_coverage(p, sigma, accts, CueAccounting::PerRecall);
        CHECK(d.account_cues[0] <= 50);
        below += d.account_cues[0] < 45;
        double sd = 0, sr = 0;
        for (Index c = 0; c < p.n; ++c) {
            sd += d.rate[c];
            sr += r.rate[c];
            CHECK(r.rate[c] == doctest::Approx(d.recalls[c]));
        }
        CHECK(sd == doctest::Approx(double(d.account_cues[0])));
        CHECK(sr == doctest::Approx(50.0));
    }
    // 50 recalls over 100 cues almost always collide several times.
    CHECK(below >= 190);
}

TEST_CASE("simulation equals the closed form when nobody visits") {
    SchemeParams p{10, 1, 1, 20, 3};
    auto sigma = gen_mapping(p, 4);
    Rng rng(5);
    std::vector<Account> accts{{gen_password_challenge(p, rng), 0.0}, {gen_password_challenge(p, rng), 0.0}};
    RehearsalSchedule s;
    auto cov = cue_coverage(p, sigma, accts);
    auto sim = simulate_extra_rehearsals(p, s, sigma, accts, 50, rng);
    CHECK(sim.mean == expected_extra_rehearsals(s, cov));
    CHECK(sim.mean == 8.0 * 20);
    CHECK(sim.stddev == 0.0);
}

TEST_CASE("closed form versus simulation on five configurations") {
    const double lambdas[] = {1.0 / 3, 1.0 / 7, 1.0 / 31, 1.0 / 365};
    Rng cfg(6);
    for (int k = 0; k < 5; ++k) {
        SchemeParams p{10, 1 + static_cast<unsigned>(cfg.uniform(2)), 1 + static_cast<unsigned>(cfg.uniform(2)), 30, 2};
        auto sigma = gen_mapping(p, cfg.next());
        std::vector<Account> accts;
        const unsigned m = 2 + static_cast<unsigned>(cfg.uniform(3));
        for (unsigned a = 0; a < m; ++a) accts.push_back({gen_password_challenge(p, cfg), lambdas[cfg.uniform(4)]});
        RehearsalSchedule s;
        for (auto acc : {CueAccounting::Distinct, CueAccounting::PerRecall}) {
            double closed = expected_extra_rehearsals(s, cue_coverage(p, sigma, accts, acc));
            Rng rng(100 + k);
            auto sim = simulate_extra_rehearsals(p, s, sigma, accts, 100000, rng, acc);
            CHECK(std::abs(sim.mean - closed) / closed < 0.02);
            CHECK(sim.ci_low <= sim.ci_high);
        }
    }
}

TEST_CASE("confidence interval shrinks as 1/sqrt(trials)") {
    SchemeParams p{10, 1, 1, 20, 2};
    auto sigma = gen_mapping(p, 7);
    Rng rng(8);
    std::vector<Account> accts{{gen_password_challenge(p, rng), 0.05}, {gen_password_challenge(p, rng), 0.02}};
    RehearsalSchedule s;
    auto a = simulate_extra_rehearsals(p, s, sigma, accts, 2000, rng);
    auto b = simulate_extra_rehearsals(p, s, sigma, accts, 32000, rng);
    double ratio = (a.ci_high - a.ci_low) / (b.ci_high - b.ci_low);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
    CHECK_THROWS_AS(simulate_extra_rehearsals(p, s, sigma, accts, 0, rng), InputError);
}

TEST_CASE("first-year report at n = 100 and the profile ordering") {
    SchemeParams p{10, 2, 2, 100, 10};
    auto typical = year_report(p, profile_by_name("Typical"), 30, 1);
    CHECK(typical.mean == doctest::Approx(2.14).epsilon(0.3));
    CHECK(typical.mean_other_accounting > typical.mean);
    CHECK(typical.ci_low <= typical.mean);
    double cues = 0;
    for (double h : typical.per_cue_histogram) cues += h;
    CHECK(cues == doctest::Approx(100.0));

    for (const char* name : {"Very Active", "Infrequent"}) {
        double prev = 1e9;
        for (unsigned n : {100u, 50u, 30u}) {
            SchemeParams q{10, 2, 2, n, 10};
            double m = year_report(q, profile_by_name(name), 20, 2).mean;
            CHECK(m <= prev + 1e-9);
            prev = m;
        }
    }
    auto again = year_report(p, profile_by_name("Typical"), 30, 1);
    CHECK(again.mean == typical.mean);
}
