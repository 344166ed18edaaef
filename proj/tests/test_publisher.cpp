#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "hcp/account.hpp"
#include "hcp/errors.hpp"
#include "hcp/publisher.hpp"

using namespace hcp;

namespace {

const char* kCheapScrypt = "scrypt-n1024-r8-p1";

std::string golden(const std::string& name) { return std::string(HCP_GOLDEN_DIR) + "/" + name; }

struct GoldenCase {
    SchemeParams params;
    std::size_t m;
    std::uint64_t seed;
    const char* bundle_file;
    const char* oracle_file;
};

const GoldenCase kCases[] = {
    {{10, 2, 2, 30, 10}, 30, 1, "bundle_a.hcpb", "oracle_bundle_a.json"},
    {{10, 1, 3, 100, 10}, 50, 2, "bundle_b.hcpb", "oracle_bundle_b.json"},
};

}  // namespace

TEST_CASE("published bundles match the golden files byte for byte") {
    for (const auto& gc : kCases) {
        auto pub = publish(gc.params, gc.m, gc.seed, kCheapScrypt);
        const std::string text = format_document(bundle_to_json(pub.bundle));
        if (std::getenv("HCP_REGENERATE_GOLDEN")) write_file(golden(gc.bundle_file), text);
        CHECK(read_file(golden(gc.bundle_file)) == text);
    }
}

TEST_CASE("published bundles agree with the independent generator") {
    for (const auto& gc : kCases) {
        auto pub = publish(gc.params, gc.m, gc.seed, kCheapScrypt);
        Json oracle = parse_json(read_file(golden(gc.oracle_file)));
        CHECK(oracle["sealed_digits"].get<std::string>() == digits_to_string(pub.sealed.digits));
        oracle.erase("sealed_digits");
        CHECK(bundle_to_json(pub.bundle) == oracle);
    }
}

TEST_CASE("bundle round trip and contents") {
    auto pub = publish({10, 2, 2, 50, 10}, 500, 3, kCheapScrypt);
    const auto& b = pub.bundle;
    CHECK(b.pairs.size() == 500);
    CHECK(b.password_challenges.size() == 20);
    CHECK(reproduces_all(b.params, pub.sealed, b.pairs));
    const std::string text = format_document(bundle_to_json(b));
    auto back = bundle_from_json(parse_json(text));
    CHECK(format_document(bundle_to_json(back)) == text);
    CHECK(to_hex(b.seed_commitment) == to_hex(seed_commitment(3, kCheapScrypt)));
    // The bundle never carries the mapping itself.
    CHECK(text.find(digits_to_string(pub.sealed.digits)) == std::string::npos);
    CHECK(text.find("digits") == std::string::npos);

    auto empty = publish({10, 2, 2, 30, 10}, 0, 4, kCheapScrypt);
    CHECK(empty.bundle.pairs.empty());
    CHECK(empty.bundle.password_challenges.size() == 20);
}

TEST_CASE("reference grid of (n, m) is instantiable") {
    for (auto [n, m] : {std::pair{100u, 1000u}, {50u, 500u}, {30u, 300u}}) {
        auto pub = publish({10, 2, 2, n, 10}, m, n, kCheapScrypt);
        CHECK(pub.bundle.pairs.size() == m);
        CHECK(pub.sealed.size() == n);
    }
}

TEST_CASE("deserialization rejects malformed clauses and responses") {
    auto pub = publish({10, 2, 2, 30, 10}, 5, 5, kCheapScrypt);
    const Json good = bundle_to_json(pub.bundle);
    auto bad = good;
    bad["pairs"][0]["clause"][1] = bad["pairs"][0]["clause"][0];
    CHECK_THROWS_AS(bundle_from_json(bad), InputError);
    bad = good;
    bad["pairs"][0]["clause"][0] = 30;
    CHECK_THROWS_AS(bundle_from_json(bad), InputError);
    bad = good;
    bad["pairs"][0]["response"] = 10;
    CHECK_THROWS_AS(bundle_from_json(bad), InputError);
    bad = good;
    bad["password_challenges"].erase(0);
    CHECK_THROWS_AS(bundle_from_json(bad), InputError);
    bad = good;
    bad["password_challenges"][3][0][2] = -1;
    CHECK_THROWS_AS(bundle_from_json(bad), InputError);
    bad = good;
    bad.erase("commitment");
    CHECK_THROWS_AS(bundle_from_json(bad), InputError);
}

TEST_CASE("grading agrees with direct recomputation") {
    auto pub = publish({10, 2, 2, 30, 10}, 0, 6, kCheapScrypt);
    const auto& b = pub.bundle;
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<unsigned, std::vector<Digit>> sub;
        for (unsigned i = 0; i < 20; ++i) {
            if (rng.uniform(2)) continue;
            auto digits = respond(b.params, pub.sealed, b.password_challenges[i]);
            if (rng.uniform(2)) digits[rng.uniform(10)] = static_cast<Digit>(rng.uniform(10));
            sub[i] = digits;
        }
        for (const auto& v : grade(b, pub.sealed, sub))
            CHECK(v.win == (respond(b.params, pub.sealed, b.password_challenges[v.index]) == sub.at(v.index)));
    }
    auto right = respond(b.params, pub.sealed, b.password_challenges[0]);
    CHECK(grade(b, pub.sealed, {{0, right}})[0].win);
    auto wrong = right;
    wrong[9] = static_cast<Digit>((wrong[9] + 1) % 10);
    CHECK_FALSE(grade(b, pub.sealed, {{0, wrong}})[0].win);
    CHECK_THROWS_AS(grade(b, pub.sealed, {{20, right}}), InputError);
    CHECK_THROWS_AS(grade(b, pub.sealed, {{0, std::vector<Digit>(9, 0)}}), InputError);
    CHECK_THROWS_AS(grade(b, pub.sealed, {{0, std::vector<Digit>(10, 10)}}), InputError);
}

TEST_CASE("uniform guesses win at rate d^-t (t = 2)") {
    auto pub = publish({10, 2, 2, 30, 2}, 0, 8, kCheapScrypt);
    Rng rng(9);
    const int N = 200000;
    int wins = 0;
    for (int i = 0; i < N; ++i) {
        std::vector<Digit> g{static_cast<Digit>(rng.uniform(10)), static_cast<Digit>(rng.uniform(10))};
        wins += grade(pub.bundle, pub.sealed, {{static_cast<unsigned>(rng.uniform(20)), g}})[0].win;
    }
    const double p = wins / double(N);
    CHECK(std::abs(p - 0.01) < 4 * std::sqrt(0.01 * 0.99 / N));
}

TEST_CASE("submission documents") {
    SchemeParams p{10, 2, 2, 30, 10};
    auto sub = submission_from_json(parse_json(R"({"submissions":[{"index":3,"response":"0123456789"}]})"), p);
    REQUIRE(sub.count(3));
    CHECK(sub[3][9] == 9);
    CHECK_THROWS_AS(submission_from_json(parse_json(R"({"submissions":[{"index":20,"response":"0"}]})"), p), InputError);
    CHECK_THROWS_AS(submission_from_json(parse_json(R"({"submissions":[{"index":1,"response":"01x"}]})"), p), InputError);
    CHECK_THROWS_AS(submission_from_json(parse_json(R"({"subs":[]})"), p), InputError);
}
