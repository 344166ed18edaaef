#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <future>
#include <thread>

#include <httplib.h>

#include "hcp/service.hpp"

using namespace hcp;

namespace {

struct Clock {
    double t = 1'700'000'000.0;
};

ServiceConfig test_config(Clock& clock, const std::string& data_dir = {}) {
    ServiceConfig cfg;
    cfg.data_dir = data_dir;
    cfg.hash.algorithm = "scrypt-n1024-r8-p1";
    cfg.clock = [&clock] { return clock.t; };
    cfg.seed_source = [] { return std::uint64_t{99}; };
    return cfg;
}

Json post(Service& svc, const std::string& path, const Json& body, int expect = 200) {
    auto r = svc.handle("POST", path, body.dump());
    CHECK(r.status == expect);
    return r.body;
}

Json get(Service& svc, const std::string& path, int expect = 200) {
    auto r = svc.handle("GET", path, "");
    CHECK(r.status == expect);
    return r.body;
}

/// Clause from the challenge view plus the expected digit under the session σ.
Digit expected_digit(const SchemeParams& p, std::uint64_t seed, const Json& view) {
    Clause c;
    for (const auto& i : view["clause"]["indices"]) c.indices.push_back(i.get<Index>());
    return respond_clause(p, gen_mapping(p, seed), c);
}

std::string temp_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / (std::string("hcp_test_") + name);
    std::filesystem::remove_all(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("session creation and the mnemonic table") {
    Clock clock;
    Service svc(test_config(clock));
    auto s = post(svc, "/api/session", Json{{"n", 30}, {"d", 10}, {"k1", 2}, {"k2", 2}, {"t", 3}, {"seed", 5}}, 201);
    CHECK(s["session_id"] == "s000001");
    REQUIRE(s["mnemonic_table"].size() == 30);
    auto sigma = gen_mapping(SchemeParams{10, 2, 2, 30, 3}, 5);
    for (Index i = 0; i < 30; ++i) {
        CHECK(s["mnemonic_table"][i]["digit"] == sigma[i]);
        CHECK(s["mnemonic_table"][i]["image_id"] == "img-" + std::to_string(i));
    }
    auto quiet = post(svc, "/api/session", Json{{"n", 30}, {"t", 3}, {"training", false}}, 201);
    CHECK_FALSE(quiet.contains("mnemonic_table"));
    CHECK(svc.session_count() == 2);

    post(svc, "/api/session", Json{{"n", 5}}, 400);              // narrower than a clause
    post(svc, "/api/session", Json{{"n", "many"}}, 400);
    CHECK(svc.handle("POST", "/api/session", "{not json").status == 400);
    CHECK(svc.handle("GET", "/api/session", "").status == 405);
    CHECK(svc.handle("GET", "/api/session/s999/challenge", "").status == 404);
    CHECK(svc.handle("GET", "/api/elsewhere", "").status == 404);
}

TEST_CASE("drill: challenges, answers and rehearsal log") {
    Clock clock;
    Service svc(test_config(clock));
    SchemeParams p{10, 2, 2, 30, 3};
    post(svc, "/api/session", Json{{"n", 30}, {"t", 3}, {"seed", 7}}, 201);
    const std::string base = "/api/session/s000001";

    auto c0 = get(svc, base + "/challenge");
    CHECK(c0["cursor"] == 0);
    CHECK(c0["clause"]["slots"].size() == 10);
    CHECK(c0["clause"]["index_vars"].size() == 2);
    CHECK(c0["clause"]["tails"].size() == 2);
    CHECK(get(svc, base + "/challenge") == c0);  // idempotent

    const Digit right = expected_digit(p, 7, c0);
    auto a = post(svc, base + "/answer", Json{{"digit", right}, {"elapsed_ms", 1500}});
    CHECK(a["correct"] == true);
    CHECK(a["expected_position_feedback"] == "none");
    std::size_t recalls = 0;
    for (const auto& cue : a["rehearsal_log"]) recalls += cue["recalls"].size();
    CHECK(recalls == p.k1 + p.k2 + 1);

    auto c1 = get(svc, base + "/challenge");
    CHECK(c1["cursor"] == 1);
    const Digit wrong = static_cast<Digit>((expected_digit(p, 7, c1) + 3) % 10);
    clock.t += 10;
    auto b = post(svc, base + "/answer", Json{{"digit", wrong}, {"elapsed_ms", 2500}});
    CHECK(b["correct"] == false);
    CHECK(b.size() == 4);  // correct, feedback, cursor, log — nothing about σ
    recalls = 0;
    for (const auto& cue : b["rehearsal_log"]) recalls += cue["recalls"].size();
    CHECK(recalls == p.k1 + p.k2 + 1);

    auto c2 = get(svc, base + "/challenge");
    post(svc, base + "/answer", Json{{"digit", expected_digit(p, 7, c2)}, {"elapsed_ms", 900}});
    auto c3 = get(svc, base + "/challenge");
    CHECK(c3["cursor"] == 0);  // a fresh challenge after t answers
    CHECK(c3["clause"] != c0["clause"]);

    auto st = get(svc, base + "/stats");
    CHECK(st["answered"] == 3);
    CHECK(st["correct"] == 2);
    CHECK(st["timings_ms"] == Json::array({1500.0, 2500.0, 900.0}));

    post(svc, base + "/answer", Json{{"digit", 10}, {"elapsed_ms", 1}}, 400);
    post(svc, base + "/answer", Json{{"digit", 1}}, 400);
    post(svc, base + "/answer", Json{{"digit", 1}, {"elapsed_ms", -4}}, 400);
    CHECK(svc.handle("GET", base + "/answer", "").status == 405);
}

TEST_CASE("rehearsal windows follow t_i = 2^i days from the first recall") {
    Clock clock;
    Service svc(test_config(clock));
    SchemeParams p{10, 1, 1, 30, 5};
    post(svc, "/api/session", Json{{"n", 30}, {"k1", 1}, {"k2", 1}, {"t", 5}, {"seed", 3}}, 201);
    const std::string base = "/api/session/s000001";
    const double t0 = clock.t;
    auto c = get(svc, base + "/challenge");
    post(svc, base + "/answer", Json{{"digit", expected_digit(p, 3, c)}, {"elapsed_ms", 1000}});

    auto r = get(svc, base + "/rehearsal");
    REQUIRE(r["cues"].size() == 3);
    for (const auto& cue : r["cues"]) {
        CHECK(cue["window"] == -1);
        CHECK(cue["next_due"].get<double>() == doctest::Approx(t0 + 2 * 86400.0));
    }
    clock.t = t0 + 5 * 86400.0;  // inside [4, 8) days: window 2
    r = get(svc, base + "/rehearsal");
    for (const auto& cue : r["cues"]) {
        CHECK(cue["window"] == 2);
        CHECK(cue["window_start"].get<double>() == doctest::Approx(t0 + 4 * 86400.0));
        CHECK(cue["window_end"].get<double>() == doctest::Approx(t0 + 8 * 86400.0));
        CHECK(cue["rehearsed_in_window"] == false);
        CHECK(cue["next_due"] == cue["window_end"]);
    }
}

TEST_CASE("accounts and practice logins") {
    Clock clock;
    Service svc(test_config(clock));
    SchemeParams p{10, 2, 2, 30, 4};
    post(svc, "/api/session", Json{{"n", 30}, {"t", 4}, {"seed", 11}}, 201);
    const std::string base = "/api/session/s000001";
    auto rec = post(svc, base + "/account", Json{{"label", "mail"}}, 201);
    CHECK(rec["account_id"] == "mail");
    CHECK(rec["challenge"].size() == 4);
    post(svc, base + "/account", Json{{"label", "mail"}}, 409);
    post(svc, base + "/account", Json::object(), 400);

    auto record = account_from_json(rec);
    auto digits = respond(p, gen_mapping(p, 11), record.challenge);
    auto ok = post(svc, base + "/login", Json{{"label", "mail"}, {"digits", digits_to_string(digits)}});
    CHECK(ok["success"] == true);
    digits[0] = static_cast<Digit>((digits[0] + 1) % 10);
    auto bad = post(svc, base + "/login", Json{{"label", "mail"}, {"digits", digits_to_string(digits)}});
    CHECK(bad["success"] == false);
    post(svc, base + "/login", Json{{"label", "bank"}, {"digits", "0000"}}, 404);
    post(svc, base + "/login", Json{{"label", "mail"}, {"digits", "00"}}, 400);
}

TEST_CASE("sessions survive a restart through the event log") {
    const std::string dir = temp_dir("persist");
    Clock clock;
    SchemeParams p{10, 2, 2, 30, 3};
    Json before_stats, before_challenge, before_rehearsal;
    {
        Service svc(test_config(clock, dir));
        post(svc, "/api/session", Json{{"n", 30}, {"t", 3}, {"seed", 21}}, 201);
        const std::string base = "/api/session/s000001";
        for (int i = 0; i < 4; ++i) {
            auto c = get(svc, base + "/challenge");
            post(svc, base + "/answer", Json{{"digit", expected_digit(p, 21, c)}, {"elapsed_ms", 100 * i}});
            clock.t += 60;
        }
        post(svc, base + "/account", Json{{"label", "shop"}}, 201);
        before_stats = get(svc, base + "/stats");
        before_challenge = get(svc, base + "/challenge");
        before_rehearsal = get(svc, base + "/rehearsal");
    }
    Service again(test_config(clock, dir));
    CHECK(again.session_count() == 1);
    const std::string base = "/api/session/s000001";
    CHECK(get(again, base + "/stats") == before_stats);
    CHECK(get(again, base + "/challenge") == before_challenge);
    CHECK(get(again, base + "/rehearsal") == before_rehearsal);
    post(again, base + "/account", Json{{"label", "shop"}}, 409);
    auto s2 = post(again, "/api/session", Json{{"n", 30}, {"t", 3}}, 201);
    CHECK(s2["session_id"] == "s000002");
    std::filesystem::remove_all(dir);
}

TEST_CASE("HTTP round trip") {
    Clock clock;
    std::atomic<bool> stop{false};
    std::promise<int> ready;
    std::thread server([&] { serve("127.0.0.1", 0, test_config(clock), &stop, [&](int port) { ready.set_value(port); }); });
    const int port = ready.get_future().get();
    httplib::Client cli("127.0.0.1", port);
    cli.set_connection_timeout(5);
    auto created = cli.Post("/api/session", R"({"n":30,"t":2,"seed":4})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    CHECK(created->get_header_value("Content-Type") == "application/json");
    auto id = Json::parse(created->body)["session_id"].get<std::string>();
    auto ch = cli.Get(("/api/session/" + id + "/challenge").c_str());
    REQUIRE(ch);
    CHECK(ch->status == 200);
    auto view = Json::parse(ch->body);
    const Digit d = expected_digit(SchemeParams{10, 2, 2, 30, 2}, 4, view);
    auto ans = cli.Post(("/api/session/" + id + "/answer").c_str(),
                        Json{{"digit", d}, {"elapsed_ms", 1200}}.dump(), "application/json");
    REQUIRE(ans);
    CHECK(Json::parse(ans->body)["correct"] == true);
    auto missing = cli.Get("/api/session/nope/stats");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    stop = true;
    server.join();
}
