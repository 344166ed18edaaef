#include "hcp/service.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

constexpr double kDay = 86400.0;

ServiceResponse error(int status, const std::string& message) { return {status, Json{{"error", message}}}; }

/// Reads an optional unsigned field with a default; wrong types are InputError.
unsigned opt_unsigned(const Json& j, const char* key, unsigned fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j[key];
    if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1'000'000)
        throw InputError(std::string("field '") + key + "' must be a non-negative integer");
    return static_cast<unsigned>(v.get<long long>());
}

Json clause_view(const SchemeParams& p, const Clause& c) {
    Json slots = Json::array(), index_vars = Json::array(), tails = Json::array();
    for (unsigned i = 0; i < p.d; ++i) slots.push_back(Json{{"slot", i}, {"index", c.indices[i]}});
    for (unsigned i = 0; i < p.k1; ++i) index_vars.push_back(c.indices[p.d + i]);
    for (unsigned i = 0; i < p.k2; ++i) tails.push_back(c.indices[p.d + p.k1 + i]);
    return Json{{"indices", clause_to_json(c)}, {"slots", slots}, {"index_vars", index_vars}, {"tails", tails}};
}

Json rehearsal_log_json(const Session& s) {
    Json log = Json::array();
    for (const auto& [cue, times] : s.rehearsal_log) log.push_back(Json{{"index", cue}, {"recalls", times}});
    return log;
}

std::string session_file(const std::string& dir, const std::string& id) { return dir + "/" + id + ".jsonl"; }

}  // namespace

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.data_dir.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(cfg_.data_dir, ec);
        if (ec) throw InputError("cannot create data directory " + cfg_.data_dir);
        std::vector<std::string> logs;
        for (const auto& entry : fs::directory_iterator(cfg_.data_dir))
            if (entry.path().extension() == ".jsonl") logs.push_back(entry.path().string());
        std::sort(logs.begin(), logs.end());
        for (const auto& path : logs) replay(path);
    }
}

std::size_t Service::session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

double Service::now() const {
    if (cfg_.clock) return cfg_.clock();
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void Service::append_event(const Session& s, const Json& event) {
    if (cfg_.data_dir.empty()) return;
    std::ofstream out(session_file(cfg_.data_dir, s.id), std::ios::app | std::ios::binary);
    if (!out) throw ResourceError("cannot append to the session log");
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw ResourceError("session log write failed");
}

void Service::apply(Session& s, const Json& e) {
    const std::string kind = e.at("event").get<std::string>();
    if (kind == "challenge") {
        s.active = gen_password_challenge(s.params, s.rng);
        s.cursor = 0;
        if (e.contains("clauses") && challenge_to_json(*s.active) != e["clauses"])
            throw InputError("session log does not match the challenge stream");
    } else if (kind == "answer") {
        if (!s.active) throw InputError("answer without an active challenge");
        AnswerRecord a;
        a.cursor = s.cursor;
        a.digit = static_cast<Digit>(e.at("digit").get<unsigned>());
        a.elapsed_ms = e.at("elapsed_ms").get<double>();
        a.time = e.at("time").get<double>();
        const Clause& c = s.active->clauses[s.cursor];
        a.correct = respond_clause(s.params, s.sigma, c) == a.digit;
        if (a.correct)
            for (Index cue : recalled_indices(s.params, s.sigma, c)) s.rehearsal_log[cue].push_back(a.time);
        s.answers.push_back(a);
        if (++s.cursor == s.params.t) s.active.reset();
    } else if (kind == "account") {
        AccountRecord rec = account_from_json(e.at("record"));
        s.accounts[rec.account_id] = std::move(rec);
    } else if (kind == "login") {
        // Logins change no state; the event is kept for the audit trail.
    } else {
        throw InputError("unknown session event '" + kind + "'");
    }
}

void Service::replay(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::shared_ptr<Session> s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json e = parse_json(line);
        if (!s) {
            if (e.value("event", "") != "created") throw InputError("session log must start with 'created': " + path);
            s = std::make_shared<Session>();
            s->id = e.at("id").get<std::string>();
            s->params = params_from_json(e.at("params"));
            s->seed = e.at("seed").get<std::uint64_t>();
            s->training = e.at("training").get<bool>();
            s->sigma = gen_mapping(s->params, s->seed);
            s->rng = Rng(s->seed).split(1);
            continue;
        }
        apply(*s, e);
    }
    if (!s) return;
    std::lock_guard lock(mutex_);
    unsigned long long num = 0;
    if (std::sscanf(s->id.c_str(), "s%llu", &num) == 1 && num >= next_id_) next_id_ = num + 1;
    sessions_[s->id] = std::move(s);
}

void Service::ensure_challenge(Session& s) {
    if (s.active) return;
    Json e{{"event", "challenge"}, {"time", now()}};
    apply(s, e);
    e["clauses"] = challenge_to_json(*s.active);
    append_event(s, e);
}

ServiceResponse Service::create_session(const Json& req) {
    if (!req.is_object()) return error(400, "session request must be an object");
    SchemeParams p;
    p.d = opt_unsigned(req, "d", 10);
    p.k1 = opt_unsigned(req, "k1", 2);
    p.k2 = opt_unsigned(req, "k2", 2);
    p.n = opt_unsigned(req, "n", 100);
    p.t = opt_unsigned(req, "t", 10);
    p.validate();
    if (p.d > 36) throw InputError("d must be at most 36 for digit rendering");
    std::uint64_t seed;
    if (req.contains("seed")) {
        if (!req["seed"].is_number_unsigned()) throw InputError("field 'seed' must be a non-negative integer");
        seed = req["seed"].get<std::uint64_t>();
    } else if (cfg_.seed_source) {
        seed = cfg_.seed_source();
    } else {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    bool training = true;
    if (req.contains("training")) {
        if (!req["training"].is_boolean()) throw InputError("field 'training' must be a boolean");
        training = req["training"].get<bool>();
    }

    auto s = std::make_shared<Session>();
    s->params = p;
    s->seed = seed;
    s->training = training;
    s->sigma = gen_mapping(p, seed);
    s->rng = Rng(seed).split(1);
    {
        std::lock_guard lock(mutex_);
        char buf[32];
        std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
        s->id = buf;
        sessions_[s->id] = s;
    }
    std::lock_guard lock(s->mutex);
    append_event(*s, Json{{"event", "created"},
                          {"id", s->id},
                          {"params", params_to_json(p)},
                          {"seed", seed},
                          {"training", training},
                          {"time", now()}});
    Json body{{"session_id", s->id}, {"params", params_to_json(p)}, {"training", training}};
    if (training) {
        // The only place σ digits ever leave the service: the initial table of
        // a session created in training mode.
        Json table = Json::array();
        for (Index i = 0; i < p.n; ++i)
            table.push_back(Json{{"index", i}, {"image_id", "img-" + std::to_string(i)}, {"digit", s->sigma[i]}});
        body["mnemonic_table"] = std::move(table);
    }
    return {201, body};
}

ServiceResponse Service::challenge(Session& s) {
    ensure_challenge(s);
    return {200, Json{{"session_id", s.id},
                      {"cursor", s.cursor},
                      {"t", s.params.t},
                      {"clause", clause_view(s.params, s.active->clauses[s.cursor])}}};
}

ServiceResponse Service::answer(Session& s, const Json& req) {
    if (!req.is_object() || !req.contains("digit") || !req.contains("elapsed_ms"))
        return error(400, "answer needs 'digit' and 'elapsed_ms'");
    const Json& dj = req["digit"];
    const Json& ej = req["elapsed_ms"];
    if (!dj.is_number_integer() || dj.get<long long>() < 0 || dj.get<long long>() >= s.params.d)
        return error(400, "digit out of range");
    if (!ej.is_number() || ej.get<double>() < 0) return error(400, "elapsed_ms must be a non-negative number");
    ensure_challenge(s);
    Json e{{"event", "answer"}, {"digit", dj.get<unsigned>()}, {"elapsed_ms", ej.get<double>()}, {"time", now()}};
    apply(s, e);
    append_event(s, e);
    const AnswerRecord& a = s.answers.back();
    return {200, Json{{"correct", a.correct},
                      {"expected_position_feedback", "none"},
                      {"cursor", s.cursor},
                      {"rehearsal_log", rehearsal_log_json(s)}}};
}

ServiceResponse Service::rehearsal(Session& s) {
    const double t_now = now();
    Json cues = Json::array();
    for (const auto& [cue, times] : s.rehearsal_log) {
        const double first = times.front();
        const double age_days = (t_now - first) / kDay;
        // Window i is [first + t_i days, first + t_{i+1} days); before t_0 the
        // association is still in its initial learning period (window −1).
        int w = -1;
        while (w < 62 && age_days >= cfg_.schedule.boundary(static_cast<unsigned>(w + 1))) ++w;
        const double start = w < 0 ? first : first + cfg_.schedule.boundary(static_cast<unsigned>(w)) * kDay;
        const double end = first + cfg_.schedule.boundary(static_cast<unsigned>(w + 1)) * kDay;
        bool rehearsed = false;
        for (double x : times) rehearsed |= x >= start && x < end;
        const double next_due =
            rehearsed || w < 0 ? first + cfg_.schedule.boundary(static_cast<unsigned>(w + 2)) * kDay : end;
        cues.push_back(Json{{"index", cue},
                            {"recall_count", times.size()},
                            {"first_recall", first},
                            {"last_recall", times.back()},
                            {"window", w},
                            {"window_start", start},
                            {"window_end", end},
                            {"rehearsed_in_window", rehearsed},
                            {"next_due", next_due}});
    }
    return {200, Json{{"session_id", s.id}, {"now", t_now}, {"cues", cues}}};
}

ServiceResponse Service::stats(Session& s) {
    std::size_t correct = 0;
    Json timings = Json::array(), answers = Json::array();
    for (const auto& a : s.answers) {
        correct += a.correct;
        timings.push_back(a.elapsed_ms);
        answers.push_back(Json{{"cursor", a.cursor}, {"correct", a.correct}, {"elapsed_ms", a.elapsed_ms}});
    }
    const double n = static_cast<double>(s.answers.size());
    return {200, Json{{"session_id", s.id},
                      {"answered", s.answers.size()},
                      {"correct", correct},
                      {"accuracy", n > 0 ? static_cast<double>(correct) / n : 0.0},
                      {"timings_ms", timings},
                      {"answers", answers}}};
}

ServiceResponse Service::create_account_for(Session& s, const Json& req) {
    if (!req.is_object() || !req.contains("label") || !req["label"].is_string() ||
        req["label"].get<std::string>().empty())
        return error(400, "account needs a non-empty 'label'");
    const std::string label = req["label"].get<std::string>();
    if (s.accounts.count(label)) return error(409, "account label already exists");
    Rng rng = Rng(s.seed).split(1000 + s.accounts.size());
    AccountRecord rec = create_account(s.sigma, s.params, label, rng, cfg_.hash);
    Json e{{"event", "account"}, {"record", account_to_json(rec)}, {"time", now()}};
    apply(s, e);
    append_event(s, e);
    return {201, account_to_json(rec)};
}

ServiceResponse Service::login(Session& s, const Json& req) {
    if (!req.is_object() || !req.contains("label") || !req["label"].is_string() || !req.contains("digits") ||
        !req["digits"].is_string())
        return error(400, "login needs 'label' and 'digits' strings");
    auto it = s.accounts.find(req["label"].get<std::string>());
    if (it == s.accounts.end()) return error(404, "unknown account label");
    auto digits = digits_from_string(req["digits"].get<std::string>(), s.params.d);
    const bool ok = verify(it->second, digits);
    append_event(s, Json{{"event", "login"}, {"label", it->first}, {"success", ok}, {"time", now()}});
    return {200, Json{{"label", it->first}, {"success", ok}}};
}

ServiceResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
    static const std::regex kSessionRoute(R"(^/api/session/([A-Za-z0-9_-]+)/(challenge|answer|rehearsal|stats|account|login)$)");
    try {
        auto parse_body = [&]() -> Json { return body.empty() ? Json::object() : parse_json(body); };
        if (path == "/api/session") {
            if (method != "POST") return error(405, "method not allowed");
            return create_session(parse_body());
        }
        std::smatch m;
        if (!std::regex_match(path, m, kSessionRoute)) return error(404, "no such endpoint");
        const std::string action = m[2];
        const bool is_get = action == "challenge" || action == "rehearsal" || action == "stats";
        if (method != (is_get ? "GET" : "POST")) return error(405, "method not allowed");
        auto s = find(m[1]);
        if (!s) return error(404, "unknown session");
        const Json req = is_get ? Json::object() : parse_body();
        std::lock_guard lock(s->mutex);
        if (action == "challenge") return challenge(*s);
        if (action == "answer") return answer(*s, req);
        if (action == "rehearsal") return rehearsal(*s);
        if (action == "stats") return stats(*s);
        if (action == "account") return create_account_for(*s, req);
        return login(*s, req);
    } catch (const InputError& e) {
        return error(400, e.what());
    } catch (const nlohmann::json::exception& e) {
        return error(400, e.what());
    } catch (const ResourceError& e) {
        return error(500, e.what());
    }
}

void serve(const std::string& host, int port, ServiceConfig cfg, const std::atomic<bool>* stop,
           const std::function<void(int)>& on_ready) {
    Service service(std::move(cfg));
    httplib::Server server;
    auto route = [&service](const httplib::Request& req, httplib::Response& res) {
        ServiceResponse r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get(R"(/api/.*)", route);
    server.Post(R"(/api/.*)", route);
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
        if (bound < 0) throw InputError("cannot bind " + host);
    } else if (!server.bind_to_port(host, port)) {
        throw InputError("cannot bind " + host + ":" + std::to_string(port));
    }
    std::thread watcher;
    if (stop) {
        watcher = std::thread([&server, stop] {
            while (!stop->load()) std::this_thread::sleep_for(std::chrono::milliseconds(20));
            server.stop();
        });
    }
    if (on_ready) on_ready(bound);
    server.listen_after_bind();
    if (watcher.joinable()) watcher.join();
}

}  // namespace hcp
