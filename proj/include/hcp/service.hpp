// Local training / authentication service: sessions hold a server-side σ, hand
// out single-digit drill challenges, track per-cue rehearsals against the
// expanding schedule, and store account records for practice logins.
//
// The request handling is transport-independent (Service::handle); serve()
// binds it to HTTP.
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hcp/account.hpp"
#include "hcp/io.hpp"
#include "hcp/usability.hpp"

namespace hcp {

struct ServiceConfig {
    std::string data_dir;                 ///< empty: in-memory only; else one append-only event log per session
    HashConfig hash;                      ///< for account records
    RehearsalSchedule schedule;           ///< expanding schedule for due windows
    std::function<double()> clock;        ///< seconds since the epoch; defaults to the system clock
    std::function<std::uint64_t()> seed_source;  ///< used when a session request carries no seed
};

struct ServiceResponse {
    int status = 200;
    Json body;
};

struct AnswerRecord {
    unsigned cursor = 0;
    Digit digit = 0;
    bool correct = false;
    double elapsed_ms = 0;
    double time = 0;
};

struct Session {
    std::string id;
    SchemeParams params;
    std::uint64_t seed = 0;
    bool training = true;
    SecretMapping sigma;
    Rng rng{0};
    unsigned cursor = 0;                 ///< answers accepted so far (within the current challenge)
    std::optional<PasswordChallenge> active;  ///< current drill challenge of t clauses
    std::map<Index, std::vector<double>> rehearsal_log;  ///< cue → recall timestamps
    std::vector<AnswerRecord> answers;
    std::map<std::string, AccountRecord> accounts;
    std::mutex mutex;
};

class Service {
public:
    explicit Service(ServiceConfig cfg = {});

    /// Routes one request. `path` has no query string; `body` is the raw request text.
    ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body);

    std::size_t session_count() const;

private:
    ServiceResponse create_session(const Json& req);
    ServiceResponse challenge(Session& s);
    ServiceResponse answer(Session& s, const Json& req);
    ServiceResponse rehearsal(Session& s);
    ServiceResponse stats(Session& s);
    ServiceResponse create_account_for(Session& s, const Json& req);
    ServiceResponse login(Session& s, const Json& req);

    std::shared_ptr<Session> find(const std::string& id) const;
    void ensure_challenge(Session& s);
    void append_event(const Session& s, const Json& event);
    void replay(const std::string& path);
    /// Applies an event to a session; used both live and on replay.
    void apply(Session& s, const Json& event);
    double now() const;

    ServiceConfig cfg_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// Blocks serving HTTP on host:port until `stop` becomes true (or forever when
/// null). Port 0 binds any free port; `on_ready` receives the bound port once
/// the socket is listening-ready. Throws InputError if the port cannot be bound.
void serve(const std::string& host, int port, ServiceConfig cfg = {}, const std::atomic<bool>* stop = nullptr,
           const std::function<void(int)>& on_ready = {});

}  // namespace hcp
