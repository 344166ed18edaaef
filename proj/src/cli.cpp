#include "hcp/cli.hpp"

#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "hcp/account.hpp"
#include "hcp/csp.hpp"
#include "hcp/errors.hpp"
#include "hcp/io.hpp"
#include "hcp/labels.hpp"
#include "hcp/publisher.hpp"
#include "hcp/security_params.hpp"
#include "hcp/service.hpp"
#include "hcp/spectral.hpp"
#include "hcp/usability.hpp"

namespace hcp {

namespace {

struct ParamFlags {
    unsigned d = 10, k1 = 2, k2 = 2, n = 100, t = 10;
    void add(CLI::App* app, bool with_n = true, bool with_t = true) {
        app->add_option("--d", d, "alphabet size")->capture_default_str();
        app->add_option("--k1", k1, "index variables")->capture_default_str();
        app->add_option("--k2", k2, "tail variables")->capture_default_str();
        if (with_n) app->add_option("--n", n, "secret mapping size")->capture_default_str();
        if (with_t) app->add_option("--t", t, "clauses per password challenge")->capture_default_str();
    }
    SchemeParams params() const {
        SchemeParams p{d, k1, k2, n, t};
        p.validate();
        return p;
    }
};

Json load(const std::string& path) { return parse_json(read_file(path)); }

void emit(std::ostream& out, const Json& j) { out << format_document(j); }

Json sigma_or_null(bool success, const SecretMapping& s) {
    return success ? Json(digits_to_string(s.digits)) : Json(nullptr);
}

Json profile_json(const SecurityProfile& p) {
    Json alpha = Json::array();
    for (Digit a : p.alpha_min) alpha.push_back(a);
    return Json{{"r", p.r},
                {"g", p.g},
                {"s", p.s},
                {"r_method", p.r_method},
                {"g_method", p.g_method},
                {"g_probable", p.g_probable},
                {"alpha_min", alpha},
                {"alpha_j", p.alpha_j},
                {"S_min", p.S_min},
                {"work", p.work}};
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Human-computable password workbench"};
    app.require_subcommand(1);

    // gen-mapping
    auto* gm = app.add_subcommand("gen-mapping", "draw a uniform secret mapping");
    unsigned gm_n = 100, gm_d = 10;
    std::uint64_t gm_seed = 1;
    std::string gm_out;
    gm->add_option("--n", gm_n)->capture_default_str();
    gm->add_option("--d", gm_d)->capture_default_str();
    gm->add_option("--seed", gm_seed)->capture_default_str();
    gm->add_option("--out", gm_out, "mapping file (.hcps); stdout if omitted");

    // gen-challenges
    auto* gc = app.add_subcommand("gen-challenges", "challenge bundle (or an account record) for a given mapping");
    ParamFlags gc_p;
    gc_p.add(gc, false);
    std::string gc_mapping, gc_out, gc_account, gc_algo = "scrypt-n16384-r8-p1";
    std::size_t gc_m = 0;
    std::uint64_t gc_seed = 1;
    gc->add_option("--mapping", gc_mapping, "mapping file")->required();
    gc->add_option("--m", gc_m, "answered single-digit pairs")->capture_default_str();
    gc->add_option("--seed", gc_seed)->capture_default_str();
    gc->add_option("--account", gc_account, "emit an account record with this id instead of a bundle");
    gc->add_option("--hash", gc_algo, "slow-hash / commitment algorithm")->capture_default_str();
    gc->add_option("--out", gc_out, "output file; stdout if omitted");

    // respond
    auto* rs = app.add_subcommand("respond", "answer one password challenge of a bundle");
    std::string rs_mapping, rs_bundle;
    unsigned rs_index = 0;
    rs->add_option("--mapping", rs_mapping)->required();
    rs->add_option("--challenge", rs_bundle, "bundle file (.hcpb)")->required();
    rs->add_option("--index", rs_index)->capture_default_str();

    // verify
    auto* vf = app.add_subcommand("verify", "check a response against an account record");
    std::string vf_account, vf_response;
    vf->add_option("--account", vf_account)->required();
    vf->add_option("--response", vf_response, "t digits")->required();

    // analyze
    auto* an = app.add_subcommand("analyze", "security parameters r, g, s of f_{k1,k2}");
    ParamFlags an_p;
    an_p.add(an, false, false);
    bool an_brute = false;
    an->add_flag("--bruteforce", an_brute, "exhaustive Fourier / restriction search (small d only)");

    // attack
    auto* at = app.add_subcommand("attack", "run an attack against a bundle");
    std::string at_kind, at_bundle, at_mapping;
    std::uint64_t at_seed = 1, at_samples = 0, at_guesses = 0;
    double at_time = 0, at_c = kDefaultSpectralC, at_delta = 0, at_accuracy = 0.4;
    unsigned at_g = 0, at_ell = 2, at_threads = 1, at_restarts = 200;
    at->add_option("kind", at_kind, "gauss | partial | csp | spectral | labels")
        ->required()
        ->check(CLI::IsMember({"gauss", "partial", "csp", "spectral", "labels"}));
    at->add_option("--bundle", at_bundle)->required();
    at->add_option("--mapping", at_mapping, "sealed mapping backing the oracle (spectral, labels)");
    at->add_option("--seed", at_seed)->capture_default_str();
    at->add_option("--samples", at_samples, "spectral sample budget (0: c·n²·ln²n)");
    at->add_option("--c", at_c, "spectral budget multiplier")->capture_default_str();
    at->add_option("--delta", at_delta, "spectral response noise")->capture_default_str();
    at->add_option("--time", at_time, "time limit in seconds (0: none)")->capture_default_str();
    at->add_option("--guesses", at_guesses, "guess budget (0: none)")->capture_default_str();
    at->add_option("--g", at_g, "guess-set size (0: k1)");
    at->add_option("--ell", at_ell, "extra guessed positions (partial)")->capture_default_str();
    at->add_option("--threads", at_threads)->capture_default_str();
    at->add_option("--accuracy", at_accuracy, "label accuracy (labels)")->capture_default_str();
    at->add_option("--restarts", at_restarts, "label restarts")->capture_default_str();

    // usability
    auto* us = app.add_subcommand("usability", "expected extra rehearsals over the first year");
    ParamFlags us_p;
    us_p.add(us);
    std::string us_profile = "Typical", us_accounting = "per-recall";
    unsigned us_draws = 100;
    std::uint64_t us_seed = 1;
    us->add_option("--profile", us_profile)->capture_default_str();
    us->add_option("--draws", us_draws)->capture_default_str();
    us->add_option("--seed", us_seed)->capture_default_str();
    us->add_option("--accounting", us_accounting)
        ->check(CLI::IsMember({"per-recall", "distinct"}))
        ->capture_default_str();

    // publish
    auto* pb = app.add_subcommand("publish", "fresh σ, m answered pairs and 20 password challenges");
    ParamFlags pb_p;
    pb_p.add(pb);
    std::size_t pb_m = 1000;
    std::uint64_t pb_seed = 1;
    std::string pb_bundle, pb_secret, pb_algo = "scrypt-n16384-r8-p1";
    pb->add_option("--m", pb_m)->capture_default_str();
    pb->add_option("--seed", pb_seed)->capture_default_str();
    pb->add_option("--bundle", pb_bundle, "bundle output (.hcpb)")->required();
    pb->add_option("--secret", pb_secret, "sealed mapping output (.hcps)")->required();
    pb->add_option("--hash", pb_algo, "commitment algorithm")->capture_default_str();

    // grade
    auto* gr = app.add_subcommand("grade", "grade submitted passwords against the sealed mapping");
    std::string gr_bundle, gr_secret, gr_submission;
    gr->add_option("--bundle", gr_bundle)->required();
    gr->add_option("--secret", gr_secret)->required();
    gr->add_option("--submission", gr_submission)->required();

    // serve
    auto* sv = app.add_subcommand("serve", "HTTP training / authentication service");
    std::string sv_host = "127.0.0.1", sv_data, sv_algo = "scrypt-n16384-r8-p1";
    int sv_port = 8080;
    sv->add_option("--host", sv_host)->capture_default_str();
    sv->add_option("--port", sv_port)->capture_default_str();
    sv->add_option("--data-dir", sv_data, "event-log directory (default: $HCP_DATA_DIR; none: in memory)");
    sv->add_option("--hash", sv_algo, "account slow-hash algorithm")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    auto write_or_print = [&](const std::string& path, const Json& doc) {
        if (path.empty()) {
            emit(out, doc);
        } else {
            write_file(path, format_document(doc));
            emit(out, Json{{"written", path}});
        }
    };

    try {
        if (*gm) {
            write_or_print(gm_out, mapping_to_json(gen_mapping(gm_d, gm_n, gm_seed)));
        } else if (*gc) {
            SecretMapping sigma = mapping_from_json(load(gc_mapping));
            SchemeParams p{sigma.d, gc_p.k1, gc_p.k2, static_cast<unsigned>(sigma.size()), gc_p.t};
            p.validate();
            if (!gc_account.empty()) {
                Rng rng(gc_seed);
                HashConfig cfg;
                cfg.algorithm = gc_algo;
                write_or_print(gc_out, account_to_json(create_account(sigma, p, gc_account, rng, cfg)));
            } else {
                ChallengeBundle b;
                b.params = p;
                b.commitment_algorithm = gc_algo;
                b.seed_commitment = seed_commitment(gc_seed, gc_algo);
                Rng rng(gc_seed);
                for (std::size_t i = 0; i < gc_m; ++i) {
                    Clause c = gen_clause(p, rng);
                    const Digit r = respond_clause(p, sigma, c);
                    b.pairs.push_back({std::move(c), r});
                }
                for (unsigned i = 0; i < kBundleChallenges; ++i) b.password_challenges.push_back(gen_password_challenge(p, rng));
                write_or_print(gc_out, bundle_to_json(b));
            }
        } else if (*rs) {
            SecretMapping sigma = mapping_from_json(load(rs_mapping));
            ChallengeBundle b = bundle_from_json(load(rs_bundle));
            if (rs_index >= b.password_challenges.size()) throw InputError("challenge index out of range");
            if (sigma.size() != b.params.n || sigma.d != b.params.d) throw InputError("mapping does not match the bundle");
            auto digits = respond(b.params, sigma, b.password_challenges[rs_index]);
            emit(out, Json{{"index", rs_index}, {"response", digits_to_string(digits)}});
        } else if (*vf) {
            AccountRecord rec = account_from_json(load(vf_account));
            const bool ok = verify(rec, digits_from_string(vf_response, rec.params.d));
            emit(out, Json{{"account_id", rec.account_id}, {"verified", ok}});
            if (!ok) return 1;
        } else if (*an) {
            SchemeParams p{an_p.d, an_p.k1, an_p.k2, 0, 1};
            p.n = p.clause_width();
            p.validate();
            SecurityProfile prof = an_brute ? bruteforce_profile(family_function(p)) : structured_profile_f(p);
            Json report = profile_json(prof);
            report["params"] = Json{{"d", p.d}, {"k1", p.k1}, {"k2", p.k2}};
            report["method"] = an_brute ? "bruteforce" : "structured";
            emit(out, report);
        } else if (*at) {
            ChallengeBundle b = bundle_from_json(load(at_bundle));
            PlantedInstance inst = bundle_instance(b);
            const SchemeParams& p = b.params;
            Json report{{"attack", at_kind}, {"n", p.n}, {"m", inst.pairs.size()}, {"seed", at_seed}};
            bool success = false;
            if (at_kind == "gauss" || at_kind == "partial") {
                AttackBudget budget;
                budget.max_guesses = at_guesses;
                budget.time_limit_s = at_time;
                budget.threads = at_threads;
                const unsigned g = at_g ? at_g : p.k1;
                AttackReport r = at_kind == "gauss" ? gaussian_attack(p, inst.pairs, g, budget)
                                                    : partial_guess_attack(p, inst.pairs, g, at_ell, at_seed, budget);
                success = r.success;
                report["success"] = r.success;
                report["sigma"] = sigma_or_null(r.success, r.sigma);
                report["failure_reason"] = r.failure_reason;
                report["pairs_checked"] = r.pairs_checked;
                report["stats"] = Json{{"guesses_tried", r.guesses_tried},
                                       {"guesses_solved", r.guesses_solved},
                                       {"guesses_inconsistent", r.guesses_inconsistent},
                                       {"max_constraints", r.max_constraints},
                                       {"search_space", r.search_space},
                                       {"accepted_index", r.accepted_index}};
            } else if (at_kind == "csp") {
                CspBudget budget;
                budget.time_limit_s = at_time;
                CspReport r = csp_attack(p, inst.pairs, budget);
                success = r.success;
                report["success"] = r.success;
                report["sigma"] = sigma_or_null(r.success, r.sigma);
                report["failure_reason"] = r.failure_reason;
                report["pairs_checked"] = r.success ? inst.pairs.size() : 0;
                report["stats"] = Json{{"nodes", r.nodes},
                                       {"backtracks", r.backtracks},
                                       {"revisions", r.revisions},
                                       {"timed_out", r.timed_out}};
            } else {
                if (at_mapping.empty()) throw InputError("--mapping is required to back the oracle");
                inst.sigma = mapping_from_json(load(at_mapping));
                if (inst.sigma.size() != p.n || inst.sigma.d != p.d) throw InputError("mapping does not match the bundle");
                if (at_kind == "spectral") {
                    SpectralOptions o;
                    o.c = at_c;
                    o.samples = at_samples;
                    o.delta = at_delta;
                    o.seed = at_seed;
                    SpectralReport r = spectral_attack(inst, o);
                    success = r.success;
                    report["success"] = r.success;
                    report["sigma"] = sigma_or_null(r.success, r.sigma);
                    report["failure_reason"] = r.failure_reason;
                    report["pairs_checked"] = r.pairs_checked;
                    report["stats"] = Json{{"samples_used", r.samples_used},
                                           {"mstat_queries", r.oracle.mstat_queries},
                                           {"iterations", r.iterations},
                                           {"label_agreement", r.label_agreement},
                                           {"candidates_checked", r.candidates_checked}};
                } else {
                    NoisyLabelOracle labels(p, inst.sigma, at_accuracy, at_seed);
                    LabelRecoveryOptions o;
                    o.restarts = at_restarts;
                    o.seed = at_seed;
                    LabelRecoveryReport r = recover_from_labels(p, labels, o);
                    const double agree = 1.0 - static_cast<double>(hamming(r.sigma, inst.sigma)) / p.n;
                    const double eps = at_accuracy - 1.0 / p.d;
                    success = is_eps_correlated(r.sigma, inst.sigma, eps / 2);
                    report["success"] = success;
                    report["sigma"] = digits_to_string(r.sigma.digits);
                    report["failure_reason"] = success ? "" : "candidate not ε/2-correlated";
                    report["pairs_checked"] = 0;
                    report["stats"] = Json{{"restarts", r.restarts},
                                           {"label_queries", r.label_queries},
                                           {"agreement", agree},
                                           {"vote_margin", r.vote_margin}};
                }
            }
            emit(out, report);
            if (!success) return 1;
        } else if (*us) {
            SchemeParams p = us_p.params();
            const auto acc = us_accounting == "distinct" ? CueAccounting::Distinct : CueAccounting::PerRecall;
            YearReport r = year_report(p, profile_by_name(us_profile), us_draws, us_seed, acc);
            emit(out, Json{{"profile", r.profile},
                           {"n", r.n},
                           {"accounting", us_accounting},
                           {"draws", r.draws},
                           {"mean", r.mean},
                           {"ci", Json::array({r.ci_low, r.ci_high})},
                           {"mean_inclusive_window", r.mean_inclusive},
                           {"mean_other_accounting", r.mean_other_accounting},
                           {"per_cue_histogram", r.per_cue_histogram}});
        } else if (*pb) {
            Publication pubn = publish(pb_p.params(), pb_m, pb_seed, pb_algo);
            write_file(pb_bundle, format_document(bundle_to_json(pubn.bundle)));
            write_file(pb_secret, format_document(mapping_to_json(pubn.sealed)));
            emit(out, Json{{"bundle", pb_bundle},
                           {"secret", pb_secret},
                           {"pairs", pubn.bundle.pairs.size()},
                           {"password_challenges", pubn.bundle.password_challenges.size()}});
        } else if (*gr) {
            ChallengeBundle b = bundle_from_json(load(gr_bundle));
            SecretMapping sealed = mapping_from_json(load(gr_secret));
            auto verdicts = grade(b, sealed, submission_from_json(load(gr_submission), b.params));
            Json list = Json::array();
            std::size_t wins = 0;
            for (const auto& v : verdicts) {
                list.push_back(Json{{"index", v.index}, {"win", v.win}});
                wins += v.win;
            }
            emit(out, Json{{"verdicts", list}, {"wins", wins}});
        } else if (*sv) {
            ServiceConfig cfg;
            cfg.data_dir = sv_data;
            if (cfg.data_dir.empty())
                if (const char* env = std::getenv("HCP_DATA_DIR")) cfg.data_dir = env;
            cfg.hash.algorithm = sv_algo;
            err << "serving on http://" << sv_host << ":" << sv_port << "\n";
            serve(sv_host, sv_port, cfg);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace hcp
