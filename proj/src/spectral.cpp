#include "hcp/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>

#include "hcp/errors.hpp"
#include "hcp/linsolve.hpp"

namespace hcp {

namespace {

using cd = std::complex<double>;

// One modular equation Σ σ(vars) ≡ label (mod q), with vars already including
// the phase unknown of its side.
struct LabelEquation {
    std::vector<Index> vars;
    unsigned label = 0;
};

struct Geometry {
    std::vector<unsigned> row_pos, col_pos;  // clause positions
    std::uint64_t rows = 0, cols = 0;        // n^{c1}, n^{c2}
};

Geometry make_geometry(const SchemeParams& p) {
    if (p.k2 < 1) throw InputError("the spectral attack needs k2 >= 1");
    std::vector<unsigned> P{0};
    for (unsigned i = 0; i < p.k2; ++i) P.push_back(p.d + p.k1 + i);
    const unsigned r = p.k2 + 1, c1 = (r + 1) / 2;
    Geometry g;
    g.row_pos.assign(P.begin(), P.begin() + c1);
    g.col_pos.assign(P.begin() + c1, P.end());
    g.rows = g.cols = 1;
    for (std::size_t i = 0; i < g.row_pos.size(); ++i) g.rows *= p.n;
    for (std::size_t i = 0; i < g.col_pos.size(); ++i) g.cols *= p.n;
    return g;
}

std::uint64_t tuple_code(const Clause& c, const std::vector<unsigned>& pos, unsigned n) {
    std::uint64_t v = 0;
    for (unsigned q : pos) v = v * n + c.indices[q];
    return v;
}

std::vector<Index> tuple_decode(std::uint64_t code, std::size_t len, unsigned n) {
    std::vector<Index> out(len);
    for (std::size_t i = len; i-- > 0;) {
        out[i] = static_cast<Index>(code % n);
        code /= n;
    }
    return out;
}

bool distinct(const std::vector<Index>& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j]) return false;
    return true;
}

// Rounds every touched entry to the nearest q-th root of unity after removing
// the global phase; untouched or zero entries get a random root.
void normalize_roots(std::vector<cd>& v, const std::vector<bool>& touched, unsigned q, Rng& rng,
                     const std::vector<cd>& roots) {
    cd s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (touched[i]) s += std::pow(v[i], static_cast<int>(q));
    const double theta = std::abs(s) > 0 ? std::arg(s) / q : 0.0;
    const cd unphase = std::polar(1.0, -theta);
    for (std::size_t i = 0; i < v.size(); ++i) {
        cd w = v[i] * unphase;
        if (!touched[i] || std::abs(w) < 1e-300) {
            v[i] = roots[rng.uniform(q)];
            continue;
        }
        double a = std::arg(w);
        if (a < 0) a += 2 * std::numbers::pi;
        unsigned k = static_cast<unsigned>(std::lround(a * q / (2 * std::numbers::pi))) % q;
        v[i] = roots[k];
    }
}

unsigned root_index(cd z, unsigned q) {
    double a = std::arg(z);
    if (a < 0) a += 2 * std::numbers::pi;
    return static_cast<unsigned>(std::lround(a * q / (2 * std::numbers::pi))) % q;
}

std::size_t count_satisfied(const std::vector<LabelEquation>& eqs, const std::vector<unsigned>& x, unsigned q) {
    std::size_t ok = 0;
    for (const auto& e : eqs) {
        unsigned s = 0;
        for (Index v : e.vars) s += x[v];
        ok += s % q == e.label;
    }
    return ok;
}

// Decodes σ mod q (σ(0) pinned to 0) from noisy labels: exact elimination when
// the labels are consistent; otherwise random subsets are solved and the best
// is refined coordinate-wise by majority over the equations each unknown
// touches.
std::vector<unsigned> decode_labels(const std::vector<LabelEquation>& eqs, unsigned vars, unsigned q, Rng& rng,
                                    double& agreement) {
    auto as_constraint = [](const LabelEquation& e) {
        LinearConstraint lc;
        for (Index v : e.vars) lc.terms.emplace_back(v, 1u);
        lc.constant = e.label;
        return lc;
    };
    auto solve_subset = [&](const std::vector<std::size_t>& ids) -> std::optional<std::vector<unsigned>> {
        LinearSystem sys(vars, q);
        sys.add({{{0, 1u}}, 0});
        for (std::size_t id : ids)
            if (!sys.add(as_constraint(eqs[id]))) return std::nullopt;
        auto res = sys.solve();
        if (res.status == SolveStatus::Inconsistent) return std::nullopt;
        return std::vector<unsigned>(res.solution.begin(), res.solution.end());
    };

    std::vector<std::size_t> all(eqs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<unsigned> best(vars, 0);
    std::size_t best_score = 0;
    if (auto exact = solve_subset(all)) {
        best = *exact;
        best_score = eqs.size();
    } else {
        const std::size_t subset = std::min<std::size_t>(eqs.size(), 4 * static_cast<std::size_t>(vars));
        for (int trial = 0; trial < 64; ++trial) {
            for (std::size_t i = 0; i < subset; ++i) std::swap(all[i], all[i + rng.uniform(all.size() - i)]);
            auto cand = solve_subset({all.begin(), all.begin() + static_cast<std::ptrdiff_t>(subset)});
            if (!cand) continue;
            std::size_t score = count_satisfied(eqs, *cand, q);
            if (score > best_score) {
                best_score = score;
                best = std::move(*cand);
            }
        }
        std::vector<std::vector<std::size_t>> touching(vars);
        for (std::size_t i = 0; i < eqs.size(); ++i)
            for (Index v : eqs[i].vars) touching[v].push_back(i);
        for (int sweep = 0; sweep < 20; ++sweep) {
            bool changed = false;
            for (unsigned v = 1; v < vars; ++v) {
                std::vector<std::size_t> votes(q, 0);
                for (std::size_t id : touching[v]) {
                    unsigned rest = 0;
                    for (Index u : eqs[id].vars)
                        if (u != v) rest += best[u];
                    ++votes[(eqs[id].label + q * eqs[id].vars.size() - rest % q) % q];
                }
                unsigned arg = static_cast<unsigned>(std::max_element(votes.begin(), votes.end()) - votes.begin());
                if (votes[arg] > votes[best[v]]) {
                    best[v] = arg;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        best_score = count_satisfied(eqs, best, q);
    }
    agreement = eqs.empty() ? 0.0 : static_cast<double>(best_score) / static_cast<double>(eqs.size());
    return best;
}

// Label equations Σ_{a∈S} σ(a) + φ ≡ label over n + 1 unknowns (σ, φ), one per
// sampled column tuple S of distinct positions. Only the column side is used:
// clauses whose index sum selects a slot other than 0 add a term
// μ·ω^{σ(tail 1)}·x_S to the expected matrix (μ = mean character of σ), which
// leaves the column factor x_S intact but pollutes the row factor.
std::vector<LabelEquation> label_equations(const Geometry& g, unsigned n, const std::vector<unsigned>& col_labels,
                                           const std::vector<bool>& col_seen) {
    std::vector<LabelEquation> eqs;
    for (std::uint64_t code = 0; code < col_labels.size(); ++code) {
        if (!col_seen[code]) continue;
        auto t = tuple_decode(code, g.col_pos.size(), n);
        if (!distinct(t)) continue;
        t.push_back(n);
        eqs.push_back({std::move(t), col_labels[code]});
    }
    return eqs;
}

class SpectralRun {
public:
    SpectralRun(const PlantedInstance& inst, const SpectralOptions& opts)
        : inst_(inst), p_(inst.params), opts_(opts), geo_(make_geometry(p_)), rng_(opts.seed),
          oracle_(p_, inst.sigma, Rng(opts.seed).split_seed(1), OracleConfig{opts.delta, 0, VstatMode::Simulated}) {
        const double L = static_cast<double>(geo_.rows) * static_cast<double>(geo_.cols) * p_.d;
        if (L > 4.0e9) throw ResourceError("matrix too large for a 32-bit 1-MSTAT range");
        L_ = static_cast<unsigned>(L);
        double xr = 1;
        for (unsigned i = 0; i <= p_.k2; ++i) xr *= static_cast<double>(p_.n - i);
        iterations_ = opts.iterations ? opts.iterations : static_cast<unsigned>(std::ceil(std::log(xr)));
        budget_ = opts.samples ? opts.samples : spectral_sample_budget(p_.n, opts.c);
        per_action_ = std::max<std::uint64_t>(1, budget_ / (2ull * iterations_));
    }

    SpectralReport run() {
        const auto start = std::chrono::steady_clock::now();
        rep_.iterations = iterations_;
        std::vector<std::vector<Digit>> residues;  // per component: σ mod q with σ(0) = 0
        std::vector<unsigned> moduli;
        if (opts_.mode == SpectralMode::ResidueCharacter) {
            run_characters(residues, moduli);
            finish_residues(residues, moduli);
        } else {
            run_indicators();
        }
        rep_.oracle = oracle_.stats();
        rep_.samples_used = rep_.oracle.samples;
        rep_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return rep_;
    }

private:
    struct Sample {
        std::uint64_t row, col;
        Digit response;
    };

    // One 1-MSTAT query with range rows·cols·d.
    Sample query() {
        const std::uint64_t cols = geo_.cols;
        const unsigned d = p_.d, n = p_.n;
        unsigned v = oracle_.mstat(
            [&](const ChallengePair& s) {
                std::uint64_t row = tuple_code(s.clause, geo_.row_pos, n);
                std::uint64_t col = tuple_code(s.clause, geo_.col_pos, n);
                return static_cast<unsigned>((row * cols + col) * d + s.response);
            },
            L_);
        Sample s;
        s.response = static_cast<Digit>(v % d);
        s.col = (v / d) % cols;
        s.row = v / d / cols;
        return s;
    }

    void run_characters(std::vector<std::vector<Digit>>& residues, std::vector<unsigned>& moduli) {
        const auto comps = factor_modulus(p_.d);
        struct Comp {
            unsigned q;
            std::vector<cd> roots, u, v;
        };
        std::vector<Comp> cs;
        for (const auto& pp : comps) {
            Comp c;
            c.q = pp.q;
            for (unsigned k = 0; k < pp.q; ++k) c.roots.push_back(std::polar(1.0, 2 * std::numbers::pi * k / pp.q));
            c.u.assign(geo_.rows, 0);
            c.v.resize(geo_.cols);
            for (auto& x : c.v) x = c.roots[rng_.uniform(pp.q)];
            cs.push_back(std::move(c));
        }
        std::vector<bool> row_seen(geo_.rows), col_seen(geo_.cols);
        for (unsigned it = 0; it < iterations_; ++it) {
            // u = M·v̄ on a fresh batch.
            std::fill(row_seen.begin(), row_seen.end(), false);
            for (auto& c : cs) std::fill(c.u.begin(), c.u.end(), cd{0});
            for (std::uint64_t s = 0; s < per_action_; ++s) {
                auto smp = query();
                row_seen[smp.row] = true;
                for (auto& c : cs) c.u[smp.row] += c.roots[smp.response % c.q] * std::conj(c.v[smp.col]);
            }
            for (auto& c : cs) normalize_roots(c.u, row_seen, c.q, rng_, c.roots);
            // v = Mᵀ·ū on another fresh batch.
            std::fill(col_seen.begin(), col_seen.end(), false);
            for (auto& c : cs) std::fill(c.v.begin(), c.v.end(), cd{0});
            for (std::uint64_t s = 0; s < per_action_; ++s) {
                auto smp = query();
                col_seen[smp.col] = true;
                for (auto& c : cs) c.v[smp.col] += c.roots[smp.response % c.q] * std::conj(c.u[smp.row]);
            }
            for (auto& c : cs) normalize_roots(c.v, col_seen, c.q, rng_, c.roots);
        }
        for (auto& c : cs) {
            std::vector<unsigned> cl(geo_.cols);
            for (std::size_t i = 0; i < cl.size(); ++i) cl[i] = root_index(c.v[i], c.q);
            auto eqs = label_equations(geo_, p_.n, cl, col_seen);
            double agree = 0;
            auto sol = decode_labels(eqs, p_.n + 1, c.q, rng_, agree);
            rep_.label_agreement.push_back(agree);
            residues.emplace_back(sol.begin(), sol.begin() + p_.n);
            moduli.push_back(c.q);
        }
    }

    // CRT-combines σ mod q (each known up to a shift) and tries every shift.
    void finish_residues(const std::vector<std::vector<Digit>>& residues, const std::vector<unsigned>& moduli) {
        if (inst_.pairs.empty()) {
            rep_.failure_reason = "no pairs to verify candidates against";
            return;
        }
        std::vector<unsigned> shift(moduli.size(), 0);
        while (true) {
            SecretMapping cand{std::vector<Digit>(p_.n), p_.d};
            for (unsigned a = 0; a < p_.n; ++a) {
                unsigned x = 0;
                for (unsigned v = 0; v < p_.d; ++v) {
                    bool ok = true;
                    for (std::size_t i = 0; i < moduli.size() && ok; ++i)
                        ok = v % moduli[i] == (residues[i][a] + shift[i]) % moduli[i];
                    if (ok) {
                        x = v;
                        break;
                    }
                }
                cand.digits[a] = static_cast<Digit>(x);
            }
            if (accept(cand)) return;
            std::size_t i = 0;
            for (; i < shift.size(); ++i) {
                if (++shift[i] < moduli[i]) break;
                shift[i] = 0;
            }
            if (i == shift.size()) break;
        }
        rep_.failure_reason = "no candidate reproduced every pair";
    }

    bool accept(const SecretMapping& cand) {
        ++rep_.candidates_checked;
        rep_.pairs_checked += inst_.pairs.size();
        if (!reproduces_all(p_, cand, inst_.pairs)) return false;
        rep_.success = true;
        rep_.sigma = cand;
        return true;
    }

    void run_indicators() {
        const unsigned d = p_.d;
        const unsigned r = p_.k2 + 1, c1 = (r + 1) / 2;
        const unsigned mult = opts_.multiplier == IndicatorMultiplier::R ? r : c1;
        std::vector<std::vector<double>> u(d, std::vector<double>(geo_.rows)), v(d, std::vector<double>(geo_.cols));
        for (auto& vi : v)
            for (auto& x : vi) x = rng_.uniform(2) ? 1.0 : -1.0;
        std::vector<bool> row_seen(geo_.rows), col_seen(geo_.cols);
        const double base = 1.0 / d;
        auto sign_normalize = [&](std::vector<double>& w, const std::vector<bool>& seen) {
            for (std::size_t k = 0; k < w.size(); ++k)
                w[k] = (!seen[k] || w[k] == 0) ? (rng_.uniform(2) ? 1.0 : -1.0) : (w[k] > 0 ? 1.0 : -1.0);
        };
        for (unsigned it = 0; it < iterations_; ++it) {
            std::fill(row_seen.begin(), row_seen.end(), false);
            for (auto& ui : u) std::fill(ui.begin(), ui.end(), 0.0);
            for (std::uint64_t s = 0; s < per_action_; ++s) {
                auto smp = query();
                row_seen[smp.row] = true;
                for (unsigned i = 0; i < d; ++i) {
                    double w = (smp.response == (i * mult) % d ? 1.0 : 0.0) - base;
                    u[i][smp.row] += w * v[i][smp.col];
                }
            }
            for (auto& ui : u) sign_normalize(ui, row_seen);
            std::fill(col_seen.begin(), col_seen.end(), false);
            for (auto& vi : v) std::fill(vi.begin(), vi.end(), 0.0);
            for (std::uint64_t s = 0; s < per_action_; ++s) {
                auto smp = query();
                col_seen[smp.col] = true;
                for (unsigned i = 0; i < d; ++i) {
                    double w = (smp.response == (i * mult) % d ? 1.0 : 0.0) - base;
                    v[i][smp.col] += w * u[i][smp.row];
                }
            }
            for (auto& vi : v) sign_normalize(vi, col_seen);
        }
        // Parity labels per digit, decoded mod 2. Each indicator vector is
        // known only up to complement; every complement pattern that sets
        // exactly one indicator per position yields a candidate.
        std::vector<std::vector<unsigned>> ind(d);
        for (unsigned i = 0; i < d; ++i) {
            std::vector<unsigned> cl(geo_.cols);
            for (std::size_t k = 0; k < cl.size(); ++k) cl[k] = v[i][k] < 0;
            auto eqs = label_equations(geo_, p_.n, cl, col_seen);
            double agree = 0;
            auto sol = decode_labels(eqs, p_.n + 1, 2, rng_, agree);
            rep_.label_agreement.push_back(agree);
            sol.resize(p_.n);
            ind[i] = std::move(sol);
        }
        if (inst_.pairs.empty()) {
            rep_.failure_reason = "no pairs to verify candidates against";
            return;
        }
        if (d > 16) throw ResourceError("indicator assembly supports d <= 16");
        bool any_assembled = false;
        for (unsigned flips = 0; flips < (1u << d); ++flips) {
            SecretMapping cand{std::vector<Digit>(p_.n), d};
            bool ok = true;
            for (unsigned a = 0; a < p_.n && ok; ++a) {
                unsigned found = 0, set = 0;
                for (unsigned i = 0; i < d; ++i)
                    if (ind[i][a] ^ (flips >> i & 1u)) {
                        found = i;
                        ++set;
                    }
                ok = set == 1;
                cand.digits[a] = static_cast<Digit>(found);
            }
            if (!ok) continue;
            any_assembled = true;
            if (accept(cand)) return;
        }
        rep_.failure_reason = any_assembled ? "no candidate reproduced every pair" : "indicators inconsistent";
    }

    const PlantedInstance& inst_;
    const SchemeParams& p_;
    SpectralOptions opts_;
    Geometry geo_;
    Rng rng_;
    StatisticalOracle oracle_;
    unsigned L_ = 0;
    unsigned iterations_ = 0;
    std::uint64_t budget_ = 0, per_action_ = 0;
    SpectralReport rep_;
};

}  // namespace

std::uint64_t spectral_sample_budget(unsigned n, double c) {
    const double ln = std::log(static_cast<double>(n));
    return static_cast<std::uint64_t>(std::ceil(c * n * n * ln * ln));
}

SpectralReport spectral_attack(const PlantedInstance& instance, const SpectralOptions& opts) {
    instance.params.validate();
    if (opts.c <= 0 && opts.samples == 0) throw InputError("sample budget must be positive");
    return SpectralRun(instance, opts).run();
}

ConditionalBiasResult conditional_bias(const SchemeParams& params, unsigned t, std::optional<Digit> j, std::uint64_t samples,
                       std::uint64_t seed, unsigned n_planted) {
    SchemeParams p = params;
    p.n = n_planted;
    p.validate();
    if (t >= p.d) throw InputError("slot index must be below d");
    if (j && *j >= p.d) throw InputError("digit out of range");
    Rng rng(seed);
    const auto sigma = gen_mapping(p, rng.split_seed(0));
    Rng draws = rng.split(1);
    ConditionalBiasResult res;
    std::uint64_t hit_eq = 0, hit_ne = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        auto c = gen_clause(p, draws);
        const unsigned f = respond_clause(p, sigma, c);
        unsigned sum = sigma.digits[c.indices[t]];
        for (unsigned i = 0; i < p.k2; ++i) sum += sigma.digits[c.indices[p.d + p.k1 + i]];
        sum %= p.d;
        if (j) {
            if (f == *j) {
                ++res.count_equal;
                hit_eq += sum == *j;
            } else {
                ++res.count_different;
                hit_ne += sum == *j;
            }
        } else {
            // Pool over j: j = f contributes once, every j ≠ f once each.
            ++res.count_equal;
            hit_eq += sum == f;
            res.count_different += p.d - 1;
            hit_ne += sum != f;
        }
    }
    res.p_given_equal = res.count_equal ? static_cast<double>(hit_eq) / static_cast<double>(res.count_equal) : 0;
    res.p_given_different =
        res.count_different ? static_cast<double>(hit_ne) / static_cast<double>(res.count_different) : 0;
    return res;
}

}  // namespace hcp
