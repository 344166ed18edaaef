#include "hcp/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcp/errors.hpp"

namespace hcp {

void SchemeParams::validate_function() const {
    if (d < 2 || d > 255) throw InputError("d must lie in [2, 255]");
    if (k1 < 1 || k1 > d) throw InputError("k1 must satisfy 1 <= k1 <= d");
    if (k2 < 1) throw InputError("k2 must be >= 1");
    if (t < 1) throw InputError("t must be >= 1");
}

void SchemeParams::validate() const {
    validate_function();
    if (clause_width() > n) throw InputError("n must be at least the clause width d+k1+k2");
}

SecretMapping gen_mapping(unsigned d, unsigned n, std::uint64_t seed) {
    if (d < 1 || d > 255) throw InputError("d must lie in [1, 255]");
    Rng rng(seed);
    SecretMapping sigma;
    sigma.d = d;
    sigma.digits.resize(n);
    for (auto& x : sigma.digits) x = static_cast<Digit>(rng.uniform(d));
    return sigma;
}

SecretMapping gen_mapping(const SchemeParams& params, std::uint64_t seed) {
    params.validate();
    return gen_mapping(params.d, params.n, seed);
}

Digit eval_f_raw(const SchemeParams& p, const Digit* v) {
    unsigned j = 0;
    for (unsigned i = 0; i < p.k1; ++i) j += v[p.d + i];
    j %= p.d;
    unsigned out = v[j];
    for (unsigned i = 0; i < p.k2; ++i) out += v[p.d + p.k1 + i];
    return static_cast<Digit>(out % p.d);
}

static void check_values(const SchemeParams& p, const std::vector<Digit>& values) {
    if (values.size() != p.clause_width()) throw InputError("value count must equal the clause width");
    for (Digit x : values)
        if (x >= p.d) throw InputError("value outside Z_d");
}

Digit eval_f(const SchemeParams& params, const std::vector<Digit>& values) {
    params.validate_function();
    check_values(params, values);
    return eval_f_raw(params, values.data());
}

namespace {

// Tracks which of the three memory slots hold live values.
class SlotBudget {
public:
    void acquire(unsigned slot) {
        if (slot >= kSlots) throw std::logic_error("streaming program addressed a slot beyond the budget");
        live_[slot] = true;
        unsigned used = static_cast<unsigned>(std::count(live_, live_ + kSlots, true));
        peak_ = std::max(peak_, used);
    }
    void release(unsigned slot) { live_[slot] = false; }
    unsigned peak() const { return peak_; }

    static constexpr unsigned kSlots = 3;

private:
    bool live_[kSlots] = {false, false, false};
    unsigned peak_ = 0;
};

}  // namespace

StreamingResult streaming_eval(const SchemeParams& params, const std::vector<Digit>& values) {
    params.validate_function();
    check_values(params, values);
    const unsigned d = params.d;
    // Slot 0: running sum. Slot 1: freshly recalled digit. Slot 2: looked-up position.
    StreamingResult res;
    SlotBudget slots;
    unsigned acc = 0, recalled = 0, pointer = 0;

    auto recall = [&](unsigned position) {
        res.trace.push_back({Primitive::Recall, position});
        return static_cast<unsigned>(values[position]);
    };
    auto add = [&] {
        res.trace.push_back({Primitive::Add, 0});
        acc = (acc + recalled) % d;
        slots.release(1);
    };

    slots.acquire(0);
    acc = recall(d);
    for (unsigned i = 1; i < params.k1; ++i) {
        slots.acquire(1);
        recalled = recall(d + i);
        add();
    }
    // The index sum becomes a pointer into the table; the sum slot is freed.
    slots.acquire(2);
    pointer = acc;
    slots.release(0);
    res.trace.push_back({Primitive::TableLookup, pointer});
    slots.acquire(0);
    acc = recall(pointer);
    slots.release(2);
    for (unsigned i = 0; i < params.k2; ++i) {
        slots.acquire(1);
        recalled = recall(d + params.k1 + i);
        add();
    }
    res.value = static_cast<Digit>(acc);
    res.peak_slots = slots.peak();
    if (res.trace.size() != 2 * params.k1 + 2 * params.k2 + 1)
        throw std::logic_error("streaming program length mismatch");
    return res;
}

std::vector<Digit> clause_values(const SecretMapping& sigma, const Clause& clause) {
    std::vector<Digit> v(clause.indices.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (clause.indices[i] >= sigma.size()) throw InputError("clause index outside the mapping");
        v[i] = sigma.digits[clause.indices[i]];
    }
    return v;
}

Digit respond_clause(const SchemeParams& params, const SecretMapping& sigma, const Clause& clause) {
    if (clause.indices.size() != params.clause_width()) throw InputError("clause width mismatch");
    auto v = clause_values(sigma, clause);
    return eval_f_raw(params, v.data());
}

std::vector<Index> recalled_indices(const SchemeParams& p, const SecretMapping& sigma, const Clause& clause) {
    if (clause.indices.size() != p.clause_width()) throw InputError("clause width mismatch");
    std::vector<Index> out;
    out.reserve(p.k1 + p.k2 + 1);
    unsigned j = 0;
    for (unsigned i = 0; i < p.k1; ++i) {
        Index idx = clause.indices[p.d + i];
        out.push_back(idx);
        j += sigma.digits.at(idx);
    }
    out.push_back(clause.indices[j % p.d]);
    for (unsigned i = 0; i < p.k2; ++i) out.push_back(clause.indices[p.d + p.k1 + i]);
    return out;
}

Clause gen_clause(const SchemeParams& params, Rng& rng) {
    params.validate();
    const unsigned k = params.clause_width();
    Clause c;
    c.indices.resize(k);
    if (params.n >= 2 * k) {
        // Sequential draws with rejection of repeats: uniform over X_k.
        for (unsigned i = 0; i < k; ++i) {
            Index cand;
            do {
                cand = static_cast<Index>(rng.uniform(params.n));
            } while (std::find(c.indices.begin(), c.indices.begin() + i, cand) != c.indices.begin() + i);
            c.indices[i] = cand;
        }
        return c;
    }
    // Dense case: partial Fisher–Yates over [n].
    std::vector<Index> perm(params.n);
    std::iota(perm.begin(), perm.end(), 0);
    for (unsigned i = 0; i < k; ++i) {
        auto r = i + static_cast<unsigned>(rng.uniform(params.n - i));
        std::swap(perm[i], perm[r]);
        c.indices[i] = perm[i];
    }
    return c;
}

PasswordChallenge gen_password_challenge(const SchemeParams& params, Rng& rng, std::string label) {
    PasswordChallenge ch;
    ch.label = std::move(label);
    ch.clauses.reserve(params.t);
    for (unsigned i = 0; i < params.t; ++i) ch.clauses.push_back(gen_clause(params, rng));
    return ch;
}

void validate_clause(const SchemeParams& params, const Clause& clause) {
    if (clause.indices.size() != params.clause_width()) throw InputError("clause width mismatch");
    std::vector<Index> sorted = clause.indices;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && sorted.back() >= params.n) throw InputError("clause index out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InputError("clause repeats an index");
}

std::vector<Digit> respond(const SchemeParams& params, const SecretMapping& sigma,
                           const PasswordChallenge& challenge) {
    if (sigma.size() != params.n || sigma.d != params.d) throw InputError("mapping does not match params");
    std::vector<Digit> out;
    out.reserve(challenge.clauses.size());
    for (const auto& c : challenge.clauses) out.push_back(respond_clause(params, sigma, c));
    return out;
}

static constexpr char kDigitChars[] = "0123456789abcdefghijklmnopqrstuvwxyz";

std::string digits_to_string(const std::vector<Digit>& digits) {
    std::string s;
    s.reserve(digits.size());
    for (Digit x : digits) {
        if (x >= 36) throw InputError("digit not representable as a base-36 character");
        s.push_back(kDigitChars[x]);
    }
    return s;
}

std::vector<Digit> digits_from_string(const std::string& text, unsigned d) {
    std::vector<Digit> out;
    out.reserve(text.size());
    for (char ch : text) {
        unsigned v;
        if (ch >= '0' && ch <= '9') v = static_cast<unsigned>(ch - '0');
        else if (ch >= 'a' && ch <= 'z') v = static_cast<unsigned>(ch - 'a') + 10;
        else if (ch >= 'A' && ch <= 'Z') v = static_cast<unsigned>(ch - 'A') + 10;
        else throw InputError(std::string("invalid digit character '") + ch + "'");
        if (v >= d) throw InputError("digit outside Z_d");
        out.push_back(static_cast<Digit>(v));
    }
    return out;
}

std::size_t hamming(const SecretMapping& a, const SecretMapping& b) {
    if (a.size() != b.size()) throw InputError("mapping length mismatch");
    std::size_t h = 0;
    for (std::size_t i = 0; i < a.size(); ++i) h += a.digits[i] != b.digits[i];
    return h;
}

bool is_eps_correlated(const SecretMapping& a, const SecretMapping& b, double eps) {
    if (a.d != b.d) throw InputError("alphabet mismatch");
    const double n = static_cast<double>(a.size());
    return static_cast<double>(hamming(a, b)) / n <= (a.d - 1.0) / a.d - eps + 1e-12;
}

bool is_delta_balanced(const SecretMapping& sigma, double delta) {
    const double n = static_cast<double>(sigma.size());
    std::vector<std::size_t> counts(sigma.d, 0);
    for (Digit x : sigma.digits) ++counts[x];
    const double expected = (sigma.d - 1.0) / sigma.d;
    for (unsigned i = 0; i < sigma.d; ++i) {
        double h = (n - static_cast<double>(counts[i])) / n;
        if (std::abs(h - expected) > delta) return false;
    }
    return true;
}

}  // namespace hcp
