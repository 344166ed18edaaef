#include "hcp/csp.hpp"

#include <bit>
#include <chrono>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

using Mask = std::uint64_t;

struct Table {
    std::vector<Index> index_vars, slots, tails;
    unsigned response = 0;
};

class Solver {
public:
    Solver(const SchemeParams& p, const std::vector<ChallengePair>& pairs, const CspBudget& budget)
        : p_(p), budget_(budget), full_(p.d == 64 ? ~Mask{0} : (Mask{1} << p.d) - 1), var_cons_(p.n),
          weight_(p.n, 0) {
        for (const auto& pr : pairs) {
            Table t;
            const auto& c = pr.clause.indices;
            t.slots.assign(c.begin(), c.begin() + p.d);
            t.index_vars.assign(c.begin() + p.d, c.begin() + p.d + p.k1);
            t.tails.assign(c.begin() + p.d + p.k1, c.end());
            t.response = pr.response;
            const auto id = tables_.size();
            for (Index v : c) var_cons_[v].push_back(id);
            for (Index v : t.index_vars) ++weight_[v];
            tables_.push_back(std::move(t));
        }
        queued_.assign(tables_.size(), false);
        start_ = std::chrono::steady_clock::now();
    }

    CspReport run() {
        std::vector<Mask> dom(p_.n, full_);
        for (std::size_t i = 0; i < tables_.size(); ++i) enqueue(i);
        if (propagate(dom)) search(dom);
        rep_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (!rep_.success && rep_.failure_reason.empty()) rep_.failure_reason = "no mapping satisfies every pair";
        return rep_;
    }

private:
    Mask rotate(Mask m, unsigned a) const {
        a %= p_.d;
        if (a == 0) return m;
        return ((m << a) | (m >> (p_.d - a))) & full_;
    }
    // {a + b : a ∈ A, b ∈ B} over Z_d.
    Mask sumset(Mask a, Mask b) const {
        Mask out = 0;
        while (a) {
            unsigned s = static_cast<unsigned>(std::countr_zero(a));
            a &= a - 1;
            out |= rotate(b, s);
        }
        return out;
    }
    // {r − s : s ∈ A}.
    Mask reflect(Mask a, unsigned r) const {
        Mask out = 0;
        while (a) {
            unsigned s = static_cast<unsigned>(std::countr_zero(a));
            a &= a - 1;
            out |= Mask{1} << ((r + p_.d - s) % p_.d);
        }
        return out;
    }

    // Sumset of all domains but one, for each member of `vars`.
    void leave_one_out(const std::vector<Index>& vars, const std::vector<Mask>& dom, std::vector<Mask>& loo,
                       Mask& total) const {
        const std::size_t k = vars.size();
        std::vector<Mask> pre(k + 1), suf(k + 1);
        pre[0] = suf[k] = 1;  // {0}
        for (std::size_t i = 0; i < k; ++i) pre[i + 1] = sumset(pre[i], dom[vars[i]]);
        for (std::size_t i = k; i-- > 0;) suf[i] = sumset(suf[i + 1], dom[vars[i]]);
        loo.resize(k);
        for (std::size_t i = 0; i < k; ++i) loo[i] = sumset(pre[i], suf[i + 1]);
        total = pre[k];
    }

    bool narrow(std::vector<Mask>& dom, Index v, Mask allowed) {
        Mask nd = dom[v] & allowed;
        if (nd == dom[v]) return true;
        if (nd == 0) return false;
        dom[v] = nd;
        for (std::size_t c : var_cons_[v]) enqueue(c);
        return true;
    }

    // Generalized arc consistency for one table constraint (all variables distinct).
    bool revise(const Table& t, std::vector<Mask>& dom) {
        ++rep_.revisions;
        std::vector<Mask> loo_idx, loo_tail;
        Mask index_sums, tail_sums;
        leave_one_out(t.index_vars, dom, loo_idx, index_sums);
        leave_one_out(t.tails, dom, loo_tail, tail_sums);
        const Mask slot_targets = reflect(tail_sums, t.response);
        Mask ok_j = 0, slot_values = 0;
        for (Mask m = index_sums; m;) {
            unsigned j = static_cast<unsigned>(std::countr_zero(m));
            m &= m - 1;
            if (dom[t.slots[j]] & slot_targets) {
                ok_j |= Mask{1} << j;
                slot_values |= dom[t.slots[j]];
            }
        }
        if (!ok_j) return false;
        // Index variable value a survives iff a + (other index sums) can hit a usable slot.
        for (std::size_t i = 0; i < t.index_vars.size(); ++i)
            if (!narrow(dom, t.index_vars[i], sumset(ok_j, reflect(loo_idx[i], 0)))) return false;
        if (std::has_single_bit(ok_j)) {
            const unsigned j = static_cast<unsigned>(std::countr_zero(ok_j));
            if (!narrow(dom, t.slots[j], slot_targets)) return false;
        }
        // Tail value a survives iff r − a − (other tails) meets a usable slot's domain.
        for (std::size_t i = 0; i < t.tails.size(); ++i)
            if (!narrow(dom, t.tails[i], reflect(sumset(loo_tail[i], slot_values), t.response))) return false;
        return true;
    }

    void enqueue(std::size_t c) {
        if (queued_[c]) return;
        queued_[c] = true;
        queue_.push_back(c);
    }

    bool propagate(std::vector<Mask>& dom) {
        bool ok = true;
        while (!queue_.empty()) {
            std::size_t c = queue_.back();
            queue_.pop_back();
            queued_[c] = false;
            if (ok && !revise(tables_[c], dom)) ok = false;
        }
        return ok;
    }

    bool out_of_budget() {
        if (budget_.max_nodes && rep_.nodes >= budget_.max_nodes) {
            rep_.failure_reason = "node budget exhausted";
            return true;
        }
        if (budget_.time_limit_s > 0 && (rep_.nodes & 255) == 0) {
            double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            if (el > budget_.time_limit_s) {
                rep_.timed_out = true;
                rep_.failure_reason = "time budget exhausted";
                return true;
            }
        }
        return false;
    }

    // Returns true when the search should stop (solution found or budget exhausted).
    bool search(std::vector<Mask>& dom) {
        int best = -1;
        int best_size = 65;
        for (Index v = 0; v < p_.n; ++v) {
            int sz = std::popcount(dom[v]);
            if (sz <= 1) continue;
            if (sz < best_size || (sz == best_size && weight_[v] > weight_[static_cast<Index>(best)])) {
                best = static_cast<int>(v);
                best_size = sz;
            }
        }
        if (best < 0) {
            rep_.success = true;
            rep_.sigma.d = p_.d;
            rep_.sigma.digits.resize(p_.n);
            for (Index v = 0; v < p_.n; ++v) rep_.sigma.digits[v] = static_cast<Digit>(std::countr_zero(dom[v]));
            return true;
        }
        const Index v = static_cast<Index>(best);
        for (Mask m = dom[v]; m; m &= m - 1) {
            if (out_of_budget()) return true;
            ++rep_.nodes;
            std::vector<Mask> child = dom;
            child[v] = m & (~m + 1);
            for (std::size_t c : var_cons_[v]) enqueue(c);
            if (propagate(child) && search(child)) return true;
            ++rep_.backtracks;
        }
        return false;
    }

    const SchemeParams& p_;
    CspBudget budget_;
    Mask full_;
    std::vector<Table> tables_;
    std::vector<std::vector<std::size_t>> var_cons_;
    std::vector<unsigned> weight_;
    std::vector<std::size_t> queue_;
    std::vector<bool> queued_;
    std::chrono::steady_clock::time_point start_;
    CspReport rep_;
};

}  // namespace

CspReport csp_attack(const SchemeParams& params, const std::vector<ChallengePair>& pairs, const CspBudget& budget) {
    params.validate();
    if (params.d > 64) throw InputError("csp_attack supports d <= 64");
    for (const auto& pr : pairs) {
        validate_clause(params, pr.clause);
        if (pr.response >= params.d) throw InputError("response out of range");
    }
    auto rep = Solver(params, pairs, budget).run();
    if (rep.success && !reproduces_all(params, rep.sigma, pairs))
        throw std::logic_error("csp_attack produced an inconsistent mapping");
    return rep;
}

}  // namespace hcp
