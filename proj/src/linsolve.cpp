#include "hcp/linsolve.hpp"

#include <cmath>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

// Inverse of a unit a modulo q (extended Euclid).
unsigned inverse_mod(unsigned a, unsigned q) {
    long long t = 0, new_t = 1, r = q, new_r = a % q;
    while (new_r != 0) {
        long long quot = r / new_r;
        t -= quot * new_t;
        std::swap(t, new_t);
        r -= quot * new_r;
        std::swap(r, new_r);
    }
    if (r != 1) throw std::logic_error("inverse_mod called on a non-unit");
    if (t < 0) t += q;
    return static_cast<unsigned>(t);
}

unsigned valuation(unsigned a, const PrimePower& pp) {
    if (a == 0) return pp.e;
    unsigned v = 0;
    while (a % pp.p == 0) {
        a /= pp.p;
        ++v;
    }
    return v;
}

unsigned ipow(unsigned b, unsigned e) {
    unsigned v = 1;
    while (e--) v *= b;
    return v;
}

}  // namespace

std::vector<PrimePower> factor_modulus(unsigned d) {
    if (d < 2) throw InputError("modulus must be >= 2");
    std::vector<PrimePower> out;
    for (unsigned p = 2; p * p <= d; ++p) {
        if (d % p) continue;
        PrimePower pp{p, 0, 1};
        while (d % p == 0) {
            d /= p;
            ++pp.e;
            pp.q *= p;
        }
        out.push_back(pp);
    }
    if (d > 1) out.push_back({d, 1, d});
    return out;
}

LinearSystem::LinearSystem(unsigned n, unsigned d) : n_(n), d_(d) {
    for (const auto& pp : factor_modulus(d)) {
        Component c;
        c.pp = pp;
        c.pivot_of_col.assign(n, -1);
        comps_.push_back(std::move(c));
    }
}

bool LinearSystem::add(const LinearConstraint& lc) {
    if (inconsistent_) return false;
    ++added_;
    for (auto& comp : comps_) {
        const unsigned q = comp.pp.q;
        std::vector<unsigned> row(n_, 0);
        for (const auto& [idx, coef] : lc.terms) {
            if (idx >= n_) throw InputError("constraint index outside the variable range");
            row[idx] = (row[idx] + coef) % q;
        }
        const unsigned rhs = lc.constant % q;
        if (comp.pp.e == 1) {
            if (!add_prime(comp, std::move(row), rhs)) {
                inconsistent_ = true;
                return false;
            }
        } else {
            row.push_back(rhs);
            comp.pending.push_back(std::move(row));
            comp.reduced = false;
        }
    }
    return true;
}

bool LinearSystem::add_prime(Component& comp, std::vector<unsigned> row, unsigned rhs) {
    const unsigned q = comp.pp.q;
    // Stored rows are zero at every earlier pivot column, so one pass in
    // insertion order clears all pivot columns of the new row.
    for (const auto& pv : comp.pivots) {
        const unsigned a = row[pv.col];
        if (a == 0) continue;
        for (unsigned c = 0; c < n_; ++c)
            if (pv.row[c]) row[c] = (row[c] + (q - a) * pv.row[c]) % q;
        rhs = (rhs + (q - a) * pv.rhs) % q;
    }
    unsigned col = 0;
    while (col < n_ && row[col] == 0) ++col;
    if (col == n_) return rhs == 0;
    const unsigned inv = inverse_mod(row[col], q);
    for (auto& v : row) v = v * inv % q;
    comp.pivot_of_col[col] = static_cast<int>(comp.pivots.size());
    comp.pivots.push_back({std::move(row), rhs * inv % q, col, 0});
    return true;
}

bool LinearSystem::reduce_prime_power(Component& comp) {
    const PrimePower pp = comp.pp;
    const unsigned q = pp.q;
    comp.pivots.clear();
    comp.pivot_of_col.assign(n_, -1);
    std::vector<std::vector<unsigned>> rows = comp.pending;
    std::vector<bool> active(rows.size(), true);
    while (true) {
        // Full pivoting on the entry of least p-adic valuation.
        unsigned best_v = pp.e, br = 0, bc = 0;
        for (std::size_t r = 0; r < rows.size() && best_v > 0; ++r) {
            if (!active[r]) continue;
            for (unsigned c = 0; c < n_; ++c) {
                if (comp.pivot_of_col[c] >= 0 || rows[r][c] == 0) continue;
                unsigned v = valuation(rows[r][c], pp);
                if (v < best_v) {
                    best_v = v;
                    br = static_cast<unsigned>(r);
                    bc = c;
                    if (v == 0) break;
                }
            }
        }
        if (best_v == pp.e) break;
        auto& prow = rows[br];
        const unsigned pv = ipow(pp.p, best_v);
        const unsigned unit = inverse_mod(prow[bc] / pv, q);
        for (auto& v : prow) v = v * unit % q;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!active[r] || r == br || rows[r][bc] == 0) continue;
            const unsigned m = rows[r][bc] / pv;  // exact: valuation >= best_v
            for (unsigned c = 0; c <= n_; ++c) rows[r][c] = (rows[r][c] + (q - m) * prow[c] % q) % q;
        }
        active[br] = false;
        Pivot piv;
        piv.row.assign(prow.begin(), prow.begin() + n_);
        piv.rhs = prow[n_];
        piv.col = bc;
        piv.valuation = best_v;
        if (piv.rhs % pv != 0) return false;
        comp.pivot_of_col[bc] = static_cast<int>(comp.pivots.size());
        comp.pivots.push_back(std::move(piv));
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (active[r] && rows[r][n_] != 0) return false;
    comp.reduced = true;
    return true;
}

bool LinearSystem::back_substitute(const Component& comp, const std::vector<unsigned>& free_vals,
                                   const std::vector<unsigned>& lift, std::vector<unsigned>& x) const {
    const PrimePower pp = comp.pp;
    const unsigned q = pp.q;
    x.assign(n_, 0);
    std::size_t fi = 0;
    for (unsigned c = 0; c < n_; ++c)
        if (comp.pivot_of_col[c] < 0) x[c] = free_vals.empty() ? 0 : free_vals[fi++];
    for (std::size_t i = comp.pivots.size(); i-- > 0;) {
        const auto& pv = comp.pivots[i];
        unsigned long long s = pv.rhs;
        for (unsigned c = 0; c < n_; ++c)
            if (c != pv.col && pv.row[c]) s += static_cast<unsigned long long>(q - pv.row[c]) * x[c];
        unsigned sv = static_cast<unsigned>(s % q);
        const unsigned pvv = ipow(pp.p, pv.valuation);
        if (sv % pvv != 0) return false;
        const unsigned span = q / pvv;  // x is determined modulo p^{e−v}
        x[pv.col] = (sv / pvv) % span + (lift.empty() ? 0 : lift[i]) * span;
    }
    return true;
}

std::vector<Digit> LinearSystem::combine(const std::vector<std::vector<unsigned>>& parts) const {
    std::vector<Digit> out(n_, 0);
    for (unsigned c = 0; c < n_; ++c) {
        unsigned long long x = 0;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            const unsigned q = comps_[i].pp.q;
            const unsigned M = d_ / q;
            x += static_cast<unsigned long long>(parts[i][c]) * M % d_ * inverse_mod(M % q, q);
        }
        out[c] = static_cast<Digit>(x % d_);
    }
    return out;
}

LinearSystem::Result LinearSystem::solve() {
    Result res;
    if (inconsistent_) return res;
    for (auto& comp : comps_) {
        if (comp.pp.e > 1 && !comp.reduced && !reduce_prime_power(comp)) {
            inconsistent_ = true;
            return res;
        }
    }
    std::vector<std::vector<unsigned>> parts;
    double count = 1;
    for (const auto& comp : comps_) {
        std::vector<unsigned> x;
        if (!back_substitute(comp, {}, {}, x)) {
            inconsistent_ = true;
            return res;
        }
        parts.push_back(std::move(x));
        const unsigned free = n_ - static_cast<unsigned>(comp.pivots.size());
        res.free_count += free;
        count *= std::pow(static_cast<double>(comp.pp.q), free);
        for (const auto& pv : comp.pivots) count *= std::pow(static_cast<double>(comp.pp.p), pv.valuation);
    }
    res.solution = combine(parts);
    res.solution_count = count;
    res.status = count == 1 ? SolveStatus::Unique : SolveStatus::Family;
    return res;
}

std::size_t LinearSystem::for_each_solution(std::size_t limit,
                                            const std::function<bool(const std::vector<Digit>&)>& fn) {
    if (inconsistent_ || solve().status == SolveStatus::Inconsistent) return 0;
    // Per component, list solutions in odometer order (free values, then lifts).
    std::vector<std::vector<std::vector<unsigned>>> lists;
    for (const auto& comp : comps_) {
        const unsigned q = comp.pp.q;
        const std::size_t nfree = n_ - comp.pivots.size();
        std::vector<unsigned> free_vals(nfree, 0), lift(comp.pivots.size(), 0);
        std::vector<std::vector<unsigned>> sols;
        while (sols.size() < limit) {
            std::vector<unsigned> x;
            back_substitute(comp, free_vals, lift, x);
            sols.push_back(std::move(x));
            std::size_t i = 0;
            for (; i < nfree; ++i) {
                if (++free_vals[i] < q) break;
                free_vals[i] = 0;
            }
            if (i < nfree) continue;
            std::size_t j = 0;
            for (; j < lift.size(); ++j) {
                if (++lift[j] < ipow(comp.pp.p, comp.pivots[j].valuation)) break;
                lift[j] = 0;
            }
            if (j == lift.size()) break;
        }
        lists.push_back(std::move(sols));
    }
    std::vector<std::size_t> pos(lists.size(), 0);
    std::size_t visited = 0;
    while (visited < limit) {
        std::vector<std::vector<unsigned>> parts;
        for (std::size_t i = 0; i < lists.size(); ++i) parts.push_back(lists[i][pos[i]]);
        ++visited;
        if (!fn(combine(parts))) break;
        std::size_t i = 0;
        for (; i < lists.size(); ++i) {
            if (++pos[i] < lists[i].size()) break;
            pos[i] = 0;
        }
        if (i == lists.size()) break;
    }
    return visited;
}

LinearSystem::Result linear_solve_mod(const std::vector<LinearConstraint>& constraints, unsigned n, unsigned d) {
    LinearSystem sys(n, d);
    for (const auto& c : constraints)
        if (!sys.add(c)) break;
    return sys.solve();
}

}  // namespace hcp
