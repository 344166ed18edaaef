// Linear systems over Z_d for composite d: CRT into prime-power components,
// Gaussian elimination per component (prime-power components by valuation
// pivoting), recombination.
#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "hcp/scheme.hpp"

namespace hcp {

/// Σ coefficient·σ(index) ≡ constant (mod d).
struct LinearConstraint {
    std::vector<std::pair<Index, unsigned>> terms;
    unsigned constant = 0;
};

enum class SolveStatus { Unique, Family, Inconsistent };

/// Prime power factor p^e of the modulus.
struct PrimePower {
    unsigned p = 0;
    unsigned e = 0;
    unsigned q = 0;  ///< p^e
};

std::vector<PrimePower> factor_modulus(unsigned d);

class LinearSystem {
public:
    LinearSystem(unsigned n, unsigned d);

    /// Adds a constraint. Prime components are reduced immediately; returns
    /// false once an inconsistency has been detected (further adds are ignored).
    bool add(const LinearConstraint& c);
    bool inconsistent() const { return inconsistent_; }
    std::size_t size() const { return added_; }

    struct Result {
        SolveStatus status = SolveStatus::Inconsistent;
        std::vector<Digit> solution;   ///< canonical: free variables and lifting choices set to 0
        unsigned free_count = 0;       ///< non-pivot columns summed over components
        double solution_count = 0;     ///< |solution set| (0 when inconsistent)
    };

    Result solve();

    /// Visits solutions in canonical order (component-wise odometer, CRT-combined)
    /// until the callback returns false or `limit` solutions were produced.
    /// Requires a prior consistent solve(). Returns the number visited.
    std::size_t for_each_solution(std::size_t limit, const std::function<bool(const std::vector<Digit>&)>& fn);

private:
    struct Pivot {
        std::vector<unsigned> row;  // n coefficients
        unsigned rhs = 0;
        unsigned col = 0;
        unsigned valuation = 0;     // pivot entry = p^valuation
    };
    struct Component {
        PrimePower pp;
        std::vector<Pivot> pivots;              // echelon rows (insertion/elimination order)
        std::vector<std::vector<unsigned>> pending;  // raw rows (prime powers), last entry = rhs
        std::vector<int> pivot_of_col;          // −1 when free
        bool reduced = false;
    };

    bool add_prime(Component& comp, std::vector<unsigned> row, unsigned rhs);
    bool reduce_prime_power(Component& comp);
    // Back substitution with given free values and lifting offsets.
    bool back_substitute(const Component& comp, const std::vector<unsigned>& free_vals,
                         const std::vector<unsigned>& lift, std::vector<unsigned>& x) const;
    std::vector<Digit> combine(const std::vector<std::vector<unsigned>>& parts) const;

    unsigned n_, d_;
    std::vector<Component> comps_;
    bool inconsistent_ = false;
    std::size_t added_ = 0;
};

/// One-shot solve of a constraint list.
LinearSystem::Result linear_solve_mod(const std::vector<LinearConstraint>& constraints, unsigned n, unsigned d);

}  // namespace hcp
