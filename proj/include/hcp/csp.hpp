// Backtracking constraint-satisfaction attack: depth-first search over σ digits
// where every (clause, response) pair is a table constraint kept generalized
// arc consistent after each assignment.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcp/attacks.hpp"

namespace hcp {

struct CspBudget {
    double time_limit_s = 0;      ///< 0: unlimited
    std::uint64_t max_nodes = 0;  ///< 0: unlimited
};

struct CspReport {
    bool success = false;
    bool timed_out = false;
    SecretMapping sigma;          ///< a mapping consistent with every pair when successful
    std::string failure_reason;
    std::uint64_t nodes = 0;      ///< search nodes (value assignments) explored
    std::uint64_t backtracks = 0;
    std::uint64_t revisions = 0;  ///< constraint revisions performed by propagation
    double seconds = 0;
};

/// Returns the first consistent σ′ in the search order (variables chosen by
/// smallest domain, ties by index-variable occurrence count then position;
/// values ascending). Requires d ≤ 64.
CspReport csp_attack(const SchemeParams& params, const std::vector<ChallengePair>& pairs,
                     const CspBudget& budget = {});

}  // namespace hcp
