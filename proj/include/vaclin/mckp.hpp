#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vaclin/rational.hpp"

namespace vaclin {

struct MckpItem {
    int value = 0;
    std::int64_t weight = 0;
    Rational cost;
    bool allowed = true; ///< false: x = 0 is imposed (forbidden value)
};

/// One class of the multiple-choice knapsack: exactly one item is chosen.
struct MckpClass {
    int var = -1;
    std::vector<MckpItem> items;
    std::optional<int> forced; ///< item index with x = 1 imposed
};

/// min sum cost * x - delta0  s.t.  sum weight * x >= capacity, sum_v x_cv = 1 per class, x >= 0.
struct MckpInstance {
    std::vector<MckpClass> classes;
    std::int64_t capacity = 0;
    Rational delta0;

    /// Items usable under the fixings of class `c`.
    [[nodiscard]] bool usable(std::size_t c, std::size_t item) const;
};

struct LpResult {
    bool feasible = false;
    Rational z_star;
    std::vector<std::vector<Rational>> x;  ///< [class][item]
    Rational y_cc;
    std::vector<Rational> y;               ///< [class]
    std::vector<std::vector<Rational>> rc; ///< [class][item], including forbidden items
};

/// Exact LP relaxation by per-class lower convex hulls and a greedy sweep on incremental efficiency.
/// The dual is y_cc = efficiency of the last step taken (0 when none is needed) and
/// y_c = min over usable items of cost - weight * y_cc. Reduced costs are reported for every item,
/// usable or not, against that dual.
LpResult solve_mckp_lp(const MckpInstance& inst);

/// True iff `res` is an exact optimality certificate for `inst`: primal and dual feasibility,
/// complementary slackness and strong duality on the usable items. For feasible == false it checks
/// that the instance is indeed infeasible.
bool check_lp_certificate(const MckpInstance& inst, const LpResult& res);

} // namespace vaclin
