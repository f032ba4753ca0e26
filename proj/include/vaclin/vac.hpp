#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "vaclin/boolview.hpp"
#include "vaclin/cfn.hpp"
#include "vaclin/rational.hpp"

namespace vaclin {

struct Pass1Result {
    Rational lambda0;            ///< conflict cost: relaxation optimum, or top for infeasibility / wipe-out
    ConstraintRef conflict;      ///< none when Bool_theta(P) reached a fixpoint
    std::vector<VarVal> explanation;
    BoolView view;

    [[nodiscard]] bool has_conflict() const { return !conflict.is_none(); }
};

/// Filtering phase: arc consistency on Bool_theta(P) with tables revised before linear constraints,
/// stopping at the first conflict.
Pass1Result vac_pass1(const Cfn& p, Cost theta);

/// One cost move of the plan. Amounts are multiples of the final integer lambda.
struct PlanStep {
    enum class Kind : std::uint8_t { extend, project, final_projection };
    Kind kind;
    ConstraintRef constraint;
    VarVal vv;                 ///< unused for the final projection
    std::int64_t multiplier;
};

struct VacTrace {
    std::map<VarVal, std::int64_t> k;
    std::map<std::pair<ConstraintRef, VarVal>, std::int64_t> k_c;
    std::map<ConstraintRef, std::int64_t> k_constraint;
    std::map<VarVal, bool> marked;
    Rational lambda_rational;
    Cost lambda = 0;
    std::vector<PlanStep> plan;
    std::int64_t explanations = 0;
};

/// Tracing phase: walks the removal queue backwards from the conflict, computing request counters,
/// the rational bound on movable cost and the ordered plan of cost moves. lambda is the floor of the
/// bound, capped so that c0 never exceeds top.
VacTrace vac_pass2(const Cfn& p, Pass1Result& r);

/// Applies the plan with the integer lambda of the trace. Returns the increase of c0.
Cost vac_pass3(Cfn& p, const VacTrace& trace);

struct ThetaStats {
    Cost theta = 0;
    std::int64_t iterations = 0;
    Cost gain = 0;
    std::int64_t stalls = 0;
    std::int64_t hard_removals = 0;
    std::int64_t soft_removals = 0;
    std::int64_t table_removals = 0;
    std::int64_t lp_solves = 0;
};

struct VacStats {
    std::vector<ThetaStats> per_theta;
    ConstraintRef last_conflict;
    /// Minimum surviving Bool value per variable after the last filtering pass (-1 if none).
    std::vector<int> bool_support;

    [[nodiscard]] Cost total_gain() const;
};

struct VacOptions {
    Cost stop_bound = 0;                 ///< stop once c0 reaches it; 0 means top
    std::int64_t max_iterations = 100000; ///< per theta
};

/// Repeats pass 1-2-3 at a fixed theta, with node consistency in between, until no conflict, a
/// stall, or c0 reaching the stop bound. Returns the gain.
Cost vac_iterate(Cfn& p, Cost theta, const VacOptions& opt = {}, VacStats* stats = nullptr);

/// Geometric theta schedule starting at the largest finite nonzero cost of the network (or at
/// `theta_start`), halving down to 1.
std::vector<Cost> make_schedule(const Cfn& p, std::optional<Cost> theta_start = std::nullopt);

/// vac_iterate over every theta of the schedule. Returns the total gain of c0.
Cost vac_lin(Cfn& p, const std::vector<Cost>& schedule, const VacOptions& opt = {}, VacStats* stats = nullptr);
inline Cost vac_lin(Cfn& p) { return vac_lin(p, make_schedule(p)); }

/// Baseline propagation of one linear constraint: solves its LP with unary costs over the current
/// domains, extends c_i(v) - rc(i,v) (rounded up) from every unary cost into the constraint and
/// projects floor(z*) to c0. An infeasible LP sets c0 to top. Returns the increase of c0.
Cost direct_lin_propagate(Cfn& p, int k);

} // namespace vaclin
