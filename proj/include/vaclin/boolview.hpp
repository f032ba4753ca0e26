#pragma once

#include <climits>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "vaclin/cfn.hpp"
#include "vaclin/mckp.hpp"
#include "vaclin/rational.hpp"

namespace vaclin {

/// Identifies a cost function of the network. `unary` stands for the domain of one variable and is
/// only used as the conflict of a domain wipe-out (index = variable).
struct ConstraintRef {
    enum class Kind : std::uint8_t { none, unary, table, linear };
    Kind kind = Kind::none;
    int index = -1;

    static ConstraintRef table(int k) { return {Kind::table, k}; }
    static ConstraintRef linear(int k) { return {Kind::linear, k}; }
    static ConstraintRef unary(int var) { return {Kind::unary, var}; }

    [[nodiscard]] bool is_none() const { return kind == Kind::none; }
    friend auto operator<=>(const ConstraintRef&, const ConstraintRef&) = default;
};

std::string to_string(ConstraintRef c);

/// Bool_theta(P): the CSP of values and tuples whose cost is below theta, with the removal history
/// needed to trace conflicts back.
///
/// Three sets of values matter. D^copy is the current domain of the network when the view was
/// built. Values of D^copy with unary cost >= theta are pruned at construction; they never enter the
/// removal queue and count as removed before everything else. All other removals are appended to
/// the queue with the constraint that caused them and a batch number (one batch per filtering call,
/// or per table sweep).
class BoolView {
public:
    struct Removal {
        VarVal vv;
        ConstraintRef killer;
        int batch = 0;
    };

    struct Counters {
        std::int64_t hard = 0;
        std::int64_t soft = 0;
        std::int64_t table = 0;
        std::int64_t lp_solves = 0;
    };

    BoolView(const Cfn& p, Cost theta);

    [[nodiscard]] const Cfn& cfn() const { return *p_; }
    [[nodiscard]] Cost theta() const { return theta_; }
    [[nodiscard]] int num_variables() const { return static_cast<int>(size_.size()); }

    [[nodiscard]] bool in_copy(int var, int val) const { return p_->in_domain(var, val); }
    [[nodiscard]] bool alive(int var, int val) const { return alive_[var][val] != 0; }
    [[nodiscard]] int size(int var) const { return size_[var]; }
    [[nodiscard]] bool construction_pruned(int var, int val) const
    {
        return in_copy(var, val) && order_[var][val] == kPruned;
    }
    /// Queue index of a removed value; -1 for construction-pruned values; INT_MAX if not removed.
    [[nodiscard]] int order(int var, int val) const { return order_[var][val]; }
    [[nodiscard]] bool removed_before(int var, int val, int queue_index) const
    {
        return in_copy(var, val) && order_[var][val] < queue_index;
    }

    [[nodiscard]] const std::vector<Removal>& queue() const { return queue_; }
    [[nodiscard]] const Removal& removal(int var, int val) const { return queue_[order_[var][val]]; }

    /// Variable whose view domain was empty right after construction, or -1.
    [[nodiscard]] int initial_wipeout() const { return initial_wipeout_; }

    void remove(VarVal vv, ConstraintRef killer, int batch);
    int next_batch() { return batch_++; }

    /// Smallest value of `var` still in the view, or -1.
    [[nodiscard]] int first_alive(int var) const;

    Counters counters;

    static constexpr int kPruned = -1;
    static constexpr int kAlive = INT_MAX;

private:
    const Cfn* p_;
    Cost theta_;
    std::vector<std::vector<std::uint8_t>> alive_;
    std::vector<std::vector<int>> order_;
    std::vector<int> size_;
    std::vector<Removal> queue_;
    int batch_ = 0;
    int initial_wipeout_ = -1;
};

struct FilterOutcome {
    enum class Kind : std::uint8_t { no_conflict, conflict };
    enum class RemovalKind : std::uint8_t { hard, soft };
    struct Removal {
        VarVal vv;
        RemovalKind kind;
    };

    Kind kind = Kind::no_conflict;
    Rational cost;              ///< optimum of the relaxation; meaningful for conflicts
    bool infeasible = false;    ///< conflict because no tuple satisfies the inequality (cost = top)
    bool global = false;        ///< infeasible even over the whole of D^copy
    ConstraintRef constraint;
    std::vector<VarVal> explanation;
    std::vector<Removal> removals; ///< hard ones first

    [[nodiscard]] bool conflict() const { return kind == Kind::conflict; }
};

/// LP over the view domains with costs delta (unary costs left out).
MckpInstance view_lp(const LinearConstraint& c, const BoolView& view);
/// LP over the current domains of the network with costs delta + unary cost.
MckpInstance unary_lp(const Cfn& p, const LinearConstraint& c);

/// Values (i,v) of the view with w_iv + sum_{j != i} max_{u in view D_j} w_ju < C. Does not modify
/// the view.
std::vector<VarVal> hard_filter(const LinearConstraint& c, const BoolView& view);

/// Hard filtering followed by reduced-cost filtering of the view-domain LP. Does not modify the view.
FilterOutcome lin_filter(int k, BoolView& view);

/// Arc consistency of one binary table on the view, repeated until the table is stable. Applies the
/// removals to the view (one batch per sweep) and returns them in order.
std::vector<VarVal> table_revise(int k, BoolView& view);

/// Minimal set E of in-scope removed values such that the constraint (with x_target = 1 when a target
/// is given) stays infeasible when only E is removed from D^copy. Candidates are the values removed
/// before `before` (queue index, INT_MAX for all), outside the target's variable. Greedy deletion in
/// removal order, construction-pruned values first. `global` is set when E is empty.
std::vector<VarVal> explain_hard_conflict(const LinearConstraint& c, const BoolView& view,
    std::optional<VarVal> target, int before, bool* global = nullptr);

struct LinExplanation {
    std::vector<VarVal> explanation;
    bool infeasible = false; ///< z is top
    Rational z;
};

/// Explanation of the removal of (i,a) by linear constraint k: LP with x_ia = 1 and every in-scope
/// value removed earlier forbidden. Throws ContractViolation if that LP is feasible with optimum
/// below theta.
LinExplanation lin_explain(int k, VarVal ia, BoolView& view);

/// Supports of (i,a) on table k that were allowed (cost < theta) and removed.
std::vector<VarVal> table_explain(int k, VarVal ia, const BoolView& view);

} // namespace vaclin
