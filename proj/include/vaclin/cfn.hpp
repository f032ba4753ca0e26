#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vaclin/cost.hpp"

namespace vaclin {

/// Binary cost table stored as a dense row-major matrix: rows index `x`, columns index `y`.
struct BinaryTable {
    int x = -1;
    int y = -1;
    int dx = 0;
    int dy = 0;
    std::vector<Cost> costs;

    [[nodiscard]] Cost at(int a, int b) const { return costs[static_cast<std::size_t>(a) * dy + b]; }
    /// Cost of the tuple where `var` takes `val` and the other variable takes `other`.
    [[nodiscard]] Cost at_from(int var, int val, int other) const
    {
        return var == x ? at(val, other) : at(other, val);
    }
    [[nodiscard]] int other(int var) const { return var == x ? y : x; }
};

/// Linear inequality sum_{i in S} sum_v w_iv x_iv >= capacity, seen as a cost function through
/// its delta costs: a satisfying tuple costs sum_i delta_{i,t[i]} - delta0, a violating one costs top.
struct LinearConstraint {
    std::vector<int> scope;
    std::vector<std::vector<std::int64_t>> weights; ///< [scope position][value]
    std::int64_t capacity = 0;
    std::vector<std::vector<Cost>> deltas;          ///< [scope position][value]; may be negative
    Cost delta0 = 0;

    [[nodiscard]] int arity() const { return static_cast<int>(scope.size()); }
    /// Scope position of `var`, or -1.
    [[nodiscard]] int position_of(int var) const;
};

/// Cost function network: variables with finite domains, one unary table per variable, binary
/// tables, linear constraints, a constant lower bound c0 and the forbidden cost top.
///
/// The structure is fixed once built. Costs, deltas, c0 and current domains change only through the
/// equivalence-preserving moves below; each change is recorded on a trail so that search can roll
/// back to any earlier mark.
class Cfn {
public:
    explicit Cfn(Cost top);

    // Construction. Not trailed.
    int add_variable(int domain_size);
    void set_unary(int var, std::vector<Cost> costs);
    int add_binary(int x, int y, std::vector<Cost> costs);
    int add_linear(std::vector<int> scope, std::vector<std::vector<std::int64_t>> weights, std::int64_t capacity);
    void set_lb(Cost lb);

    [[nodiscard]] int num_variables() const { return static_cast<int>(unary_.size()); }
    [[nodiscard]] int domain_size(int var) const { return static_cast<int>(unary_[var].size()); }
    [[nodiscard]] bool in_domain(int var, int val) const { return alive_[var][val] != 0; }
    [[nodiscard]] int current_size(int var) const { return size_[var]; }
    [[nodiscard]] Cost unary(int var, int val) const { return unary_[var][val]; }
    [[nodiscard]] Cost top() const { return top_; }
    [[nodiscard]] Cost lb() const { return lb_; }
    [[nodiscard]] bool infeasible() const { return lb_ >= top_; }

    [[nodiscard]] int num_binary() const { return static_cast<int>(binary_.size()); }
    [[nodiscard]] int num_linear() const { return static_cast<int>(linear_.size()); }
    [[nodiscard]] const BinaryTable& binary(int k) const { return binary_[k]; }
    [[nodiscard]] const LinearConstraint& linear(int k) const { return linear_[k]; }
    [[nodiscard]] std::span<const int> binaries_of(int var) const { return binaries_of_[var]; }
    [[nodiscard]] std::span<const int> linears_of(int var) const { return linears_of_[var]; }

    /// Smallest value in the current domain, or -1 when empty.
    [[nodiscard]] int first_value(int var) const;

    // Equivalence-preserving transformations.

    /// Moves alpha between c_var(val) and every tuple of table `k` extending (var,val) over the
    /// current domain of the other variable: c_var(val) += alpha, c_k(val,.) -= alpha.
    void move_cost(int k, int var, int val, Cost alpha);
    void project(int k, int var, int val, Cost alpha) { move_cost(k, var, val, alpha); }
    void extend(int k, int var, int val, Cost alpha) { move_cost(k, var, val, -alpha); }
    /// Moves alpha from every current value of c_var to c0.
    void unary_project(int var, Cost alpha);
    /// c_var(val) += alpha, delta_{var,val} -= alpha on linear constraint `k`.
    void lin_move_cost(int k, int var, int val, Cost alpha);
    /// c0 += alpha, delta0 += alpha on linear constraint `k`.
    void lin_project_zero(int k, Cost alpha);

    void remove_value(int var, int val);
    /// Restricts the current domain of `var` to {val}.
    void assign(int var, int val);
    /// Sets c0 to top.
    void mark_infeasible();

    // Trail.
    [[nodiscard]] std::size_t trail_mark() const { return trail_.size(); }
    void rollback(std::size_t mark);
    void clear_trail() { trail_.clear(); }

private:
    enum class Undo : std::uint8_t { unary, binary, delta, delta0, lb, domain };
    struct TrailEntry {
        Undo kind;
        int a;
        int b;
        int c;
        Cost old;
    };

    void set_unary_cost(int var, int val, Cost c);
    void set_binary_cost(int k, std::size_t idx, Cost c);
    void set_delta(int k, int pos, int val, Cost d);
    void set_lb_trailed(Cost lb);

    Cost top_;
    Cost lb_ = 0;
    std::vector<std::vector<Cost>> unary_;
    std::vector<std::vector<std::uint8_t>> alive_;
    std::vector<int> size_;
    std::vector<BinaryTable> binary_;
    std::vector<LinearConstraint> linear_;
    std::vector<std::vector<int>> binaries_of_;
    std::vector<std::vector<int>> linears_of_;
    std::vector<TrailEntry> trail_;
};

/// Cost of linear constraint `c` on a tuple given in scope order: sum of deltas minus delta0
/// when the tuple satisfies the inequality, top otherwise.
Cost linear_tuple_cost(const LinearConstraint& c, std::span<const int> scope_tuple, Cost top);

/// Total cost of a complete assignment over the current domains, saturated at top.
Cost assignment_cost(const Cfn& p, std::span<const int> tuple);

/// Node consistency. Removes values with c0 + c_i(v) >= bound, then projects every unary minimum
/// to c0, repeating until stable. A wiped-out domain sets c0 to top. Returns false iff infeasible.
bool enforce_nc(Cfn& p, Cost bound);
inline bool enforce_nc(Cfn& p) { return enforce_nc(p, p.top()); }

} // namespace vaclin
