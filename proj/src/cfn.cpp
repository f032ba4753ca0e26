#include "vaclin/cfn.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace vaclin {

int LinearConstraint::position_of(int var) const
{
    const auto it = std::find(scope.begin(), scope.end(), var);
    return it == scope.end() ? -1 : static_cast<int>(it - scope.begin());
}

Cfn::Cfn(Cost top)
    : top_(top)
{
    if (top < 1 || top > kMaxTop)
        throw std::invalid_argument("top must be in [1, 2^50], got " + std::to_string(top));
}

int Cfn::add_variable(int domain_size)
{
    if (domain_size < 1)
        throw std::invalid_argument("domain size must be positive");
    unary_.emplace_back(static_cast<std::size_t>(domain_size), Cost{0});
    alive_.emplace_back(static_cast<std::size_t>(domain_size), std::uint8_t{1});
    size_.push_back(domain_size);
    binaries_of_.emplace_back();
    linears_of_.emplace_back();
    return num_variables() - 1;
}

namespace {

void check_var(const Cfn& p, int var)
{
    if (var < 0 || var >= p.num_variables())
        throw std::invalid_argument("variable index " + std::to_string(var) + " out of range");
}

Cost checked_cost(Cost c, Cost top)
{
    if (c < 0 || c > top)
        throw std::invalid_argument("cost " + std::to_string(c) + " outside [0, top]");
    return c;
}

} // namespace

void Cfn::set_unary(int var, std::vector<Cost> costs)
{
    check_var(*this, var);
    if (static_cast<int>(costs.size()) != domain_size(var))
        throw std::invalid_argument("unary table size does not match domain of variable " + std::to_string(var));
    for (Cost& c : costs)
        c = checked_cost(c, top_);
    unary_[var] = std::move(costs);
}

int Cfn::add_binary(int x, int y, std::vector<Cost> costs)
{
    check_var(*this, x);
    check_var(*this, y);
    if (x == y)
        throw std::invalid_argument("binary table needs two distinct variables");
    BinaryTable t;
    t.x = x;
    t.y = y;
    t.dx = domain_size(x);
    t.dy = domain_size(y);
    if (costs.size() != static_cast<std::size_t>(t.dx) * t.dy)
        throw std::invalid_argument("binary table size does not match domains");
    for (Cost& c : costs)
        c = checked_cost(c, top_);
    t.costs = std::move(costs);
    binary_.push_back(std::move(t));
    const int k = num_binary() - 1;
    binaries_of_[x].push_back(k);
    binaries_of_[y].push_back(k);
    return k;
}

int Cfn::add_linear(std::vector<int> scope, std::vector<std::vector<std::int64_t>> weights, std::int64_t capacity)
{
    if (scope.size() != weights.size())
        throw std::invalid_argument("linear constraint: one weight row per scope variable expected");
    if (capacity < 0)
        throw std::invalid_argument("linear constraint: capacity must be non-negative");
    LinearConstraint c;
    for (std::size_t p = 0; p < scope.size(); ++p) {
        const int var = scope[p];
        check_var(*this, var);
        if (static_cast<int>(weights[p].size()) != domain_size(var))
            throw std::invalid_argument("linear constraint: weight row size does not match domain");
        for (auto w : weights[p])
            if (w < 0)
                throw std::invalid_argument("linear constraint: weights must be non-negative");
        const int pos = c.position_of(var);
        if (pos >= 0) {
            for (std::size_t v = 0; v < weights[p].size(); ++v)
                c.weights[pos][v] += weights[p][v];
            continue;
        }
        c.scope.push_back(var);
        c.weights.push_back(std::move(weights[p]));
        c.deltas.emplace_back(static_cast<std::size_t>(domain_size(var)), Cost{0});
    }
    c.capacity = capacity;
    linear_.push_back(std::move(c));
    const int k = num_linear() - 1;
    for (int var : linear_[k].scope)
        linears_of_[var].push_back(k);
    return k;
}

void Cfn::set_lb(Cost lb)
{
    lb_ = checked_cost(lb, top_);
}

int Cfn::first_value(int var) const
{
    for (int v = 0; v < domain_size(var); ++v)
        if (in_domain(var, v))
            return v;
    return -1;
}

void Cfn::set_unary_cost(int var, int val, Cost c)
{
    trail_.push_back({Undo::unary, var, val, 0, unary_[var][val]});
    unary_[var][val] = c;
}

void Cfn::set_binary_cost(int k, std::size_t idx, Cost c)
{
    trail_.push_back({Undo::binary, k, static_cast<int>(idx), 0, binary_[k].costs[idx]});
    binary_[k].costs[idx] = c;
}

void Cfn::set_delta(int k, int pos, int val, Cost d)
{
    trail_.push_back({Undo::delta, k, pos, val, linear_[k].deltas[pos][val]});
    linear_[k].deltas[pos][val] = d;
}

void Cfn::set_lb_trailed(Cost lb)
{
    trail_.push_back({Undo::lb, 0, 0, 0, lb_});
    lb_ = lb;
}

namespace {

// c + alpha for a stored cost; top is absorbing.
Cost shifted(Cost c, Cost alpha, Cost top, const char* what)
{
    if (c >= top)
        return top;
    const Cost r = c + alpha;
    VACLIN_CONTRACT(r >= 0, std::string(what) + ": cost would become negative");
    return r >= top ? top : r;
}

} // namespace

void Cfn::move_cost(int k, int var, int val, Cost alpha)
{
    if (alpha == 0)
        return;
    const BinaryTable& t = binary_[k];
    VACLIN_CONTRACT(var == t.x || var == t.y, "move_cost: variable not in table scope");
    const int other = t.other(var);
    // Check every entry first so a violation leaves the network untouched.
    for (int b = 0; b < domain_size(other); ++b) {
        if (!in_domain(other, b))
            continue;
        const Cost c = t.at_from(var, val, b);
        VACLIN_CONTRACT(c >= top_ || c - alpha >= 0, "move_cost: table cost would become negative");
    }
    const Cost u = shifted(unary_[var][val], alpha, top_, "move_cost");
    set_unary_cost(var, val, u);
    for (int b = 0; b < domain_size(other); ++b) {
        if (!in_domain(other, b))
            continue;
        const std::size_t idx = var == t.x ? static_cast<std::size_t>(val) * t.dy + b
                                           : static_cast<std::size_t>(b) * t.dy + val;
        const Cost c = t.costs[idx];
        if (c >= top_)
            continue;
        const Cost nc = c - alpha;
        set_binary_cost(k, idx, nc >= top_ ? top_ : nc);
    }
}

void Cfn::unary_project(int var, Cost alpha)
{
    if (alpha == 0)
        return;
    VACLIN_CONTRACT(alpha > 0, "unary_project: negative amount");
    for (int v = 0; v < domain_size(var); ++v)
        if (in_domain(var, v))
            VACLIN_CONTRACT(unary_[var][v] >= top_ || unary_[var][v] >= alpha, "unary_project: cost would become negative");
    for (int v = 0; v < domain_size(var); ++v)
        if (in_domain(var, v) && unary_[var][v] < top_)
            set_unary_cost(var, v, unary_[var][v] - alpha);
    set_lb_trailed(add_cost(lb_, alpha, top_));
}

void Cfn::lin_move_cost(int k, int var, int val, Cost alpha)
{
    if (alpha == 0)
        return;
    const int pos = linear_[k].position_of(var);
    VACLIN_CONTRACT(pos >= 0, "lin_move_cost: variable not in constraint scope");
    const Cost u = shifted(unary_[var][val], alpha, top_, "lin_move_cost");
    set_unary_cost(var, val, u);
    set_delta(k, pos, val, linear_[k].deltas[pos][val] - alpha);
}

void Cfn::lin_project_zero(int k, Cost alpha)
{
    if (alpha == 0)
        return;
    VACLIN_CONTRACT(alpha > 0, "lin_project_zero: negative amount");
    trail_.push_back({Undo::delta0, k, 0, 0, linear_[k].delta0});
    linear_[k].delta0 += alpha;
    set_lb_trailed(add_cost(lb_, alpha, top_));
}

void Cfn::remove_value(int var, int val)
{
    if (!alive_[var][val])
        return;
    trail_.push_back({Undo::domain, var, val, 0, 1});
    alive_[var][val] = 0;
    --size_[var];
}

void Cfn::assign(int var, int val)
{
    for (int v = 0; v < domain_size(var); ++v)
        if (v != val)
            remove_value(var, v);
}

void Cfn::mark_infeasible()
{
    if (lb_ < top_)
        set_lb_trailed(top_);
}

void Cfn::rollback(std::size_t mark)
{
    while (trail_.size() > mark) {
        const TrailEntry e = trail_.back();
        trail_.pop_back();
        switch (e.kind) {
        case Undo::unary:
            unary_[e.a][e.b] = e.old;
            break;
        case Undo::binary:
            binary_[e.a].costs[static_cast<std::size_t>(e.b)] = e.old;
            break;
        case Undo::delta:
            linear_[e.a].deltas[e.b][e.c] = e.old;
            break;
        case Undo::delta0:
            linear_[e.a].delta0 = e.old;
            break;
        case Undo::lb:
            lb_ = e.old;
            break;
        case Undo::domain:
            alive_[e.a][e.b] = 1;
            ++size_[e.a];
            break;
        }
    }
}

Cost linear_tuple_cost(const LinearConstraint& c, std::span<const int> scope_tuple, Cost top)
{
    std::int64_t weight = 0;
    Cost sum = 0;
    for (int p = 0; p < c.arity(); ++p) {
        weight += c.weights[p][scope_tuple[p]];
        sum += c.deltas[p][scope_tuple[p]];
    }
    if (weight < c.capacity)
        return top;
    const Cost r = sum - c.delta0;
    return r >= top ? top : r;
}

Cost assignment_cost(const Cfn& p, std::span<const int> tuple)
{
    if (static_cast<int>(tuple.size()) != p.num_variables())
        throw std::invalid_argument("assignment_cost: tuple size mismatch");
    const Cost top = p.top();
    for (int i = 0; i < p.num_variables(); ++i)
        if (tuple[i] < 0 || tuple[i] >= p.domain_size(i) || !p.in_domain(i, tuple[i]))
            throw std::invalid_argument("assignment_cost: value outside current domain of variable " + std::to_string(i));
    if (p.lb() >= top)
        return top;
    Cost total = p.lb();
    for (int i = 0; i < p.num_variables(); ++i) {
        const Cost c = p.unary(i, tuple[i]);
        if (c >= top)
            return top;
        total += c;
    }
    for (int k = 0; k < p.num_binary(); ++k) {
        const BinaryTable& t = p.binary(k);
        const Cost c = t.at(tuple[t.x], tuple[t.y]);
        if (c >= top)
            return top;
        total += c;
    }
    std::vector<int> sub;
    for (int k = 0; k < p.num_linear(); ++k) {
        const LinearConstraint& lc = p.linear(k);
        sub.clear();
        for (int var : lc.scope)
            sub.push_back(tuple[var]);
        const Cost c = linear_tuple_cost(lc, sub, top);
        if (c >= top)
            return top;
        total += c;
    }
    return std::clamp(total, Cost{0}, top);
}

bool enforce_nc(Cfn& p, Cost bound)
{
    if (p.infeasible())
        return false;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < p.num_variables(); ++i) {
            Cost best = p.top();
            for (int v = 0; v < p.domain_size(i); ++v) {
                if (!p.in_domain(i, v))
                    continue;
                if (add_cost(p.lb(), p.unary(i, v), p.top()) >= bound) {
                    p.remove_value(i, v);
                    continue;
                }
                best = std::min(best, p.unary(i, v));
            }
            if (p.current_size(i) == 0) {
                p.mark_infeasible();
                return false;
            }
            if (best > 0) {
                p.unary_project(i, best);
                changed = true;
                if (p.lb() >= bound) {
                    p.mark_infeasible();
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace vaclin
