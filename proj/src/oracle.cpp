#include "vaclin/oracle.hpp"

#include <algorithm>

namespace vaclin::oracle {

namespace {

// Product of domain sizes, or nullopt when it exceeds the budget.
std::optional<std::uint64_t> space_size(const Cfn& p, std::uint64_t budget)
{
    std::uint64_t total = 1;
    for (int i = 0; i < p.num_variables(); ++i) {
        const auto d = static_cast<std::uint64_t>(std::max(p.current_size(i), 0));
        if (d == 0)
            return 0;
        if (total > budget / d)
            return std::nullopt;
        total *= d;
    }
    return total;
}

// Calls f on every tuple of the current domains, in lexicographic order.
template <typename F>
void for_each_tuple(const Cfn& p, F&& f)
{
    const int n = p.num_variables();
    std::vector<int> tuple(n);
    for (int i = 0; i < n; ++i) {
        tuple[i] = p.first_value(i);
        if (tuple[i] < 0)
            return;
    }
    while (true) {
        f(tuple);
        int i = n - 1;
        for (; i >= 0; --i) {
            int v = tuple[i] + 1;
            while (v < p.domain_size(i) && !p.in_domain(i, v))
                ++v;
            if (v < p.domain_size(i)) {
                tuple[i] = v;
                break;
            }
            tuple[i] = p.first_value(i);
        }
        if (i < 0)
            return;
    }
}

} // namespace

Cost evaluate(const Cfn& p, const std::vector<int>& tuple)
{
    const Cost top = p.top();
    // 128-bit accumulation: intermediate sums of deltas may be large in either direction.
    __int128 total = p.lb();
    for (int i = 0; i < p.num_variables(); ++i) {
        if (p.unary(i, tuple[i]) >= top)
            return top;
        total += p.unary(i, tuple[i]);
    }
    for (int k = 0; k < p.num_binary(); ++k) {
        const BinaryTable& t = p.binary(k);
        const Cost c = t.costs[static_cast<std::size_t>(tuple[t.x]) * t.dy + tuple[t.y]];
        if (c >= top)
            return top;
        total += c;
    }
    for (int k = 0; k < p.num_linear(); ++k) {
        const LinearConstraint& lc = p.linear(k);
        __int128 w = 0;
        __int128 d = -static_cast<__int128>(lc.delta0);
        for (std::size_t s = 0; s < lc.scope.size(); ++s) {
            w += lc.weights[s][tuple[lc.scope[s]]];
            d += lc.deltas[s][tuple[lc.scope[s]]];
        }
        if (w < lc.capacity)
            return top;
        if (d >= top)
            return top;
        total += d;
    }
    if (total >= top)
        return top;
    return static_cast<Cost>(total);
}

std::optional<OptimumWitness> brute_force_witness(const Cfn& p, std::uint64_t budget)
{
    const auto size = space_size(p, budget);
    if (!size)
        return std::nullopt;
    OptimumWitness best{p.top(), {}};
    for_each_tuple(p, [&](const std::vector<int>& t) {
        const Cost c = evaluate(p, t);
        if (c < best.cost) {
            best.cost = c;
            best.assignment = t;
        }
    });
    return best;
}

std::optional<Cost> brute_force_optimum(const Cfn& p, std::uint64_t budget)
{
    const auto w = brute_force_witness(p, budget);
    if (!w)
        return std::nullopt;
    return w->cost;
}

std::optional<MckpOptimum> brute_force_mckp(const MckpInstance& inst, std::uint64_t budget)
{
    const std::size_t m = inst.classes.size();
    std::vector<std::vector<std::size_t>> usable(m);
    std::uint64_t combos = 1;
    std::size_t total_items = 0;
    for (std::size_t c = 0; c < m; ++c) {
        const MckpClass& cls = inst.classes[c];
        for (std::size_t i = 0; i < cls.items.size(); ++i) {
            const bool ok = cls.forced ? static_cast<std::size_t>(*cls.forced) == i : cls.items[i].allowed;
            if (ok)
                usable[c].push_back(i);
        }
        if (usable[c].empty())
            return MckpOptimum{};
        total_items += usable[c].size();
        if (combos > budget / usable[c].size())
            return std::nullopt;
        combos *= usable[c].size();
    }
    // Each split multiplies the work by at most the squared class size.
    if (combos > budget / std::max<std::size_t>(1, total_items * total_items))
        return std::nullopt;

    MckpOptimum best;
    auto offer = [&](const Rational& z) {
        if (!best.feasible || z < best.z) {
            best.feasible = true;
            best.z = z;
        }
    };

    std::vector<std::size_t> pick(m, 0);
    while (true) {
        std::int64_t w = 0;
        Rational cost = -inst.delta0;
        for (std::size_t c = 0; c < m; ++c) {
            const MckpItem& it = inst.classes[c].items[usable[c][pick[c]]];
            w += it.weight;
            cost += it.cost;
        }
        if (w >= inst.capacity)
            offer(cost);

        // Split class c between its picked item a and another usable item b with the capacity tight:
        // (1-t) * w_a + t * w_b = capacity - others.
        for (std::size_t c = 0; c < m; ++c) {
            const MckpItem& a = inst.classes[c].items[usable[c][pick[c]]];
            const std::int64_t rest = w - a.weight;
            const Rational base_cost = cost - a.cost;
            for (std::size_t j : usable[c]) {
                const MckpItem& b = inst.classes[c].items[j];
                if (b.weight == a.weight)
                    continue;
                const Rational t(inst.capacity - rest - a.weight, b.weight - a.weight);
                if (t.sign() <= 0 || t >= Rational(1))
                    continue;
                offer(base_cost + (Rational(1) - t) * a.cost + t * b.cost);
            }
        }

        std::size_t c = 0;
        for (; c < m; ++c) {
            if (++pick[c] < usable[c].size())
                break;
            pick[c] = 0;
        }
        if (c == m)
            break;
    }
    return best;
}

std::optional<bool> check_reparam_equiv(const Cfn& before, const Cfn& after, std::uint64_t budget)
{
    if (before.num_variables() != after.num_variables())
        return false;
    for (int i = 0; i < before.num_variables(); ++i)
        if (before.domain_size(i) != after.domain_size(i))
            return false;
    if (!space_size(before, budget))
        return std::nullopt;
    bool same = true;
    for_each_tuple(before, [&](const std::vector<int>& t) {
        if (!same)
            return;
        Cost ca = after.top();
        bool inside = true;
        for (int i = 0; i < after.num_variables(); ++i)
            inside = inside && after.in_domain(i, t[i]);
        if (inside)
            ca = evaluate(after, t);
        const Cost cb = evaluate(before, t);
        const bool top_b = cb >= before.top();
        const bool top_a = ca >= after.top();
        if (top_b != top_a || (!top_b && cb != ca))
            same = false;
    });
    return same;
}

std::optional<OpbOptimum> brute_force_opb(const OpbProblem& problem, std::uint64_t budget)
{
    if (problem.num_vars >= 63 || (std::uint64_t{1} << problem.num_vars) > budget)
        return std::nullopt;
    OpbOptimum best;
    std::vector<int> x(problem.num_vars);
    auto lit = [&](const OpbTerm& t) -> std::int64_t {
        const int v = x[t.var];
        return t.negated ? 1 - v : v;
    };
    const std::uint64_t total = std::uint64_t{1} << problem.num_vars;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int j = 0; j < problem.num_vars; ++j)
            x[j] = static_cast<int>((mask >> j) & 1U);
        bool ok = true;
        for (const OpbConstraint& c : problem.constraints) {
            std::int64_t lhs = 0;
            for (const OpbTerm& t : c.terms)
                lhs += t.coef * lit(t);
            if (c.equality ? lhs != c.rhs : lhs < c.rhs) {
                ok = false;
                break;
            }
        }
        if (!ok)
            continue;
        std::int64_t obj = 0;
        for (const OpbTerm& t : problem.objective)
            obj += t.coef * lit(t);
        if (!best.feasible || obj < best.value) {
            best.feasible = true;
            best.value = obj;
            best.assignment = x;
        }
    }
    return best;
}

} // namespace vaclin::oracle
