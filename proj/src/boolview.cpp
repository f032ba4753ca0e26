#include "vaclin/boolview.hpp"

#include <algorithm>
#include <limits>

namespace vaclin {

std::string to_string(ConstraintRef c)
{
    switch (c.kind) {
    case ConstraintRef::Kind::unary:
        return "unary(" + std::to_string(c.index) + ")";
    case ConstraintRef::Kind::table:
        return "table(" + std::to_string(c.index) + ")";
    case ConstraintRef::Kind::linear:
        return "linear(" + std::to_string(c.index) + ")";
    case ConstraintRef::Kind::none:
        break;
    }
    return "none";
}

BoolView::BoolView(const Cfn& p, Cost theta)
    : p_(&p)
    , theta_(theta)
{
    VACLIN_CONTRACT(theta >= 1 && theta <= p.top(), "BoolView: theta outside [1, top]");
    const int n = p.num_variables();
    alive_.resize(n);
    order_.resize(n);
    size_.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        const int d = p.domain_size(i);
        alive_[i].assign(d, 0);
        order_[i].assign(d, kAlive);
        for (int v = 0; v < d; ++v) {
            if (!p.in_domain(i, v))
                continue;
            if (p.unary(i, v) >= theta) {
                order_[i][v] = kPruned;
            } else {
                alive_[i][v] = 1;
                ++size_[i];
            }
        }
        if (size_[i] == 0 && initial_wipeout_ < 0)
            initial_wipeout_ = i;
    }
}

void BoolView::remove(VarVal vv, ConstraintRef killer, int batch)
{
    VACLIN_CONTRACT(alive(vv.var, vv.val), "BoolView::remove: value " + to_string(vv) + " already removed");
    alive_[vv.var][vv.val] = 0;
    --size_[vv.var];
    order_[vv.var][vv.val] = static_cast<int>(queue_.size());
    queue_.push_back({vv, killer, batch});
}

int BoolView::first_alive(int var) const
{
    for (int v = 0; v < static_cast<int>(alive_[var].size()); ++v)
        if (alive_[var][v])
            return v;
    return -1;
}

namespace {

MckpInstance delta_lp(const LinearConstraint& c)
{
    MckpInstance inst;
    inst.capacity = c.capacity;
    inst.delta0 = Rational(c.delta0);
    inst.classes.resize(c.scope.size());
    for (std::size_t p = 0; p < c.scope.size(); ++p) {
        MckpClass& cls = inst.classes[p];
        cls.var = c.scope[p];
        for (std::size_t v = 0; v < c.weights[p].size(); ++v)
            cls.items.push_back({static_cast<int>(v), c.weights[p][v], Rational(c.deltas[p][v]), true});
    }
    return inst;
}

bool by_order(const BoolView& view, VarVal a, VarVal b)
{
    const int oa = view.order(a.var, a.val);
    const int ob = view.order(b.var, b.val);
    if (oa != ob)
        return oa < ob;
    return a < b;
}

} // namespace

MckpInstance view_lp(const LinearConstraint& c, const BoolView& view)
{
    MckpInstance inst = delta_lp(c);
    for (auto& cls : inst.classes)
        for (auto& item : cls.items)
            item.allowed = view.alive(cls.var, item.value);
    return inst;
}

MckpInstance unary_lp(const Cfn& p, const LinearConstraint& c)
{
    MckpInstance inst = delta_lp(c);
    for (auto& cls : inst.classes) {
        for (auto& item : cls.items) {
            item.allowed = p.in_domain(cls.var, item.value);
            if (item.allowed)
                item.cost += Rational(p.unary(cls.var, item.value));
        }
    }
    return inst;
}

namespace {

// Per scope position, max weight over the view domain (-1 when the domain is empty).
std::vector<std::int64_t> view_max_weights(const LinearConstraint& c, const BoolView& view)
{
    std::vector<std::int64_t> best(c.scope.size(), -1);
    for (std::size_t p = 0; p < c.scope.size(); ++p)
        for (std::size_t v = 0; v < c.weights[p].size(); ++v)
            if (view.alive(c.scope[p], static_cast<int>(v)))
                best[p] = std::max(best[p], c.weights[p][v]);
    return best;
}

} // namespace

std::vector<VarVal> hard_filter(const LinearConstraint& c, const BoolView& view)
{
    const auto best = view_max_weights(c, view);
    std::int64_t total = 0;
    for (auto b : best) {
        if (b < 0)
            return {};
        total += b;
    }
    std::vector<VarVal> out;
    for (std::size_t p = 0; p < c.scope.size(); ++p)
        for (std::size_t v = 0; v < c.weights[p].size(); ++v)
            if (view.alive(c.scope[p], static_cast<int>(v)) && c.weights[p][v] + total - best[p] < c.capacity)
                out.push_back({c.scope[p], static_cast<int>(v)});
    return out;
}

FilterOutcome lin_filter(int k, BoolView& view)
{
    const LinearConstraint& c = view.cfn().linear(k);
    FilterOutcome out;
    out.constraint = ConstraintRef::linear(k);

    std::int64_t total = 0;
    bool empty = false;
    for (auto b : view_max_weights(c, view)) {
        empty = empty || b < 0;
        total += std::max<std::int64_t>(b, 0);
    }
    if (empty || total < c.capacity) {
        out.kind = FilterOutcome::Kind::conflict;
        out.infeasible = true;
        out.cost = Rational(view.cfn().top());
        out.explanation = explain_hard_conflict(c, view, std::nullopt, BoolView::kAlive, &out.global);
        return out;
    }

    for (const VarVal vv : hard_filter(c, view))
        out.removals.push_back({vv, FilterOutcome::RemovalKind::hard});

    const MckpInstance inst = view_lp(c, view);
    const LpResult lp = solve_mckp_lp(inst);
    ++view.counters.lp_solves;
    VACLIN_CONTRACT(lp.feasible, "lin_filter: LP infeasible although max weights reach capacity");
    out.cost = lp.z_star;
    const Rational theta(view.theta());

    if (lp.z_star >= theta) {
        out.kind = FilterOutcome::Kind::conflict;
        for (std::size_t p = 0; p < c.scope.size(); ++p) {
            const int var = c.scope[p];
            for (std::size_t v = 0; v < c.weights[p].size(); ++v) {
                const int val = static_cast<int>(v);
                if (view.in_copy(var, val) && !view.alive(var, val) && lp.rc[p][v].sign() < 0)
                    out.explanation.push_back({var, val});
            }
        }
        std::sort(out.explanation.begin(), out.explanation.end(),
            [&](VarVal a, VarVal b) { return by_order(view, a, b); });
        out.removals.clear();
        return out;
    }

    const std::size_t hard_count = out.removals.size();
    for (std::size_t p = 0; p < c.scope.size(); ++p) {
        const int var = c.scope[p];
        for (std::size_t v = 0; v < c.weights[p].size(); ++v) {
            const int val = static_cast<int>(v);
            if (!view.alive(var, val) || lp.z_star + lp.rc[p][v] < theta)
                continue;
            const auto hard_end = out.removals.begin() + static_cast<std::ptrdiff_t>(hard_count);
            if (std::any_of(out.removals.begin(), hard_end, [&](const auto& r) { return r.vv == VarVal{var, val}; }))
                continue;
            out.removals.push_back({{var, val}, FilterOutcome::RemovalKind::soft});
        }
    }
    return out;
}

std::vector<VarVal> table_revise(int k, BoolView& view)
{
    const BinaryTable& t = view.cfn().binary(k);
    const Cost theta = view.theta();
    std::vector<VarVal> removed;
    auto sweep = [&](int var) {
        const int other = t.other(var);
        const int batch = view.next_batch();
        bool any = false;
        for (int a = 0; a < view.cfn().domain_size(var); ++a) {
            if (!view.alive(var, a))
                continue;
            bool supported = false;
            for (int b = 0; b < view.cfn().domain_size(other) && !supported; ++b)
                supported = view.alive(other, b) && t.at_from(var, a, b) < theta;
            if (supported)
                continue;
            view.remove({var, a}, ConstraintRef::table(k), batch);
            ++view.counters.table;
            removed.push_back({var, a});
            any = true;
            if (view.size(var) == 0)
                break;
        }
        return any;
    };
    // x side, then y side against the reduced x side; x needs another look only if y shrank.
    while (true) {
        sweep(t.x);
        if (view.size(t.x) == 0)
            break;
        const bool y_changed = sweep(t.y);
        if (view.size(t.y) == 0 || !y_changed)
            break;
    }
    return removed;
}

std::vector<VarVal> explain_hard_conflict(const LinearConstraint& c, const BoolView& view,
    std::optional<VarVal> target, int before, bool* global)
{
    std::vector<VarVal> candidates;
    for (std::size_t p = 0; p < c.scope.size(); ++p) {
        const int var = c.scope[p];
        if (target && target->var == var)
            continue;
        for (std::size_t v = 0; v < c.weights[p].size(); ++v)
            if (view.removed_before(var, static_cast<int>(v), before))
                candidates.push_back({var, static_cast<int>(v)});
    }
    // Construction-pruned values first in scope order, then queue order.
    std::stable_sort(candidates.begin(), candidates.end(), [&](VarVal a, VarVal b) {
        const int oa = view.order(a.var, a.val);
        const int ob = view.order(b.var, b.val);
        if (oa == BoolView::kPruned || ob == BoolView::kPruned)
            return oa == BoolView::kPruned && ob != BoolView::kPruned;
        return oa < ob;
    });

    std::vector<std::uint8_t> in_set(candidates.size(), 1);
    auto removed = [&](int var, int val) {
        for (std::size_t q = 0; q < candidates.size(); ++q)
            if (in_set[q] && candidates[q] == VarVal{var, val})
                return true;
        return false;
    };
    auto infeasible = [&]() {
        std::int64_t total = 0;
        for (std::size_t p = 0; p < c.scope.size(); ++p) {
            const int var = c.scope[p];
            if (target && target->var == var) {
                total += c.weights[p][target->val];
                continue;
            }
            std::int64_t best = -1;
            for (std::size_t v = 0; v < c.weights[p].size(); ++v) {
                const int val = static_cast<int>(v);
                if (view.in_copy(var, val) && !removed(var, val))
                    best = std::max(best, c.weights[p][v]);
            }
            if (best < 0)
                return true;
            total += best;
        }
        return total < c.capacity;
    };

    VACLIN_CONTRACT(infeasible(), "explain_hard_conflict: constraint is not infeasible under the removals");
    for (std::size_t q = 0; q < candidates.size(); ++q) {
        in_set[q] = 0;
        if (!infeasible())
            in_set[q] = 1;
    }
    std::vector<VarVal> out;
    for (std::size_t q = 0; q < candidates.size(); ++q)
        if (in_set[q])
            out.push_back(candidates[q]);
    if (global)
        *global = out.empty();
    return out;
}

LinExplanation lin_explain(int k, VarVal ia, BoolView& view)
{
    const LinearConstraint& c = view.cfn().linear(k);
    const int pos = view.order(ia.var, ia.val);
    VACLIN_CONTRACT(pos >= 0 && pos != BoolView::kAlive, "lin_explain: value was not removed by a constraint");
    const int scope_pos = c.position_of(ia.var);
    VACLIN_CONTRACT(scope_pos >= 0, "lin_explain: value outside the constraint scope");

    MckpInstance inst = delta_lp(c);
    for (auto& cls : inst.classes)
        for (auto& item : cls.items)
            item.allowed = view.in_copy(cls.var, item.value) && !view.removed_before(cls.var, item.value, pos);
    inst.classes[scope_pos].forced = ia.val;

    LinExplanation out;
    const LpResult lp = solve_mckp_lp(inst);
    ++view.counters.lp_solves;
    if (!lp.feasible) {
        out.infeasible = true;
        out.z = Rational(view.cfn().top());
        out.explanation = explain_hard_conflict(c, view, ia, pos);
        return out;
    }
    out.z = lp.z_star;
    VACLIN_CONTRACT(lp.z_star >= Rational(view.theta()),
        "lin_explain: relaxation with " + to_string(ia) + " forced is below theta");
    for (std::size_t p = 0; p < c.scope.size(); ++p) {
        const int var = c.scope[p];
        if (var == ia.var)
            continue;
        for (std::size_t v = 0; v < c.weights[p].size(); ++v) {
            const int val = static_cast<int>(v);
            if (view.removed_before(var, val, pos) && lp.rc[p][v].sign() < 0)
                out.explanation.push_back({var, val});
        }
    }
    std::sort(out.explanation.begin(), out.explanation.end(),
        [&](VarVal a, VarVal b) { return by_order(view, a, b); });
    return out;
}

std::vector<VarVal> table_explain(int k, VarVal ia, const BoolView& view)
{
    const BinaryTable& t = view.cfn().binary(k);
    const int other = t.other(ia.var);
    const int limit = view.order(ia.var, ia.val);
    std::vector<VarVal> out;
    for (int b = 0; b < view.cfn().domain_size(other); ++b) {
        if (!view.in_copy(other, b) || t.at_from(ia.var, ia.val, b) >= view.theta())
            continue;
        VACLIN_CONTRACT(view.removed_before(other, b, limit),
            "table_explain: support " + to_string(VarVal{other, b}) + " was still present");
        out.push_back({other, b});
    }
    return out;
}

} // namespace vaclin
