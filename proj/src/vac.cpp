#include "vaclin/vac.hpp"

#include <algorithm>
#include <deque>

namespace vaclin {

namespace {

class ConstraintQueue {
public:
    explicit ConstraintQueue(const Cfn& p)
        : in_table_(p.num_binary(), 1)
        , in_linear_(p.num_linear(), 1)
    {
        for (int k = 0; k < p.num_binary(); ++k)
            tables_.push_back(k);
        for (int k = 0; k < p.num_linear(); ++k)
            linears_.push_back(k);
    }

    [[nodiscard]] bool empty() const { return tables_.empty() && linears_.empty(); }

    // Tables first, FIFO within each kind.
    ConstraintRef pop()
    {
        if (!tables_.empty()) {
            const int k = tables_.front();
            tables_.pop_front();
            in_table_[k] = 0;
            return ConstraintRef::table(k);
        }
        const int k = linears_.front();
        linears_.pop_front();
        in_linear_[k] = 0;
        return ConstraintRef::linear(k);
    }

    void push_neighbours(const Cfn& p, int var, ConstraintRef except)
    {
        for (int k : p.binaries_of(var))
            if (ConstraintRef::table(k) != except && !in_table_[k]) {
                in_table_[k] = 1;
                tables_.push_back(k);
            }
        for (int k : p.linears_of(var))
            if (ConstraintRef::linear(k) != except && !in_linear_[k]) {
                in_linear_[k] = 1;
                linears_.push_back(k);
            }
    }

private:
    std::deque<int> tables_;
    std::deque<int> linears_;
    std::vector<std::uint8_t> in_table_;
    std::vector<std::uint8_t> in_linear_;
};

void set_wipeout(Pass1Result& r, const Cfn& p, int var)
{
    r.lambda0 = Rational(p.top());
    r.conflict = ConstraintRef::unary(var);
    r.explanation.clear();
    for (int b = 0; b < p.domain_size(var); ++b)
        if (p.in_domain(var, b))
            r.explanation.push_back({var, b});
}

} // namespace

Pass1Result vac_pass1(const Cfn& p, Cost theta)
{
    Pass1Result r{Rational(0), {}, {}, BoolView(p, theta)};
    BoolView& view = r.view;
    if (view.initial_wipeout() >= 0) {
        set_wipeout(r, p, view.initial_wipeout());
        return r;
    }

    ConstraintQueue queue(p);
    while (!queue.empty()) {
        const ConstraintRef c = queue.pop();
        if (c.kind == ConstraintRef::Kind::table) {
            for (const VarVal vv : table_revise(c.index, view)) {
                if (view.size(vv.var) == 0) {
                    set_wipeout(r, p, vv.var);
                    return r;
                }
                queue.push_neighbours(p, vv.var, c);
            }
            continue;
        }

        const FilterOutcome out = lin_filter(c.index, view);
        if (out.conflict()) {
            r.lambda0 = out.infeasible ? Rational(p.top()) : out.cost;
            r.conflict = c;
            r.explanation = out.explanation;
            return r;
        }
        const int batch = view.next_batch();
        for (const auto& rem : out.removals) {
            view.remove(rem.vv, c, batch);
            if (rem.kind == FilterOutcome::RemovalKind::hard)
                ++view.counters.hard;
            else
                ++view.counters.soft;
            if (view.size(rem.vv.var) == 0) {
                set_wipeout(r, p, rem.vv.var);
                return r;
            }
            queue.push_neighbours(p, rem.vv.var, c);
        }
    }
    return r;
}

VacTrace vac_pass2(const Cfn& p, Pass1Result& r)
{
    VACLIN_CONTRACT(r.has_conflict(), "vac_pass2: no conflict to trace");
    BoolView& view = r.view;
    VacTrace t;
    Rational lambda = r.lambda0;

    auto is_marked = [&](VarVal vv) {
        const auto it = t.marked.find(vv);
        return it != t.marked.end() && it->second;
    };
    auto touch = [&](VarVal vv) {
        if (!t.marked.contains(vv))
            t.marked[vv] = p.unary(vv.var, vv.val) == 0;
    };

    if (r.conflict.kind == ConstraintRef::Kind::linear)
        t.k_constraint[r.conflict] = 1;
    for (const VarVal e : r.explanation) {
        t.k[e] = 1;
        t.k_c[{r.conflict, e}] += 1;
        touch(e);
    }

    const auto& q = view.queue();
    for (std::size_t idx = q.size(); idx-- > 0;) {
        const VarVal ia = q[idx].vv;
        if (!is_marked(ia))
            continue;
        const ConstraintRef killer = q[idx].killer;
        const std::int64_t kia = t.k.at(ia);
        ++t.explanations;
        if (killer.kind == ConstraintRef::Kind::linear) {
            const LinExplanation ex = lin_explain(killer.index, ia, view);
            const std::int64_t kc = (t.k_constraint[killer] += kia);
            lambda = min(lambda, ex.z / Rational(kc));
            for (const VarVal jb : ex.explanation) {
                t.k[jb] += kia;
                t.k_c[{killer, jb}] += kia;
                touch(jb);
            }
        } else {
            VACLIN_CONTRACT(killer.kind == ConstraintRef::Kind::table, "vac_pass2: removal without a killer");
            // A support only has to fund the largest single request made through this table.
            for (const VarVal jb : table_explain(killer.index, ia, view)) {
                std::int64_t& kc = t.k_c[{killer, jb}];
                if (kia > kc) {
                    t.k[jb] += kia - kc;
                    kc = kia;
                }
                touch(jb);
            }
        }
    }

    // Sources: every unmarked value pays k(j,b) * lambda out of its unary cost.
    for (const auto& [vv, k] : t.k)
        if (k > 0 && !is_marked(vv))
            lambda = min(lambda, Rational(p.unary(vv.var, vv.val)) / Rational(k));

    // Table tuples forbidden by cost (theta <= c < top) lose the projections of both of their values.
    for (const auto& [vv, k] : t.k) {
        if (!is_marked(vv) || view.order(vv.var, vv.val) < 0)
            continue;
        const ConstraintRef killer = view.removal(vv.var, vv.val).killer;
        if (killer.kind != ConstraintRef::Kind::table)
            continue;
        const BinaryTable& tab = p.binary(killer.index);
        const int other = tab.other(vv.var);
        for (int w = 0; w < p.domain_size(other); ++w) {
            if (!p.in_domain(other, w))
                continue;
            const Cost c = tab.at_from(vv.var, vv.val, w);
            if (c < view.theta() || c >= p.top())
                continue;
            std::int64_t requests = k;
            const VarVal jw{other, w};
            if (is_marked(jw) && view.order(other, w) >= 0 && view.order(other, w) != BoolView::kAlive
                && view.removal(other, w).killer == killer)
                requests += t.k.at(jw);
            lambda = min(lambda, Rational(c) / Rational(requests));
        }
    }

    lambda = min(lambda, Rational(p.top() - std::min(p.lb(), p.top())));
    t.lambda_rational = lambda;
    t.lambda = std::max<std::int64_t>(0, lambda.floor());

    // Plan: source extensions, then marked values in removal order, then the conflict projection.
    std::map<VarVal, std::vector<std::pair<ConstraintRef, std::int64_t>>> requests;
    for (const auto& [key, kc] : t.k_c)
        if (kc > 0)
            requests[key.second].push_back({key.first, kc});
    auto extend_all = [&](VarVal vv) {
        const auto it = requests.find(vv);
        if (it == requests.end())
            return;
        for (const auto& [c, kc] : it->second)
            if (c.kind != ConstraintRef::Kind::unary)
                t.plan.push_back({PlanStep::Kind::extend, c, vv, kc});
    };
    for (const auto& [vv, list] : requests)
        if (!is_marked(vv))
            extend_all(vv);
    for (const auto& rem : q) {
        if (!is_marked(rem.vv))
            continue;
        t.plan.push_back({PlanStep::Kind::project, rem.killer, rem.vv, t.k.at(rem.vv)});
        extend_all(rem.vv);
    }
    t.plan.push_back({PlanStep::Kind::final_projection, r.conflict, {}, 1});
    return t;
}

Cost vac_pass3(Cfn& p, const VacTrace& trace)
{
    VACLIN_CONTRACT(trace.lambda >= 1, "vac_pass3: lambda must be at least 1");
    const Cost before = p.lb();
    for (const PlanStep& s : trace.plan) {
        const Cost amount = s.multiplier * trace.lambda;
        const int idx = s.constraint.index;
        switch (s.kind) {
        case PlanStep::Kind::extend:
            if (s.constraint.kind == ConstraintRef::Kind::linear)
                p.lin_move_cost(idx, s.vv.var, s.vv.val, -amount);
            else if (s.constraint.kind == ConstraintRef::Kind::table)
                p.extend(idx, s.vv.var, s.vv.val, amount);
            break;
        case PlanStep::Kind::project:
            if (s.constraint.kind == ConstraintRef::Kind::linear)
                p.lin_move_cost(idx, s.vv.var, s.vv.val, amount);
            else
                p.project(idx, s.vv.var, s.vv.val, amount);
            break;
        case PlanStep::Kind::final_projection:
            if (s.constraint.kind == ConstraintRef::Kind::linear)
                p.lin_project_zero(idx, trace.lambda);
            else
                p.unary_project(idx, trace.lambda);
            break;
        }
    }
    return p.lb() - before;
}

Cost VacStats::total_gain() const
{
    Cost g = 0;
    for (const auto& t : per_theta)
        g += t.gain;
    return g;
}

Cost vac_iterate(Cfn& p, Cost theta, const VacOptions& opt, VacStats* stats)
{
    const Cost stop = opt.stop_bound > 0 ? std::min(opt.stop_bound, p.top()) : p.top();
    theta = std::clamp<Cost>(theta, 1, p.top());
    ThetaStats ts;
    ts.theta = theta;
    const Cost start = p.lb();
    for (std::int64_t iter = 0; iter < opt.max_iterations; ++iter) {
        if (p.lb() >= stop || p.infeasible())
            break;
        Pass1Result r = vac_pass1(p, theta);
        ++ts.iterations;
        if (stats) {
            stats->bool_support.assign(p.num_variables(), -1);
            for (int i = 0; i < p.num_variables(); ++i)
                stats->bool_support[i] = r.view.first_alive(i);
        }
        if (!r.has_conflict()) {
            ts.hard_removals += r.view.counters.hard;
            ts.soft_removals += r.view.counters.soft;
            ts.table_removals += r.view.counters.table;
            ts.lp_solves += r.view.counters.lp_solves;
            break;
        }
        if (stats)
            stats->last_conflict = r.conflict;
        const VacTrace trace = vac_pass2(p, r);
        ts.hard_removals += r.view.counters.hard;
        ts.soft_removals += r.view.counters.soft;
        ts.table_removals += r.view.counters.table;
        ts.lp_solves += r.view.counters.lp_solves;
        if (trace.lambda == 0) {
            ++ts.stalls;
            break;
        }
        vac_pass3(p, trace);
        enforce_nc(p, stop);
    }
    ts.gain = p.lb() - start;
    if (stats)
        stats->per_theta.push_back(ts);
    return ts.gain;
}

std::vector<Cost> make_schedule(const Cfn& p, std::optional<Cost> theta_start)
{
    const Cost top = p.top();
    Cost theta = 0;
    if (theta_start) {
        theta = *theta_start;
    } else {
        auto consider = [&](Cost c) {
            if (c > 0 && c < top)
                theta = std::max(theta, c);
        };
        for (int i = 0; i < p.num_variables(); ++i)
            for (int v = 0; v < p.domain_size(i); ++v)
                consider(p.unary(i, v));
        for (int k = 0; k < p.num_binary(); ++k)
            for (Cost c : p.binary(k).costs)
                consider(c);
        for (int k = 0; k < p.num_linear(); ++k)
            for (const auto& row : p.linear(k).deltas)
                for (Cost d : row)
                    consider(d);
    }
    theta = std::clamp<Cost>(theta, 1, top);
    std::vector<Cost> schedule{theta};
    while (schedule.back() > 1)
        schedule.push_back(std::max<Cost>(1, schedule.back() / 2));
    return schedule;
}

Cost vac_lin(Cfn& p, const std::vector<Cost>& schedule, const VacOptions& opt, VacStats* stats)
{
    const Cost start = p.lb();
    for (Cost theta : schedule) {
        vac_iterate(p, theta, opt, stats);
        const Cost stop = opt.stop_bound > 0 ? std::min(opt.stop_bound, p.top()) : p.top();
        if (p.lb() >= stop)
            break;
    }
    return p.lb() - start;
}

Cost direct_lin_propagate(Cfn& p, int k)
{
    const Cost start = p.lb();
    if (p.infeasible())
        return 0;
    const LinearConstraint& c = p.linear(k);
    const LpResult lp = solve_mckp_lp(unary_lp(p, c));
    if (!lp.feasible) {
        p.mark_infeasible();
        return p.lb() - start;
    }
    const Cost gain = lp.z_star.floor();
    if (gain < 1)
        return 0;
    for (std::size_t pos = 0; pos < c.scope.size(); ++pos) {
        const int var = c.scope[pos];
        for (int v = 0; v < p.domain_size(var); ++v) {
            if (!p.in_domain(var, v))
                continue;
            const Cost e = (Rational(p.unary(var, v)) - lp.rc[pos][v]).ceil();
            p.lin_move_cost(k, var, v, -e);
        }
    }
    p.lin_project_zero(k, gain);
    return p.lb() - start;
}

} // namespace vaclin
