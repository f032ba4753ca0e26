#include "vaclin/search.hpp"

#include <algorithm>
#include <chrono>

namespace vaclin {

std::string to_string(PropLevel level)
{
    switch (level) {
    case PropLevel::nc:
        return "nc";
    case PropLevel::lp:
        return "lp";
    case PropLevel::vac_root:
        return "vac-root";
    case PropLevel::vac_node:
        return "vac-node";
    }
    return "?";
}

std::optional<PropLevel> parse_prop_level(const std::string& name)
{
    for (PropLevel l : {PropLevel::nc, PropLevel::lp, PropLevel::vac_root, PropLevel::vac_node})
        if (to_string(l) == name)
            return l;
    return std::nullopt;
}

std::string to_string(SolveOutcome::Status s)
{
    switch (s) {
    case SolveOutcome::Status::optimal:
        return "optimal";
    case SolveOutcome::Status::infeasible:
        return "infeasible";
    case SolveOutcome::Status::limit_reached:
        return "limit_reached";
    }
    return "?";
}

namespace {

// Propagation short of VAC. Returns false when c0 reaches ub; `culprit` is the last constraint that
// changed the network.
bool propagate_basic(Cfn& p, Cost ub, PropLevel level, ConstraintRef& culprit)
{
    const Cost top = p.top();
    while (true) {
        if (!enforce_nc(p, ub))
            return false;
        bool changed = false;

        for (int k = 0; k < p.num_binary(); ++k) {
            const BinaryTable& t = p.binary(k);
            for (int var : {t.x, t.y}) {
                const int other = t.other(var);
                for (int a = 0; a < p.domain_size(var); ++a) {
                    if (!p.in_domain(var, a))
                        continue;
                    bool support = false;
                    for (int b = 0; b < p.domain_size(other) && !support; ++b) {
                        if (!p.in_domain(other, b))
                            continue;
                        Cost c = add_cost(p.lb(), p.unary(var, a), top);
                        c = add_cost(c, t.at_from(var, a, b), top);
                        c = add_cost(c, p.unary(other, b), top);
                        support = c < ub;
                    }
                    if (support)
                        continue;
                    p.remove_value(var, a);
                    changed = true;
                    culprit = ConstraintRef::table(k);
                    if (p.current_size(var) == 0) {
                        p.mark_infeasible();
                        return false;
                    }
                }
            }
        }

        for (int k = 0; k < p.num_linear(); ++k) {
            const LinearConstraint& c = p.linear(k);
            std::vector<std::int64_t> best(c.scope.size(), 0);
            std::int64_t total = 0;
            for (std::size_t pos = 0; pos < c.scope.size(); ++pos) {
                for (int v = 0; v < p.domain_size(c.scope[pos]); ++v)
                    if (p.in_domain(c.scope[pos], v))
                        best[pos] = std::max(best[pos], c.weights[pos][v]);
                total += best[pos];
            }
            if (total < c.capacity) {
                culprit = ConstraintRef::linear(k);
                p.mark_infeasible();
                return false;
            }
            for (std::size_t pos = 0; pos < c.scope.size(); ++pos) {
                const int var = c.scope[pos];
                for (int v = 0; v < p.domain_size(var); ++v) {
                    if (p.in_domain(var, v) && c.weights[pos][v] + total - best[pos] < c.capacity) {
                        p.remove_value(var, v);
                        changed = true;
                        culprit = ConstraintRef::linear(k);
                    }
                }
            }
        }

        if (level != PropLevel::nc) {
            for (int k = 0; k < p.num_linear(); ++k) {
                if (direct_lin_propagate(p, k) > 0) {
                    changed = true;
                    culprit = ConstraintRef::linear(k);
                }
                if (p.lb() >= ub)
                    return false;
            }
        }
        if (!changed)
            return p.lb() < ub;
    }
}

bool run_vac(Cfn& p, Cost ub, const std::vector<Cost>& schedule, VacStats& vs, ConstraintRef& culprit)
{
    VacOptions opt;
    opt.stop_bound = ub;
    vac_lin(p, schedule, opt, &vs);
    if (!vs.last_conflict.is_none())
        culprit = vs.last_conflict;
    return p.lb() < ub;
}

class Solver {
public:
    Solver(const Cfn& p, const SearchConfig& cfg)
        : original_(p)
        , p_(p)
        , cfg_(cfg)
        , ub_(cfg.initial_ub ? std::min(*cfg.initial_ub, p.top()) : p.top())
        , start_(std::chrono::steady_clock::now())
    {
        p_.clear_trail();
        state_.weights.assign(p.num_variables(), 1);
        state_.rng.seed(cfg.seed);
        out_.best_cost = p.top();
    }

    SolveOutcome run()
    {
        const bool ok = propagate_root(p_, cfg_, ub_, out_.stats);
        state_.bool_support = out_.stats.vac.bool_support;
        ++out_.stats.nodes;
        if (ok)
            search();

        const Cost root = out_.stats.root_lb;
        if (stopped_) {
            out_.status = SolveOutcome::Status::limit_reached;
            out_.lower_bound = std::min(root, out_.best_cost);
        } else if (found_) {
            out_.status = SolveOutcome::Status::optimal;
            out_.lower_bound = out_.best_cost;
        } else {
            out_.status = SolveOutcome::Status::infeasible;
            out_.lower_bound = ub_;
        }
        out_.stats.seconds = elapsed();
        return out_;
    }

private:
    double elapsed() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool limit_hit()
    {
        if (cfg_.node_limit > 0 && out_.stats.nodes >= cfg_.node_limit)
            stopped_ = true;
        if (cfg_.time_limit > 0 && elapsed() >= cfg_.time_limit)
            stopped_ = true;
        return stopped_;
    }

    void bump(ConstraintRef c)
    {
        switch (c.kind) {
        case ConstraintRef::Kind::table:
            ++state_.weights[p_.binary(c.index).x];
            ++state_.weights[p_.binary(c.index).y];
            break;
        case ConstraintRef::Kind::linear:
            for (int var : p_.linear(c.index).scope)
                ++state_.weights[var];
            break;
        case ConstraintRef::Kind::unary:
            ++state_.weights[c.index];
            break;
        case ConstraintRef::Kind::none:
            break;
        }
    }

    // Propagates a non-root node; bumps dom/wdeg weights on failure.
    bool propagate_node()
    {
        ConstraintRef culprit;
        bool ok = propagate_basic(p_, ub_, cfg_.prop, culprit);
        if (ok && cfg_.prop == PropLevel::vac_node) {
            VacStats vs;
            ok = run_vac(p_, ub_, out_.stats.schedule, vs, culprit);
            if (!vs.bool_support.empty())
                state_.bool_support = vs.bool_support;
            ok = ok && propagate_basic(p_, ub_, cfg_.prop, culprit);
        }
        if (!ok)
            bump(culprit);
        return ok;
    }

    void record_leaf()
    {
        std::vector<int> tuple(p_.num_variables());
        for (int i = 0; i < p_.num_variables(); ++i)
            tuple[i] = p_.first_value(i);
        const Cost c = assignment_cost(original_, tuple);
        if (c < ub_) {
            ub_ = c;
            out_.best_cost = c;
            out_.assignment = tuple;
            found_ = true;
        }
    }

    // Called on a propagated node.
    void search()
    {
        bool leaf = true;
        for (int i = 0; i < p_.num_variables() && leaf; ++i)
            leaf = p_.current_size(i) == 1;
        if (leaf) {
            record_leaf();
            return;
        }
        const auto [var, val] = select_decision(p_, cfg_, state_);
        const std::size_t mark = p_.trail_mark();

        p_.assign(var, val);
        child();
        p_.rollback(mark);
        if (stopped_)
            return;

        p_.remove_value(var, val);
        child();
        p_.rollback(mark);
    }

    void child()
    {
        if (limit_hit())
            return;
        ++out_.stats.nodes;
        if (!propagate_node()) {
            ++out_.stats.backtracks;
            return;
        }
        search();
    }

    const Cfn& original_;
    Cfn p_;
    SearchConfig cfg_;
    SearchState state_;
    Cost ub_;
    SolveOutcome out_;
    bool stopped_ = false;
    bool found_ = false;
    std::chrono::steady_clock::time_point start_;
};

} // namespace

std::pair<int, int> select_decision(const Cfn& p, const SearchConfig& cfg, SearchState& state)
{
    int var = -1;
    int ties = 0;
    for (int i = 0; i < p.num_variables(); ++i) {
        if (p.current_size(i) <= 1)
            continue;
        if (var < 0) {
            var = i;
            ties = 1;
            continue;
        }
        // Compare |D_i| / w_i with |D_var| / w_var without division.
        std::int64_t wi = 1;
        std::int64_t wv = 1;
        if (cfg.var == VarHeuristic::dom_wdeg && !state.weights.empty()) {
            wi = state.weights[i];
            wv = state.weights[var];
        }
        const std::int64_t lhs = static_cast<std::int64_t>(p.current_size(i)) * wv;
        const std::int64_t rhs = static_cast<std::int64_t>(p.current_size(var)) * wi;
        if (lhs < rhs) {
            var = i;
            ties = 1;
        } else if (lhs == rhs && cfg.seed != 0) {
            ++ties;
            if (std::uniform_int_distribution<int>(1, ties)(state.rng) == 1)
                var = i;
        }
    }
    VACLIN_CONTRACT(var >= 0, "select_decision: every variable is assigned");

    if (cfg.val == ValHeuristic::bool_support && var < static_cast<int>(state.bool_support.size())) {
        const int v = state.bool_support[var];
        if (v >= 0 && p.in_domain(var, v))
            return {var, v};
    }
    if (cfg.val == ValHeuristic::min_value)
        return {var, p.first_value(var)};
    int best = -1;
    for (int v = 0; v < p.domain_size(var); ++v)
        if (p.in_domain(var, v) && (best < 0 || p.unary(var, v) < p.unary(var, best)))
            best = v;
    return {var, best};
}

bool propagate_root(Cfn& p, const SearchConfig& cfg, Cost ub, SearchStats& stats)
{
    stats.schedule = make_schedule(p, cfg.theta_start);
    ConstraintRef culprit;
    bool ok = enforce_nc(p, ub);
    stats.root_lb_nc = p.lb();
    ok = ok && propagate_basic(p, ub, cfg.prop, culprit);
    stats.root_lb_lp = p.lb();
    if (ok && (cfg.prop == PropLevel::vac_root || cfg.prop == PropLevel::vac_node)) {
        ok = run_vac(p, ub, stats.schedule, stats.vac, culprit);
        ok = ok && propagate_basic(p, ub, cfg.prop, culprit);
    }
    stats.root_lb_vac = p.lb();
    stats.root_lb = p.lb();
    return ok;
}

SolveOutcome branch_and_bound(const Cfn& p, const SearchConfig& cfg)
{
    Solver s(p, cfg);
    return s.run();
}

} // namespace vaclin
