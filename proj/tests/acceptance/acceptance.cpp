// Acceptance suite: one PASS/FAIL line per criterion. Pass a criterion number to run only that one.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "vaclin/io.hpp"
#include "vaclin/mckp.hpp"
#include "vaclin/oracle.hpp"
#include "vaclin/search.hpp"
#include "vaclin/vac.hpp"

using namespace vaclin;
using namespace vaclin::testing;

namespace {

struct Result {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure messages of a criterion.
class Report {
public:
    void fail(const std::string& msg)
    {
        ++failures_;
        if (failures_ <= 3)
            msgs_ += (msgs_.empty() ? "" : "; ") + msg;
    }
    void note(const std::string& msg) { notes_ += (notes_.empty() ? "" : "; ") + msg; }
    [[nodiscard]] bool ok() const { return failures_ == 0; }
    [[nodiscard]] Result result() const
    {
        std::string d = notes_;
        if (failures_ > 0)
            d += (d.empty() ? "" : "; ") + std::to_string(failures_) + " failure(s): " + msgs_;
        return {ok(), d};
    }

private:
    int failures_ = 0;
    std::string msgs_;
    std::string notes_;
};

bool all_unary_zero(const Cfn& p)
{
    for (int i = 0; i < p.num_variables(); ++i)
        for (int v = 0; v < p.domain_size(i); ++v)
            if (p.in_domain(i, v) && p.unary(i, v) != 0)
                return false;
    return true;
}

bool equivalent(const Cfn& a, const Cfn& b)
{
    const auto eq = oracle::check_reparam_equiv(a, b);
    return eq.has_value() && *eq;
}

// ---------------------------------------------------------------------------------------------

Result chain_example()
{
    Report rep;
    const Cfn original = load_cfn("ex1.cfn");
    Cfn p = original;
    if (p.lb() != 0)
        rep.fail("initial c0 is not 0");
    const Cost gain = vac_iterate(p, 1);
    if (gain != 1 || p.lb() != 1)
        rep.fail("c0 is " + std::to_string(p.lb()) + ", expected 1");
    if (!equivalent(original, p))
        rep.fail("final state is not equivalent");
    if (!all_unary_zero(p))
        rep.fail("some unary cost is nonzero");
    return rep.result();
}

Result three_constraint_example()
{
    Report rep;
    const Cfn original = load_cfn("ex2.cfn");
    Cfn direct = original;
    Cost direct_gain = 0;
    for (int k = 0; k < direct.num_linear(); ++k)
        direct_gain += direct_lin_propagate(direct, k);
    if (direct_gain != 0)
        rep.fail("direct propagation gained " + std::to_string(direct_gain));

    Cfn p = original;
    const Cost gain = vac_lin(p, {1});
    if (gain != 1)
        rep.fail("VAC gain " + std::to_string(gain) + ", expected 1");
    if (!equivalent(original, p))
        rep.fail("final state is not equivalent");

    // Expected final deltas, reported only.
    struct Expect {
        int k, pos, val;
        Cost delta;
    };
    const Expect expected[] = {{0, 0, 0, 1}, {0, 1, 1, -1}, {1, 0, 1, 1}, {1, 2, 0, 1}, {1, 1, 1, -1},
        {2, 0, 0, 1}, {2, 1, 1, 1}};
    int mismatches = 0;
    for (const Expect& e : expected)
        mismatches += p.linear(e.k).deltas[e.pos][e.val] != e.delta;
    mismatches += p.linear(2).delta0 != 1;
    mismatches += p.unary(2, 0) != 2;
    mismatches += p.unary(5, 0) != 1;
    rep.note(mismatches == 0 ? "final delta pattern matches"
                             : "final delta pattern differs in " + std::to_string(mismatches) + " entries (informational)");
    return rep.result();
}

Result mckp_certificates()
{
    Report rep;
    Rng rng(1001);
    int infeasible = 0;
    for (int i = 0; i < 1000; ++i) {
        const MckpInstance inst = random_mckp(rng);
        const LpResult r = solve_mckp_lp(inst);
        const auto o = oracle::brute_force_mckp(inst);
        if (!o) {
            rep.fail("oracle refused instance " + std::to_string(i));
            continue;
        }
        infeasible += !o->feasible;
        if (r.feasible != o->feasible) {
            rep.fail("feasibility differs on instance " + std::to_string(i));
            continue;
        }
        if (r.feasible && r.z_star != o->z)
            rep.fail("instance " + std::to_string(i) + ": z* " + r.z_star.str() + " vs " + o->z.str());
        if (!check_lp_certificate(inst, r))
            rep.fail("certificate rejected on instance " + std::to_string(i));
        if (r.feasible)
            for (std::size_t c = 0; c < inst.classes.size(); ++c)
                for (std::size_t it = 0; it < inst.classes[c].items.size(); ++it)
                    if (inst.usable(c, it) && r.rc[c][it] < Rational(0))
                        rep.fail("negative reduced cost on instance " + std::to_string(i));
    }
    rep.note(std::to_string(infeasible) + "/1000 infeasible");
    return rep.result();
}

Result reduced_cost_bound()
{
    Report rep;
    Rng rng(1001);
    std::int64_t checks = 0;
    for (int i = 0; i < 300; ++i) {
        const MckpInstance inst = random_mckp(rng);
        const LpResult r = solve_mckp_lp(inst);
        if (!r.feasible)
            continue;
        const std::size_t n = inst.classes.size();
        std::vector<std::size_t> choice(n, 0);
        // Every tuple where all classes but `fixed` use usable items and `fixed` uses `item`.
        for (std::size_t fixed = 0; fixed < n; ++fixed) {
            for (std::size_t item = 0; item < inst.classes[fixed].items.size(); ++item) {
                std::function<void(std::size_t)> rec = [&](std::size_t c) {
                    if (c == n) {
                        std::int64_t w = 0;
                        Rational cost = -inst.delta0;
                        for (std::size_t j = 0; j < n; ++j) {
                            w += inst.classes[j].items[choice[j]].weight;
                            cost += inst.classes[j].items[choice[j]].cost;
                        }
                        if (w < inst.capacity)
                            return;
                        ++checks;
                        if (cost - r.z_star < r.rc[fixed][item])
                            rep.fail("instance " + std::to_string(i) + ": cost - z* below rc");
                        return;
                    }
                    if (c == fixed) {
                        choice[c] = item;
                        rec(c + 1);
                        return;
                    }
                    for (std::size_t it = 0; it < inst.classes[c].items.size(); ++it) {
                        if (!inst.usable(c, it))
                            continue;
                        choice[c] = it;
                        rec(c + 1);
                    }
                };
                rec(0);
            }
        }
    }
    rep.note(std::to_string(checks) + " tuple checks");
    return rep.result();
}

// ---------------------------------------------------------------------------------------------
// Random networks shared by criteria 5, 6 and 8.

struct SuiteInstance {
    Cfn cfn;
    Cost theta;
};

std::vector<SuiteInstance> filtering_suite()
{
    Rng rng(5005);
    std::vector<SuiteInstance> out;
    for (int i = 0; i < 500; ++i)
        out.push_back({random_cfn(rng), static_cast<Cost>(1 + i % 3)});
    return out;
}

// True iff every tuple of `c` over `present` with t[pos] = val is forbidden in Bool_theta.
bool all_forbidden(const LinearConstraint& c, Cost theta, Cost top, int pos, int val,
    const std::function<bool(int, int)>& present)
{
    std::vector<int> t(c.scope.size(), 0);
    bool ok = true;
    std::function<void(std::size_t)> rec = [&](std::size_t q) {
        if (!ok)
            return;
        if (q == c.scope.size()) {
            const Cost cost = linear_tuple_cost(c, t, top);
            std::int64_t w = 0;
            for (std::size_t j = 0; j < t.size(); ++j)
                w += c.weights[j][t[j]];
            if (w >= c.capacity && cost < theta)
                ok = false;
            return;
        }
        const int var = c.scope[q];
        for (int v = 0; v < static_cast<int>(c.weights[q].size()); ++v) {
            if (static_cast<int>(q) == pos ? v != val : !present(var, v))
                continue;
            t[q] = v;
            rec(q + 1);
        }
    };
    rec(0);
    return ok;
}

bool in_set(const std::vector<VarVal>& s, int var, int val)
{
    return std::find(s.begin(), s.end(), VarVal{var, val}) != s.end();
}

Result filtering_soundness()
{
    Report rep;
    std::int64_t removals = 0;
    std::int64_t explanations = 0;
    std::int64_t conflicts = 0;
    auto suite = filtering_suite();
    for (std::size_t idx = 0; idx < suite.size(); ++idx) {
        Cfn p = suite[idx].cfn;
        const Cost theta = suite[idx].theta;
        if (!enforce_nc(p))
            continue;
        BoolView view(p, theta);
        if (view.initial_wipeout() >= 0)
            continue;
        const std::string tag = "instance " + std::to_string(idx);
        auto copy_minus = [&](const std::vector<VarVal>& e) {
            return [&view, e](int var, int val) { return view.in_copy(var, val) && !in_set(e, var, val); };
        };

        bool changed = true;
        bool stop = false;
        while (changed && !stop) {
            changed = false;
            for (int k = 0; k < p.num_binary() && !stop; ++k) {
                const BinaryTable& tb = p.binary(k);
                std::vector<std::vector<bool>> before(static_cast<std::size_t>(p.num_variables()));
                for (int i = 0; i < p.num_variables(); ++i)
                    for (int v = 0; v < p.domain_size(i); ++v)
                        before[i].push_back(view.alive(i, v));
                const std::size_t q0 = view.queue().size();
                const auto rem = table_revise(k, view);
                changed |= !rem.empty();
                for (const VarVal& r : rem) {
                    ++removals;
                    const int batch = view.removal(r.var, r.val).batch;
                    const int other = tb.other(r.var);
                    for (int u = 0; u < p.domain_size(other); ++u) {
                        bool present = before[other][u];
                        if (present && !view.alive(other, u)) {
                            const int ord = view.order(other, u);
                            present = ord >= static_cast<int>(q0) && view.queue()[ord].batch >= batch;
                        }
                        if (present && tb.at_from(r.var, r.val, u) < theta)
                            rep.fail(tag + ": table removal of " + to_string(r) + " had a support");
                    }
                    const auto e = table_explain(k, r, view);
                    ++explanations;
                    for (int u = 0; u < p.domain_size(other); ++u)
                        if (view.in_copy(other, u) && !in_set(e, other, u) && tb.at_from(r.var, r.val, u) < theta)
                            rep.fail(tag + ": table explanation of " + to_string(r) + " misses a support");
                    if (view.size(r.var) == 0)
                        stop = true;
                }
            }
            for (int k = 0; k < p.num_linear() && !stop; ++k) {
                const LinearConstraint& c = p.linear(k);
                const FilterOutcome out = lin_filter(k, view);
                auto alive = [&view](int var, int val) { return view.alive(var, val); };
                if (out.conflict()) {
                    ++conflicts;
                    if (!all_forbidden(c, theta, p.top(), -1, -1, alive))
                        rep.fail(tag + ": conflict with an allowed tuple");
                    if (!all_forbidden(c, theta, p.top(), -1, -1, copy_minus(out.explanation)))
                        rep.fail(tag + ": conflict explanation does not re-derive the conflict");
                    ++explanations;
                    stop = true;
                    break;
                }
                for (const auto& r : out.removals) {
                    ++removals;
                    if (!all_forbidden(c, theta, p.top(), c.position_of(r.vv.var), r.vv.val, alive))
                        rep.fail(tag + ": removal of " + to_string(r.vv) + " has an allowed tuple");
                }
                const int batch = view.next_batch();
                for (const auto& r : out.removals) {
                    if (!view.alive(r.vv.var, r.vv.val))
                        continue;
                    view.remove(r.vv, ConstraintRef::linear(k), batch);
                    changed = true;
                    const LinExplanation e = lin_explain(k, r.vv, view);
                    ++explanations;
                    if (!all_forbidden(c, theta, p.top(), c.position_of(r.vv.var), r.vv.val, copy_minus(e.explanation)))
                        rep.fail(tag + ": explanation of " + to_string(r.vv) + " does not re-derive it");
                    if (view.size(r.vv.var) == 0) {
                        stop = true;
                        break;
                    }
                }
            }
        }
    }
    rep.note(std::to_string(removals) + " removals, " + std::to_string(explanations) + " explanations, "
        + std::to_string(conflicts) + " linear conflicts");
    return rep.result();
}

Result vac_soundness_progress()
{
    Report rep;
    std::int64_t passes = 0;
    std::int64_t stalls = 0;
    auto suite = filtering_suite();
    for (std::size_t idx = 0; idx < suite.size(); ++idx) {
        const Cfn& original = suite[idx].cfn;
        const std::string tag = "instance " + std::to_string(idx);
        const auto opt = oracle::brute_force_optimum(original);
        if (!opt) {
            rep.fail(tag + ": oracle refused");
            continue;
        }

        Cfn whole = original;
        if (enforce_nc(whole))
            vac_lin(whole);
        if (whole.lb() > *opt)
            rep.fail(tag + ": c0 " + std::to_string(whole.lb()) + " above optimum " + std::to_string(*opt));

        // The same phases driven by hand to observe every pass 3.
        Cfn p = original;
        if (!enforce_nc(p))
            continue;
        for (Cost theta : make_schedule(p)) {
            for (int iter = 0; iter < 1000 && !p.infeasible(); ++iter) {
                Pass1Result r = vac_pass1(p, theta);
                if (!r.has_conflict())
                    break;
                const VacTrace t = vac_pass2(p, r);
                if (t.lambda < 1) {
                    ++stalls;
                    break;
                }
                const Cfn before = p;
                const Cost gain = vac_pass3(p, t);
                ++passes;
                if (p.lb() <= before.lb() || gain != t.lambda)
                    rep.fail(tag + ": conflict with lambda >= 1 did not raise c0 by lambda");
                if (!equivalent(before, p))
                    rep.fail(tag + ": pass 3 broke equivalence");
                const std::string neg = nonnegativity_failure(p);
                if (!neg.empty())
                    rep.fail(tag + ": " + neg);
                enforce_nc(p);
            }
        }
        if (p.lb() > *opt)
            rep.fail(tag + ": c0 above optimum after manual passes");
    }
    rep.note(std::to_string(passes) + " applied passes, " + std::to_string(stalls) + " stalls");
    return rep.result();
}

Result end_to_end()
{
    Report rep;
    Rng rng(7007);
    CfnShape shape;
    shape.max_vars = 8;
    shape.max_tables = 2;
    shape.max_linear = 2;
    std::vector<Cfn> instances;
    instances.push_back(load_cfn("ex1.cfn"));
    instances.push_back(load_cfn("ex2.cfn"));
    for (int i = 0; i < 300; ++i)
        instances.push_back(random_cfn(rng, shape));

    const PropLevel levels[] = {PropLevel::nc, PropLevel::lp, PropLevel::vac_root, PropLevel::vac_node};
    int infeasible = 0;
    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        const Cfn& p = instances[idx];
        const std::string tag = "instance " + std::to_string(idx);
        const auto opt = oracle::brute_force_optimum(p);
        if (!opt) {
            rep.fail(tag + ": oracle refused");
            continue;
        }
        infeasible += *opt >= p.top();
        for (PropLevel l : levels) {
            SearchConfig cfg;
            cfg.prop = l;
            const SolveOutcome o = branch_and_bound(p, cfg);
            const Cost got = o.status == SolveOutcome::Status::infeasible ? p.top() : o.best_cost;
            if (o.status == SolveOutcome::Status::limit_reached || got != *opt)
                rep.fail(tag + " (" + to_string(l) + "): got " + std::to_string(got) + ", optimum "
                    + std::to_string(*opt));
            else if (!o.assignment.empty() && assignment_cost(p, o.assignment) != got)
                rep.fail(tag + " (" + to_string(l) + "): incumbent cost mismatch");
        }
    }
    rep.note(std::to_string(instances.size()) + " instances, " + std::to_string(infeasible) + " infeasible");
    return rep.result();
}

Result bound_dominance()
{
    Report rep;
    auto suite = filtering_suite();
    double sum_nc = 0, sum_lp = 0, sum_vac = 0;
    double fin_nc = 0, fin_lp = 0, fin_vac = 0;
    int finite = 0;
    int strict = 0;
    for (const auto& s : suite) {
        Cost lb[3];
        const PropLevel levels[] = {PropLevel::nc, PropLevel::lp, PropLevel::vac_root};
        for (int j = 0; j < 3; ++j) {
            Cfn p = s.cfn;
            SearchConfig cfg;
            cfg.prop = levels[j];
            SearchStats stats;
            propagate_root(p, cfg, p.top(), stats);
            lb[j] = std::min(p.lb(), p.top());
        }
        if (lb[2] < s.cfn.top()) {
            ++finite;
            fin_nc += static_cast<double>(lb[0]);
            fin_lp += static_cast<double>(lb[1]);
            fin_vac += static_cast<double>(lb[2]);
        }
        sum_nc += static_cast<double>(lb[0]);
        sum_lp += static_cast<double>(lb[1]);
        sum_vac += static_cast<double>(lb[2]);
        strict += lb[2] > lb[1];
    }
    const double n = static_cast<double>(suite.size());
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean nc %.3f, lp %.3f, vac-root %.3f; vac-root > lp on %d", sum_nc / n,
        sum_lp / n, sum_vac / n, strict);
    rep.note(buf);
    const double f = std::max(finite, 1);
    std::snprintf(buf, sizeof buf, "without top bounds (%d): nc %.3f, lp %.3f, vac-root %.3f", finite, fin_nc / f,
        fin_lp / f, fin_vac / f);
    rep.note(buf);
    if (!(sum_vac >= sum_lp && sum_lp >= sum_nc))
        rep.fail("means are not ordered");

    Cfn ex2_lp = load_cfn("ex2.cfn");
    Cfn ex2_vac = ex2_lp;
    SearchConfig cfg;
    SearchStats stats;
    cfg.prop = PropLevel::lp;
    propagate_root(ex2_lp, cfg, ex2_lp.top(), stats);
    cfg.prop = PropLevel::vac_root;
    propagate_root(ex2_vac, cfg, ex2_vac.top(), stats);
    if (ex2_vac.lb() <= ex2_lp.lb())
        rep.fail("three-constraint example does not separate vac-root from lp");
    if (strict == 0 && ex2_vac.lb() <= ex2_lp.lb())
        rep.fail("no strict witness");
    return rep.result();
}

Result opb_pipeline()
{
    Report rep;
    const std::filesystem::path dir = std::filesystem::path(VACLIN_TEST_DATA) / "opb";
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".opb")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() != 20)
        rep.fail("expected 20 files, found " + std::to_string(files.size()));
    int infeasible = 0;
    int refused = 0;
    for (const auto& f : files) {
        const std::string name = f.filename().string();
        try {
            const OpbProblem prob = parse_opb(read_data("opb/" + name));
            if (prob.num_vars > 12) {
                rep.fail(name + ": more than 12 variables");
                continue;
            }
            const OpbModel m = opb_to_cfn(prob);
            const auto brute = oracle::brute_force_opb(prob);
            if (!brute) {
                rep.fail(name + ": oracle refused");
                continue;
            }
            infeasible += !brute->feasible;
            const SolveOutcome o = branch_and_bound(m.cfn);
            if (brute->feasible) {
                if (o.status != SolveOutcome::Status::optimal || o.best_cost + m.offset != brute->value)
                    rep.fail(name + ": solver " + std::to_string(o.best_cost + m.offset) + ", brute force "
                        + std::to_string(brute->value));
            } else if (o.status != SolveOutcome::Status::infeasible) {
                rep.fail(name + ": infeasible problem not detected");
            }

            const Cfn back = parse_native(write_native(m.cfn));
            if (!equivalent(m.cfn, back))
                rep.fail(name + ": native round trip changed costs");

            Cfn propagated = m.cfn;
            SearchStats stats;
            if (propagate_root(propagated, SearchConfig{}, propagated.top(), stats)) {
                // Folding deltas can be impossible without delta syntax; the writer then refuses.
                try {
                    const Cfn folded = parse_native(write_native(propagated));
                    if (!equivalent(m.cfn, folded))
                        rep.fail(name + ": round trip after propagation changed costs");
                } catch (const std::domain_error&) {
                    ++refused;
                }
            }
        } catch (const std::exception& e) {
            rep.fail(name + ": " + e.what());
        }
    }
    rep.note(std::to_string(files.size()) + " files, " + std::to_string(infeasible) + " infeasible, "
        + std::to_string(refused) + " propagated writes refused");
    return rep.result();
}

struct Criterion {
    const char* name;
    double limit_s;
    Result (*run)();
};

const Criterion kCriteria[] = {
    {"chain example golden", 1, chain_example},
    {"three-constraint example golden", 1, three_constraint_example},
    {"mckp certificates", 30, mckp_certificates},
    {"reduced-cost bound", 30, reduced_cost_bound},
    {"filtering soundness", 60, filtering_soundness},
    {"vac soundness and progress", 120, vac_soundness_progress},
    {"end-to-end optimality", 120, end_to_end},
    {"lower-bound dominance", 120, bound_dominance},
    {"opb pipeline", 30, opb_pipeline},
};

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    if (argc > 1)
        only = std::atoi(argv[1]);
    int failed = 0;
    const int n = static_cast<int>(std::size(kCriteria));
    for (int i = 0; i < n; ++i) {
        if (only != 0 && only != i + 1)
            continue;
        const Criterion& c = kCriteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            r.pass = false;
            r.detail += (r.detail.empty() ? "" : "; ") + std::string("over time limit");
        }
        failed += !r.pass;
        std::printf("criterion %d %-34s %s  %.2fs (limit %.0fs)%s%s\n", i + 1, c.name, r.pass ? "PASS" : "FAIL",
            secs, c.limit_s, r.detail.empty() ? "" : "  ", r.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
