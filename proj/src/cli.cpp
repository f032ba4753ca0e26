#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vaclin/io.hpp"
#include "vaclin/search.hpp"

namespace vaclin {

namespace {

struct CliOptions {
    std::string file;
    std::string format;
    std::string prop = "vac-root";
    std::optional<Cost> theta_start;
    std::optional<Cost> ub;
    double timeout = 0;
    std::int64_t nodes = 0;
    std::uint64_t seed = 0;
    std::string stats_path;
    bool lb_only = false;
};

std::string bound_text(Cost c, std::int64_t offset, Cost top)
{
    return c >= top ? "top" : std::to_string(c + offset);
}

void fill_stats(StatsRecord& rec, const SearchStats& s)
{
    rec.set("root_lb_nc", s.root_lb_nc);
    rec.set("root_lb_lp", s.root_lb_lp);
    rec.set("root_lb_vac", s.root_lb_vac);
    rec.set("root_lb", s.root_lb);
    std::string sched;
    for (Cost t : s.schedule)
        sched += (sched.empty() ? "" : ",") + std::to_string(t);
    rec.set("theta_schedule", sched);
    ThetaStats total;
    for (const ThetaStats& t : s.vac.per_theta) {
        const std::string prefix = "theta." + std::to_string(t.theta) + ".";
        rec.set(prefix + "iterations", t.iterations);
        rec.set(prefix + "gain", t.gain);
        rec.set(prefix + "stalls", t.stalls);
        total.iterations += t.iterations;
        total.gain += t.gain;
        total.stalls += t.stalls;
        total.hard_removals += t.hard_removals;
        total.soft_removals += t.soft_removals;
        total.table_removals += t.table_removals;
        total.lp_solves += t.lp_solves;
    }
    rec.set("vac_iterations", total.iterations);
    rec.set("vac_gain", total.gain);
    rec.set("vac_stalls", total.stalls);
    rec.set("hard_removals", total.hard_removals);
    rec.set("soft_removals", total.soft_removals);
    rec.set("table_removals", total.table_removals);
    rec.set("lp_solves", total.lp_solves);
    rec.set("nodes", s.nodes);
    rec.set("backtracks", s.backtracks);
    rec.set("time_s", s.seconds);
}

int run_solve(const CliOptions& o)
{
    std::ifstream in(o.file, std::ios::binary);
    if (!in) {
        std::cerr << "vaclin: cannot open " << o.file << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::string format = o.format;
    if (format.empty())
        format = o.file.size() >= 4 && o.file.substr(o.file.size() - 4) == ".opb" ? "opb" : "native";

    std::optional<Cfn> cfn;
    std::int64_t offset = 0;
    try {
        if (format == "opb") {
            OpbModel m = opb_to_cfn(parse_opb(text));
            offset = m.offset;
            cfn.emplace(std::move(m.cfn));
        } else {
            cfn.emplace(parse_native(text));
        }
    } catch (const ParseError& e) {
        std::cerr << o.file << ":" << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << o.file << ": " << e.what() << "\n";
        return 2;
    }

    SearchConfig cfg;
    cfg.prop = *parse_prop_level(o.prop);
    cfg.theta_start = o.theta_start;
    if (o.ub)
        cfg.initial_ub = *o.ub - offset;
    cfg.time_limit = o.timeout;
    cfg.node_limit = o.nodes;
    cfg.seed = o.seed;
    const Cost top = cfn->top();

    StatsRecord rec;
    rec.set("file", o.file);
    rec.set("format", format);
    rec.set("prop", o.prop);
    rec.set("top", top);
    rec.set("offset", offset);

    int code = 0;
    if (o.lb_only) {
        Cfn p = *cfn;
        SearchStats stats;
        const Cost ub = cfg.initial_ub ? std::clamp<Cost>(*cfg.initial_ub, 0, top) : top;
        propagate_root(p, cfg, ub, stats);
        std::cout << "lower_bound " << bound_text(p.lb(), offset, top) << "\n";
        fill_stats(rec, stats);
        rec.set("lower_bound", bound_text(p.lb(), offset, top));
    } else {
        const SolveOutcome out = branch_and_bound(*cfn, cfg);
        std::cout << "status " << to_string(out.status) << "\n";
        const bool found = out.best_cost < top;
        if (found)
            std::cout << "optimum " << bound_text(out.best_cost, offset, top) << "\n";
        std::cout << "lower_bound " << bound_text(out.lower_bound, offset, top) << "\n";
        if (found) {
            std::cout << "assignment";
            for (int v : out.assignment)
                std::cout << ' ' << v;
            std::cout << "\n";
        }
        fill_stats(rec, out.stats);
        rec.set("status", to_string(out.status));
        if (found)
            rec.set("optimum", bound_text(out.best_cost, offset, top));
        rec.set("lower_bound", bound_text(out.lower_bound, offset, top));
        code = out.status == SolveOutcome::Status::limit_reached ? 1 : 0;
    }

    if (!o.stats_path.empty()) {
        std::ofstream os(o.stats_path);
        if (!os) {
            std::cerr << "vaclin: cannot write " << o.stats_path << "\n";
            return 2;
        }
        os << rec.str();
    }
    return code;
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"Cost function network solver with virtual arc consistency on linear constraints"};
    app.require_subcommand(1);
    CliOptions o;
    CLI::App* solve = app.add_subcommand("solve", "Solve an instance to optimality or compute its root bound");
    solve->add_option("file", o.file, "Instance file")->required();
    solve->add_option("--format", o.format, "Input format (default: by extension)")
        ->check(CLI::IsMember({"native", "opb"}));
    solve->add_option("--prop", o.prop, "Propagation level")
        ->check(CLI::IsMember({"nc", "lp", "vac-root", "vac-node"}));
    solve->add_option("--theta-start", o.theta_start, "First threshold of the VAC schedule")
        ->check(CLI::PositiveNumber);
    solve->add_option("--ub", o.ub, "Initial upper bound: only solutions strictly below are searched");
    solve->add_option("--timeout", o.timeout, "Time limit in seconds (0 = none)")->check(CLI::NonNegativeNumber);
    solve->add_option("--nodes", o.nodes, "Node limit (0 = none)")->check(CLI::NonNegativeNumber);
    solve->add_option("--seed", o.seed, "Random tie-breaking seed (0 = by index)");
    solve->add_option("--stats", o.stats_path, "Write key=value statistics to this file");
    solve->add_flag("--lb-only", o.lb_only, "Only propagate at the root and print the lower bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return run_solve(o);
}

} // namespace vaclin
