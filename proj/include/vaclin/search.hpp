#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vaclin/boolview.hpp"
#include "vaclin/cfn.hpp"
#include "vaclin/vac.hpp"

namespace vaclin {

enum class PropLevel : std::uint8_t { nc, lp, vac_root, vac_node };
enum class VarHeuristic : std::uint8_t { min_domain, dom_wdeg };
enum class ValHeuristic : std::uint8_t { min_value, bool_support };

std::string to_string(PropLevel level);
std::optional<PropLevel> parse_prop_level(const std::string& name);

struct SearchConfig {
    PropLevel prop = PropLevel::vac_root;
    VarHeuristic var = VarHeuristic::dom_wdeg;
    ValHeuristic val = ValHeuristic::bool_support;
    std::optional<Cost> initial_ub;      ///< solutions must cost strictly less
    std::optional<Cost> theta_start;
    double time_limit = 0;               ///< seconds, 0 = none
    std::int64_t node_limit = 0;         ///< 0 = none
    std::uint64_t seed = 0;              ///< 0 = ties broken by index
};

struct SearchStats {
    std::int64_t nodes = 0;
    std::int64_t backtracks = 0;
    Cost root_lb = 0;      ///< c0 after root propagation
    Cost root_lb_nc = 0;   ///< stage bounds at the root
    Cost root_lb_lp = 0;
    Cost root_lb_vac = 0;
    std::vector<Cost> schedule;
    VacStats vac;
    double seconds = 0;
};

struct SolveOutcome {
    enum class Status : std::uint8_t { optimal, infeasible, limit_reached };
    Status status = Status::limit_reached;
    Cost best_cost = 0;             ///< top when no solution was found
    std::vector<int> assignment;
    Cost lower_bound = 0;
    SearchStats stats;
};

std::string to_string(SolveOutcome::Status s);

/// Dom/wdeg weights and the last Bool supports, shared by all nodes of one search.
struct SearchState {
    std::vector<std::int64_t> weights;
    std::vector<int> bool_support;
    std::mt19937_64 rng;
};

/// Picks the branching variable and value. Requires a variable with more than one value.
std::pair<int, int> select_decision(const Cfn& p, const SearchConfig& cfg, SearchState& state);

/// Root propagation only: NC, then the linear stage, then VAC as configured. Leaves `p` propagated
/// and fills the stage bounds of `stats`. Returns false if the root is infeasible below `ub`.
bool propagate_root(Cfn& p, const SearchConfig& cfg, Cost ub, SearchStats& stats);

/// Depth-first branch and bound with binary branching (x = v, then x != v).
SolveOutcome branch_and_bound(const Cfn& p, const SearchConfig& cfg = {});

} // namespace vaclin
