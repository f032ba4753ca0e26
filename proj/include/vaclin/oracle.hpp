#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vaclin/cfn.hpp"
#include "vaclin/io.hpp"
#include "vaclin/mckp.hpp"
#include "vaclin/rational.hpp"

// Brute-force references for tests. They only read the model data and never call propagation code.
// Every oracle refuses (returns std::nullopt) instead of sampling when the enumeration is too large.

namespace vaclin::oracle {

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

/// Minimum total cost over all complete assignments within the current domains (top when none is
/// finite).
std::optional<Cost> brute_force_optimum(const Cfn& p, std::uint64_t budget = kDefaultBudget);

/// Same, also returning one optimal assignment (empty when the optimum is top).
struct OptimumWitness {
    Cost cost = 0;
    std::vector<int> assignment;
};
std::optional<OptimumWitness> brute_force_witness(const Cfn& p, std::uint64_t budget = kDefaultBudget);

/// Independent cost evaluator used by the oracles.
Cost evaluate(const Cfn& p, const std::vector<int>& tuple);

struct MckpOptimum {
    bool feasible = false;
    Rational z;
};
/// LP optimum by vertex enumeration: every integer choice, and every choice where one class is split
/// between two of its items with the capacity constraint tight.
std::optional<MckpOptimum> brute_force_mckp(const MckpInstance& inst, std::uint64_t budget = kDefaultBudget);

/// True iff both networks give the same cost to every complete assignment over the domains of
/// `before`. Values missing from the domains of `after` count as top there.
std::optional<bool> check_reparam_equiv(const Cfn& before, const Cfn& after, std::uint64_t budget = kDefaultBudget);

struct OpbOptimum {
    bool feasible = false;
    std::int64_t value = 0;
    std::vector<int> assignment;
};
/// Minimum of the objective over all 0/1 assignments satisfying every constraint.
std::optional<OpbOptimum> brute_force_opb(const OpbProblem& problem, std::uint64_t budget = kDefaultBudget);

} // namespace vaclin::oracle
