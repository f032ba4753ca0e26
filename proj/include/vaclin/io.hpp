#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vaclin/cfn.hpp"

namespace vaclin {

/// Syntax or range error in an input file. line and column are 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column);
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Native text format:
///
///     CFN <n> <top>
///     VAR <index> <domain_size>
///     UNARY <var> <cost_0> ... <cost_{d-1}>
///     BINARY <var1> <var2> <d1*d2 costs, row-major>
///     LINEAR <arity> <var_1> ... <var_arity> <C>
///       then per scope variable: <var> <k> followed by k pairs <value> <weight>
///     LB <c0>
///
/// Tokens are whitespace separated; '#' starts a comment running to the end of the line.
Cfn parse_native(std::string_view text);

/// Writes `p` in the native format. Delta costs of linear constraints are folded into unary costs
/// and LB; values outside the current domains are written with cost top. Throws std::domain_error
/// when the folding cannot be done with non-negative costs.
std::string write_native(const Cfn& p);

struct OpbTerm {
    std::int64_t coef = 0;
    int var = 0;           ///< 0-based
    bool negated = false;  ///< ~x
};

struct OpbConstraint {
    std::vector<OpbTerm> terms;
    bool equality = false; ///< '=' instead of '>='
    std::int64_t rhs = 0;
};

/// Pseudo-Boolean problem in the OPB subset: linear objective to minimize, '>=' and '=' constraints.
struct OpbProblem {
    int num_vars = 0;
    std::vector<OpbTerm> objective;
    std::vector<OpbConstraint> constraints;
};

OpbProblem parse_opb(std::string_view text);

/// A CFN equivalent to an OPB problem: objective(x) = cost(x) + offset for every feasible x.
/// Variable j has domain {0, 1} with value 1 meaning x_{j+1} true.
struct OpbModel {
    Cfn cfn;
    std::int64_t offset = 0;
};

OpbModel opb_to_cfn(const OpbProblem& problem);

/// Flat key=value record, one entry per line, keys in insertion order.
class StatsRecord {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, double value);
    [[nodiscard]] std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Entry point of the command line tool. Returns the process exit code.
int cli_main(int argc, char** argv);

} // namespace vaclin
