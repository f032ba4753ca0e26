#include "vaclin/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

namespace vaclin {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + what : what)
    , line_(line)
    , column_(column)
{
}

namespace {

struct Token {
    std::string text;
    int line = 0;
    int column = 0;
};

// Whitespace-separated tokens. `comment` starts a comment to the end of the line when it begins a
// token (native) or a line (OPB). Characters in `separators` form tokens of their own.
std::vector<Token> tokenize(std::string_view text, char comment, bool comment_at_line_start, std::string_view separators)
{
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    bool line_start = true;
    std::size_t i = 0;
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == '\n') {
            ++line;
            col = 1;
            line_start = true;
            ++i;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (ch == comment && (!comment_at_line_start || line_start)) {
            while (i < text.size() && text[i] != '\n')
                ++i;
            continue;
        }
        line_start = false;
        Token t{{}, line, col};
        if (separators.find(ch) != std::string_view::npos) {
            t.text = std::string(1, ch);
            ++i;
            ++col;
        } else {
            while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r' && text[i] != '\n'
                && separators.find(text[i]) == std::string_view::npos) {
                t.text += text[i];
                ++i;
                ++col;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens)
        : tokens_(std::move(tokens))
    {
    }

    [[nodiscard]] bool done() const { return pos_ >= tokens_.size(); }
    const Token& peek() const
    {
        if (done())
            fail_at_end("unexpected end of input");
        return tokens_[pos_];
    }
    const Token& next()
    {
        const Token& t = peek();
        ++pos_;
        return t;
    }

    std::int64_t integer(const char* what)
    {
        const Token& t = next();
        const auto v = to_int(t.text);
        if (!v)
            throw ParseError(std::string("expected integer ") + what + ", got '" + t.text + "'", t.line, t.column);
        return *v;
    }

    [[noreturn]] void fail_at_end(const std::string& what) const
    {
        if (tokens_.empty())
            throw ParseError(what, 1, 1);
        const Token& last = tokens_.back();
        throw ParseError(what, last.line, last.column + static_cast<int>(last.text.size()));
    }

    static std::optional<std::int64_t> to_int(std::string_view s)
    {
        if (!s.empty() && s.front() == '+')
            s.remove_prefix(1);
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            return std::nullopt;
        return v;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

[[noreturn]] void fail(const Token& t, const std::string& what)
{
    throw ParseError(what, t.line, t.column);
}

struct PendingBinary {
    int x, y;
    std::vector<Cost> costs;
};
struct PendingLinear {
    std::vector<int> scope;
    std::vector<std::vector<std::int64_t>> weights;
    std::int64_t capacity;
};

} // namespace

Cfn parse_native(std::string_view text)
{
    TokenStream ts(tokenize(text, '#', false, ""));
    if (ts.done())
        ts.fail_at_end("empty input, expected header 'CFN <n> <top>'");
    const Token& head = ts.next();
    if (head.text != "CFN")
        fail(head, "expected header 'CFN <n> <top>'");
    const Token& n_tok = ts.peek();
    const std::int64_t n = ts.integer("variable count");
    if (n < 0 || n > 10'000'000)
        fail(n_tok, "variable count out of range");
    const Token& top_tok = ts.peek();
    const Cost top = ts.integer("top");
    if (top < 1 || top > kMaxTop)
        fail(top_tok, "top must be in [1, 2^50]");

    std::vector<int> domain(static_cast<std::size_t>(n), 0);
    std::vector<std::optional<std::vector<Cost>>> unary(static_cast<std::size_t>(n));
    std::vector<PendingBinary> binaries;
    std::vector<PendingLinear> linears;
    std::optional<Cost> lb;

    auto read_var = [&](const char* what) {
        const Token& t = ts.peek();
        const std::int64_t v = ts.integer(what);
        if (v < 0 || v >= n)
            fail(t, "variable index " + t.text + " out of range");
        if (domain[v] == 0)
            fail(t, "variable " + t.text + " used before its VAR declaration");
        return static_cast<int>(v);
    };
    auto read_cost = [&]() {
        const Token& t = ts.peek();
        const std::int64_t c = ts.integer("cost");
        if (c < 0 || c > top)
            fail(t, "cost " + t.text + " outside [0, top]");
        return c;
    };

    while (!ts.done()) {
        const Token& kw = ts.next();
        if (kw.text == "VAR") {
            const Token& t = ts.peek();
            const std::int64_t v = ts.integer("variable index");
            if (v < 0 || v >= n)
                fail(t, "variable index " + t.text + " out of range");
            if (domain[v] != 0)
                fail(t, "variable " + t.text + " declared twice");
            const Token& dt = ts.peek();
            const std::int64_t d = ts.integer("domain size");
            if (d < 1 || d > 1'000'000)
                fail(dt, "domain size must be positive");
            domain[v] = static_cast<int>(d);
        } else if (kw.text == "UNARY") {
            const int v = read_var("variable index");
            if (unary[v])
                fail(kw, "second UNARY for variable " + std::to_string(v));
            std::vector<Cost> costs;
            for (int a = 0; a < domain[v]; ++a)
                costs.push_back(read_cost());
            unary[v] = std::move(costs);
        } else if (kw.text == "BINARY") {
            PendingBinary b;
            b.x = read_var("variable index");
            const Token& yt = ts.peek();
            b.y = read_var("variable index");
            if (b.x == b.y)
                fail(yt, "BINARY needs two distinct variables");
            const std::size_t count = static_cast<std::size_t>(domain[b.x]) * domain[b.y];
            for (std::size_t q = 0; q < count; ++q)
                b.costs.push_back(read_cost());
            binaries.push_back(std::move(b));
        } else if (kw.text == "LINEAR") {
            const Token& at = ts.peek();
            const std::int64_t arity = ts.integer("arity");
            if (arity < 1 || arity > n)
                fail(at, "arity out of range");
            PendingLinear lin;
            for (std::int64_t q = 0; q < arity; ++q) {
                const Token& vt = ts.peek();
                const int v = read_var("scope variable");
                if (std::find(lin.scope.begin(), lin.scope.end(), v) != lin.scope.end())
                    fail(vt, "variable repeated in LINEAR scope");
                lin.scope.push_back(v);
            }
            const Token& ct = ts.peek();
            lin.capacity = ts.integer("capacity");
            if (lin.capacity < 0)
                fail(ct, "capacity must be non-negative");
            for (int v : lin.scope) {
                const Token& vt = ts.peek();
                const int got = read_var("scope variable");
                if (got != v)
                    fail(vt, "expected weights of variable " + std::to_string(v));
                const Token& kt = ts.peek();
                const std::int64_t k = ts.integer("weight count");
                if (k < 0 || k > domain[v])
                    fail(kt, "weight count out of range");
                std::vector<std::int64_t> row(static_cast<std::size_t>(domain[v]), 0);
                std::vector<bool> seen(static_cast<std::size_t>(domain[v]), false);
                for (std::int64_t q = 0; q < k; ++q) {
                    const Token& valt = ts.peek();
                    const std::int64_t val = ts.integer("value");
                    if (val < 0 || val >= domain[v])
                        fail(valt, "value " + valt.text + " outside the domain");
                    if (seen[val])
                        fail(valt, "value " + valt.text + " listed twice");
                    seen[val] = true;
                    const Token& wt = ts.peek();
                    row[val] = ts.integer("weight");
                    if (row[val] < 0)
                        fail(wt, "weight must be non-negative");
                }
                lin.weights.push_back(std::move(row));
            }
            linears.push_back(std::move(lin));
        } else if (kw.text == "LB") {
            if (lb)
                fail(kw, "second LB line");
            lb = read_cost();
        } else {
            fail(kw, "unknown keyword '" + kw.text + "'");
        }
    }

    for (std::int64_t v = 0; v < n; ++v)
        if (domain[v] == 0)
            throw ParseError("variable " + std::to_string(v) + " has no VAR declaration", 0, 0);

    Cfn p(top);
    for (std::int64_t v = 0; v < n; ++v)
        p.add_variable(domain[v]);
    for (std::int64_t v = 0; v < n; ++v)
        if (unary[v])
            p.set_unary(static_cast<int>(v), std::move(*unary[v]));
    for (auto& b : binaries)
        p.add_binary(b.x, b.y, std::move(b.costs));
    for (auto& l : linears)
        p.add_linear(std::move(l.scope), std::move(l.weights), l.capacity);
    if (lb)
        p.set_lb(*lb);
    return p;
}

std::string write_native(const Cfn& p)
{
    const Cost top = p.top();
    const int n = p.num_variables();

    // Fold deltas into unary costs, shifting a variable up when a folded cost is negative.
    __int128 lb = p.lb();
    std::vector<std::vector<__int128>> unary(n);
    for (int i = 0; i < n; ++i) {
        unary[i].resize(p.domain_size(i));
        for (int v = 0; v < p.domain_size(i); ++v)
            unary[i][v] = p.in_domain(i, v) ? p.unary(i, v) : top;
    }
    for (int k = 0; k < p.num_linear(); ++k) {
        const LinearConstraint& c = p.linear(k);
        lb -= c.delta0;
        for (std::size_t pos = 0; pos < c.scope.size(); ++pos)
            for (std::size_t v = 0; v < c.deltas[pos].size(); ++v)
                if (unary[c.scope[pos]][v] < top)
                    unary[c.scope[pos]][v] += c.deltas[pos][v];
    }
    for (int i = 0; i < n; ++i) {
        __int128 m = 0;
        for (auto u : unary[i])
            if (u < top)
                m = std::min(m, u);
        if (m < 0) {
            for (auto& u : unary[i])
                if (u < top)
                    u -= m;
            lb += m;
        }
    }
    if (lb < 0)
        throw std::domain_error("write_native: delta costs cannot be folded into non-negative costs");

    std::ostringstream os;
    os << "CFN " << n << ' ' << top << '\n';
    for (int i = 0; i < n; ++i)
        os << "VAR " << i << ' ' << p.domain_size(i) << '\n';
    for (int i = 0; i < n; ++i) {
        if (std::all_of(unary[i].begin(), unary[i].end(), [](__int128 u) { return u == 0; }))
            continue;
        os << "UNARY " << i;
        for (auto u : unary[i])
            os << ' ' << static_cast<Cost>(std::min<__int128>(u, top));
        os << '\n';
    }
    for (int k = 0; k < p.num_binary(); ++k) {
        const BinaryTable& t = p.binary(k);
        os << "BINARY " << t.x << ' ' << t.y << '\n';
        for (int a = 0; a < t.dx; ++a) {
            for (int b = 0; b < t.dy; ++b)
                os << (b ? " " : "") << t.at(a, b);
            os << '\n';
        }
    }
    for (int k = 0; k < p.num_linear(); ++k) {
        const LinearConstraint& c = p.linear(k);
        os << "LINEAR " << c.arity();
        for (int v : c.scope)
            os << ' ' << v;
        os << ' ' << c.capacity << '\n';
        for (std::size_t pos = 0; pos < c.scope.size(); ++pos) {
            const auto& row = c.weights[pos];
            os << c.scope[pos] << ' ' << std::count_if(row.begin(), row.end(), [](auto w) { return w != 0; });
            for (std::size_t v = 0; v < row.size(); ++v)
                if (row[v] != 0)
                    os << ' ' << v << ' ' << row[v];
            os << '\n';
        }
    }
    if (lb != 0)
        os << "LB " << static_cast<Cost>(std::min<__int128>(lb, top)) << '\n';
    return os.str();
}

OpbProblem parse_opb(std::string_view text)
{
    // "* #variable= N" declares the variable count.
    OpbProblem problem;
    {
        std::size_t pos = text.find("#variable=");
        if (pos != std::string_view::npos) {
            pos += 10;
            while (pos < text.size() && text[pos] == ' ')
                ++pos;
            std::size_t end = pos;
            while (end < text.size() && text[end] >= '0' && text[end] <= '9')
                ++end;
            if (const auto v = TokenStream::to_int(text.substr(pos, end - pos)))
                problem.num_vars = static_cast<int>(*v);
        }
    }

    TokenStream ts(tokenize(text, '*', true, ";"));
    auto literal = [&](const Token& t, OpbTerm& term) {
        std::string_view s = t.text;
        term.negated = !s.empty() && s.front() == '~';
        if (term.negated)
            s.remove_prefix(1);
        if (s.size() < 2 || s.front() != 'x')
            return false;
        const auto idx = TokenStream::to_int(s.substr(1));
        if (!idx || *idx < 1 || *idx > 1'000'000)
            fail(t, "bad variable '" + t.text + "'");
        term.var = static_cast<int>(*idx - 1);
        problem.num_vars = std::max(problem.num_vars, term.var + 1);
        return true;
    };
    auto is_literal = [](const std::string& s) { return !s.empty() && (s.front() == 'x' || s.front() == '~'); };

    // Terms up to (not including) a relation or ';'.
    auto read_terms = [&]() {
        std::vector<OpbTerm> terms;
        while (!ts.done()) {
            const Token& t = ts.peek();
            if (t.text == ";" || t.text == ">=" || t.text == "=" || t.text == "<=" || t.text == ">" || t.text == "<")
                break;
            ts.next();
            OpbTerm term;
            const auto coef = TokenStream::to_int(t.text);
            if (coef) {
                term.coef = *coef;
                const Token& lt = ts.next();
                if (!literal(lt, term))
                    fail(lt, "expected literal after coefficient, got '" + lt.text + "'");
            } else if (is_literal(t.text)) {
                term.coef = 1;
                literal(t, term);
            } else {
                fail(t, "expected term, got '" + t.text + "'");
            }
            if (!ts.done() && is_literal(ts.peek().text))
                fail(ts.peek(), "nonlinear terms are not supported");
            terms.push_back(term);
        }
        return terms;
    };

    bool seen_objective = false;
    bool first = true;
    while (!ts.done()) {
        const Token& t = ts.peek();
        if (t.text == "min:" || t.text == "min") {
            if (!first || seen_objective)
                fail(t, "objective must come first");
            ts.next();
            if (t.text == "min" && ts.next().text != ":")
                fail(t, "expected 'min:'");
            seen_objective = true;
            problem.objective = read_terms();
            const Token& end = ts.next();
            if (end.text != ";")
                fail(end, "expected ';' after objective");
            first = false;
            continue;
        }
        if (t.text == "max:" || t.text == "max")
            fail(t, "only minimization objectives are supported");
        first = false;
        OpbConstraint c;
        c.terms = read_terms();
        const Token& rel = ts.next();
        if (rel.text == "=")
            c.equality = true;
        else if (rel.text != ">=")
            fail(rel, "unsupported relation '" + rel.text + "' (only '>=' and '=')");
        c.rhs = ts.integer("right-hand side");
        const Token& end = ts.next();
        if (end.text != ";")
            fail(end, "expected ';' after constraint");
        problem.constraints.push_back(std::move(c));
    }
    return problem;
}

OpbModel opb_to_cfn(const OpbProblem& problem)
{
    __int128 sum = 0;
    for (const OpbTerm& t : problem.objective)
        sum += t.coef < 0 ? -static_cast<__int128>(t.coef) : t.coef;
    if (sum + 1 > kMaxTop)
        throw std::domain_error("opb_to_cfn: objective coefficients too large");
    const Cost top = static_cast<Cost>(sum) + 1;

    OpbModel model{Cfn(top), 0};
    Cfn& p = model.cfn;
    for (int j = 0; j < problem.num_vars; ++j)
        p.add_variable(2);

    // c * lit with c < 0 equals c + |c| * (not lit).
    std::vector<std::vector<Cost>> unary(problem.num_vars, std::vector<Cost>(2, 0));
    for (const OpbTerm& t : problem.objective) {
        int value = t.negated ? 0 : 1;
        Cost c = t.coef;
        if (c < 0) {
            model.offset += c;
            c = -c;
            value = 1 - value;
        }
        unary[t.var][value] += c;
    }
    for (int j = 0; j < problem.num_vars; ++j)
        if (unary[j][0] != 0 || unary[j][1] != 0)
            p.set_unary(j, unary[j]);

    auto add_geq = [&](const std::vector<OpbTerm>& terms, std::int64_t rhs, int sign) {
        std::map<int, std::vector<std::int64_t>> rows;
        std::int64_t capacity = rhs * sign;
        for (const OpbTerm& t : terms) {
            std::int64_t c = t.coef * sign;
            int value = t.negated ? 0 : 1;
            if (c < 0) {
                capacity -= c;
                c = -c;
                value = 1 - value;
            }
            if (c == 0)
                continue;
            auto& row = rows[t.var];
            row.resize(2, 0);
            row[value] += c;
        }
        if (capacity <= 0)
            return;
        std::vector<int> scope;
        std::vector<std::vector<std::int64_t>> weights;
        for (auto& [var, row] : rows) {
            scope.push_back(var);
            weights.push_back(row);
        }
        p.add_linear(std::move(scope), std::move(weights), capacity);
    };
    for (const OpbConstraint& c : problem.constraints) {
        add_geq(c.terms, c.rhs, 1);
        if (c.equality)
            add_geq(c.terms, c.rhs, -1);
    }
    return model;
}

void StatsRecord::set(const std::string& key, const std::string& value)
{
    for (auto& e : entries_)
        if (e.first == key) {
            e.second = value;
            return;
        }
    entries_.emplace_back(key, value);
}

void StatsRecord::set(const std::string& key, double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    set(key, std::string(buf));
}

std::string StatsRecord::str() const
{
    std::string out;
    for (const auto& [k, v] : entries_)
        out += k + "=" + v + "\n";
    return out;
}

} // namespace vaclin
