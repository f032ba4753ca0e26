#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vaclin {

/// Integer cost. The forbidden value is the per-network constant `top`.
using Cost = std::int64_t;

/// Largest accepted value for top. Keeps sums of a few thousand costs far from overflow.
inline constexpr Cost kMaxTop = Cost{1} << 50;

/// Saturating addition: anything reaching top stays at top.
inline constexpr Cost add_cost(Cost a, Cost b, Cost top) noexcept
{
    if (a >= top || b >= top)
        return top;
    const Cost s = a + b;
    return s >= top ? top : s;
}

/// A (variable, value) pair.
struct VarVal {
    int var = -1;
    int val = -1;

    friend constexpr auto operator<=>(const VarVal&, const VarVal&) = default;
};

inline std::string to_string(VarVal vv)
{
    return "(" + std::to_string(vv.var) + "," + std::to_string(vv.val) + ")";
}

/// Thrown when an operation is called outside its contract (e.g. a cost move that would go negative).
/// It signals a bug in the caller, never a property of the input instance.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

#define VACLIN_CONTRACT(cond, msg)                                   \
    do {                                                             \
        if (!(cond))                                                 \
            throw ::vaclin::ContractViolation(std::string(msg));     \
    } while (false)

} // namespace vaclin
