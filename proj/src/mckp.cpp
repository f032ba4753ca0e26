#include "vaclin/mckp.hpp"

#include <algorithm>
#include <tuple>

namespace vaclin {

bool MckpInstance::usable(std::size_t c, std::size_t item) const
{
    const MckpClass& cls = classes[c];
    if (cls.forced)
        return static_cast<std::size_t>(*cls.forced) == item;
    return cls.items[item].allowed;
}

namespace {

struct Step {
    Rational efficiency;
    std::size_t cls;
    std::size_t index; ///< position in the class hull; the step goes from hull[index] to hull[index + 1]
};

// Lower convex hull of the usable items, starting at the cheapest one (ties: heaviest, then first).
// Only points heavier than that base matter: lighter ones cost at least as much.
std::vector<std::size_t> class_hull(const MckpInstance& inst, std::size_t c)
{
    const auto& items = inst.classes[c].items;
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (inst.usable(c, i))
            usable.push_back(i);
    if (usable.empty())
        return {};

    std::size_t base = usable.front();
    for (std::size_t i : usable) {
        const auto& a = items[i];
        const auto& b = items[base];
        if (a.cost < b.cost || (a.cost == b.cost && a.weight > b.weight))
            base = i;
    }

    std::vector<std::size_t> heavier;
    for (std::size_t i : usable)
        if (items[i].weight > items[base].weight)
            heavier.push_back(i);
    std::stable_sort(heavier.begin(), heavier.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(items[a].weight, items[a].cost) < std::tie(items[b].weight, items[b].cost);
    });

    auto slope = [&](std::size_t from, std::size_t to) {
        return (items[to].cost - items[from].cost) / Rational(items[to].weight - items[from].weight);
    };

    std::vector<std::size_t> hull{base};
    for (std::size_t i : heavier) {
        if (items[i].weight == items[hull.back()].weight)
            continue; // same weight, not cheaper (sorted by cost)
        while (hull.size() >= 2 && slope(hull[hull.size() - 2], hull.back()) >= slope(hull.back(), i))
            hull.pop_back();
        hull.push_back(i);
    }
    return hull;
}

} // namespace

LpResult solve_mckp_lp(const MckpInstance& inst)
{
    LpResult res;
    const std::size_t m = inst.classes.size();

    std::int64_t max_weight = 0;
    std::vector<std::vector<std::size_t>> hulls(m);
    for (std::size_t c = 0; c < m; ++c) {
        hulls[c] = class_hull(inst, c);
        if (hulls[c].empty())
            return res;
        std::int64_t best = 0;
        for (std::size_t i = 0; i < inst.classes[c].items.size(); ++i)
            if (inst.usable(c, i))
                best = std::max(best, inst.classes[c].items[i].weight);
        max_weight += best;
    }
    if (max_weight < inst.capacity)
        return res;

    res.feasible = true;
    std::vector<Step> steps;
    std::int64_t weight = 0;
    for (std::size_t c = 0; c < m; ++c) {
        const auto& items = inst.classes[c].items;
        const auto& h = hulls[c];
        weight += items[h[0]].weight;
        for (std::size_t s = 0; s + 1 < h.size(); ++s) {
            const auto& from = items[h[s]];
            const auto& to = items[h[s + 1]];
            steps.push_back({(to.cost - from.cost) / Rational(to.weight - from.weight), c, s});
        }
    }
    std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) {
        return std::tie(a.efficiency, a.cls, a.index) < std::tie(b.efficiency, b.cls, b.index);
    });

    // position[c] = index in hull of the item currently chosen; a fractional step is kept aside.
    std::vector<std::size_t> position(m, 0);
    std::optional<std::size_t> split_class;
    Rational split_fraction;
    for (const Step& s : steps) {
        if (weight >= inst.capacity)
            break;
        const auto& items = inst.classes[s.cls].items;
        const auto& from = items[hulls[s.cls][s.index]];
        const auto& to = items[hulls[s.cls][s.index + 1]];
        const std::int64_t dw = to.weight - from.weight;
        res.y_cc = s.efficiency;
        if (weight + dw <= inst.capacity) {
            weight += dw;
            position[s.cls] = s.index + 1;
        } else {
            split_class = s.cls;
            split_fraction = Rational(inst.capacity - weight, dw);
            weight = inst.capacity;
        }
    }

    res.x.resize(m);
    res.y.resize(m);
    res.rc.resize(m);
    res.z_star = -inst.delta0;
    for (std::size_t c = 0; c < m; ++c) {
        const auto& items = inst.classes[c].items;
        res.x[c].assign(items.size(), Rational(0));
        const std::size_t cur = hulls[c][position[c]];
        if (split_class == c) {
            const std::size_t next = hulls[c][position[c] + 1];
            res.x[c][cur] = Rational(1) - split_fraction;
            res.x[c][next] = split_fraction;
        } else {
            res.x[c][cur] = Rational(1);
        }
        for (std::size_t i = 0; i < items.size(); ++i)
            if (res.x[c][i].sign() != 0)
                res.z_star += items[i].cost * res.x[c][i];

        bool first = true;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!inst.usable(c, i))
                continue;
            const Rational v = items[i].cost - Rational(items[i].weight) * res.y_cc;
            if (first || v < res.y[c])
                res.y[c] = v;
            first = false;
        }
        res.rc[c].resize(items.size());
        for (std::size_t i = 0; i < items.size(); ++i)
            res.rc[c][i] = items[i].cost - Rational(items[i].weight) * res.y_cc - res.y[c];
    }
    return res;
}

bool check_lp_certificate(const MckpInstance& inst, const LpResult& res)
{
    const std::size_t m = inst.classes.size();
    if (!res.feasible) {
        std::int64_t max_weight = 0;
        for (std::size_t c = 0; c < m; ++c) {
            bool any = false;
            std::int64_t best = 0;
            for (std::size_t i = 0; i < inst.classes[c].items.size(); ++i) {
                if (inst.usable(c, i)) {
                    any = true;
                    best = std::max(best, inst.classes[c].items[i].weight);
                }
            }
            if (!any)
                return true;
            max_weight += best;
        }
        return max_weight < inst.capacity;
    }
    if (res.x.size() != m || res.y.size() != m || res.rc.size() != m)
        return false;

    Rational weight;
    Rational primal = -inst.delta0;
    Rational dual = Rational(inst.capacity) * res.y_cc - inst.delta0;
    int fractional_classes = 0;
    if (res.y_cc.sign() < 0)
        return false;
    for (std::size_t c = 0; c < m; ++c) {
        const auto& items = inst.classes[c].items;
        if (res.x[c].size() != items.size() || res.rc[c].size() != items.size())
            return false;
        Rational sum;
        int fractional = 0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const Rational& x = res.x[c][i];
            if (x.sign() < 0 || x > Rational(1))
                return false;
            if (x.sign() != 0 && !inst.usable(c, i))
                return false;
            if (x.sign() != 0 && x != Rational(1))
                ++fractional;
            sum += x;
            weight += Rational(items[i].weight) * x;
            primal += items[i].cost * x;
            const Rational rc = items[i].cost - Rational(items[i].weight) * res.y_cc - res.y[c];
            if (rc != res.rc[c][i])
                return false;
            if (inst.usable(c, i)) {
                if (rc.sign() < 0)
                    return false;
                if (x.sign() != 0 && rc.sign() != 0)
                    return false;
            }
        }
        if (sum != Rational(1))
            return false;
        if (fractional != 0 && fractional != 2)
            return false;
        if (fractional == 2)
            ++fractional_classes;
        dual += res.y[c];
    }
    if (fractional_classes > 1)
        return false;
    if (weight < Rational(inst.capacity))
        return false;
    if (res.y_cc.sign() > 0 && weight != Rational(inst.capacity))
        return false;
    return primal == res.z_star && dual == res.z_star;
}

} // namespace vaclin
