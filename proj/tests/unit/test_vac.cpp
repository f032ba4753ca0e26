#include <doctest.h>

#include <algorithm>

#include "generators.hpp"
#include "vaclin/oracle.hpp"
#include "vaclin/vac.hpp"

using namespace vaclin;
using namespace vaclin::testing;

namespace {

// One unit on (0,a) is requested twice: (1,a) and (2,a) each lose their only support through it,
// and x1a + x2a >= 1 then fails.
Cfn shared_source_instance()
{
    Cfn p(100);
    for (int i = 0; i < 3; ++i)
        p.add_variable(2);
    p.set_unary(0, {1, 0});
    p.add_binary(0, 1, {0, 0, 5, 0});
    p.add_binary(0, 2, {0, 0, 5, 0});
    p.add_linear({1, 2}, {{1, 0}, {1, 0}}, 1);
    return p;
}

Cfn ex2_listing_order()
{
    Cfn p(1000);
    for (int i = 0; i < 6; ++i)
        p.add_variable(2);
    p.set_unary(0, {2, 0});
    p.set_unary(2, {2, 0});
    p.set_unary(5, {2, 0});
    p.add_linear({0, 1, 2, 3, 4}, {{7, 0}, {7, 0}, {3, 0}, {3, 0}, {3, 0}}, 10);
    p.add_linear({0, 3}, {{1, 0}, {0, 1}}, 1);
    p.add_linear({1, 3, 5}, {{0, 1}, {1, 0}, {2, 0}}, 1);
    return p;
}

} // namespace

TEST_CASE("chain example: wipe-out, trace and reparameterization")
{
    Cfn p = load_cfn("ex1.cfn");
    const Cfn before = p;
    Pass1Result r = vac_pass1(p, 1);
    REQUIRE(r.has_conflict());
    CHECK(r.conflict == ConstraintRef::unary(1));
    CHECK(r.lambda0 == Rational(p.top()));
    CHECK(r.explanation == std::vector<VarVal>{{1, 0}, {1, 1}});

    const VacTrace t = vac_pass2(p, r);
    CHECK(t.lambda == 1);
    CHECK(t.k.at({0, 0}) == 1);
    CHECK(t.k.at({3, 1}) == 1);

    CHECK(vac_pass3(p, t) == 1);
    CHECK(p.lb() == 1);
    for (int k = 0; k < p.num_binary(); ++k)
        CHECK(p.binary(k).at(0, 1) == 1);
    for (int i = 0; i < p.num_variables(); ++i)
        for (int v = 0; v < 2; ++v)
            CHECK(p.unary(i, v) == 0);
    CHECK(oracle::check_reparam_equiv(before, p) == true);
    CHECK(nonnegativity_failure(p).empty());

    CHECK_FALSE(vac_pass1(p, 1).has_conflict());
}

TEST_CASE("three-constraint example: conflict, counters and final deltas")
{
    Cfn p = load_cfn("ex2.cfn");
    const Cfn before = p;
    Pass1Result r = vac_pass1(p, 1);
    REQUIRE(r.has_conflict());
    CHECK(r.conflict == ConstraintRef::linear(2));
    CHECK(r.lambda0 == Rational(p.top()));
    CHECK(r.explanation == std::vector<VarVal>{{0, 0}, {3, 1}});

    const VacTrace t = vac_pass2(p, r);
    CHECK(t.lambda == 1);
    CHECK(t.k.at({0, 0}) == 2);
    CHECK(t.k.at({3, 1}) == 1);
    CHECK(t.k.at({1, 1}) == 1);
    CHECK(t.k.at({5, 0}) == 1);
    CHECK(t.lambda_rational == Rational(1));

    CHECK(vac_pass3(p, t) == 1);
    CHECK(p.lb() == 1);
    CHECK(p.linear(0).deltas[0][0] == 1);
    CHECK(p.linear(0).deltas[1][1] == -1);
    CHECK(p.linear(1).deltas[0][1] == 1);
    CHECK(p.linear(1).deltas[2][0] == 1);
    CHECK(p.linear(1).deltas[1][1] == -1);
    CHECK(p.linear(2).deltas[0][0] == 1);
    CHECK(p.linear(2).deltas[1][1] == 1);
    CHECK(p.linear(2).delta0 == 1);
    CHECK(p.unary(2, 0) == 2);
    CHECK(p.unary(5, 0) == 1);
    CHECK(p.unary(0, 0) == 0);
    CHECK(linear_tuple_cost(p.linear(2), std::vector<int>{0, 1}, p.top()) == 1);
    CHECK(oracle::check_reparam_equiv(before, p) == true);
    CHECK(nonnegativity_failure(p).empty());
}

TEST_CASE("three-constraint example in listing order still gains one")
{
    Cfn p = ex2_listing_order();
    const Cfn before = p;
    CHECK(vac_lin(p, {1}) == 1);
    CHECK(p.lb() == 1);
    CHECK(oracle::check_reparam_equiv(before, p) == true);
    CHECK(nonnegativity_failure(p).empty());
}

TEST_CASE("a source shared by two requests stalls")
{
    Cfn p = shared_source_instance();
    Pass1Result r = vac_pass1(p, 1);
    REQUIRE(r.has_conflict());
    CHECK(r.conflict == ConstraintRef::linear(0));
    const VacTrace t = vac_pass2(p, r);
    CHECK(t.k.at({0, 0}) == 2);
    CHECK(t.lambda_rational == Rational(1, 2));
    CHECK(t.lambda == 0);

    VacStats stats;
    CHECK(vac_iterate(p, 1, {}, &stats) == 0);
    REQUIRE(stats.per_theta.size() == 1);
    CHECK(stats.per_theta[0].stalls == 1);
    // The bound of the network is still 1: no integer move of one unit is available.
    CHECK(oracle::brute_force_optimum(shared_source_instance()) == Cost{1});
}

TEST_CASE("zero-cost instance has no conflict")
{
    Cfn p(100);
    p.add_variable(2);
    p.add_variable(3);
    p.add_binary(0, 1, {0, 0, 0, 0, 0, 0});
    p.add_linear({0, 1}, {{1, 0}, {0, 1, 1}}, 1);
    CHECK_FALSE(vac_pass1(p, 1).has_conflict());
    VacStats stats;
    CHECK(vac_iterate(p, 1, {}, &stats) == 0);
    CHECK(stats.per_theta[0].iterations == 1);
    CHECK(vac_lin(p) == 0);
}

TEST_CASE("theta schedule")
{
    Cfn p(1000);
    p.add_variable(2);
    p.set_unary(0, {2, 0});
    CHECK(make_schedule(p) == std::vector<Cost>{2, 1});

    p.set_unary(0, {9, 0});
    CHECK(make_schedule(p) == std::vector<Cost>{9, 4, 2, 1});

    p.set_unary(0, {1, 0});
    CHECK(make_schedule(p) == std::vector<Cost>{1});

    p.set_unary(0, {0, 0});
    CHECK(make_schedule(p) == std::vector<Cost>{1});

    p.set_unary(0, {1000, 0});
    CHECK(make_schedule(p) == std::vector<Cost>{1});

    CHECK(make_schedule(p, 5) == std::vector<Cost>{5, 2, 1});
}

TEST_CASE("vac_lin on both examples")
{
    Cfn p1 = load_cfn("ex1.cfn");
    CHECK(vac_lin(p1) == 1);
    Cfn p2 = load_cfn("ex2.cfn");
    CHECK(vac_lin(p2) == 1);
}

TEST_CASE("direct propagation of a single-variable constraint")
{
    Cfn p(100);
    p.add_variable(2);
    p.set_unary(0, {2, 0});
    p.add_linear({0}, {{1, 0}}, 1);
    const Cfn before = p;
    CHECK(direct_lin_propagate(p, 0) == 2);
    CHECK(p.lb() == 2);
    CHECK(p.unary(0, 0) == 0);
    CHECK(p.linear(0).delta0 == 2);
    CHECK(oracle::check_reparam_equiv(before, p) == true);
}

TEST_CASE("direct propagation gains nothing on the three-constraint example")
{
    std::vector<int> order{0, 1, 2};
    do {
        Cfn p = load_cfn("ex2.cfn");
        Cost gain = 0;
        for (int k : order)
            gain += direct_lin_propagate(p, k);
        CHECK(gain == 0);
        CHECK(p.lb() == 0);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("direct propagation of an infeasible constraint")
{
    Cfn p(100);
    p.add_variable(2);
    p.add_linear({0}, {{1, 1}}, 2);
    direct_lin_propagate(p, 0);
    CHECK(p.infeasible());
}

TEST_CASE("random networks: bound, equivalence and non-negativity")
{
    Rng rng(17);
    for (int iter = 0; iter < 150; ++iter) {
        Cfn p = random_cfn(rng);
        const Cfn original = p;
        const auto opt = oracle::brute_force_optimum(original);
        REQUIRE(opt);
        if (!enforce_nc(p))
            continue;
        vac_lin(p);
        CHECK(p.lb() <= *opt);
        CHECK(oracle::check_reparam_equiv(original, p) == true);
        CHECK(nonnegativity_failure(p).empty());
    }
}
