#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "mdx/engine.hpp"
#include "mdx/supermodular.hpp"

using namespace mdx;
using namespace testutil;

namespace {

Instance two_element_instance() {
    Instance inst;
    inst.ground = GroundSet::numbered(2);
    inst.members = {0b00, 0b01, 0b10, 0b11};
    inst.req = Requirements::table({{0b00, Rat(0)},
                                    {0b01, Rat(3, 10)},
                                    {0b10, Rat(4, 10)},
                                    {0b11, Rat(8, 10)}});
    return inst;
}

}  // namespace

TEST_CASE("dominance relation basics") {
    Instance inst;
    inst.ground = GroundSet::numbered(2);
    inst.members = {0b01, 0b11};
    inst.req = Requirements::table({{0b01, Rat(3, 10)}, {0b11, Rat(6, 10)}});
    Marginals rho(std::vector<Rat>{Rat(1, 2), Rat(2, 10)});
    CHECK(dominates(0b01, 0b11, inst.req, rho));
    CHECK(dominates(0b11, 0b11, inst.req, rho));

    Instance flat;
    flat.ground = GroundSet::numbered(2);
    flat.members = {0b01, 0b10};
    flat.req = Requirements::table({{0b01, Rat(1, 2)}, {0b10, Rat(1, 2)}});
    CHECK_FALSE(dominates(0b01, 0b10, flat.req, rho));
}

TEST_CASE("dominance is a partial order on random instances") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Instance inst = random_explicit_instance(rng, rand_int(rng, 2, 5), rand_int(rng, 2, 6));
        Marginals rho(std::vector<Rat>(inst.ground.size()));
        for (auto& v : rho.values) v = rand_rat(rng);
        for (ElemSet p : inst.members) {
            CHECK(dominates(p, p, inst.req, rho));
            for (ElemSet q : inst.members) {
                if (p != q)
                    CHECK_FALSE((dominates(p, q, inst.req, rho) && dominates(q, p, inst.req, rho)));
                for (ElemSet r : inst.members)
                    if (dominates(p, q, inst.req, rho) && dominates(q, r, inst.req, rho))
                        CHECK(dominates(p, r, inst.req, rho));
            }
        }
    }
}

TEST_CASE("epsilon enumerates all three terms") {
    Instance inst = two_element_instance();
    ResidualState state{Marginals(std::vector<Rat>{Rat(4, 10), Rat(4, 10)}), Rat(0), 0};
    CHECK(epsilon(0b01, state, inst) == Rat(4, 10));
    CHECK_THROWS_AS(epsilon(0, state, inst), Error);
}

TEST_CASE("epsilon with no member meeting S twice drops the delta term") {
    Instance inst;
    inst.ground = GroundSet::numbered(2);
    inst.members = {0b01, 0b10};
    inst.req = Requirements::table({{0b01, Rat(1, 4)}, {0b10, Rat(3, 4)}});
    ResidualState state{Marginals(std::vector<Rat>{Rat(1, 2), Rat(1, 2)}), Rat(0), 0};
    // min(rho_bar over S) = 1/2, max pi_bar = 3/4, delta empty.
    CHECK(epsilon(0b11, state, inst) == Rat(1, 2));
}

TEST_CASE("check_star finds the worst violated member") {
    Instance inst;
    inst.ground = GroundSet::numbered(2);
    inst.members = {0b11};
    inst.req = Requirements::table({{0b11, Rat(6, 10)}});
    StarResult ok = check_star(inst, Marginals(std::vector<Rat>{Rat(1), Rat(1)}));
    CHECK(ok.feasible);
    StarResult bad = check_star(inst, Marginals(std::vector<Rat>{Rat(2, 10), Rat(2, 10)}));
    CHECK_FALSE(bad.feasible);
    CHECK(bad.violation.member == 0b11);
    CHECK(bad.violation.gap == Rat(1, 5));
}

TEST_CASE("check_star agrees with brute force on random instances") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        Instance inst = random_explicit_instance(rng, rand_int(rng, 2, 6), rand_int(rng, 1, 8));
        Marginals rho(std::vector<Rat>(inst.ground.size()));
        for (auto& v : rho.values) v = rand_rat(rng);
        Rat worst = 0;
        for (ElemSet p : inst.members) {
            Rat gap = inst.pi(p) - rho.sum_over(p);
            if (gap > worst) worst = gap;
        }
        StarResult res = check_star(inst, rho);
        CHECK(res.feasible == (worst <= 0));
        if (!res.feasible) CHECK(res.violation.gap == worst);
    }
}

TEST_CASE("engine solves the frozen two-element fixture") {
    Instance inst = two_element_instance();
    Marginals rho(std::vector<Rat>{Rat(4, 10), Rat(4, 10)});
    auto oracle_fn = [&inst](ElemSet p) { return inst.pi(p); };
    auto sup = std::make_shared<SupermodularOracle>(2, oracle_fn);
    SupermodularAscOracle oracle(sup);
    DecomposeOptions opts;
    opts.validate_ascs = true;
    opts.check_invariants = true;
    DecomposeResult res = decompose(inst, rho, oracle, opts);
    CHECK(res.z.weight(0b00) == Rat(1, 5));
    CHECK(res.z.weight(0b01) == Rat(2, 5));
    CHECK(res.z.weight(0b10) == Rat(2, 5));
    CHECK(verify(inst, rho, res.z).ok());
}

TEST_CASE("engine is a no-op when no requirement is positive") {
    Instance inst;
    inst.ground = GroundSet::numbered(2);
    inst.members = {0b01};
    inst.req = Requirements::table({{0b01, Rat(0)}});
    auto sup = std::make_shared<SupermodularOracle>(2, [](ElemSet) { return Rat(0); });
    SupermodularAscOracle oracle(sup);
    Marginals rho(std::vector<Rat>{Rat(0), Rat(0)});
    DecomposeResult res = decompose(inst, rho, oracle);
    CHECK(res.z.support.size() == 1);
    CHECK(res.z.weight(0) == Rat(1));
    CHECK(res.iterations == 0);
}

TEST_CASE("lift_marginals raises deficits without losing hits") {
    Marginals rho(std::vector<Rat>{Rat(1, 2)});
    Decomposition z;
    z.add(0, Rat(1));
    Decomposition lifted = lift_marginals(z, rho);
    CHECK(lifted.weight(0) == Rat(1, 2));
    CHECK(lifted.weight(0b1) == Rat(1, 2));

    Decomposition z2;
    z2.add(0b01, Rat(1, 2));
    z2.add(0, Rat(1, 2));
    Marginals rho2(std::vector<Rat>{Rat(1, 2), Rat(1, 4)});
    Decomposition lifted2 = lift_marginals(z2, rho2);
    CHECK(lifted2.marginal(0) == Rat(1, 2));
    CHECK(lifted2.marginal(1) == Rat(1, 4));
    CHECK(lifted2.total() == Rat(1));
    CHECK(lifted2.hit_probability(0b01) >= z2.hit_probability(0b01));

    // Exceeding marginals are rejected.
    Decomposition z3;
    z3.add(0b1, Rat(1));
    CHECK_THROWS_AS(lift_marginals(z3, Marginals(std::vector<Rat>{Rat(1, 2)})), Error);
}

TEST_CASE("verify flags hitting and normalization failures") {
    Instance inst;
    inst.ground = GroundSet::numbered(1);
    inst.members = {0b1};
    inst.req = Requirements::table({{0b1, Rat(1, 2)}});
    Decomposition z;
    z.add(0, Rat(1));
    VerifyReport rep = verify(inst, Marginals(std::vector<Rat>{Rat(0)}), z);
    CHECK_FALSE(rep.hitting_ok);
    CHECK(rep.worst_violation == Rat(1, 2));

    Decomposition z2;
    z2.add(0, Rat(9, 10));
    CHECK_FALSE(verify(inst, Marginals(std::vector<Rat>{Rat(0)}), z2).normalized);
}

TEST_CASE("sampling is deterministic and matches weights") {
    Decomposition z;
    z.add(0, Rat(1));
    CHECK(sample(z, 123) == 0);
    Decomposition z1;
    z1.add(0b1, Rat(1));
    CHECK(sample(z1, 5) == 0b1);

    Decomposition z2;
    z2.add(0b01, Rat(1, 2));
    z2.add(0b10, Rat(1, 2));
    std::mt19937_64 rng(42);
    int hits = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        if (sample(z2, rng) == 0b01) ++hits;
    CHECK(hits > draws * 49 / 100);
    CHECK(hits < draws * 51 / 100);
    // Same seed, same stream.
    std::mt19937_64 a(9), b(9);
    for (int i = 0; i < 50; ++i) CHECK(sample(z2, a) == sample(z2, b));
}

TEST_CASE("admissible support check catches bad candidates") {
    Instance inst = two_element_instance();
    ResidualState state{Marginals(std::vector<Rat>{Rat(4, 10), Rat(4, 10)}), Rat(0), 0};
    CHECK(is_admissible_support(0b01, inst, state));
    // The full set meets the tight member {a,b} twice.
    CHECK_FALSE(is_admissible_support(0b11, inst, state));
}
