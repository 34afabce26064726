#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "mdx/supermodular.hpp"

using namespace mdx;
using namespace testutil;

namespace {

std::shared_ptr<SupermodularOracle> fixture_oracle() {
    return std::make_shared<SupermodularOracle>(2, [](ElemSet p) {
        switch (p) {
            case 0b01: return Rat(3, 10);
            case 0b10: return Rat(4, 10);
            case 0b11: return Rat(8, 10);
            default: return Rat(0);
        }
    });
}

}  // namespace

TEST_CASE("spot check accepts supermodular tables and rejects others") {
    CHECK(fixture_oracle()->spot_check_supermodular(200, 1));
    auto bad = std::make_shared<SupermodularOracle>(2, [](ElemSet p) {
        // Strictly submodular: 0, 1/2, 1/2, 3/4.
        switch (p) {
            case 0b01:
            case 0b10: return Rat(1, 2);
            case 0b11: return Rat(3, 4);
            default: return Rat(0);
        }
    });
    CHECK_FALSE(bad->spot_check_supermodular(200, 1));
}

TEST_CASE("tight_union collects all tight sets") {
    auto oracle = fixture_oracle();
    ResidualState state{Marginals(std::vector<Rat>{Rat(4, 10), Rat(4, 10)}), Rat(0), 0};
    // Tight: {b} and {a,b} (and the empty set); union is everything.
    CHECK(tight_union(*oracle, state) == 0b11);

    auto zero = std::make_shared<SupermodularOracle>(2, [](ElemSet) { return Rat(0); });
    ResidualState pos{Marginals(std::vector<Rat>{Rat(1, 2), Rat(1, 2)}), Rat(0), 0};
    CHECK(tight_union(*zero, pos) == 0);

    // Additive pi tight on every singleton -> union is the whole ground set.
    auto additive = std::make_shared<SupermodularOracle>(3, [](ElemSet p) {
        return Rat(static_cast<int>(set_size(p)), 4);
    });
    ResidualState add_state{
        Marginals(std::vector<Rat>{Rat(1, 4), Rat(1, 4), Rat(1, 4)}), Rat(0), 0};
    CHECK(tight_union(*additive, add_state) == 0b111);
}

TEST_CASE("supermodular ASC follows the tight-union rule") {
    auto oracle = fixture_oracle();
    ResidualState state{Marginals(std::vector<Rat>{Rat(4, 10), Rat(4, 10)}), Rat(0), 0};
    // Support minus Q is empty, so the first supported element of Q is added.
    CHECK(supermodular_asc(*oracle, state) == 0b01);

    auto zero = std::make_shared<SupermodularOracle>(2, [](ElemSet) { return Rat(0); });
    ResidualState pos{Marginals(std::vector<Rat>{Rat(1, 2), Rat(1, 2)}), Rat(0), 0};
    CHECK(supermodular_asc(*zero, pos) == 0b11);
}

TEST_CASE("max_violated agrees with direct enumeration") {
    auto oracle = fixture_oracle();
    StarResult ok = supermodular_max_violated(*oracle, Marginals(std::vector<Rat>{Rat(1), Rat(1)}));
    CHECK(ok.feasible);
    StarResult bad =
        supermodular_max_violated(*oracle, Marginals(std::vector<Rat>{Rat(2, 10), Rat(2, 10)}));
    CHECK_FALSE(bad.feasible);
    CHECK(bad.violation.member == 0b11);
    CHECK(bad.violation.gap == Rat(2, 5));

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 6;
        auto sup = random_supermodular(rng, n);
        Marginals rho{std::vector<Rat>(n)};
        for (auto& v : rho.values) v = rand_rat(rng);
        Rat worst = 0;
        ElemSet arg = 0;
        for (ElemSet p = 1; p < (ElemSet{1} << n); ++p) {
            Rat gap = sup->evaluate(p) - rho.sum_over(p);
            if (gap > worst) worst = gap, arg = p;
        }
        StarResult res = supermodular_max_violated(*sup, rho);
        CHECK(res.feasible == (worst <= 0));
        if (!res.feasible) CHECK(res.violation.gap == worst);
    }
}

TEST_CASE("tight families stay closed under union and intersection during runs") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        int n = rand_int(rng, 2, 5);
        auto sup = random_supermodular(rng, n);
        Instance inst = make_supermodular_instance(GroundSet::numbered(n), sup);
        auto rho = random_point_in_star(inst, rng);
        REQUIRE(rho.has_value());

        SupermodularAscOracle oracle(sup);
        DecomposeOptions opts;
        opts.validate_ascs = true;
        opts.on_iteration = [&](const ResidualState& state, ElemSet, const Rat&) {
            std::vector<ElemSet> tight;
            for (ElemSet p = 0; p < (ElemSet{1} << n); ++p)
                if (state.rho_bar.sum_over(p) == sup->evaluate(p) - state.offset)
                    tight.push_back(p);
            for (ElemSet p : tight)
                for (ElemSet q : tight) {
                    bool has_union = false, has_meet = false;
                    for (ElemSet r : tight) {
                        has_union |= (r == (p | q));
                        has_meet |= (r == (p & q));
                    }
                    CHECK(has_union);
                    CHECK(has_meet);
                }
        };
        DecomposeResult res = decompose(inst, *rho, oracle, opts);
        CHECK(verify(inst, *rho, res.z).ok());
    }
}

TEST_CASE("end-to-end random supermodular instances decompose exactly") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        int n = rand_int(rng, 2, 7);
        auto sup = random_supermodular(rng, n);
        Instance inst = make_supermodular_instance(GroundSet::numbered(n), sup);
        auto rho = random_point_in_star(inst, rng);
        REQUIRE(rho.has_value());
        REQUIRE(feasible_by_lp(inst, *rho));
        SupermodularAscOracle oracle(sup);
        DecomposeResult res = decompose(inst, *rho, oracle);
        CHECK(verify(inst, *rho, res.z).ok());
        CHECK(res.iterations <= n * (n - 1) / 2 + n);
    }
}
