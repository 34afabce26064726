#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "mdx/exactlp.hpp"

using namespace mdx;
using namespace mdx::lp;
using namespace testutil;

TEST_CASE("one-variable minimum") {
    LinearProgram prog;
    prog.objective = {Rat(1)};
    prog.add_constraint({Rat(1)}, Rel::Ge, Rat(3));
    LpSolution sol = solve(prog);
    CHECK(sol.status == Status::Optimal);
    CHECK(sol.point[0] == Rat(3));
    CHECK(sol.value == Rat(3));
}

TEST_CASE("unbounded maximization is detected") {
    LinearProgram prog;
    prog.sense = Sense::Max;
    prog.objective = {Rat(1)};
    LpSolution sol = solve(prog);
    CHECK(sol.status == Status::Unbounded);
}

TEST_CASE("infeasible system yields a Farkas certificate") {
    LinearProgram prog;
    prog.objective = {Rat(0)};
    prog.add_constraint({Rat(1)}, Rel::Le, Rat(1));
    prog.add_constraint({Rat(1)}, Rel::Ge, Rat(2));
    LpSolution sol = solve(prog);
    CHECK(sol.status == Status::Infeasible);
    CHECK_FALSE(sol.farkas.empty());
}

TEST_CASE("free variables and equality rows") {
    LinearProgram prog;
    prog.objective = {Rat(1), Rat(-1)};
    prog.lower = {std::nullopt, Rat(0)};
    prog.upper = {std::nullopt, Rat(5)};
    prog.add_constraint({Rat(1), Rat(1)}, Rel::Eq, Rat(2));
    LpSolution sol = solve(prog);
    CHECK(sol.status == Status::Optimal);
    CHECK(sol.point[0] + sol.point[1] == Rat(2));
    CHECK(sol.point[1] == Rat(5));
    CHECK(sol.value == Rat(-8));
}

TEST_CASE("optimal points satisfy all constraints exactly on random LPs") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        int n = rand_int(rng, 1, 4), m = rand_int(rng, 1, 5);
        LinearProgram prog;
        for (int j = 0; j < n; ++j) prog.objective.push_back(rand_rat(rng));
        prog.lower.assign(n, Rat(0));
        prog.upper.assign(n, Rat(2));
        for (int i = 0; i < m; ++i) {
            std::vector<Rat> row;
            for (int j = 0; j < n; ++j) row.push_back(Rat(rand_int(rng, -2, 3)));
            prog.add_constraint(std::move(row), i % 2 ? Rel::Ge : Rel::Le, rand_rat(rng) * 3 - 1);
        }
        LpSolution sol = solve(prog);
        if (sol.status != Status::Optimal) continue;
        for (const auto& c : prog.constraints) {
            Rat lhs = 0;
            for (int j = 0; j < n; ++j) lhs += c.row[j] * sol.point[j];
            if (c.rel == Rel::Le) CHECK(lhs <= c.rhs);
            if (c.rel == Rel::Ge) CHECK(lhs >= c.rhs);
            if (c.rel == Rel::Eq) CHECK(lhs == c.rhs);
        }
        for (int j = 0; j < n; ++j) {
            CHECK(sol.point[j] >= 0);
            CHECK(sol.point[j] <= 2);
        }
    }
}

TEST_CASE("gaussian elimination helpers") {
    CHECK(matrix_rank({{Rat(1), Rat(2)}, {Rat(2), Rat(4)}}) == 1);
    CHECK(matrix_rank({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}) == 2);

    auto x = solve_linear({{Rat(2), Rat(0)}, {Rat(0), Rat(3)}}, {Rat(4), Rat(9)});
    REQUIRE(x.has_value());
    CHECK((*x)[0] == Rat(2));
    CHECK((*x)[1] == Rat(3));
    CHECK_FALSE(solve_linear({{Rat(1)}, {Rat(1)}}, {Rat(0), Rat(1)}).has_value());

    auto k = kernel_vector({{Rat(1), Rat(1)}});
    REQUIRE(k.has_value());
    CHECK((*k)[0] + (*k)[1] == Rat(0));
    CHECK(((*k)[0] != 0 || (*k)[1] != 0));
    CHECK_FALSE(kernel_vector({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}).has_value());
}

TEST_CASE("convex_combination reproduces targets") {
    std::vector<std::vector<Rat>> verts = {{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    auto w = convex_combination({Rat(1), Rat(0)}, verts);
    REQUIRE(w.has_value());
    CHECK((*w)[1] == Rat(1));

    auto mid = convex_combination({Rat(1, 2), Rat(1, 2)}, verts);
    REQUIRE(mid.has_value());
    Rat x = 0, y = 0, t = 0;
    for (size_t i = 0; i < verts.size(); ++i) {
        x += (*mid)[i] * verts[i][0];
        y += (*mid)[i] * verts[i][1];
        t += (*mid)[i];
    }
    CHECK(x == Rat(1, 2));
    CHECK(y == Rat(1, 2));
    CHECK(t == Rat(1));

    CHECK_FALSE(convex_combination({Rat(2), Rat(2)}, verts).has_value());

    // Balanced-fixture system: (1/2,1/2,1/2) over incidence vectors of {2} and {1,3}.
    std::vector<std::vector<Rat>> inc = {{Rat(0), Rat(1), Rat(0)}, {Rat(1), Rat(0), Rat(1)}};
    auto b = convex_combination({Rat(1, 2), Rat(1, 2), Rat(1, 2)}, inc);
    REQUIRE(b.has_value());
    CHECK((*b)[0] == Rat(1, 2));
    CHECK((*b)[1] == Rat(1, 2));
}

TEST_CASE("convex_combination keeps support at dimension + 1") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        int dim = rand_int(rng, 1, 4);
        int count = rand_int(rng, dim + 2, dim + 5);
        std::vector<std::vector<Rat>> verts;
        for (int i = 0; i < count; ++i) {
            std::vector<Rat> v;
            for (int j = 0; j < dim; ++j) v.push_back(rand_rat(rng));
            verts.push_back(std::move(v));
        }
        std::vector<Rat> lambda(count), target(dim, Rat(0));
        Rat total = 0;
        for (int i = 0; i < count; ++i) total += (lambda[i] = Rat(rand_int(rng, 1, 5)));
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < dim; ++j) target[j] += lambda[i] / total * verts[i][j];
        auto w = convex_combination(target, verts);
        REQUIRE(w.has_value());
        int support = 0;
        Rat sum = 0;
        std::vector<Rat> recon(dim, Rat(0));
        for (int i = 0; i < count; ++i) {
            if ((*w)[i] != 0) ++support;
            CHECK((*w)[i] >= 0);
            sum += (*w)[i];
            for (int j = 0; j < dim; ++j) recon[j] += (*w)[i] * verts[i][j];
        }
        CHECK(sum == Rat(1));
        CHECK(recon == target);
        CHECK(support <= dim + 1);
    }
}

TEST_CASE("transportation feasibility with cut witnesses") {
    // Trivial zero instance.
    TransportResult zero = transport_feasible({Rat(0)}, {Rat(0)}, {});
    CHECK(zero.feasible);

    TransportResult one = transport_feasible({Rat(1)}, {Rat(1)}, {{0, 0, Rat(1)}});
    CHECK(one.feasible);
    CHECK(one.flow[0] == Rat(1));

    CHECK_THROWS_AS(transport_feasible({Rat(1)}, {Rat(2)}, {}), Error);

    // Capacity too small: the cut names the starved sink.
    TransportResult bad =
        transport_feasible({Rat(1), Rat(1)}, {Rat(1), Rat(1)},
                           {{0, 0, Rat(1)}, {1, 0, Rat(1)}, {1, 1, Rat(1, 2)}});
    CHECK_FALSE(bad.feasible);
    REQUIRE_FALSE(bad.cut_sinks.empty());
    // Verify the witness inequality directly.
    std::vector<TransportArc> arcs = {{0, 0, Rat(1)}, {1, 0, Rat(1)}, {1, 1, Rat(1, 2)}};
    std::vector<Rat> sup = {Rat(1), Rat(1)}, dem = {Rat(1), Rat(1)};
    Rat lhs = 0;
    for (int s : bad.cut_sources) lhs += sup[s];
    for (const auto& a : arcs) {
        bool src_in = false, snk_in = false;
        for (int s : bad.cut_sources) src_in |= (a.source == s);
        for (int t : bad.cut_sinks) snk_in |= (a.sink == t);
        if (!src_in && snk_in) lhs += a.cap;
    }
    Rat rhs = 0;
    for (int t : bad.cut_sinks) rhs += dem[t];
    CHECK(lhs < rhs);
}

TEST_CASE("transport agrees with the LP formulation on random instances") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        int ns = rand_int(rng, 1, 4), nt = rand_int(rng, 1, 4);
        std::vector<Rat> sup(ns), dem(nt);
        // Split a common total across both sides.
        int total = rand_int(rng, 0, 8);
        int left = total;
        for (int i = 0; i < ns; ++i) {
            int take = i + 1 == ns ? left : rand_int(rng, 0, left);
            sup[i] = Rat(take, 4);
            left -= take;
        }
        left = total;
        for (int i = 0; i < nt; ++i) {
            int take = i + 1 == nt ? left : rand_int(rng, 0, left);
            dem[i] = Rat(take, 4);
            left -= take;
        }
        std::vector<TransportArc> arcs;
        for (int s = 0; s < ns; ++s)
            for (int t = 0; t < nt; ++t)
                if (rand_int(rng, 0, 2)) arcs.push_back({s, t, Rat(rand_int(rng, 0, 6), 4)});
        TransportResult res = transport_feasible(sup, dem, arcs);

        LinearProgram prog;
        int m = static_cast<int>(arcs.size());
        prog.objective.assign(m, Rat(0));
        prog.lower.assign(m, Rat(0));
        prog.upper.resize(m);
        for (int j = 0; j < m; ++j) prog.upper[j] = arcs[j].cap;
        for (int s = 0; s < ns; ++s) {
            std::vector<Rat> row(m, Rat(0));
            for (int j = 0; j < m; ++j)
                if (arcs[j].source == s) row[j] = 1;
            prog.add_constraint(std::move(row), Rel::Eq, sup[s]);
        }
        for (int t = 0; t < nt; ++t) {
            std::vector<Rat> row(m, Rat(0));
            for (int j = 0; j < m; ++j)
                if (arcs[j].sink == t) row[j] = 1;
            prog.add_constraint(std::move(row), Rel::Eq, dem[t]);
        }
        CHECK(res.feasible == (solve(prog).status == Status::Optimal));
        if (res.feasible) {
            for (int j = 0; j < m; ++j) {
                CHECK(res.flow[j] >= 0);
                CHECK(res.flow[j] <= arcs[j].cap);
            }
            for (int s = 0; s < ns; ++s) {
                Rat out = 0;
                for (int j = 0; j < m; ++j)
                    if (arcs[j].source == s) out += res.flow[j];
                CHECK(out == sup[s]);
            }
        }
    }
}

TEST_CASE("the exponential feasibility LP matches known answers") {
    Instance inst;
    inst.ground = GroundSet::numbered(2);
    inst.members = {0b11};
    inst.req = Requirements::table({{0b11, Rat(6, 10)}});
    CHECK(feasible_by_lp(inst, Marginals(std::vector<Rat>{Rat(3, 10), Rat(3, 10)})));
    CHECK_FALSE(feasible_by_lp(inst, Marginals(std::vector<Rat>{Rat(2, 10), Rat(2, 10)})));
}
