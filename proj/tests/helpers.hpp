#pragma once

// Shared fixtures: random instance generators and the brute-force LP oracle
// used to cross-check every solver.

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "mdx/abstract.hpp"
#include "mdx/apps.hpp"
#include "mdx/engine.hpp"
#include "mdx/exactlp.hpp"
#include "mdx/lattice.hpp"
#include "mdx/supermodular.hpp"
#include "mdx/types.hpp"

namespace testutil {

using namespace mdx;

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Uniform random fraction in [0, 1] with denominator <= max_den.
inline Rat rand_rat(std::mt19937_64& rng, int max_den = 12) {
    int d = rand_int(rng, 1, max_den);
    return Rat(rand_int(rng, 0, d), d);
}

// Random explicit family with a table requirement; members nonempty.
inline Instance random_explicit_instance(std::mt19937_64& rng, int n, int m) {
    Instance inst;
    inst.ground = GroundSet::numbered(n);
    std::map<ElemSet, Rat> table;
    ElemSet full = inst.ground.full_set();
    for (int i = 0; i < m; ++i) {
        ElemSet p = std::uniform_int_distribution<ElemSet>(1, full)(rng);
        table[p] = rand_rat(rng);
    }
    for (const auto& [p, v] : table) inst.members.push_back(p);
    inst.req = Requirements::table(std::move(table));
    return inst;
}

// Supermodular requirement: threshold of an additive weight,
// pi(P) = max(0, w(P) - t) / D with D >= w(E) - t, so pi is in [0, 1],
// monotone, supermodular, and pi(empty) = 0.
inline std::shared_ptr<SupermodularOracle> random_supermodular(std::mt19937_64& rng, int n) {
    std::vector<long long> w(n);
    long long total = 0;
    for (int e = 0; e < n; ++e) total += (w[e] = rand_int(rng, 0, 4));
    long long t = total == 0 ? 0 : rand_int(rng, 0, static_cast<int>(total - 1));
    long long d = std::max<long long>(total - t, 1) * rand_int(rng, 1, 2);
    return std::make_shared<SupermodularOracle>(n, [w, t, d](ElemSet p) {
        long long s = 0;
        for_each_element(p, [&](int e) { s += w[e]; });
        return s > t ? Rat(s - t, d) : Rat(0);
    });
}

// Random DAG with forward arcs only and a guaranteed source-sink path.
inline DigraphPathSystem random_dag(std::mt19937_64& rng, int max_arcs) {
    int nodes = rand_int(rng, 3, 5);
    Digraph g;
    g.num_nodes = nodes;
    for (int v = 0; v + 1 < nodes; ++v) g.arcs.emplace_back(v, v + 1);
    while (static_cast<int>(g.arcs.size()) < max_arcs && rand_int(rng, 0, 2) > 0) {
        int u = rand_int(rng, 0, nodes - 2);
        int v = rand_int(rng, u + 1, nodes - 1);
        g.arcs.emplace_back(u, v);
    }
    return DigraphPathSystem(std::move(g), 0, nodes - 1);
}

// Random connected graph as a rooted-cut lattice with rewards summing below
// beta.
inline std::shared_ptr<RootedCutLattice> random_rooted_cuts(std::mt19937_64& rng, int max_nodes) {
    int nodes = rand_int(rng, 3, max_nodes);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < nodes; ++v) edges.emplace_back(rand_int(rng, 0, v - 1), v);
    int extra = rand_int(rng, 0, 2);
    for (int i = 0; i < extra; ++i) {
        int u = rand_int(rng, 0, nodes - 2);
        int v = rand_int(rng, u + 1, nodes - 1);
        bool dup = false;
        for (auto [a, b] : edges)
            if ((a == u && b == v) || (a == v && b == u)) dup = true;
        if (!dup) edges.emplace_back(u, v);
    }
    std::vector<Rat> alpha(nodes, Rat(0));
    long long total = 0;
    for (int v = 1; v < nodes; ++v) {
        int a = rand_int(rng, 0, 3);
        alpha[v] = a;
        total += a;
    }
    Rat beta = std::max<long long>(total, 1) * Rat(rand_int(rng, 1, 2));
    return std::make_shared<RootedCutLattice>(nodes, std::move(edges), 0, std::move(alpha), beta);
}

// Brute-force feasibility oracle: does any distribution with marginals rho
// meet the hitting requirements? Exponential LP over all subset variables.
inline bool feasible_by_lp(const Instance& inst, const Marginals& rho) {
    int n = inst.ground.size();
    long long vars = 1LL << n;
    lp::LinearProgram prog;
    prog.objective.assign(vars, Rat(0));
    {
        std::vector<Rat> row(vars, Rat(1));
        prog.add_constraint(std::move(row), lp::Rel::Eq, Rat(1));
    }
    for (int e = 0; e < n; ++e) {
        std::vector<Rat> row(vars, Rat(0));
        for (long long s = 0; s < vars; ++s)
            if (contains(static_cast<ElemSet>(s), e)) row[s] = 1;
        prog.add_constraint(std::move(row), lp::Rel::Eq, rho[e]);
    }
    for (ElemSet p : inst.members) {
        Rat pi = inst.pi(p);
        if (pi <= 0) continue;
        std::vector<Rat> row(vars, Rat(0));
        for (long long s = 0; s < vars; ++s)
            if (static_cast<ElemSet>(s) & p) row[s] = 1;
        prog.add_constraint(std::move(row), lp::Rel::Ge, pi);
    }
    return lp::solve(prog).status == lp::Status::Optimal;
}

// A vertex of Y* for a random objective, optionally pushed part of the way
// toward the all-ones vector (stays feasible since requirements only gain).
inline std::optional<Marginals> random_point_in_star(const Instance& inst, std::mt19937_64& rng,
                                                     bool inflate = true) {
    int n = inst.ground.size();
    lp::LinearProgram prog;
    prog.objective.reserve(n);
    for (int e = 0; e < n; ++e) prog.objective.push_back(rand_rat(rng) + Rat(1, 100));
    prog.lower.assign(n, Rat(0));
    prog.upper.assign(n, Rat(1));
    for (ElemSet p : inst.members) {
        Rat pi = inst.pi(p);
        if (pi <= 0 || p == 0) continue;
        std::vector<Rat> row(n, Rat(0));
        for_each_element(p, [&](int e) { row[e] = 1; });
        prog.add_constraint(std::move(row), lp::Rel::Ge, pi);
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal) return std::nullopt;
    Marginals rho(std::move(sol.point));
    if (inflate)
        for (int e = 0; e < n; ++e)
            if (rand_int(rng, 0, 2) == 0) rho[e] += rand_rat(rng) * (1 - rho[e]);
    return rho;
}

// Full enumeration check of the greedy-support properties: membership of the
// chosen elements, maximality of each member, positivity, the triangular
// system, the strict chain, and the interval-structure consequences.
inline bool greedy_support_ok(const LatticeOracle& oracle, const Marginals& point,
                              const GreedySupport& sup, const Rat& shift = Rat(0)) {
    int m = sup.size();
    int n = oracle.ground().size();
    ElemSet full = oracle.ground().full_set();
    std::vector<ElemSet> members = oracle.enumerate_members();
    ElemSet chosen = 0;
    ElemSet used = 0;
    for (int i = 0; i < m; ++i) chosen |= singleton(sup.elems[i]);
    for (int i = 0; i < m; ++i) {
        int e = sup.elems[i];
        ElemSet p = sup.members[i];
        if (contains(used, e)) return false;
        if (!contains(p, e)) return false;                             // element inside its member
        auto max = oracle.max_member(full & ~used);
        if (!max || max->first != p) return false;                     // sublattice maximality
        if (oracle.pi(p) - shift != sup.pis[i]) return false;
        if (!(sup.pis[i] > 0)) return false;                           // positive requirement
        used |= singleton(e);
    }
    for (ElemSet q : members)                                          // nothing positive remains
        if ((q & used) == 0 && oracle.pi(q) - shift > 0) return false;
    Marginals solved = greedy_point(sup, n);
    if (solved.values != point.values) return false;                   // triangular system
    for (int i = 0; i < m; ++i)
        if (point.sum_over(sup.members[i]) != sup.pis[i]) return false;
    for (int i = 0; i + 1 < m; ++i) {                                  // strict descending chain
        if (!oracle.leq(sup.members[i + 1], sup.members[i])) return false;
        if (sup.members[i + 1] == sup.members[i]) return false;
    }
    for (int i = 0; i < m; ++i)                                        // triangularity
        for (int j = i + 1; j < m; ++j)
            if (contains(sup.members[j], sup.elems[i])) return false;
    for (int i = 0; i + 1 < m; ++i)                                    // sandwiched members
        for (ElemSet q : members)
            if (oracle.leq(q, sup.members[i]) && oracle.leq(sup.members[i + 1], q) &&
                q != sup.members[i + 1])
                if ((sup.members[i] & chosen & ~q) != 0) return false;
    if (m > 0)                                                         // final-element membership
        for (ElemSet q : members)
            if (oracle.leq(q, sup.members[m - 1]) && oracle.pi(q) - shift > 0)
                if (!contains(q, sup.elems[m - 1])) return false;
    return true;
}

// Exact verification plus the brute-force cross-check in one call.
inline bool good_decomposition(const Instance& inst, const Marginals& rho,
                               const Decomposition& z) {
    VerifyReport rep = verify(inst, rho, z);
    return rep.ok() && feasible_by_lp(inst, rho);
}

}  // namespace testutil
