#include "mdx/apps.hpp"

#include <algorithm>
#include <set>

#include "mdx/exactlp.hpp"

namespace mdx {

namespace {

Int rat_floor(const Rat& r) {
    Int n = numerator(r), d = denominator(r);
    Int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

Int rat_ceil(const Rat& r) {
    Int n = numerator(r), d = denominator(r);
    Int q = n / d;
    if (n > 0 && q * d != n) ++q;
    return q;
}

}  // namespace

std::optional<Decomposition> decompose_by_lp(const Instance& inst, const Marginals& rho) {
    if (!inst.enumerable)
        throw Error(ErrorCode::FamilyNotEnumerable, "LP backend needs an explicit family");
    int n = inst.ground.size();
    if (n > 62 || (1LL << n) > global_caps().lp_variables)
        throw Error(ErrorCode::ScaleExceeded, "too many subset variables");
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
        std::vector<Rat> row(vars, Rat(0));
        for (long long s = 0; s < vars; ++s)
            if (static_cast<ElemSet>(s) & p) row[s] = 1;
        prog.add_constraint(std::move(row), lp::Rel::Ge, inst.pi(p));
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal) return std::nullopt;
    Decomposition z;
    for (long long s = 0; s < vars; ++s)
        if (sol.point[s] != 0) z.add(static_cast<ElemSet>(s), sol.point[s]);
    return z;
}

void SmugglingTree::validate() const {
    if (num_nodes < 1) throw Error(ErrorCode::InvalidInput, "empty tree");
    if (static_cast<int>(edges.size()) != num_nodes - 1)
        throw Error(ErrorCode::InvalidInput, "a tree has one edge less than nodes");
    std::vector<char> seen(num_nodes, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (auto [a, b] : edges) {
            if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes || a == b)
                throw Error(ErrorCode::InvalidInput, "bad edge");
            int other = a == u ? b : b == u ? a : -1;
            if (other >= 0 && !seen[other]) seen[other] = 1, stack.push_back(other);
        }
    }
    for (int v = 0; v < num_nodes; ++v)
        if (!seen[v]) throw Error(ErrorCode::InvalidInput, "tree must be connected");
    if (!(beta > 0)) throw Error(ErrorCode::InvalidInput, "beta must be positive");
    for (const auto& [pair, r] : pair_rewards) {
        auto [v, w] = pair;
        if (v < 0 || w < 0 || v >= num_nodes || w >= num_nodes || v >= w)
            throw Error(ErrorCode::InvalidInput, "pair reward keys must satisfy v < w");
        if (r < 0) throw Error(ErrorCode::InvalidInput, "negative pair reward");
    }
    ElemSet all = edges.empty() ? 0 : (~ElemSet{0} >> (64 - edges.size()));
    if (reward(all) > beta)
        throw Error(ErrorCode::InvalidInput, "requirements exceed 1: rewards sum above beta");
}

Rat SmugglingTree::reward(ElemSet links) const {
    // Path edge sets by BFS from each pair's first node.
    Rat total = 0;
    for (const auto& [pair, r] : pair_rewards) {
        auto [v, w] = pair;
        // walk up a BFS tree rooted at v
        std::vector<int> parent_edge(num_nodes, -1), parent(num_nodes, -1);
        std::vector<char> seen(num_nodes, 0);
        std::vector<int> stack{v};
        seen[v] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (size_t i = 0; i < edges.size(); ++i) {
                auto [a, b] = edges[i];
                int other = a == u ? b : b == u ? a : -1;
                if (other >= 0 && !seen[other]) {
                    seen[other] = 1;
                    parent[other] = u;
                    parent_edge[other] = static_cast<int>(i);
                    stack.push_back(other);
                }
            }
        }
        ElemSet path = 0;
        for (int u = w; u != v; u = parent[u]) path |= singleton(parent_edge[u]);
        if (!(path & ~links)) total += r;
    }
    return total;
}

std::shared_ptr<SupermodularOracle> SmugglingTree::oracle() const {
    validate();
    SmugglingTree copy = *this;
    Rat b = beta;
    return std::make_shared<SupermodularOracle>(
        static_cast<int>(edges.size()),
        [copy = std::move(copy), b](ElemSet p) { return copy.reward(p) / b; });
}

namespace {

Marginals cheapest_marginals(const std::vector<ElemSet>& members, const Requirements& req,
                             const std::vector<Rat>& costs, int n) {
    if (static_cast<long long>(members.size()) > global_caps().lp_constraints)
        throw Error(ErrorCode::ScaleExceeded, "too many covering constraints");
    lp::LinearProgram prog;
    prog.objective = costs;
    prog.upper.assign(n, Rat(1));
    prog.lower.assign(n, Rat(0));
    for (ElemSet p : members) {
        std::vector<Rat> row(n, Rat(0));
        for_each_element(p, [&](int e) { row[e] = 1; });
        prog.add_constraint(std::move(row), lp::Rel::Ge, req(p));
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal)
        throw Error(ErrorCode::OracleFailure, "deterrence program did not solve");
    return Marginals{sol.point};
}

}  // namespace

SecurityResult solve_security_game(const SmugglingTree& tree, const std::vector<Rat>& costs) {
    auto oracle = tree.oracle();
    int n = oracle->ground_size();
    if (static_cast<int>(costs.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "one cost per link expected");
    for (const Rat& c : costs)
        if (c < 0) throw Error(ErrorCode::InvalidInput, "negative inspection cost");
    Instance inst = make_supermodular_instance(GroundSet::numbered(n), oracle);
    Marginals rho = cheapest_marginals(inst.members, inst.req, costs, n);
    SupermodularAscOracle asc(oracle);
    Decomposition z = decompose(inst, rho, asc).z;
    Rat cost = 0;
    for (int e = 0; e < n; ++e) cost += costs[e] * rho[e];
    return {std::move(rho), std::move(z), std::move(cost)};
}

SecurityResult solve_security_game(const RootedCutLattice& lattice, const std::vector<Rat>& costs) {
    int n = lattice.ground().size();
    if (static_cast<int>(costs.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "one cost per edge expected");
    for (const Rat& c : costs)
        if (c < 0) throw Error(ErrorCode::InvalidInput, "negative inspection cost");
    Requirements req = Requirements::callback([&lattice](ElemSet p) { return lattice.pi(p); });
    Marginals rho = cheapest_marginals(lattice.enumerate_members(), req, costs, n);
    Decomposition z = decompose_lattice(lattice, rho);
    Rat cost = 0;
    for (int e = 0; e < n; ++e) cost += costs[e] * rho[e];
    return {std::move(rho), std::move(z), std::move(cost)};
}

void CoverageInstance::validate() const {
    int n = ground.size();
    if (static_cast<int>(covered.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "one covered set per element expected");
    if (universe_size < 0 || universe_size > 62)
        throw Error(ErrorCode::ScaleExceeded, "universe too large");
    std::uint64_t full = universe_size == 0 ? 0 : (~std::uint64_t{0} >> (64 - universe_size));
    for (std::uint64_t u : covered)
        if (u & ~full) throw Error(ErrorCode::InvalidInput, "covered set outside the universe");
    if (rewards.empty()) throw Error(ErrorCode::InvalidInput, "at least one scenario required");
    if (rewards.size() != costs.size())
        throw Error(ErrorCode::DimensionMismatch, "reward/cost scenario count mismatch");
    for (const auto& r : rewards) {
        if (static_cast<int>(r.size()) != universe_size)
            throw Error(ErrorCode::DimensionMismatch, "one reward per item expected");
        for (const Rat& v : r)
            if (v < 0) throw Error(ErrorCode::InvalidInput, "negative reward");
    }
    for (const auto& c : costs) {
        if (static_cast<int>(c.size()) != n)
            throw Error(ErrorCode::DimensionMismatch, "one cost per element expected");
        for (const Rat& v : c)
            if (v < 0) throw Error(ErrorCode::InvalidInput, "negative cost");
    }
}

ElemSet CoverageInstance::coverers(int item) const {
    ElemSet p = 0;
    for (size_t e = 0; e < covered.size(); ++e)
        if ((covered[e] >> item) & 1) p |= singleton(static_cast<int>(e));
    return p;
}

CoverageResult solve_robust_coverage(const CoverageInstance& inst) {
    inst.validate();
    int n = inst.ground.size(), u_count = inst.universe_size;

    Hypergraph h{inst.ground, {}};
    for (int u = 0; u < u_count; ++u) {
        ElemSet p = inst.coverers(u);
        if (p) h.members.push_back(p);
    }
    std::sort(h.members.begin(), h.members.end());
    h.members.erase(std::unique(h.members.begin(), h.members.end()), h.members.end());
    if (auto cycle = find_odd_special_cycle(h))
        throw Error(ErrorCode::NotBalanced,
                    "coverage hypergraph has an odd special cycle of length " +
                        std::to_string(cycle->length()));

    // Variables: rho (n), pi (u_count), t (last, free).
    int vars = n + u_count + 1;
    lp::LinearProgram prog;
    prog.sense = lp::Sense::Max;
    prog.objective.assign(vars, Rat(0));
    prog.objective[vars - 1] = 1;
    prog.lower.assign(vars, std::optional<Rat>(Rat(0)));
    prog.upper.assign(vars, std::optional<Rat>(Rat(1)));
    prog.lower[vars - 1] = std::nullopt;
    prog.upper[vars - 1] = std::nullopt;
    for (size_t w = 0; w < inst.rewards.size(); ++w) {
        std::vector<Rat> row(vars, Rat(0));
        row[vars - 1] = 1;
        for (int u = 0; u < u_count; ++u) row[n + u] = -inst.rewards[w][u];
        for (int e = 0; e < n; ++e) row[e] = inst.costs[w][e];
        prog.add_constraint(std::move(row), lp::Rel::Le, Rat(0));
    }
    for (int u = 0; u < u_count; ++u) {
        std::vector<Rat> row(vars, Rat(0));
        row[n + u] = 1;
        for_each_element(inst.coverers(u), [&](int e) { row[e] = -1; });
        prog.add_constraint(std::move(row), lp::Rel::Le, Rat(0));
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal)
        throw Error(ErrorCode::OracleFailure, "coverage program did not solve");

    CoverageResult out;
    out.rho = Marginals{std::vector<Rat>(sol.point.begin(), sol.point.begin() + n)};
    out.pi.assign(sol.point.begin() + n, sol.point.begin() + n + u_count);
    out.t = sol.point[vars - 1];
    out.z = perfect_decompose(h, out.rho);
    return out;
}

void CommitteeInstance::validate() const {
    int n = ground.size();
    if (static_cast<int>(votes.size()) != n)
        throw Error(ErrorCode::InvalidInput, "one vote count per candidate expected");
    long long total = 0;
    for (long long v : votes) {
        if (v < 0) throw Error(ErrorCode::InvalidInput, "negative vote count");
        total += v;
    }
    if (total <= 0) throw Error(ErrorCode::InvalidInput, "no votes cast");
    if (k < 1) throw Error(ErrorCode::InvalidInput, "committee size must be positive");
    if (static_cast<int>(groups.size()) > k)
        throw Error(ErrorCode::TooManyGroups, "more groups than committee seats");
    if (groups.size() != group_pi.size())
        throw Error(ErrorCode::DimensionMismatch, "one requirement per group expected");
    ElemSet full = ground.full_set();
    for (ElemSet p : groups)
        if (p == 0 || (p & ~full)) throw Error(ErrorCode::InvalidInput, "bad candidate group");
    for (const Rat& v : group_pi)
        if (v > 1) throw Error(ErrorCode::InvalidInput, "group requirement above 1");
    for (long long v : votes)
        if (Rat(Int(k) * v, Int(total)) > 1)
            throw Error(ErrorCode::InvalidInput,
                        "a candidate holds more than a 1/k fraction of the votes");
}

Marginals CommitteeInstance::marginals() const {
    long long total = 0;
    for (long long v : votes) total += v;
    std::vector<Rat> rho;
    rho.reserve(votes.size());
    for (long long v : votes) rho.emplace_back(Int(k) * v, Int(total));
    return Marginals{std::move(rho)};
}

FixedSizeSampler::FixedSizeSampler(int ground_size, int k, std::vector<Entry> entries)
    : ground_size_(ground_size), k_(k), entries_(std::move(entries)) {
    Rat total = 0;
    for (const Entry& entry : entries_) {
        if (static_cast<int>(entry.alphas.size()) != ground_size_ + 1)
            throw Error(ErrorCode::DimensionMismatch, "one breakpoint per element expected");
        if (entry.weight <= 0) throw Error(ErrorCode::InvalidInput, "nonpositive entry weight");
        if (entry.alphas.front() != 0)
            throw Error(ErrorCode::InvalidInput, "breakpoints must start at 0");
        for (int i = 1; i <= ground_size_; ++i) {
            Rat width = entry.alphas[i] - entry.alphas[i - 1];
            if (width < 0 || width > 1)
                throw Error(ErrorCode::InvalidInput, "breakpoint steps must lie in [0,1]");
            if (width > 0 && contains(entry.base, i - 1))
                throw Error(ErrorCode::InvalidInput, "base elements cannot be topped up");
        }
        if (entry.alphas.back() != Rat(k_) - set_size(entry.base))
            throw Error(ErrorCode::InvalidInput, "breakpoints must sum to the missing seats");
        total += entry.weight;
    }
    if (total != 1) throw Error(ErrorCode::InvalidInput, "entry weights must sum to 1");
}

ElemSet FixedSizeSampler::top_up(const Entry& entry, const Rat& tau) const {
    ElemSet t = 0;
    for (int i = 1; i <= ground_size_; ++i) {
        const Rat& lo = entry.alphas[i - 1];
        const Rat& hi = entry.alphas[i];
        if (lo == hi) continue;
        Int h = rat_ceil(lo - tau);
        if (h < 0) h = 0;
        if (tau + Rat(h) < hi) t |= singleton(i - 1);
    }
    return t;
}

ElemSet FixedSizeSampler::draw(std::mt19937_64& rng) const {
    static const Int kTwo64 = Int(1) << 64;
    Rat pick(Int(rng()), kTwo64);
    const Entry* chosen = &entries_.back();
    Rat cum = 0;
    for (const Entry& entry : entries_) {
        cum += entry.weight;
        if (pick < cum) { chosen = &entry; break; }
    }
    Rat tau(Int(rng()), kTwo64);
    return chosen->base | top_up(*chosen, tau);
}

ElemSet FixedSizeSampler::draw(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    return draw(rng);
}

Decomposition FixedSizeSampler::exact_law() const {
    Decomposition law;
    for (const Entry& entry : entries_) {
        std::set<Rat> cuts{Rat(0), Rat(1)};
        for (const Rat& a : entry.alphas) cuts.insert(a - Rat(rat_floor(a)));
        std::vector<Rat> sorted(cuts.begin(), cuts.end());
        for (size_t i = 0; i + 1 < sorted.size(); ++i) {
            Rat mid = (sorted[i] + sorted[i + 1]) / 2;
            law.add(entry.base | top_up(entry, mid),
                    entry.weight * (sorted[i + 1] - sorted[i]));
        }
    }
    return law;
}

FixedSizeSampler committee_round(const CommitteeInstance& inst, const Decomposition& z) {
    inst.validate();
    int n = inst.ground.size();
    Marginals rho = z.marginals(n);
    {
        Rat total = 0;
        for (const Rat& v : rho.values) total += v;
        if (total != inst.k)
            throw Error(ErrorCode::CardinalityMismatch,
                        "marginals sum to " + to_string(total) + ", expected the committee size");
    }
    if (rho.values != inst.marginals().values)
        throw Error(ErrorCode::InvalidInput, "decomposition does not match the vote marginals");
    if (z.total() != 1) throw Error(ErrorCode::InvalidInput, "weights must sum to 1");

    Rat eps = 0;
    for (const Rat& v : rho.values)
        if (v > eps) eps = v;

    // Shrink each support set to one representative per intersected group.
    Decomposition shrunk;
    for (const auto& [s, w] : z.support) {
        ElemSet rep = 0;
        for (ElemSet p : inst.groups) {
            ElemSet hit = p & s;
            if (hit) rep |= singleton(std::countr_zero(hit));
        }
        shrunk.add(rep, w);
    }
    Decomposition zhat;
    for (const auto& [s, w] : shrunk.support) zhat.add(s, (1 - eps) * w);
    zhat.add(0, eps);

    std::vector<Rat> supplies, demands(n);
    std::vector<lp::TransportArc> arcs;
    for (int i = 0; i < static_cast<int>(zhat.support.size()); ++i) {
        const auto& [s, w] = zhat.support[i];
        supplies.push_back(Rat(inst.k - set_size(s)) * w);
        for (int e = 0; e < n; ++e)
            if (!contains(s, e)) arcs.push_back({i, e, w});
    }
    for (int e = 0; e < n; ++e) demands[e] = rho[e] - zhat.marginal(e);
    lp::TransportResult flow = lp::transport_feasible(supplies, demands, arcs);
    if (!flow.feasible)
        throw Error(ErrorCode::OracleInconsistent, "seat transportation program infeasible");

    std::vector<FixedSizeSampler::Entry> entries;
    for (int i = 0; i < static_cast<int>(zhat.support.size()); ++i) {
        const auto& [s, w] = zhat.support[i];
        FixedSizeSampler::Entry entry;
        entry.base = s;
        entry.weight = w;
        entry.alphas.assign(n + 1, Rat(0));
        std::vector<Rat> x(n, Rat(0));
        for (size_t a = 0; a < arcs.size(); ++a)
            if (arcs[a].source == i) x[arcs[a].sink] = flow.flow[a];
        for (int e = 0; e < n; ++e) entry.alphas[e + 1] = entry.alphas[e] + x[e] / w;
        entries.push_back(std::move(entry));
    }
    return FixedSizeSampler(n, inst.k, std::move(entries));
}

CommitteeResult solve_committee(const CommitteeInstance& inst) {
    inst.validate();
    Instance fam;
    fam.ground = inst.ground;
    std::map<ElemSet, Rat> table;
    for (size_t i = 0; i < inst.groups.size(); ++i) {
        auto [it, fresh] = table.emplace(inst.groups[i], inst.group_pi[i]);
        if (!fresh && inst.group_pi[i] > it->second) it->second = inst.group_pi[i];
    }
    for (const auto& [p, v] : table) fam.members.push_back(p);
    fam.req = Requirements::table(table);
    fam.validate();

    Marginals rho = inst.marginals();
    auto z = decompose_by_lp(fam, rho);
    if (!z)
        throw Error(ErrorCode::InfeasibleMarginals,
                    "no distribution meets the marginals and group requirements");
    FixedSizeSampler sampler = committee_round(inst, *z);
    return {std::move(rho), std::move(*z), std::move(sampler)};
}

}  // namespace mdx
