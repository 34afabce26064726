#include "mdx/balanced.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mdx/exactlp.hpp"

namespace mdx {

void Hypergraph::validate() const {
    ElemSet full = ground.full_set();
    for (ElemSet p : members) {
        if (p == 0) throw Error(ErrorCode::InvalidInput, "empty hypergraph member");
        if (p & ~full) throw Error(ErrorCode::InvalidInput, "member not a subset of the ground set");
    }
}

bool is_special_cycle(const Hypergraph& h, const SpecialCycle& cycle) {
    int k = cycle.length();
    if (k < 3 || static_cast<int>(cycle.members.size()) != k) return false;
    ElemSet c = 0;
    for (int e : cycle.elems) {
        if (contains(c, e)) return false;
        c |= singleton(e);
    }
    std::set<ElemSet> distinct(cycle.members.begin(), cycle.members.end());
    if (static_cast<int>(distinct.size()) != k) return false;
    for (ElemSet p : cycle.members)
        if (std::find(h.members.begin(), h.members.end(), p) == h.members.end()) return false;
    for (int i = 0; i < k; ++i) {
        ElemSet expected = singleton(cycle.elems[i]) | singleton(cycle.elems[(i + 1) % k]);
        if ((cycle.members[i] & c) != expected) return false;
    }
    return true;
}

namespace {

struct CycleSearch {
    const Hypergraph* h;
    long long budget;
    std::vector<int> elems;
    std::vector<ElemSet> members;
    ElemSet used_elems = 0;

    bool member_used(ElemSet p) const {
        return std::find(members.begin(), members.end(), p) != members.end();
    }

    // Extends the alternating sequence; returns true once an odd cycle closes.
    bool extend() {
        if (--budget < 0) throw Error(ErrorCode::ScaleExceeded, "special-cycle search budget");
        int t = static_cast<int>(elems.size());
        int last = elems.back();
        // Try to close: need an unused member containing e_t and e_1 and
        // nothing else from the cycle.
        if (t >= 3 && t % 2 == 1) {
            ElemSet close = singleton(last) | singleton(elems[0]);
            for (ElemSet p : h->members) {
                if (member_used(p)) continue;
                if ((p & used_elems) == close) {
                    members.push_back(p);
                    return true;
                }
            }
        }
        if (t >= h->ground.size()) return false;
        for (ElemSet p : h->members) {
            if (member_used(p)) continue;
            if (!contains(p, last)) continue;
            // The new member may meet the existing cycle only in {e_t, e_next}.
            ElemSet extra = p & used_elems & ~singleton(last);
            if (extra) continue;
            for (int e : elements_of(p & ~used_elems)) {
                if (e < elems[0]) continue;  // canonical start: smallest element first
                // No earlier member may contain the new element.
                bool clash = false;
                for (ElemSet q : members)
                    if (contains(q, e)) { clash = true; break; }
                if (clash) continue;
                elems.push_back(e);
                members.push_back(p);
                used_elems |= singleton(e);
                if (extend()) return true;
                used_elems &= ~singleton(e);
                members.pop_back();
                elems.pop_back();
            }
        }
        return false;
    }
};

}  // namespace

std::optional<SpecialCycle> find_odd_special_cycle(const Hypergraph& h) {
    h.validate();
    CycleSearch search;
    search.h = &h;
    search.budget = global_caps().path_enumeration * 100;
    for (int start = 0; start < h.ground.size(); ++start) {
        search.elems = {start};
        search.members.clear();
        search.used_elems = singleton(start);
        if (search.extend()) {
            SpecialCycle cycle{search.elems, search.members};
            if (!is_special_cycle(h, cycle))
                throw Error(ErrorCode::OracleInconsistent, "search produced a malformed cycle");
            return cycle;
        }
    }
    return std::nullopt;
}

Requirements pi_rho(const Hypergraph& h, const Marginals& rho) {
    std::map<ElemSet, Rat> table;
    for (ElemSet p : h.members) {
        Rat v = rho.sum_over(p);
        table[p] = v > 1 ? Rat(1) : v;
    }
    return Requirements::table(std::move(table));
}

namespace {

void collect_transversals(const std::vector<ElemSet>& members, ElemSet current,
                          std::set<ElemSet>& out, long long& budget) {
    if (--budget < 0) throw Error(ErrorCode::ScaleExceeded, "transversal enumeration budget");
    ElemSet unhit = 0;
    bool found = false;
    for (ElemSet p : members) {
        if (!(p & current)) {
            unhit = p;
            found = true;
            break;
        }
    }
    if (!found) {
        // Keep only inclusion-minimal hitting sets: every element needs a
        // member it hits alone.
        for (int e : elements_of(current)) {
            bool witness = false;
            for (ElemSet p : members)
                if ((p & current) == singleton(e)) { witness = true; break; }
            if (!witness) return;
        }
        if (static_cast<long long>(out.size()) >= global_caps().transversal_enumeration)
            throw Error(ErrorCode::ScaleExceeded, "too many minimal transversals");
        out.insert(current);
        return;
    }
    for (int e : elements_of(unhit))
        collect_transversals(members, current | singleton(e), out, budget);
}

}  // namespace

std::vector<ElemSet> minimal_transversals(const std::vector<ElemSet>& members) {
    for (ElemSet p : members)
        if (p == 0) throw Error(ErrorCode::InvalidInput, "empty member has no transversal");
    std::set<ElemSet> out;
    long long budget = global_caps().transversal_enumeration * 100;
    collect_transversals(members, 0, out, budget);
    return {out.begin(), out.end()};
}

Decomposition perfect_decompose(const Hypergraph& h, const Marginals& rho) {
    h.validate();
    rho.validate();
    if (rho.size() != h.ground.size())
        throw Error(ErrorCode::DimensionMismatch, "marginal vector size mismatch");

    int n = h.ground.size();
    std::vector<ElemSet> members = h.members;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    int m = static_cast<int>(members.size());
    if (n + m > kMaxGroundSize)
        throw Error(ErrorCode::ScaleExceeded, "augmented ground set larger than 62 elements");

    // One auxiliary element per member; the slack of the clipped target
    // becomes its marginal, so a transversal may skip P only by paying for
    // the auxiliary element instead.
    std::vector<Rat> rho_aug(rho.values);
    std::vector<ElemSet> members_aug;
    for (int i = 0; i < m; ++i) {
        Rat target = rho.sum_over(members[i]);
        if (target > 1) target = 1;
        rho_aug.push_back(1 - target);
        members_aug.push_back(members[i] | singleton(n + i));
    }

    std::vector<ElemSet> transversals = minimal_transversals(members_aug);
    int vars = static_cast<int>(transversals.size());
    if (vars > global_caps().lp_variables)
        throw Error(ErrorCode::ScaleExceeded, "too many transversal variables");

    lp::LinearProgram prog;
    prog.objective.assign(vars, Rat(0));
    {
        std::vector<Rat> row(vars, Rat(1));
        prog.add_constraint(std::move(row), lp::Rel::Eq, Rat(1));
    }
    for (int e = 0; e < n + m; ++e) {
        std::vector<Rat> row(vars, Rat(0));
        for (int j = 0; j < vars; ++j)
            if (contains(transversals[j], e)) row[j] = 1;
        prog.add_constraint(std::move(row), lp::Rel::Le, rho_aug[e]);
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal) {
        std::string cert = "farkas:";
        for (const Rat& f : sol.farkas) cert += " " + to_string(f);
        throw Error(ErrorCode::NotBalanced,
                    "no fractional transversal expression for the marginals; " + cert);
    }

    ElemSet original = rho.size() == 0 ? 0 : (~ElemSet{0} >> (64 - n));
    Decomposition z;
    for (int j = 0; j < vars; ++j)
        if (sol.point[j] != 0) z.add(transversals[j] & original, sol.point[j]);
    return lift_marginals(z, rho);
}

}  // namespace mdx
