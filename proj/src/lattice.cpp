#include "mdx/lattice.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "mdx/exactlp.hpp"

namespace mdx {

Marginals greedy_point(const GreedySupport& support, int ground_size) {
    Marginals point(std::vector<Rat>(ground_size, Rat(0)));
    for (int i = support.size() - 1; i >= 0; --i) {
        Rat rest = 0;
        for_each_element(support.members[i], [&](int e) {
            if (e != support.elems[i]) rest += point[e];
        });
        point[support.elems[i]] = support.pis[i] - rest;
    }
    return point;
}

namespace {

bool in_polyhedron(const LatticeOracle& oracle, const Rat& shift, const Marginals& point) {
    for (const Rat& v : point.values)
        if (v < 0 || v > 1) return false;
    for (ElemSet p : oracle.enumerate_members())
        if (point.sum_over(p) < oracle.pi(p) - shift) return false;
    return true;
}

// Depth-first search over the element choices e_i. `accept` decides whether a
// completed run (with its solved point) is the one we want.
bool greedy_search(const LatticeOracle& oracle, const Rat& shift, ElemSet allowed,
                   GreedySupport& support,
                   const std::function<bool(const GreedySupport&, const Marginals&)>& accept) {
    auto m = oracle.max_member(allowed);
    if (m && (m->first & ~allowed))
        throw Error(ErrorCode::OracleInconsistent, "sublattice maximum leaves the allowed set");
    if (!m || m->second - shift <= 0) {
        Marginals point = greedy_point(support, oracle.ground().size());
        return accept(support, point);
    }
    for (int e : elements_of(m->first)) {
        support.elems.push_back(e);
        support.members.push_back(m->first);
        support.pis.push_back(m->second - shift);
        if (greedy_search(oracle, shift, allowed & ~singleton(e), support, accept)) return true;
        support.elems.pop_back();
        support.members.pop_back();
        support.pis.pop_back();
    }
    return false;
}

}  // namespace

std::pair<Marginals, GreedySupport> two_phase_greedy(const LatticeOracle& oracle,
                                                     const Rat& shift) {
    GreedySupport support;
    Marginals out;
    bool found = greedy_search(oracle, shift, oracle.ground().full_set(), support,
                               [&](const GreedySupport&, const Marginals& point) {
                                   if (!in_polyhedron(oracle, shift, point)) return false;
                                   out = point;
                                   return true;
                               });
    if (!found)
        throw Error(ErrorCode::OracleInconsistent,
                    "no greedy element choice yields a feasible extreme point");
    return {out, support};
}

std::optional<GreedySupport> support_for_point(const LatticeOracle& oracle, const Marginals& point,
                                               const Rat& shift) {
    GreedySupport support, result;
    bool found = greedy_search(oracle, shift, oracle.ground().full_set(), support,
                               [&](const GreedySupport& s, const Marginals& solved) {
                                   if (solved.values != point.values) return false;
                                   result = s;
                                   return true;
                               });
    if (!found) return std::nullopt;
    return result;
}

ElemSet asc_from_support(const GreedySupport& support) {
    ElemSet s = 0;
    for (int i = support.size() - 1; i >= 0; --i)
        if (!(support.members[i] & s)) s |= singleton(support.elems[i]);
    return s;
}

StarResult max_violated_lattice(const LatticeOracle& oracle, const Marginals& rho) {
    rho.validate();
    std::optional<Violation> worst;
    for (ElemSet p : oracle.enumerate_members()) {
        Rat gap = oracle.pi(p) - rho.sum_over(p);
        if (!worst || gap > worst->gap) worst = Violation{p, gap};
    }
    if (worst && worst->gap > 0) return {false, *worst};
    return {};
}

namespace {

struct Mix {
    std::vector<std::pair<std::vector<Rat>, Rat>> points;
    std::vector<Rat> ray;
};

struct Peeler {
    std::vector<ElemSet> members;  // nonempty members only
    std::vector<Rat> pis;
    int n = 0;

    Rat along(ElemSet p, const std::vector<Rat>& d) const {
        Rat t = 0;
        for_each_element(p, [&](int e) { t += d[e]; });
        return t;
    }

    Mix peel(const std::vector<Rat>& y) const {
        if (n == 0) return Mix{{{y, Rat(1)}}, {}};
        std::vector<std::vector<Rat>> tight;
        for (size_t i = 0; i < members.size(); ++i) {
            Rat val = 0;
            for_each_element(members[i], [&](int e) { val += y[e]; });
            if (val == pis[i]) {
                std::vector<Rat> row(n, Rat(0));
                for_each_element(members[i], [&](int e) { row[e] = 1; });
                tight.push_back(std::move(row));
            }
        }
        for (int e = 0; e < n; ++e) {
            if (y[e] == 0) {
                std::vector<Rat> row(n, Rat(0));
                row[e] = 1;
                tight.push_back(std::move(row));
            }
        }
        std::optional<std::vector<Rat>> dir;
        if (tight.empty()) {
            // No active constraint at all: any coordinate direction moves off y.
            dir = std::vector<Rat>(n, Rat(0));
            (*dir)[0] = 1;
        } else {
            dir = lp::kernel_vector(tight);
        }
        if (!dir) return Mix{{{y, Rat(1)}}, std::vector<Rat>(n, Rat(0))};

        auto max_step = [&](const std::vector<Rat>& d) -> std::optional<Rat> {
            std::optional<Rat> t;
            for (size_t i = 0; i < members.size(); ++i) {
                Rat dd = along(members[i], d);
                if (dd >= 0) continue;
                Rat slack = -pis[i];
                for_each_element(members[i], [&](int e) { slack += y[e]; });
                Rat bound = slack / -dd;
                if (!t || bound < *t) t = bound;
            }
            for (int e = 0; e < n; ++e) {
                if (d[e] >= 0) continue;
                Rat bound = y[e] / -d[e];
                if (!t || bound < *t) t = bound;
            }
            return t;
        };

        std::vector<Rat> d = *dir, neg(n);
        for (int e = 0; e < n; ++e) neg[e] = -d[e];
        auto t_plus = max_step(d), t_minus = max_step(neg);
        if (!t_plus && !t_minus)
            throw Error(ErrorCode::OracleInconsistent, "covering polyhedron contains a line");
        if (!t_plus) {
            std::swap(d, neg);
            std::swap(t_plus, t_minus);
        }
        auto shifted = [&](const std::vector<Rat>& base, const std::vector<Rat>& dd, const Rat& t) {
            std::vector<Rat> out(n);
            for (int e = 0; e < n; ++e) out[e] = base[e] + t * dd[e];
            return out;
        };
        if (!t_minus) {
            // neg is a recession direction: split off the ray and recurse on
            // the point where the forward move hits a new constraint.
            Mix inner = peel(shifted(y, d, *t_plus));
            for (int e = 0; e < n; ++e) inner.ray[e] += *t_plus * neg[e];
            return inner;
        }
        Mix up = peel(shifted(y, d, *t_plus));
        Mix down = peel(shifted(y, neg, *t_minus));
        Rat total = *t_plus + *t_minus;
        Rat a = *t_minus / total, b = *t_plus / total;
        Mix out;
        for (auto& [pt, w] : up.points) out.points.emplace_back(std::move(pt), a * w);
        for (auto& [pt, w] : down.points) out.points.emplace_back(std::move(pt), b * w);
        out.ray.assign(n, Rat(0));
        for (int e = 0; e < n; ++e) out.ray[e] = a * up.ray[e] + b * down.ray[e];
        return out;
    }
};

}  // namespace

CaratheodoryResult caratheodory_decompose(const LatticeOracle& oracle, const Marginals& rho) {
    {
        StarResult star = max_violated_lattice(oracle, rho);
        if (!star.feasible)
            throw Error(ErrorCode::NotInYStar,
                        "marginals outside the covering polytope, gap " +
                            to_string(star.violation.gap));
    }
    Peeler peeler;
    peeler.n = oracle.ground().size();
    for (ElemSet p : oracle.enumerate_members()) {
        if (p == 0) continue;
        peeler.members.push_back(p);
        peeler.pis.push_back(oracle.pi(p));
    }
    Mix mix = peeler.peel(rho.values);

    // Merge duplicate extreme points before the support reduction.
    std::map<std::vector<Rat>, Rat> merged;
    for (auto& [pt, w] : mix.points) merged[pt] += w;
    std::vector<std::vector<Rat>> points;
    points.reserve(merged.size());
    for (auto& [pt, w] : merged) points.push_back(pt);

    std::vector<Rat> target(peeler.n);
    for (int e = 0; e < peeler.n; ++e) target[e] = rho[e] - mix.ray[e];
    auto weights = lp::convex_combination(target, points);
    if (!weights)
        throw Error(ErrorCode::OracleInconsistent, "extreme points fail to recombine");

    CaratheodoryResult out;
    out.ray = std::move(mix.ray);
    for (size_t i = 0; i < points.size(); ++i) {
        if ((*weights)[i] == 0) continue;
        out.points.push_back(std::move(points[i]));
        out.weights.push_back((*weights)[i]);
    }
    return out;
}

Instance make_lattice_instance(const LatticeOracle& oracle) {
    Instance inst;
    inst.ground = oracle.ground();
    inst.members = oracle.enumerate_members();
    const LatticeOracle* ptr = &oracle;
    inst.req = Requirements::callback([ptr](ElemSet p) { return ptr->pi(p); });
    inst.sort_members();
    inst.validate();
    return inst;
}

namespace {

class SupportAscOracle : public AscOracle {
  public:
    explicit SupportAscOracle(const GreedySupport& support) : support_(&support) {}
    ElemSet next_asc(const ResidualState& state, const Instance&) override {
        GreedySupport trunc;
        for (int i = 0; i < support_->size(); ++i) {
            if (support_->pis[i] - state.offset > 0) {
                if (i != trunc.size())
                    throw Error(ErrorCode::OracleInconsistent,
                                "positive-requirement support entries are not a prefix");
                trunc.elems.push_back(support_->elems[i]);
                trunc.members.push_back(support_->members[i]);
                trunc.pis.push_back(support_->pis[i]);
            }
        }
        if (trunc.size() == 0)
            throw Error(ErrorCode::OracleFailure, "support exhausted while requirements remain");
        return asc_from_support(trunc);
    }

  private:
    const GreedySupport* support_;
};

}  // namespace

Decomposition decompose_extreme(const LatticeOracle& oracle, const Marginals& point,
                                const GreedySupport& support) {
    Instance inst = make_lattice_instance(oracle);
    SupportAscOracle asc(support);
    return decompose(inst, point, asc).z;
}

Decomposition decompose_lattice(const LatticeOracle& oracle, const Marginals& rho) {
    rho.validate();
    CaratheodoryResult parts = caratheodory_decompose(oracle, rho);
    Decomposition mixed;
    if (parts.points.empty()) mixed.add(0, 1);
    for (size_t i = 0; i < parts.points.size(); ++i) {
        Marginals point{parts.points[i]};
        auto support = support_for_point(oracle, point);
        if (!support)
            throw Error(ErrorCode::OracleInconsistent,
                        "no greedy support certifies a peeled extreme point");
        Decomposition z = decompose_extreme(oracle, point, *support);
        for (const auto& [s, w] : z.support) mixed.add(s, w * parts.weights[i]);
    }
    return lift_marginals(mixed, rho);
}

ExplicitLattice::ExplicitLattice(GroundSet ground, std::vector<std::pair<ElemSet, Rat>> members,
                                 std::vector<std::vector<bool>> leq_matrix)
    : ground_(std::move(ground)), members_(std::move(members)), leq_(std::move(leq_matrix)) {
    size_t n = members_.size();
    if (leq_.size() != n) throw Error(ErrorCode::DimensionMismatch, "order matrix size mismatch");
    for (const auto& row : leq_)
        if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "order matrix size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (!leq_[i][i]) throw Error(ErrorCode::InvalidInput, "order must be reflexive");
        for (size_t j = 0; j < n; ++j)
            if (i != j && members_[i].first == members_[j].first)
                throw Error(ErrorCode::InvalidInput, "duplicate member set");
    }
}

int ExplicitLattice::index_of(ElemSet member) const {
    for (size_t i = 0; i < members_.size(); ++i)
        if (members_[i].first == member) return static_cast<int>(i);
    throw Error(ErrorCode::InvalidInput, "not a member of the lattice");
}

std::optional<std::pair<ElemSet, Rat>> ExplicitLattice::max_member(ElemSet allowed) const {
    std::vector<int> inside;
    for (size_t i = 0; i < members_.size(); ++i)
        if (!(members_[i].first & ~allowed)) inside.push_back(static_cast<int>(i));
    if (inside.empty()) return std::nullopt;
    for (int i : inside) {
        bool top = true;
        for (int j : inside)
            if (!leq_[j][i]) { top = false; break; }
        if (top) return members_[i];
    }
    throw Error(ErrorCode::OracleInconsistent, "sublattice has no maximum element");
}

Rat ExplicitLattice::pi(ElemSet member) const { return members_[index_of(member)].second; }

bool ExplicitLattice::leq(ElemSet p, ElemSet q) const {
    return leq_[index_of(p)][index_of(q)];
}

ElemSet ExplicitLattice::meet(ElemSet p, ElemSet q) const {
    int pi_ = index_of(p), qi = index_of(q);
    std::vector<int> below;
    for (size_t i = 0; i < members_.size(); ++i)
        if (leq_[i][pi_] && leq_[i][qi]) below.push_back(static_cast<int>(i));
    for (int i : below) {
        bool top = true;
        for (int j : below)
            if (!leq_[j][i]) { top = false; break; }
        if (top) return members_[i].first;
    }
    throw Error(ErrorCode::OracleInconsistent, "pair has no meet");
}

ElemSet ExplicitLattice::join(ElemSet p, ElemSet q) const {
    int pi_ = index_of(p), qi = index_of(q);
    std::vector<int> above;
    for (size_t i = 0; i < members_.size(); ++i)
        if (leq_[pi_][i] && leq_[qi][i]) above.push_back(static_cast<int>(i));
    for (int i : above) {
        bool bottom = true;
        for (int j : above)
            if (!leq_[i][j]) { bottom = false; break; }
        if (bottom) return members_[i].first;
    }
    throw Error(ErrorCode::OracleInconsistent, "pair has no join");
}

std::vector<ElemSet> ExplicitLattice::enumerate_members() const {
    std::vector<ElemSet> out;
    for (const auto& [s, v] : members_) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

RootedCutLattice::RootedCutLattice(int num_nodes, std::vector<std::pair<int, int>> edges, int root,
                                   std::vector<Rat> alpha, Rat beta)
    : num_nodes_(num_nodes),
      edges_(std::move(edges)),
      root_(root),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)) {
    if (root_ < 0 || root_ >= num_nodes_) throw Error(ErrorCode::InvalidInput, "root out of range");
    for (auto [u, v] : edges_)
        if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_ || u == v)
            throw Error(ErrorCode::InvalidInput, "bad edge");
    if (static_cast<int>(alpha_.size()) != num_nodes_)
        throw Error(ErrorCode::DimensionMismatch, "one reward per node expected");
    if (!(beta_ > 0)) throw Error(ErrorCode::InvalidInput, "beta must be positive");
    Rat total = 0;
    for (int v = 0; v < num_nodes_; ++v) {
        if (alpha_[v] < 0) throw Error(ErrorCode::InvalidInput, "negative node reward");
        if (v != root_) total += alpha_[v];
    }
    if (total > beta_)
        throw Error(ErrorCode::InvalidInput, "requirements exceed 1: rewards sum above beta");
    if (num_nodes_ - 1 > global_caps().enumeration_elements)
        throw Error(ErrorCode::ScaleExceeded, "too many nodes to enumerate cuts");
    ground_ = GroundSet::numbered(static_cast<int>(edges_.size()), "f");

    // Connectivity of the whole graph guarantees distinct cuts for distinct
    // node sets.
    {
        std::vector<char> seen(num_nodes_, 0);
        std::vector<int> stack{root_};
        seen[root_] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [a, b] : edges_) {
                int other = a == u ? b : b == u ? a : -1;
                if (other >= 0 && !seen[other]) seen[other] = 1, stack.push_back(other);
            }
        }
        for (int v = 0; v < num_nodes_; ++v)
            if (!seen[v]) throw Error(ErrorCode::InvalidInput, "graph must be connected");
    }

    std::uint64_t node_universe = 0;
    for (int v = 0; v < num_nodes_; ++v)
        if (v != root_) node_universe |= std::uint64_t{1} << v;
    for (std::uint64_t u = node_universe;; u = (u - 1) & node_universe) {
        member_nodes_.emplace_back(cut_of(u), u);
        if (u == 0) break;
    }
    std::sort(member_nodes_.begin(), member_nodes_.end());
    for (size_t i = 1; i < member_nodes_.size(); ++i)
        if (member_nodes_[i].first == member_nodes_[i - 1].first)
            throw Error(ErrorCode::OracleInconsistent, "distinct node sets share a cut");
}

ElemSet RootedCutLattice::cut_of(std::uint64_t nodes) const {
    ElemSet cut = 0;
    for (size_t i = 0; i < edges_.size(); ++i) {
        bool a = (nodes >> edges_[i].first) & 1, b = (nodes >> edges_[i].second) & 1;
        if (a != b) cut |= singleton(static_cast<int>(i));
    }
    return cut;
}

std::uint64_t RootedCutLattice::cut_nodes(ElemSet member) const {
    auto it = std::lower_bound(member_nodes_.begin(), member_nodes_.end(), member,
                               [](const auto& a, ElemSet b) { return a.first < b; });
    if (it == member_nodes_.end() || it->first != member)
        throw Error(ErrorCode::InvalidInput, "not a cut of this lattice");
    return it->second;
}

std::optional<std::pair<ElemSet, Rat>> RootedCutLattice::max_member(ElemSet allowed) const {
    // Root component of the graph without the allowed edges; everything the
    // root cannot reach goes to the far side, and that cut only uses allowed
    // edges.
    std::vector<char> seen(num_nodes_, 0);
    std::vector<int> stack{root_};
    seen[root_] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (size_t i = 0; i < edges_.size(); ++i) {
            if (contains(allowed, static_cast<int>(i))) continue;
            auto [a, b] = edges_[i];
            int other = a == u ? b : b == u ? a : -1;
            if (other >= 0 && !seen[other]) seen[other] = 1, stack.push_back(other);
        }
    }
    std::uint64_t far = 0;
    for (int v = 0; v < num_nodes_; ++v)
        if (!seen[v]) far |= std::uint64_t{1} << v;
    Rat value = 0;
    for (int v = 0; v < num_nodes_; ++v)
        if ((far >> v) & 1) value += alpha_[v];
    return std::make_pair(cut_of(far), value / beta_);
}

Rat RootedCutLattice::pi(ElemSet member) const {
    std::uint64_t nodes = cut_nodes(member);
    Rat value = 0;
    for (int v = 0; v < num_nodes_; ++v)
        if ((nodes >> v) & 1) value += alpha_[v];
    return value / beta_;
}

bool RootedCutLattice::leq(ElemSet p, ElemSet q) const {
    std::uint64_t up = cut_nodes(p), uq = cut_nodes(q);
    return (up & ~uq) == 0;
}

ElemSet RootedCutLattice::meet(ElemSet p, ElemSet q) const {
    return cut_of(cut_nodes(p) & cut_nodes(q));
}

ElemSet RootedCutLattice::join(ElemSet p, ElemSet q) const {
    return cut_of(cut_nodes(p) | cut_nodes(q));
}

std::vector<ElemSet> RootedCutLattice::enumerate_members() const {
    std::vector<ElemSet> out;
    out.reserve(member_nodes_.size());
    for (const auto& [cut, nodes] : member_nodes_) out.push_back(cut);
    return out;
}

}  // namespace mdx
