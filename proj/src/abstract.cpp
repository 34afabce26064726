#include "mdx/abstract.hpp"

#include <algorithm>
#include <map>

namespace mdx {

AbstractNetwork::AbstractNetwork(GroundSet ground, std::vector<OrderedMember> members)
    : ground_(std::move(ground)), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end(),
              [](const OrderedMember& a, const OrderedMember& b) { return a.set < b.set; });
    ElemSet full = ground_.full_set();
    for (const OrderedMember& m : members_) {
        if (m.set & ~full)
            throw Error(ErrorCode::InvalidInput, "member not a subset of the ground set");
        ElemSet seen = 0;
        for (int e : m.order) {
            if (!contains(m.set, e) || contains(seen, e))
                throw Error(ErrorCode::InvalidInput, "member order must list its elements once each");
            seen |= singleton(e);
        }
        if (seen != m.set)
            throw Error(ErrorCode::InvalidInput, "member order incomplete");
    }
    for (size_t i = 1; i < members_.size(); ++i)
        if (members_[i].set == members_[i - 1].set)
            throw Error(ErrorCode::InvalidInput, "duplicate member set");
}

ElemSet AbstractNetwork::prefix(int p, int e) const {
    ElemSet out = 0;
    for (int x : members_[p].order) {
        out |= singleton(x);
        if (x == e) return out;
    }
    throw Error(ErrorCode::InvalidInput, "element not in member");
}

ElemSet AbstractNetwork::suffix(int q, int e) const {
    ElemSet out = 0;
    bool past = false;
    for (int x : members_[q].order) {
        if (x == e) past = true;
        if (past) out |= singleton(x);
    }
    if (!past) throw Error(ErrorCode::InvalidInput, "element not in member");
    return out;
}

int AbstractNetwork::cross(int p, int e, int q) const {
    ElemSet allowed = prefix(p, e) | suffix(q, e);
    for (size_t i = 0; i < members_.size(); ++i)
        if (!(members_[i].set & ~allowed)) return static_cast<int>(i);
    throw Error(ErrorCode::OracleInconsistent, "no member realizes the crossing");
}

std::optional<CrossCounterExample> check_weak_conservation(const AbstractNetwork& net,
                                                           const Requirements& req) {
    const auto& ms = net.members();
    int n = static_cast<int>(ms.size());
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            ElemSet common = ms[p].set & ms[q].set;
            for (int e : elements_of(common)) {
                Rat lhs = req(ms[p].set) + req(ms[q].set);
                Rat rhs = req(ms[net.cross(p, e, q)].set) + req(ms[net.cross(q, e, p)].set);
                if (lhs < rhs) return CrossCounterExample{p, q, e, lhs, rhs};
            }
        }
    }
    return std::nullopt;
}

std::vector<int> enumerate_tight(const AbstractNetwork& net, const Requirements& req,
                                 const ResidualState& state) {
    std::vector<int> tight;
    const auto& ms = net.members();
    for (size_t i = 0; i < ms.size(); ++i)
        if (state.rho_bar.sum_over(ms[i].set) == req(ms[i].set) - state.offset)
            tight.push_back(static_cast<int>(i));
    return tight;
}

ElemSet abstract_asc(const AbstractNetwork& net, const Requirements& req,
                     const ResidualState& state) {
    ElemSet support = state.rho_bar.support();
    std::vector<int> tight = enumerate_tight(net, req, state);
    ElemSet excluded = 0;
    for (int t : tight) {
        bool earlier_support = false;
        for (int e : net.members()[t].order) {
            if (earlier_support && contains(support, e)) excluded |= singleton(e);
            if (contains(support, e)) earlier_support = true;
        }
    }
    return support & ~excluded;
}

DigraphPathSystem::DigraphPathSystem(Digraph g, int source, int sink)
    : g_(std::move(g)), source_(source), sink_(sink) {
    for (auto [u, v] : g_.arcs)
        if (u < 0 || v < 0 || u >= g_.num_nodes || v >= g_.num_nodes)
            throw Error(ErrorCode::InvalidInput, "arc endpoint out of range");
    if (source_ < 0 || sink_ < 0 || source_ >= g_.num_nodes || sink_ >= g_.num_nodes ||
        source_ == sink_)
        throw Error(ErrorCode::InvalidInput, "bad source/sink");
}

std::vector<std::vector<int>> DigraphPathSystem::enumerate_paths() const {
    std::vector<std::vector<int>> out_arcs(g_.num_nodes);
    for (size_t i = 0; i < g_.arcs.size(); ++i) out_arcs[g_.arcs[i].first].push_back(static_cast<int>(i));

    std::vector<std::vector<int>> paths;
    std::vector<int> current;
    std::vector<char> visited(g_.num_nodes, 0);
    long long cap = global_caps().path_enumeration;

    std::function<void(int)> dfs = [&](int node) {
        if (node == sink_) {
            if (static_cast<long long>(paths.size()) >= cap)
                throw Error(ErrorCode::ScaleExceeded, "too many source-sink paths");
            paths.push_back(current);
            return;
        }
        visited[node] = 1;
        for (int a : out_arcs[node]) {
            int next = g_.arcs[a].second;
            if (visited[next]) continue;
            current.push_back(a);
            dfs(next);
            current.pop_back();
        }
        visited[node] = 0;
    };
    dfs(source_);
    std::sort(paths.begin(), paths.end());
    return paths;
}

AbstractNetwork DigraphPathSystem::to_network(const GroundSet& ground) const {
    if (ground.size() != static_cast<int>(g_.arcs.size()))
        throw Error(ErrorCode::DimensionMismatch, "ground set must have one element per arc");
    std::vector<OrderedMember> members;
    for (const auto& path : enumerate_paths()) {
        OrderedMember m;
        m.order = path;
        for (int a : path) m.set |= singleton(a);
        members.push_back(std::move(m));
    }
    return AbstractNetwork(ground, std::move(members));
}

std::vector<int> DigraphPathSystem::cross_paths(const std::vector<int>& p, int e,
                                                const std::vector<int>& q) const {
    std::vector<int> walk;
    for (int a : p) {
        walk.push_back(a);
        if (a == e) break;
    }
    if (walk.empty() || walk.back() != e)
        throw Error(ErrorCode::InvalidInput, "crossing element not on the first path");
    bool past = false;
    for (int a : q) {
        if (a == e) past = true;
        else if (past) walk.push_back(a);
    }
    if (!past) throw Error(ErrorCode::InvalidInput, "crossing element not on the second path");
    // Cut out the cycle at the first repeated node until the walk is simple.
    for (;;) {
        std::map<int, int> first_seen;  // node -> index in node sequence
        first_seen[g_.arcs[walk[0]].first] = 0;
        bool cut = false;
        for (size_t i = 0; i < walk.size(); ++i) {
            int node = g_.arcs[walk[i]].second;
            auto it = first_seen.find(node);
            if (it != first_seen.end()) {
                walk.erase(walk.begin() + it->second, walk.begin() + i + 1);
                cut = true;
                break;
            }
            first_seen[node] = static_cast<int>(i) + 1;
        }
        if (!cut) break;
    }
    return walk;
}

std::vector<int> DigraphPathSystem::shortest_path(const std::vector<Rat>& weights) const {
    // Bellman-Ford over exact rationals; weights are nonnegative, ties broken
    // toward the smaller incoming arc index.
    int n = g_.num_nodes;
    std::vector<std::optional<Rat>> dist(n);
    std::vector<int> pred(n, -1);
    dist[source_] = Rat(0);
    for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (size_t a = 0; a < g_.arcs.size(); ++a) {
            auto [u, v] = g_.arcs[a];
            if (!dist[u]) continue;
            Rat cand = *dist[u] + weights[a];
            if (!dist[v] || cand < *dist[v] ||
                (cand == *dist[v] && static_cast<int>(a) < pred[v])) {
                if (!dist[v] || cand < *dist[v]) changed = true;
                dist[v] = cand;
                pred[v] = static_cast<int>(a);
            }
        }
        if (!changed) break;
    }
    if (!dist[sink_]) return {};
    std::vector<int> path;
    int node = sink_;
    int guard = g_.num_nodes;
    while (node != source_) {
        if (guard-- < 0)
            throw Error(ErrorCode::OracleFailure, "predecessor chain cycles (zero-weight cycle)");
        int a = pred[node];
        path.push_back(a);
        node = g_.arcs[a].first;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

StarResult DigraphPathSystem::max_violated_affine(const std::vector<Rat>& mu,
                                                  const Marginals& rho) const {
    for (const Rat& m : mu)
        if (m < 0 || m > 1) throw Error(ErrorCode::InvalidInput, "cost coefficients must be in [0,1]");
    std::vector<Rat> w(g_.arcs.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = mu[i] + rho[static_cast<int>(i)];
    std::vector<int> path = shortest_path(w);
    if (path.empty()) throw Error(ErrorCode::NoPath, "sink unreachable from source");
    Rat total = 0;
    ElemSet set = 0;
    for (int a : path) total += w[a], set |= singleton(a);
    if (total < 1) return {false, Violation{set, 1 - total}};
    return {};
}

SeparationFn DigraphPathSystem::affine_separation(std::vector<Rat> mu) const {
    return [this, mu = std::move(mu)](const std::vector<Rat>& y,
                                      const Rat& lambda) -> std::optional<Violation> {
        std::vector<Rat> w(g_.arcs.size());
        for (size_t i = 0; i < w.size(); ++i) w[i] = mu[i] + y[i];
        std::vector<int> path = shortest_path(w);
        if (path.empty()) throw Error(ErrorCode::NoPath, "sink unreachable from source");
        Rat total = 0;
        ElemSet set = 0;
        for (int a : path) total += w[a], set |= singleton(a);
        Rat gap = 1 - lambda - total;
        if (gap > 0) return Violation{set, gap};
        return std::nullopt;
    };
}

Instance make_abstract_instance(const AbstractNetwork& net, Requirements req) {
    Instance inst;
    inst.ground = net.ground();
    for (const OrderedMember& m : net.members()) inst.members.push_back(m.set);
    inst.req = std::move(req);
    inst.sort_members();
    inst.validate();
    return inst;
}

Instance make_digraph_instance(const DigraphPathSystem& sys, const GroundSet& ground,
                               Requirements req, bool attach_separation_mu,
                               std::vector<Rat> mu) {
    Instance inst = make_abstract_instance(sys.to_network(ground), std::move(req));
    if (attach_separation_mu) inst.separate = sys.affine_separation(std::move(mu));
    return inst;
}

}  // namespace mdx
