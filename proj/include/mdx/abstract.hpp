#pragma once

#include <optional>
#include <vector>

#include "mdx/engine.hpp"
#include "mdx/types.hpp"

namespace mdx {

// A member together with its linear order; `order` lists the elements of `set`
// exactly once each, smallest first.
struct OrderedMember {
    ElemSet set = 0;
    std::vector<int> order;
};

struct CrossCounterExample {
    int p = 0, q = 0;
    int elem = 0;
    Rat lhs, rhs;  // pi_P + pi_Q vs pi_{PxQ} + pi_{QxP}
};

class AbstractNetwork {
  public:
    AbstractNetwork() = default;
    AbstractNetwork(GroundSet ground, std::vector<OrderedMember> members);

    const GroundSet& ground() const { return ground_; }
    const std::vector<OrderedMember>& members() const { return members_; }

    // Index of a member realizing P x_e Q: contained in the prefix of P up to e
    // joined with the suffix of Q from e. First member in bitmask order.
    int cross(int p, int e, int q) const;

    ElemSet prefix(int p, int e) const;  // {x in P : x before-or-equal e}
    ElemSet suffix(int q, int e) const;  // {x in Q : e before-or-equal x}

  private:
    GroundSet ground_;
    std::vector<OrderedMember> members_;
};

// Verifies pi_P + pi_Q >= pi_{PxeQ} + pi_{QxeP} for all triples.
std::optional<CrossCounterExample> check_weak_conservation(const AbstractNetwork& net,
                                                           const Requirements& req);

// Members tight for the residual state.
std::vector<int> enumerate_tight(const AbstractNetwork& net, const Requirements& req,
                                 const ResidualState& state);

// S = {e in supp(rho_bar) : no tight member P contains e together with an
// earlier support element}.
ElemSet abstract_asc(const AbstractNetwork& net, const Requirements& req,
                     const ResidualState& state);

class AbstractAscOracle : public AscOracle {
  public:
    AbstractAscOracle(const AbstractNetwork& net, Requirements req)
        : net_(&net), req_(std::move(req)) {}
    ElemSet next_asc(const ResidualState& state, const Instance&) override {
        return abstract_asc(*net_, req_, state);
    }

  private:
    const AbstractNetwork* net_;
    Requirements req_;
};

// Directed graph whose ground set is the arc list; members are the simple
// source-sink paths in traversal order.
struct Digraph {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> arcs;  // arc i = ground element i
};

class DigraphPathSystem {
  public:
    DigraphPathSystem(Digraph g, int source, int sink);

    const Digraph& graph() const { return g_; }
    int source() const { return source_; }
    int sink() const { return sink_; }

    // All simple source-sink paths in lexicographic arc order; ScaleExceeded
    // beyond the path-enumeration cap.
    std::vector<std::vector<int>> enumerate_paths() const;
    AbstractNetwork to_network(const GroundSet& ground) const;

    // Prefix of p up to arc e, then the tail of q after e, with cycles cut out
    // at the first repeated node so the result is a simple path again.
    std::vector<int> cross_paths(const std::vector<int>& p, int e, const std::vector<int>& q) const;

    // Minimum of sum_{e in P}(mu_e + rho_e) over source-sink paths; the
    // requirement pi_P = 1 - sum mu_e is violated exactly when this is < 1.
    StarResult max_violated_affine(const std::vector<Rat>& mu, const Marginals& rho) const;

    // Shortest-path separation for the affine requirements.
    SeparationFn affine_separation(std::vector<Rat> mu) const;

  private:
    std::vector<int> shortest_path(const std::vector<Rat>& weights) const;

    Digraph g_;
    int source_ = 0, sink_ = 0;
};

// Engine instance over the enumerated path family.
Instance make_digraph_instance(const DigraphPathSystem& sys, const GroundSet& ground,
                               Requirements req, bool attach_separation_mu = false,
                               std::vector<Rat> mu = {});
Instance make_abstract_instance(const AbstractNetwork& net, Requirements req);

}  // namespace mdx
