#pragma once

#include <optional>
#include <vector>

#include "mdx/engine.hpp"
#include "mdx/types.hpp"

namespace mdx {

// Oracle over a family of members carrying a lattice order. Members are keyed
// by their element sets, which must identify them uniquely. meet/join and
// enumeration are used by property checks and the desk-scale backends.
class LatticeOracle {
  public:
    virtual ~LatticeOracle() = default;
    virtual const GroundSet& ground() const = 0;
    // Maximum member (w.r.t. the lattice order) among those contained in
    // `allowed`, with its requirement value; nullopt when none is contained.
    virtual std::optional<std::pair<ElemSet, Rat>> max_member(ElemSet allowed) const = 0;
    virtual Rat pi(ElemSet member) const = 0;
    virtual bool leq(ElemSet p, ElemSet q) const = 0;
    virtual ElemSet meet(ElemSet p, ElemSet q) const = 0;
    virtual ElemSet join(ElemSet p, ElemSet q) const = 0;
    virtual std::vector<ElemSet> enumerate_members() const = 0;
};

// The element/member sequence certifying an extreme point: e_i in P_i, P_i the
// sublattice maximum avoiding e_1..e_{i-1}, all pi_{P_i} > 0, and the point is
// the unique solution of the triangular member equations.
struct GreedySupport {
    std::vector<int> elems;
    std::vector<ElemSet> members;
    std::vector<Rat> pis;  // requirement minus the shift used for the run

    int size() const { return static_cast<int>(elems.size()); }
};

// Solves the support's triangular system by back-substitution.
Marginals greedy_point(const GreedySupport& support, int ground_size);

// Produces an extreme point of {y >= 0 : y(P) >= pi_P - shift} together with
// its certifying support. Element choices are backtracked in ground order
// until the solved point is feasible.
std::pair<Marginals, GreedySupport> two_phase_greedy(const LatticeOracle& oracle,
                                                     const Rat& shift = Rat(0));

// A support whose triangular system solves to exactly `point`, or nullopt when
// the point is not an extreme point of the shifted polyhedron.
std::optional<GreedySupport> support_for_point(const LatticeOracle& oracle, const Marginals& point,
                                               const Rat& shift = Rat(0));

// Reverse scan adding e_i whenever P_i is not yet hit; the result hits every
// support member exactly once.
ElemSet asc_from_support(const GreedySupport& support);

// Largest pi_P - sum_{e in P} rho_e over the family, by member enumeration.
StarResult max_violated_lattice(const LatticeOracle& oracle, const Marginals& rho);

struct CaratheodoryResult {
    std::vector<std::vector<Rat>> points;  // extreme points of the covering polyhedron
    std::vector<Rat> weights;              // convex, aligned with points
    std::vector<Rat> ray;                  // nonnegative remainder direction
};

// rho = sum_i weights_i points_i + ray with at most |E|+1 points.
CaratheodoryResult caratheodory_decompose(const LatticeOracle& oracle, const Marginals& rho);

// Engine instance over the enumerated member family.
Instance make_lattice_instance(const LatticeOracle& oracle);

// Runs the engine on an extreme point using ASCs from the support, truncating
// the support to its positive-requirement prefix between iterations.
Decomposition decompose_extreme(const LatticeOracle& oracle, const Marginals& point,
                                const GreedySupport& support);

// Full pipeline: feasibility check, Caratheodory split, per-extreme-point
// decomposition, mixing, and lifting of the ray remainder.
Decomposition decompose_lattice(const LatticeOracle& oracle, const Marginals& rho);

// Explicit lattice given by a member list and the order relation as a matrix.
class ExplicitLattice : public LatticeOracle {
  public:
    ExplicitLattice(GroundSet ground, std::vector<std::pair<ElemSet, Rat>> members,
                    std::vector<std::vector<bool>> leq_matrix);

    const GroundSet& ground() const override { return ground_; }
    std::optional<std::pair<ElemSet, Rat>> max_member(ElemSet allowed) const override;
    Rat pi(ElemSet member) const override;
    bool leq(ElemSet p, ElemSet q) const override;
    ElemSet meet(ElemSet p, ElemSet q) const override;
    ElemSet join(ElemSet p, ElemSet q) const override;
    std::vector<ElemSet> enumerate_members() const override;

  private:
    int index_of(ElemSet member) const;

    GroundSet ground_;
    std::vector<std::pair<ElemSet, Rat>> members_;
    std::vector<std::vector<bool>> leq_;
};

// Cuts delta(U), U a node set avoiding the root, of a connected graph; ordered
// by containment of U. Requirements are alpha(U) / beta.
class RootedCutLattice : public LatticeOracle {
  public:
    RootedCutLattice(int num_nodes, std::vector<std::pair<int, int>> edges, int root,
                     std::vector<Rat> alpha, Rat beta);

    const GroundSet& ground() const override { return ground_; }
    std::optional<std::pair<ElemSet, Rat>> max_member(ElemSet allowed) const override;
    Rat pi(ElemSet member) const override;
    bool leq(ElemSet p, ElemSet q) const override;
    ElemSet meet(ElemSet p, ElemSet q) const override;
    ElemSet join(ElemSet p, ElemSet q) const override;
    std::vector<ElemSet> enumerate_members() const override;

    int num_nodes() const { return num_nodes_; }
    // Node set on the far side of the cut (recovered from the member table).
    std::uint64_t cut_nodes(ElemSet member) const;
    ElemSet cut_of(std::uint64_t nodes) const;  // delta(U) as an edge set

  private:
    int num_nodes_ = 0;
    std::vector<std::pair<int, int>> edges_;
    int root_ = 0;
    std::vector<Rat> alpha_;
    Rat beta_;
    GroundSet ground_;
    std::vector<std::pair<ElemSet, std::uint64_t>> member_nodes_;  // edge set -> U, sorted
};

}  // namespace mdx
