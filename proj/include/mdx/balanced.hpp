#pragma once

#include <optional>
#include <vector>

#include "mdx/engine.hpp"
#include "mdx/types.hpp"

namespace mdx {

struct Hypergraph {
    GroundSet ground;
    std::vector<ElemSet> members;  // nonempty subsets

    void validate() const;
};

// Elements e_1..e_k and members P_1..P_k with P_i meeting the cycle elements
// in exactly {e_i, e_{i+1}} (cyclically).
struct SpecialCycle {
    std::vector<int> elems;
    std::vector<ElemSet> members;

    int length() const { return static_cast<int>(elems.size()); }
};

bool is_special_cycle(const Hypergraph& h, const SpecialCycle& cycle);

// First odd special cycle in search order, or nullopt when none exists (the
// hypergraph is then balanced).
std::optional<SpecialCycle> find_odd_special_cycle(const Hypergraph& h);

// Requirement table min{sum_{e in P} rho_e, 1} over the members.
Requirements pi_rho(const Hypergraph& h, const Marginals& rho);

// All inclusion-minimal sets meeting every member, sorted by bitmask.
std::vector<ElemSet> minimal_transversals(const std::vector<ElemSet>& members);

// Decomposition with marginals exactly rho and hitting probability at least
// min{sum rho_e, 1} for every member; fails with NotBalanced when the
// augmented covering system has no fractional-vertex expression, which happens
// exactly on unbalanced hypergraphs.
Decomposition perfect_decompose(const Hypergraph& h, const Marginals& rho);

}  // namespace mdx
