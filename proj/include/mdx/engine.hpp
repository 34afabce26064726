#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mdx/types.hpp"

namespace mdx {

// Dominance relation: P is dominated by Q (P != Q) when
// pi_P <= pi_Q - sum_{e in Q\P} rho_e and pi_P < pi_Q. Reflexive by definition.
bool dominates(ElemSet p, ElemSet q, const Requirements& req, const Marginals& rho);

// Same relation against the residual (pi - offset, rho_bar).
bool dominates_residual(ElemSet p, ElemSet q, const Instance& inst, const ResidualState& state);

// Members that are tight for the residual state: sum_{e in P} rho_bar_e = pi_P - offset.
std::vector<ElemSet> tight_members(const Instance& inst, const ResidualState& state);

// Checks (S1)-(S3) by enumeration. Requires an enumerable family.
bool is_admissible_support(ElemSet s, const Instance& inst, const ResidualState& state);

struct StarResult {
    bool feasible = true;
    Violation violation;
};

// Condition (*): sum_{e in P} rho_e >= pi_P for all members. Returns the
// maximum violated inequality when one exists.
StarResult check_star(const Instance& inst, const Marginals& rho);

// Maximum mass that can be shifted to S while the residual marginals stay
// feasible for the residual requirements. Uses enumeration when the family is
// explicit and discrete Newton on the separation oracle otherwise.
Rat epsilon(ElemSet s, const ResidualState& state, const Instance& inst);

struct AscOracle {
    virtual ~AscOracle() = default;
    virtual ElemSet next_asc(const ResidualState& state, const Instance& inst) = 0;
};

struct DecomposeOptions {
    bool validate_ascs = false;      // enumeration check of (S1)-(S3) per iteration
    bool check_invariants = false;   // residual feasibility + progress assertions
    // Observer invoked after each iteration with the chosen ASC and epsilon.
    std::function<void(const ResidualState&, ElemSet, const Rat&)> on_iteration;
};

struct DecomposeResult {
    Decomposition z;
    int iterations = 0;
    Rat total_epsilon;
};

// Generic decomposition engine. Iteratively shifts mass onto ASCs supplied by
// the oracle, then lifts the result to match the marginals exactly.
DecomposeResult decompose(const Instance& inst, const Marginals& rho, AscOracle& oracle,
                          const DecomposeOptions& opts = {});

// Raises every marginal of z to rho_e by moving mass from support sets to
// their supersets; hitting probabilities never decrease.
Decomposition lift_marginals(const Decomposition& z, const Marginals& rho);

struct VerifyReport {
    bool normalized = false;
    bool marginal_ok = false;
    bool hitting_ok = false;
    Rat worst_violation;  // max_P (pi_P - hit probability)
    bool ok() const { return normalized && marginal_ok && hitting_ok; }
};

VerifyReport verify(const Instance& inst, const Marginals& rho, const Decomposition& z);

// Draws one support set; deterministic for a given generator state.
ElemSet sample(const Decomposition& z, std::mt19937_64& rng);
ElemSet sample(const Decomposition& z, std::uint64_t seed);

}  // namespace mdx
