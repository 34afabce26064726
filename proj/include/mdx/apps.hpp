#pragma once

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "mdx/balanced.hpp"
#include "mdx/engine.hpp"
#include "mdx/lattice.hpp"
#include "mdx/supermodular.hpp"
#include "mdx/types.hpp"

namespace mdx {

// Any distribution with marginals rho meeting the hitting requirements, found
// by a feasibility LP over all subset variables. Desk-scale oracle and
// fallback backend for explicit families.
std::optional<Decomposition> decompose_by_lp(const Instance& inst, const Marginals& rho);

// Tree whose edges are the ground set; the adversary's reward for operating a
// link set P is the sum of pair rewards over node pairs whose tree path lies
// inside P, scaled by 1/beta.
struct SmugglingTree {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, Rat> pair_rewards;  // keys with first < second
    Rat beta;

    void validate() const;
    Rat reward(ElemSet links) const;
    std::shared_ptr<SupermodularOracle> oracle() const;  // pi = reward / beta
};

struct SecurityResult {
    Marginals rho;
    Decomposition z;
    Rat cost;
};

// Minimum-cost deterrence: cheapest marginals whose hitting requirements make
// inaction the adversary's best response, plus a matching decomposition whose
// expected inspection cost equals the marginal cost exactly.
SecurityResult solve_security_game(const SmugglingTree& tree, const std::vector<Rat>& costs);
SecurityResult solve_security_game(const RootedCutLattice& lattice, const std::vector<Rat>& costs);

struct CoverageInstance {
    GroundSet ground;                        // the selectable elements
    int universe_size = 0;                   // items to cover
    std::vector<std::uint64_t> covered;      // per element: bitmask over the universe
    std::vector<std::vector<Rat>> rewards;   // per scenario, one value per item
    std::vector<std::vector<Rat>> costs;     // per scenario, one value per element

    void validate() const;
    ElemSet coverers(int item) const;  // elements whose set contains the item
};

struct CoverageResult {
    Marginals rho;
    std::vector<Rat> pi;  // per universe item
    Rat t;                // worst-case expected profit
    Decomposition z;
};

// Maximizes the worst-case expected profit over scenarios; requires the
// coverage hypergraph to be balanced.
CoverageResult solve_robust_coverage(const CoverageInstance& inst);

struct CommitteeInstance {
    GroundSet ground;                 // candidates
    std::vector<long long> votes;     // per candidate
    int k = 0;                        // committee size
    std::vector<ElemSet> groups;
    std::vector<Rat> group_pi;

    void validate() const;
    Marginals marginals() const;  // rho_e = k * votes_e / total votes
};

// Fixed-size dependent rounding: a base set drawn from the shrunk mixture is
// topped up to size k by systematic sampling over per-set breakpoints.
class FixedSizeSampler {
  public:
    struct Entry {
        ElemSet base = 0;
        Rat weight;
        std::vector<Rat> alphas;  // cumulative breakpoints, size |E|+1
    };

    FixedSizeSampler() = default;
    FixedSizeSampler(int ground_size, int k, std::vector<Entry> entries);

    int committee_size() const { return k_; }
    const std::vector<Entry>& entries() const { return entries_; }

    // Top-up set for a given base entry and offset tau in [0,1): element i is
    // included when some tau + h (integer h >= 0) lands in [alpha_{i-1}, alpha_i).
    ElemSet top_up(const Entry& entry, const Rat& tau) const;

    ElemSet draw(std::mt19937_64& rng) const;
    ElemSet draw(std::uint64_t seed) const;

    // The distribution of draws, exact: tau is integrated over the finite
    // partition induced by the breakpoint fractional parts.
    Decomposition exact_law() const;

  private:
    int ground_size_ = 0;
    int k_ = 0;
    std::vector<Entry> entries_;
};

// Rounds a feasible decomposition of the committee marginals into a sampler
// whose draws always have size k, keep the marginals exactly, and hit each
// group P with probability at least (1 - max_e rho_e) * pi_P.
FixedSizeSampler committee_round(const CommitteeInstance& inst, const Decomposition& z);

struct CommitteeResult {
    Marginals rho;
    Decomposition z;  // unconstrained feasible decomposition used as input
    FixedSizeSampler sampler;
};

// Finds a feasible decomposition by LP and rounds it.
CommitteeResult solve_committee(const CommitteeInstance& inst);

}  // namespace mdx
