#pragma once

#include <functional>
#include <memory>
#include <unordered_map>

#include "mdx/engine.hpp"
#include "mdx/types.hpp"

namespace mdx {

// Value oracle for a supermodular requirement on the full power set 2^E.
class SupermodularOracle {
  public:
    SupermodularOracle(int ground_size, std::function<Rat(ElemSet)> value)
        : ground_size_(ground_size), value_(std::move(value)) {}

    int ground_size() const { return ground_size_; }
    const Rat& evaluate(ElemSet p) const {
        auto it = cache_.find(p);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(p, value_(p)).first->second;
    }

    // Spot-check of pi(P&Q) + pi(P|Q) >= pi(P) + pi(Q) on sampled pairs.
    bool spot_check_supermodular(int samples, std::uint64_t seed) const;

  private:
    int ground_size_;
    std::function<Rat(ElemSet)> value_;
    mutable std::unordered_map<ElemSet, Rat> cache_;
};

// Union of all tight sets of the residual state; tight unions stay tight by
// uncrossing, which is asserted.
ElemSet tight_union(const SupermodularOracle& oracle, const ResidualState& state);

// The ASC S' = E_rho \ Q, extended by the first element of Q cap E_rho when
// that intersection is nonempty.
ElemSet supermodular_asc(const SupermodularOracle& oracle, const ResidualState& state);

// Maximizes pi_P - sum_{e in P} rho_e by enumeration under the scale cap.
StarResult supermodular_max_violated(const SupermodularOracle& oracle, const Marginals& rho);

class SupermodularAscOracle : public AscOracle {
  public:
    explicit SupermodularAscOracle(std::shared_ptr<SupermodularOracle> oracle)
        : oracle_(std::move(oracle)) {}
    ElemSet next_asc(const ResidualState& state, const Instance&) override {
        return supermodular_asc(*oracle_, state);
    }

  private:
    std::shared_ptr<SupermodularOracle> oracle_;
};

// Engine instance over the full power set (members materialized under the cap).
Instance make_supermodular_instance(const GroundSet& ground,
                                    std::shared_ptr<SupermodularOracle> oracle);

}  // namespace mdx
