#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mdx/rational.hpp"

namespace mdx {

// Subsets of the ground set are bitmasks; element i of the ground set is bit i.
using ElemSet = std::uint64_t;

constexpr int kMaxGroundSize = 62;

inline int set_size(ElemSet s) { return std::popcount(s); }
inline bool contains(ElemSet s, int e) { return (s >> e) & 1u; }
inline ElemSet singleton(int e) { return ElemSet{1} << e; }

// Iterates set bits in ground-set order.
template <typename F>
void for_each_element(ElemSet s, F&& f) {
    while (s) {
        int e = std::countr_zero(s);
        f(e);
        s &= s - 1;
    }
}

inline std::vector<int> elements_of(ElemSet s) {
    std::vector<int> out;
    for_each_element(s, [&](int e) { out.push_back(e); });
    return out;
}

enum class ErrorCode {
    InvalidInput,
    EmptySupport,
    OracleFailure,
    InfeasibleMarginals,
    IterationOverflow,
    DeficitNegative,
    FamilyNotEnumerable,
    ScaleExceeded,
    DimensionMismatch,
    BalanceMismatch,
    NotBalanced,
    NotInYStar,
    CardinalityMismatch,
    TooManyGroups,
    OracleInconsistent,
    NoPath,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

struct Caps {
    // Largest ground set for which families are enumerated exhaustively.
    int enumeration_elements = 20;
    int engine_enumeration_elements = 12;
    long long path_enumeration = 100000;
    long long transversal_enumeration = 10000;
    int lp_variables = 5000;
    int lp_constraints = 5000;
};

Caps& global_caps();

class GroundSet {
  public:
    GroundSet() = default;
    explicit GroundSet(std::vector<std::string> names) : names_(std::move(names)) {
        if (static_cast<int>(names_.size()) > kMaxGroundSize)
            throw Error(ErrorCode::ScaleExceeded, "ground set larger than 62 elements");
        for (size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], static_cast<int>(i)).second)
                throw Error(ErrorCode::InvalidInput, "duplicate element: " + names_[i]);
        }
    }
    static GroundSet numbered(int n, const std::string& prefix = "e") {
        std::vector<std::string> names;
        names.reserve(n);
        for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
        return GroundSet(std::move(names));
    }

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_.at(i); }
    int index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw Error(ErrorCode::InvalidInput, "unknown element: " + name);
        return it->second;
    }
    ElemSet full_set() const {
        return size() == 0 ? 0 : (~ElemSet{0} >> (64 - size()));
    }

  private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
};

struct Marginals {
    std::vector<Rat> values;

    Marginals() = default;
    explicit Marginals(std::vector<Rat> v) : values(std::move(v)) {}

    int size() const { return static_cast<int>(values.size()); }
    const Rat& operator[](int e) const { return values[e]; }
    Rat& operator[](int e) { return values[e]; }

    Rat sum_over(ElemSet s) const {
        Rat total = 0;
        for_each_element(s, [&](int e) { total += values[e]; });
        return total;
    }
    // E_rho, the support of the marginal vector.
    ElemSet support() const {
        ElemSet s = 0;
        for (int e = 0; e < size(); ++e)
            if (values[e] > 0) s |= singleton(e);
        return s;
    }
    void validate() const {
        for (const Rat& v : values)
            if (v < 0 || v > 1)
                throw Error(ErrorCode::InvalidInput, "marginal outside [0,1]: " + to_string(v));
    }
};

// Sparse distribution over subsets of E. Kept sorted by bitmask so output
// and tie-breaking are deterministic.
struct Decomposition {
    std::vector<std::pair<ElemSet, Rat>> support;

    void add(ElemSet s, const Rat& w) {
        if (w == 0) return;
        auto it = std::lower_bound(support.begin(), support.end(), s,
                                   [](const auto& a, ElemSet b) { return a.first < b; });
        if (it != support.end() && it->first == s) {
            it->second += w;
            if (it->second == 0) support.erase(it);
        } else {
            support.insert(it, {s, w});
        }
    }
    Rat weight(ElemSet s) const {
        auto it = std::lower_bound(support.begin(), support.end(), s,
                                   [](const auto& a, ElemSet b) { return a.first < b; });
        return (it != support.end() && it->first == s) ? it->second : Rat(0);
    }
    Rat total() const {
        Rat t = 0;
        for (const auto& [s, w] : support) t += w;
        return t;
    }
    Rat marginal(int e) const {
        Rat t = 0;
        for (const auto& [s, w] : support)
            if (contains(s, e)) t += w;
        return t;
    }
    Rat hit_probability(ElemSet p) const {
        Rat t = 0;
        for (const auto& [s, w] : support)
            if (s & p) t += w;
        return t;
    }
    Marginals marginals(int n) const {
        Marginals m(std::vector<Rat>(n, Rat(0)));
        for (const auto& [s, w] : support)
            for_each_element(s, [&](int e) { m[e] += w; });
        return m;
    }
};

// Requirement function, defined on family members only.
struct Requirements {
    std::function<Rat(ElemSet)> eval;

    Rat operator()(ElemSet p) const { return eval(p); }

    static Requirements table(std::map<ElemSet, Rat> vals) {
        return {[vals = std::move(vals)](ElemSet p) {
            auto it = vals.find(p);
            if (it == vals.end())
                throw Error(ErrorCode::InvalidInput, "requirement table has no entry for member");
            return it->second;
        }};
    }
    // pi_P = 1 - sum_{e in P} mu_e
    static Requirements affine(std::vector<Rat> mu) {
        return {[mu = std::move(mu)](ElemSet p) {
            Rat r = 1;
            for_each_element(p, [&](int e) { r -= mu[e]; });
            return r;
        }};
    }
    static Requirements callback(std::function<Rat(ElemSet)> f) { return {std::move(f)}; }
};

struct Violation {
    ElemSet member = 0;
    Rat gap;  // pi_P - sum_{e in P} rho_e, positive when violated
};

// Separation callback: most violated member of (pi - lambda) against marginals y,
// or nullopt when none is violated. Used for oracle-backed instances where the
// family is too large to enumerate.
using SeparationFn =
    std::function<std::optional<Violation>(const std::vector<Rat>& y, const Rat& lambda)>;

struct Instance {
    GroundSet ground;
    std::vector<ElemSet> members;  // deduplicated, ascending by bitmask
    Requirements req;
    SeparationFn separate;  // optional
    bool enumerable = true;

    Rat pi(ElemSet p) const { return req(p); }

    void sort_members() {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }
    void validate() const {
        ElemSet full = ground.full_set();
        for (ElemSet p : members) {
            if (p & ~full) throw Error(ErrorCode::InvalidInput, "member not a subset of the ground set");
            Rat v = pi(p);
            if (v > 1) throw Error(ErrorCode::InvalidInput, "requirement above 1: " + to_string(v));
            if (p == 0 && v > 0)
                throw Error(ErrorCode::InvalidInput, "empty member with positive requirement");
        }
    }
    Rat max_pi() const {
        if (enumerable) {
            Rat best = 0;
            bool first = true;
            for (ElemSet p : members) {
                Rat v = pi(p);
                if (first || v > best) best = v, first = false;
            }
            if (first) return Rat(0);
            return best;
        }
        if (!separate) throw Error(ErrorCode::OracleFailure, "no separation oracle");
        std::vector<Rat> zero(ground.size(), Rat(0));
        auto v = separate(zero, Rat(0));
        return v ? v->gap : Rat(0);  // gap at rho=0 is exactly pi_P
    }
};

// Residual state of the decomposition engine. The residual requirement is
// pi_P - offset for every member P.
struct ResidualState {
    Marginals rho_bar;
    Rat offset;  // sum of all epsilons applied so far
    int iteration = 0;
};

}  // namespace mdx
