#include "mdx/engine.hpp"

#include <algorithm>
#include <optional>

namespace mdx {

Caps& global_caps() {
    static Caps caps;
    return caps;
}

bool dominates(ElemSet p, ElemSet q, const Requirements& req, const Marginals& rho) {
    if (p == q) return true;
    Rat pi_p = req(p), pi_q = req(q);
    if (!(pi_p < pi_q)) return false;
    return pi_p <= pi_q - rho.sum_over(q & ~p);
}

bool dominates_residual(ElemSet p, ElemSet q, const Instance& inst, const ResidualState& state) {
    if (p == q) return true;
    Rat pi_p = inst.pi(p) - state.offset, pi_q = inst.pi(q) - state.offset;
    if (!(pi_p < pi_q)) return false;
    return pi_p <= pi_q - state.rho_bar.sum_over(q & ~p);
}

std::vector<ElemSet> tight_members(const Instance& inst, const ResidualState& state) {
    std::vector<ElemSet> tight;
    for (ElemSet p : inst.members)
        if (state.rho_bar.sum_over(p) == inst.pi(p) - state.offset) tight.push_back(p);
    return tight;
}

bool is_admissible_support(ElemSet s, const Instance& inst, const ResidualState& state) {
    if (!inst.enumerable)
        throw Error(ErrorCode::FamilyNotEnumerable, "ASC check needs an explicit family");
    // (S1)
    if (s & ~state.rho_bar.support()) return false;
    // (S2)
    for (ElemSet p : inst.members) {
        if (state.rho_bar.sum_over(p) == inst.pi(p) - state.offset && set_size(p & s) > 1)
            return false;
    }
    // (S3): S hits every non-dominated member with positive residual requirement.
    std::vector<ElemSet> positive;
    for (ElemSet p : inst.members)
        if (inst.pi(p) - state.offset > 0) positive.push_back(p);
    for (ElemSet p : positive) {
        if (p & s) continue;
        bool dominated = false;
        for (ElemSet q : positive) {
            if (q != p && dominates_residual(p, q, inst, state)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) return false;
    }
    return true;
}

StarResult check_star(const Instance& inst, const Marginals& rho) {
    rho.validate();
    if (inst.separate) {
        auto v = inst.separate(rho.values, Rat(0));
        if (v && v->gap > 0) return {false, *v};
        return {};
    }
    if (!inst.enumerable)
        throw Error(ErrorCode::OracleFailure, "no separation oracle and family not enumerable");
    std::optional<Violation> worst;
    for (ElemSet p : inst.members) {
        Rat gap = inst.pi(p) - rho.sum_over(p);
        if (!worst || gap > worst->gap) worst = Violation{p, gap};
    }
    if (worst && worst->gap > 0) return {false, *worst};
    return {};
}

namespace {

Rat epsilon_enumerated(ElemSet s, const ResidualState& state, const Instance& inst) {
    Rat eps;
    bool have = false;
    for_each_element(s, [&](int e) {
        if (!have || state.rho_bar[e] < eps) eps = state.rho_bar[e], have = true;
    });
    Rat max_pi = inst.max_pi() - state.offset;
    if (max_pi < eps) eps = max_pi;
    for (ElemSet p : inst.members) {
        int k = set_size(p & s);
        if (k <= 1) continue;
        // (pi_P - rho(P)) / (1 - |P cap S|), both parts nonpositive on feasible states
        Rat delta = (inst.pi(p) - state.offset - state.rho_bar.sum_over(p)) / Rat(1 - k);
        if (delta < eps) eps = delta;
    }
    return eps;
}

Rat epsilon_newton(ElemSet s, const ResidualState& state, const Instance& inst) {
    Rat lam;
    bool have = false;
    for_each_element(s, [&](int e) {
        if (!have || state.rho_bar[e] < lam) lam = state.rho_bar[e], have = true;
    });
    Rat max_pi = inst.max_pi() - state.offset;
    if (max_pi < lam) lam = max_pi;
    // Discrete Newton: lower lam to the binding constraint reported by the
    // separation oracle; at most |S| constraints can become binding.
    int guard = set_size(s) + 2;
    while (guard-- > 0) {
        std::vector<Rat> shifted = state.rho_bar.values;
        for_each_element(s, [&](int e) { shifted[e] -= lam; });
        auto v = inst.separate(shifted, state.offset + lam);
        if (!v || v->gap <= 0) return lam;
        int k = set_size(v->member & s);
        if (k <= 1)
            throw Error(ErrorCode::InfeasibleMarginals,
                        "residual marginals violate (*) during epsilon computation");
        Rat slack = state.rho_bar.sum_over(v->member) - (inst.pi(v->member) - state.offset);
        lam = slack / Rat(k - 1);
    }
    throw Error(ErrorCode::OracleFailure, "discrete Newton for epsilon did not converge");
}

}  // namespace

Rat epsilon(ElemSet s, const ResidualState& state, const Instance& inst) {
    if (s == 0) throw Error(ErrorCode::EmptySupport, "epsilon of empty support set");
    if (inst.enumerable) return epsilon_enumerated(s, state, inst);
    if (inst.separate) return epsilon_newton(s, state, inst);
    throw Error(ErrorCode::OracleFailure, "no way to evaluate epsilon");
}

DecomposeResult decompose(const Instance& inst, const Marginals& rho, AscOracle& oracle,
                          const DecomposeOptions& opts) {
    rho.validate();
    if (rho.size() != inst.ground.size())
        throw Error(ErrorCode::DimensionMismatch, "marginal vector size mismatch");
    {
        StarResult star = check_star(inst, rho);
        if (!star.feasible)
            throw Error(ErrorCode::InfeasibleMarginals,
                        "condition (*) violated, gap " + to_string(star.violation.gap));
    }

    int n = inst.ground.size();
    int max_iterations = n * (n - 1) / 2 + n;
    Rat max_pi = inst.max_pi();

    ResidualState state{rho, Rat(0), 0};
    DecomposeResult result;
    while (max_pi - state.offset > 0) {
        if (state.iteration >= max_iterations)
            throw Error(ErrorCode::IterationOverflow, "iteration bound exceeded, defective oracle");
        ElemSet s = oracle.next_asc(state, inst);
        if (s == 0) throw Error(ErrorCode::OracleFailure, "oracle returned empty ASC");
        if (opts.validate_ascs && !is_admissible_support(s, inst, state))
            throw Error(ErrorCode::OracleFailure, "oracle returned a non-admissible support");
        Rat eps = epsilon(s, state, inst);
        if (eps <= 0)
            throw Error(ErrorCode::InfeasibleMarginals, "nonpositive epsilon for residual state");
        result.z.add(s, eps);
        for_each_element(s, [&](int e) { state.rho_bar[e] -= eps; });
        state.offset += eps;
        ++state.iteration;
        if (opts.check_invariants && inst.enumerable) {
            for (const Rat& v : state.rho_bar.values)
                if (v < 0) throw Error(ErrorCode::InfeasibleMarginals, "negative residual marginal");
            for (ElemSet p : inst.members)
                if (state.rho_bar.sum_over(p) < inst.pi(p) - state.offset)
                    throw Error(ErrorCode::InfeasibleMarginals, "residual violates (*)");
        }
        if (opts.on_iteration) opts.on_iteration(state, s, eps);
    }
    result.iterations = state.iteration;
    result.total_epsilon = state.offset;
    Rat rest = 1 - state.offset;
    if (rest < 0) throw Error(ErrorCode::InfeasibleMarginals, "total epsilon above 1");
    result.z.add(0, rest);
    result.z = lift_marginals(result.z, rho);
    return result;
}

Decomposition lift_marginals(const Decomposition& z, const Marginals& rho) {
    Decomposition out = z;
    if (out.support.empty()) out.add(0, 1);
    int n = rho.size();
    for (int e = 0; e < n; ++e) {
        Rat deficit = rho[e] - out.marginal(e);
        if (deficit < 0)
            throw Error(ErrorCode::DeficitNegative,
                        "marginal of z exceeds rho for element " + std::to_string(e));
        while (deficit > 0) {
            // Largest-weight support set avoiding e; ties go to the smaller mask.
            int best = -1;
            for (int i = 0; i < static_cast<int>(out.support.size()); ++i) {
                if (contains(out.support[i].first, e)) continue;
                if (best < 0 || out.support[i].second > out.support[best].second) best = i;
            }
            if (best < 0)
                throw Error(ErrorCode::DeficitNegative, "no support set available for lifting");
            ElemSet s = out.support[best].first;
            Rat move = std::min(deficit, out.support[best].second);
            out.add(s, -move);
            out.add(s | singleton(e), move);
            deficit -= move;
        }
    }
    return out;
}

VerifyReport verify(const Instance& inst, const Marginals& rho, const Decomposition& z) {
    if (!inst.enumerable)
        throw Error(ErrorCode::FamilyNotEnumerable, "verify needs an explicit family");
    VerifyReport rep;
    rep.normalized = z.total() == 1;
    for (const auto& [s, w] : z.support)
        if (w < 0) rep.normalized = false;
    rep.marginal_ok = true;
    for (int e = 0; e < rho.size(); ++e)
        if (z.marginal(e) != rho[e]) rep.marginal_ok = false;
    rep.hitting_ok = true;
    rep.worst_violation = 0;
    bool first = true;
    for (ElemSet p : inst.members) {
        Rat gap = inst.pi(p) - z.hit_probability(p);
        if (first || gap > rep.worst_violation) rep.worst_violation = gap, first = false;
        if (gap > 0) rep.hitting_ok = false;
    }
    return rep;
}

ElemSet sample(const Decomposition& z, std::mt19937_64& rng) {
    static const Int kTwo64 = Int(1) << 64;
    Rat r(Int(rng()), kTwo64);
    Rat cum = 0;
    for (const auto& [s, w] : z.support) {
        cum += w;
        if (r < cum) return s;
    }
    return z.support.empty() ? 0 : z.support.back().first;
}

ElemSet sample(const Decomposition& z, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample(z, rng);
}

}  // namespace mdx
