#include "mdx/supermodular.hpp"

#include <random>

namespace mdx {

bool SupermodularOracle::spot_check_supermodular(int samples, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    ElemSet full = ground_size_ == 64 ? ~ElemSet{0} : (ElemSet{1} << ground_size_) - 1;
    for (int i = 0; i < samples; ++i) {
        ElemSet p = rng() & full, q = rng() & full;
        if (evaluate(p & q) + evaluate(p | q) < evaluate(p) + evaluate(q)) return false;
    }
    return true;
}

ElemSet tight_union(const SupermodularOracle& oracle, const ResidualState& state) {
    if (oracle.ground_size() > global_caps().enumeration_elements)
        throw Error(ErrorCode::ScaleExceeded, "tight-set union needs full enumeration");
    ElemSet full = (ElemSet{1} << oracle.ground_size()) - 1;
    ElemSet q = 0;
    for (ElemSet p = 0; p <= full; ++p)
        if (state.rho_bar.sum_over(p) == oracle.evaluate(p) - state.offset) q |= p;
    // The union of tight sets is tight again (uncrossing); the empty set is
    // tight whenever pi(empty) - offset = 0, so q = 0 is consistent too.
    if (q != 0 && state.rho_bar.sum_over(q) != oracle.evaluate(q) - state.offset)
        throw Error(ErrorCode::OracleInconsistent, "union of tight sets is not tight");
    return q;
}

ElemSet supermodular_asc(const SupermodularOracle& oracle, const ResidualState& state) {
    ElemSet support = state.rho_bar.support();
    ElemSet q = tight_union(oracle, state);
    ElemSet s = support & ~q;
    ElemSet in_q = support & q;
    if (in_q) s |= singleton(std::countr_zero(in_q));
    return s;
}

StarResult supermodular_max_violated(const SupermodularOracle& oracle, const Marginals& rho) {
    if (oracle.ground_size() > global_caps().enumeration_elements)
        throw Error(ErrorCode::ScaleExceeded, "violation search needs full enumeration");
    ElemSet full = (ElemSet{1} << oracle.ground_size()) - 1;
    std::optional<Violation> worst;
    for (ElemSet p = 0; p <= full; ++p) {
        Rat gap = oracle.evaluate(p) - rho.sum_over(p);
        if (!worst || gap > worst->gap) worst = Violation{p, gap};
    }
    if (worst && worst->gap > 0) return {false, *worst};
    return {};
}

Instance make_supermodular_instance(const GroundSet& ground,
                                    std::shared_ptr<SupermodularOracle> oracle) {
    if (ground.size() != oracle->ground_size())
        throw Error(ErrorCode::DimensionMismatch, "ground set does not match oracle dimension");
    if (ground.size() > global_caps().enumeration_elements)
        throw Error(ErrorCode::ScaleExceeded, "power-set family too large to materialize");
    Instance inst;
    inst.ground = ground;
    ElemSet full = ground.full_set();
    inst.members.reserve(static_cast<size_t>(full) + 1);
    for (ElemSet p = 0; p <= full; ++p) inst.members.push_back(p);
    inst.req = Requirements::callback([oracle](ElemSet p) { return oracle->evaluate(p); });
    inst.separate = [oracle](const std::vector<Rat>& y, const Rat& lambda) -> std::optional<Violation> {
        Marginals m{y};
        ElemSet full = (ElemSet{1} << oracle->ground_size()) - 1;
        std::optional<Violation> worst;
        for (ElemSet p = 0; p <= full; ++p) {
            Rat gap = oracle->evaluate(p) - lambda - m.sum_over(p);
            if (!worst || gap > worst->gap) worst = Violation{p, gap};
        }
        if (worst && worst->gap > 0) return worst;
        return std::nullopt;
    };
    inst.validate();
    return inst;
}

}  // namespace mdx
