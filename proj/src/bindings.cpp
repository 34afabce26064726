#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdx/abstract.hpp"
#include "mdx/apps.hpp"
#include "mdx/balanced.hpp"
#include "mdx/engine.hpp"
#include "mdx/io.hpp"
#include "mdx/lattice.hpp"
#include "mdx/supermodular.hpp"

namespace py = pybind11;
using namespace mdx;

namespace {

const Marginals& need_marginals(const io::ParsedInstance& parsed) {
    if (!parsed.marginals)
        throw Error(ErrorCode::InvalidInput, "instance has no marginals section");
    return *parsed.marginals;
}

const Instance& need_instance(const io::ParsedInstance& parsed) {
    if (!parsed.instance)
        throw Error(ErrorCode::InvalidInput, "family kind has no member view");
    return *parsed.instance;
}

std::string verified(const Instance& inst, const Marginals& rho, const Decomposition& z,
                     int iterations) {
    VerifyReport report = verify(inst, rho, z);
    if (!report.ok())
        throw Error(ErrorCode::OracleInconsistent, "decomposition failed verification");
    io::Diagnostics diag;
    diag.iterations = iterations;
    diag.support_size = static_cast<int>(z.support.size());
    diag.worst_slack = report.worst_violation;
    return io::result_to_json(inst.ground, z, diag);
}

std::string py_decompose(const std::string& text, std::string mode) {
    io::ParsedInstance parsed = io::parse_instance(text);
    const Marginals& rho = need_marginals(parsed);
    if (mode == "auto") {
        switch (parsed.kind) {
            case io::FamilyKind::SupermodularTable:
            case io::FamilyKind::SmugglingTree: mode = "supermodular"; break;
            case io::FamilyKind::Digraph: mode = "abstract"; break;
            case io::FamilyKind::RootedCuts: mode = "lattice"; break;
            default: mode = "lp"; break;
        }
    }
    Decomposition z;
    int iterations = 0;
    if (mode == "supermodular") {
        if (!parsed.sup_oracle)
            throw Error(ErrorCode::InvalidInput, "no supermodular oracle for this family");
        SupermodularAscOracle oracle(parsed.sup_oracle);
        DecomposeResult res = decompose(need_instance(parsed), rho, oracle);
        z = std::move(res.z);
        iterations = res.iterations;
    } else if (mode == "abstract") {
        if (!parsed.network)
            throw Error(ErrorCode::InvalidInput, "no ordered-member view for this family");
        AbstractAscOracle oracle(*parsed.network, need_instance(parsed).req);
        DecomposeResult res = decompose(need_instance(parsed), rho, oracle);
        z = std::move(res.z);
        iterations = res.iterations;
    } else if (mode == "lattice") {
        if (!parsed.lattice)
            throw Error(ErrorCode::InvalidInput, "no lattice backend for this family");
        z = decompose_lattice(*parsed.lattice, rho);
    } else if (mode == "balanced") {
        if (!parsed.hypergraph)
            throw Error(ErrorCode::InvalidInput, "no hypergraph view for this family");
        z = perfect_decompose(*parsed.hypergraph, rho);
    } else if (mode == "lp") {
        auto res = decompose_by_lp(need_instance(parsed), rho);
        if (!res)
            throw Error(ErrorCode::InfeasibleMarginals,
                        "no distribution with these marginals meets the requirements");
        z = std::move(*res);
    } else {
        throw Error(ErrorCode::InvalidInput, "unknown mode: " + mode);
    }
    return verified(need_instance(parsed), rho, z, iterations);
}

py::dict py_check(const std::string& text) {
    io::ParsedInstance parsed = io::parse_instance(text);
    StarResult star = check_star(need_instance(parsed), need_marginals(parsed));
    py::dict out;
    out["feasible"] = star.feasible;
    if (!star.feasible) {
        out["member"] = io::set_to_string(parsed.ground, star.violation.member);
        out["gap"] = to_string(star.violation.gap);
    }
    return out;
}

std::vector<std::vector<std::string>> py_sample(const std::string& result_text, long long n,
                                                std::uint64_t seed) {
    io::ParsedResult result = io::parse_result(result_text);
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::string>> draws;
    for (long long i = 0; i < n; ++i) {
        ElemSet s = sample(result.z, rng);
        std::vector<std::string> names;
        for_each_element(s, [&](int e) { names.push_back(result.ground.name(e)); });
        draws.push_back(std::move(names));
    }
    return draws;
}

py::dict py_app(const std::string& sub, const std::string& text) {
    io::ParsedInstance parsed = io::parse_instance(text);
    py::dict out;
    if (sub == "security") {
        if (parsed.costs.empty())
            throw Error(ErrorCode::InvalidInput, "security instances need family.costs");
        SecurityResult res;
        if (parsed.tree) res = solve_security_game(*parsed.tree, parsed.costs);
        else if (parsed.lattice) res = solve_security_game(*parsed.lattice, parsed.costs);
        else
            throw Error(ErrorCode::InvalidInput,
                        "security expects a smuggling_tree or rooted_cuts family");
        out["cost"] = to_string(res.cost);
        out["result"] = verified(need_instance(parsed), res.rho, res.z, 0);
        return out;
    }
    if (sub == "coverage") {
        if (!parsed.coverage)
            throw Error(ErrorCode::InvalidInput, "coverage expects a coverage family");
        CoverageResult res = solve_robust_coverage(*parsed.coverage);
        out["profit"] = to_string(res.t);
        io::Diagnostics diag;
        diag.support_size = static_cast<int>(res.z.support.size());
        out["result"] = io::result_to_json(parsed.coverage->ground, res.z, diag);
        return out;
    }
    if (sub == "committee") {
        if (!parsed.committee)
            throw Error(ErrorCode::InvalidInput, "committee expects a committee family");
        CommitteeResult res = solve_committee(*parsed.committee);
        Decomposition law = res.sampler.exact_law();
        out["k"] = res.sampler.committee_size();
        io::Diagnostics diag;
        diag.support_size = static_cast<int>(law.support.size());
        out["law"] = io::result_to_json(parsed.committee->ground, law, diag);
        return out;
    }
    throw Error(ErrorCode::InvalidInput, "unknown app subcommand: " + sub);
}

}  // namespace

PYBIND11_MODULE(mdxpy, m) {
    m.doc() = "exact decompositions of probability marginals with hitting requirements";

    py::register_exception<Error>(m, "MdxError");

    m.def("decompose", &py_decompose, py::arg("instance_json"), py::arg("mode") = "auto",
          "Solve an instance document; returns the result document as a JSON string.");
    m.def("check", &py_check, py::arg("instance_json"),
          "Test the marginals against the hitting requirements.");
    m.def("sample", &py_sample, py::arg("result_json"), py::arg("n") = 1, py::arg("seed") = 0,
          "Draw subsets (as name lists) from a result document.");
    m.def("app", &py_app, py::arg("subcommand"), py::arg("instance_json"),
          "Run an application front end: security, coverage, or committee.");
    m.def(
        "normalize_rational",
        [](const std::string& s) { return to_string(io::parse_rational(s)); },
        py::arg("text"), "Exact conversion of 'p/q', integer, or decimal strings.");
    m.def("set_cap", [](int cap) {
        if (cap < 1) throw Error(ErrorCode::InvalidInput, "cap must be positive");
        global_caps().enumeration_elements = cap;
        global_caps().engine_enumeration_elements = cap;
    });
}
