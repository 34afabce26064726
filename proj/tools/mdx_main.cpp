#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mdx/abstract.hpp"
#include "mdx/apps.hpp"
#include "mdx/balanced.hpp"
#include "mdx/engine.hpp"
#include "mdx/io.hpp"
#include "mdx/lattice.hpp"
#include "mdx/supermodular.hpp"

namespace {

using namespace mdx;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InfeasibleMarginals:
        case ErrorCode::NotInYStar:
        case ErrorCode::NotBalanced:
        case ErrorCode::DeficitNegative:
        case ErrorCode::NoPath:
            return 3;
        case ErrorCode::ScaleExceeded:
        case ErrorCode::OracleFailure:
        case ErrorCode::OracleInconsistent:
        case ErrorCode::IterationOverflow:
        case ErrorCode::FamilyNotEnumerable:
            return 4;
        case ErrorCode::CardinalityMismatch:
        case ErrorCode::TooManyGroups:
            return 5;
        default:
            return 2;
    }
}

void apply_cap(std::optional<int> cap_flag) {
    std::optional<int> cap = cap_flag;
    if (!cap) {
        if (const char* env = std::getenv("MDX_CAP")) cap = std::atoi(env);
    }
    if (!cap) return;
    if (*cap < 1) throw Error(ErrorCode::InvalidInput, "cap must be a positive integer");
    Caps& caps = global_caps();
    caps.enumeration_elements = *cap;
    caps.engine_enumeration_elements = *cap;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write file: " + out_path);
    out << text;
}

const Marginals& require_marginals(const io::ParsedInstance& parsed) {
    if (!parsed.marginals)
        throw Error(ErrorCode::InvalidInput, "this command needs a marginals section");
    return *parsed.marginals;
}

const Instance& require_instance(const io::ParsedInstance& parsed) {
    if (!parsed.instance)
        throw Error(ErrorCode::InvalidInput, "family kind has no member view for this command");
    return *parsed.instance;
}

int cmd_check(const std::string& path) {
    io::ParsedInstance parsed = io::parse_instance_file(path);
    if (parsed.kind == io::FamilyKind::Coverage)
        throw Error(ErrorCode::InvalidInput,
                    "coverage instances compute their own marginals; use `mdx app coverage`");
    const Instance& inst = require_instance(parsed);
    const Marginals& rho = require_marginals(parsed);
    if (rho.size() != inst.ground.size())
        throw Error(ErrorCode::DimensionMismatch, "marginal vector size mismatch");
    StarResult star = check_star(inst, rho);
    if (star.feasible) {
        std::cout << "feasible\n";
        return 0;
    }
    std::cout << "infeasible: member " << io::set_to_string(inst.ground, star.violation.member)
              << " short by " << to_string(star.violation.gap) << "\n";
    return 3;
}

struct Solved {
    Decomposition z;
    int iterations = 0;
};

Solved solve_parsed(const io::ParsedInstance& parsed, std::string mode) {
    const Marginals& rho = require_marginals(parsed);
    if (mode == "auto") {
        switch (parsed.kind) {
            case io::FamilyKind::SupermodularTable:
            case io::FamilyKind::SmugglingTree: mode = "supermodular"; break;
            case io::FamilyKind::Digraph: mode = "abstract"; break;
            case io::FamilyKind::RootedCuts: mode = "lattice"; break;
            default: mode = "lp"; break;
        }
    }
    if (mode == "supermodular") {
        if (!parsed.sup_oracle)
            throw Error(ErrorCode::InvalidInput, "family kind has no supermodular oracle");
        SupermodularAscOracle oracle(parsed.sup_oracle);
        DecomposeResult res = decompose(require_instance(parsed), rho, oracle);
        return {std::move(res.z), res.iterations};
    }
    if (mode == "abstract") {
        if (!parsed.network)
            throw Error(ErrorCode::InvalidInput, "family kind has no ordered-member view");
        const Instance& inst = require_instance(parsed);
        AbstractAscOracle oracle(*parsed.network, inst.req);
        DecomposeResult res = decompose(inst, rho, oracle);
        return {std::move(res.z), res.iterations};
    }
    if (mode == "lattice") {
        if (!parsed.lattice)
            throw Error(ErrorCode::InvalidInput, "family kind has no lattice backend");
        return {decompose_lattice(*parsed.lattice, rho), 0};
    }
    if (mode == "balanced") {
        if (!parsed.hypergraph)
            throw Error(ErrorCode::InvalidInput, "family kind has no hypergraph view");
        return {perfect_decompose(*parsed.hypergraph, rho), 0};
    }
    if (mode == "lp") {
        const Instance& inst = require_instance(parsed);
        auto z = decompose_by_lp(inst, rho);
        if (!z)
            throw Error(ErrorCode::InfeasibleMarginals,
                        "no distribution with these marginals meets the requirements");
        return {std::move(*z), 0};
    }
    throw Error(ErrorCode::InvalidInput, "unknown mode: " + mode);
}

std::string verified_result(const Instance& inst, const Marginals& rho, const Decomposition& z,
                            int iterations) {
    VerifyReport report = verify(inst, rho, z);
    if (!report.ok())
        throw Error(ErrorCode::OracleInconsistent,
                    "computed decomposition failed verification; worst slack " +
                        to_string(report.worst_violation));
    io::Diagnostics diag;
    diag.iterations = iterations;
    diag.support_size = static_cast<int>(z.support.size());
    diag.worst_slack = report.worst_violation;
    return io::result_to_json(inst.ground, z, diag);
}

int cmd_decompose(const std::string& path, const std::string& mode, const std::string& out_path) {
    io::ParsedInstance parsed = io::parse_instance_file(path);
    if (parsed.kind == io::FamilyKind::Coverage)
        throw Error(ErrorCode::InvalidInput,
                    "coverage instances compute their own marginals; use `mdx app coverage`");
    Solved solved = solve_parsed(parsed, mode);
    emit(verified_result(require_instance(parsed), require_marginals(parsed), solved.z,
                         solved.iterations),
         out_path);
    return 0;
}

int cmd_sample(const std::string& path, long long n, std::uint64_t seed) {
    io::ParsedResult result = io::parse_result_file(path);
    std::mt19937_64 rng(seed);
    for (long long i = 0; i < n; ++i)
        std::cout << io::set_to_string(result.ground, sample(result.z, rng)) << "\n";
    return 0;
}

int cmd_app(const std::string& sub, const std::string& path, const std::string& out_path) {
    io::ParsedInstance parsed = io::parse_instance_file(path);
    if (sub == "security") {
        if (parsed.costs.empty())
            throw Error(ErrorCode::InvalidInput, "security instances need family.costs");
        SecurityResult res;
        if (parsed.kind == io::FamilyKind::SmugglingTree && parsed.tree)
            res = solve_security_game(*parsed.tree, parsed.costs);
        else if (parsed.kind == io::FamilyKind::RootedCuts && parsed.lattice)
            res = solve_security_game(*parsed.lattice, parsed.costs);
        else
            throw Error(ErrorCode::InvalidInput,
                        "security expects a smuggling_tree or rooted_cuts family");
        std::cout << "cost " << to_string(res.cost) << "\n";
        emit(verified_result(require_instance(parsed), res.rho, res.z, 0), out_path);
        return 0;
    }
    if (sub == "coverage") {
        if (parsed.kind != io::FamilyKind::Coverage || !parsed.coverage)
            throw Error(ErrorCode::InvalidInput, "coverage expects a coverage family");
        CoverageResult res = solve_robust_coverage(*parsed.coverage);
        std::cout << "profit " << to_string(res.t) << "\n";
        // Verify against the requirements realized by the optimal marginals.
        Instance inst;
        inst.ground = parsed.coverage->ground;
        std::map<ElemSet, Rat> table;
        for (int u = 0; u < parsed.coverage->universe_size; ++u) {
            ElemSet p = parsed.coverage->coverers(u);
            if (p == 0) continue;
            auto [it, fresh] = table.emplace(p, res.pi[u]);
            if (!fresh && res.pi[u] > it->second) it->second = res.pi[u];
        }
        for (const auto& [p, v] : table) inst.members.push_back(p);
        inst.req = Requirements::table(std::move(table));
        emit(verified_result(inst, res.rho, res.z, 0), out_path);
        return 0;
    }
    if (sub == "committee") {
        if (parsed.kind != io::FamilyKind::Committee || !parsed.committee)
            throw Error(ErrorCode::InvalidInput, "committee expects a committee family");
        CommitteeResult res = solve_committee(*parsed.committee);
        Decomposition law = res.sampler.exact_law();
        // The rounded law meets the group requirements scaled by 1 - max rho_e.
        Rat eps = 0;
        for (const Rat& r : res.rho.values)
            if (r > eps) eps = r;
        Instance inst;
        inst.ground = parsed.committee->ground;
        std::map<ElemSet, Rat> table;
        for (size_t i = 0; i < parsed.committee->groups.size(); ++i) {
            Rat scaled = (1 - eps) * parsed.committee->group_pi[i];
            auto [it, fresh] = table.emplace(parsed.committee->groups[i], scaled);
            if (!fresh && scaled > it->second) it->second = scaled;
        }
        for (const auto& [p, v] : table) inst.members.push_back(p);
        inst.req = Requirements::table(std::move(table));
        std::cout << "committee size " << res.sampler.committee_size()
                  << "; draw with `mdx sample --seed S` on the emitted law\n";
        emit(verified_result(inst, res.rho, law, 0), out_path);
        return 0;
    }
    throw Error(ErrorCode::InvalidInput, "unknown app subcommand: " + sub);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact decompositions of probability marginals with hitting requirements"};
    app.require_subcommand(1);

    std::string file, out_path, mode = "auto", app_sub;
    long long n = 1;
    std::uint64_t seed = 0;
    std::optional<int> cap;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--cap", cap, "enumeration cap (overrides MDX_CAP)");
        cmd->add_option("file", file, "instance or result file")->required();
    };

    CLI::App* check = app.add_subcommand("check", "test the marginals against the requirements");
    add_common(check);

    CLI::App* dec = app.add_subcommand("decompose", "compute a decomposition");
    dec->add_option("--mode", mode, "auto|supermodular|abstract|lattice|balanced|lp");
    dec->add_option("--out", out_path, "write the result file here instead of stdout");
    add_common(dec);

    CLI::App* smp = app.add_subcommand("sample", "draw subsets from a result file");
    smp->add_option("--n", n, "number of draws");
    smp->add_option("--seed", seed, "random seed");
    add_common(smp);

    CLI::App* ap = app.add_subcommand("app", "application front ends");
    ap->add_option("sub", app_sub, "security|coverage|committee")->required();
    ap->add_option("--out", out_path, "write the result file here instead of stdout");
    add_common(ap);

    CLI11_PARSE(app, argc, argv);

    try {
        apply_cap(cap);
        if (check->parsed()) return cmd_check(file);
        if (dec->parsed()) return cmd_decompose(file, mode, out_path);
        if (smp->parsed()) return cmd_sample(file, n, seed);
        return cmd_app(app_sub, file, out_path);
    } catch (const mdx::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err.code());
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
