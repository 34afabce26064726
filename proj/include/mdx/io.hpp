#pragma once

#include <memory>
#include <optional>
#include <string>

#include "mdx/abstract.hpp"
#include "mdx/apps.hpp"
#include "mdx/balanced.hpp"
#include "mdx/engine.hpp"
#include "mdx/lattice.hpp"
#include "mdx/supermodular.hpp"
#include "mdx/types.hpp"

namespace mdx::io {

enum class FamilyKind {
    Explicit,
    Digraph,
    SupermodularTable,
    RootedCuts,
    SmugglingTree,
    Coverage,
    Committee,
};

struct ParsedInstance {
    FamilyKind kind = FamilyKind::Explicit;
    GroundSet ground;
    std::optional<Marginals> marginals;
    // Engine instance for kinds that expose a member family directly.
    std::optional<Instance> instance;
    // Backend data per kind.
    std::shared_ptr<SupermodularOracle> sup_oracle;
    std::shared_ptr<RootedCutLattice> lattice;
    std::shared_ptr<DigraphPathSystem> digraph;
    std::optional<AbstractNetwork> network;
    std::optional<SmugglingTree> tree;
    std::optional<CoverageInstance> coverage;
    std::optional<CommitteeInstance> committee;
    std::optional<Hypergraph> hypergraph;  // explicit families, for the balanced backend
    std::vector<Rat> costs;                // inspection costs when present
    std::vector<Rat> mu;                   // affine requirement coefficients
    bool affine = false;
};

// Parses the versioned JSON instance document; throws Error(InvalidInput) with
// a descriptive message on schema violations.
ParsedInstance parse_instance(const std::string& text);
ParsedInstance parse_instance_file(const std::string& path);

struct Diagnostics {
    int iterations = 0;
    int support_size = 0;
    Rat worst_slack;  // max_P (pi_P - hitting probability), nonpositive when ok
};

std::string result_to_json(const GroundSet& ground, const Decomposition& z,
                           const Diagnostics& diag);

struct ParsedResult {
    GroundSet ground;
    Decomposition z;
};

ParsedResult parse_result(const std::string& text);
ParsedResult parse_result_file(const std::string& path);

// Exact conversion of "p/q", integer, or decimal strings.
Rat parse_rational(const std::string& text);

std::string set_to_string(const GroundSet& ground, ElemSet s);

}  // namespace mdx::io
