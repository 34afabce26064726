#pragma once

#include <optional>
#include <vector>

#include "mdx/types.hpp"

namespace mdx::lp {

enum class Sense { Min, Max };
enum class Rel { Le, Eq, Ge };

struct Constraint {
    std::vector<Rat> row;
    Rel rel = Rel::Le;
    Rat rhs;
};

struct LinearProgram {
    Sense sense = Sense::Min;
    std::vector<Rat> objective;
    std::vector<Constraint> constraints;
    // Per-variable bounds; nullopt means unbounded on that side.
    // Defaults to [0, +inf) for every variable when left empty.
    std::vector<std::optional<Rat>> lower;
    std::vector<std::optional<Rat>> upper;

    int num_vars() const { return static_cast<int>(objective.size()); }
    void add_constraint(std::vector<Rat> row, Rel rel, Rat rhs) {
        constraints.push_back({std::move(row), rel, std::move(rhs)});
    }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct LpSolution {
    Status status = Status::Infeasible;
    std::vector<Rat> point;   // original variable space
    Rat value;                // objective in the original sense
    std::vector<int> basis;   // basic column indices of the internal standard form
    // Infeasibility multipliers over the constraints (original constraints
    // first, then internal bound rows); empty unless status == Infeasible.
    std::vector<Rat> farkas;
};

// Primal simplex with Bland's anti-cycling rule over exact rationals.
LpSolution solve(const LinearProgram& lp);

// Exact Gaussian elimination helpers.
int matrix_rank(std::vector<std::vector<Rat>> m);
// One solution of A x = b, or nullopt when inconsistent.
std::optional<std::vector<Rat>> solve_linear(std::vector<std::vector<Rat>> a, std::vector<Rat> b);
// A nonzero vector in the nullspace of A, or nullopt when A has full column rank.
std::optional<std::vector<Rat>> kernel_vector(std::vector<std::vector<Rat>> a);

// Nonnegative weights summing to 1 with sum_i w_i v_i = target, support at
// most dim+1, or nullopt when target is outside the convex hull.
std::optional<std::vector<Rat>> convex_combination(const std::vector<Rat>& target,
                                                  const std::vector<std::vector<Rat>>& vertices);

struct TransportArc {
    int source = 0;
    int sink = 0;
    Rat cap;
};

struct TransportResult {
    bool feasible = false;
    std::vector<Rat> flow;  // aligned with the arc list
    // Witness of the violated cut condition when infeasible:
    // sum of supplies over cut_sources + sum of caps on arcs from other
    // sources into cut_sinks < sum of demands over cut_sinks.
    std::vector<int> cut_sources;
    std::vector<int> cut_sinks;
};

// Feasibility version of a transportation problem, solved by augmenting paths.
TransportResult transport_feasible(const std::vector<Rat>& supplies,
                                   const std::vector<Rat>& demands,
                                   const std::vector<TransportArc>& arcs);

}  // namespace mdx::lp
