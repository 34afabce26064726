#include "mdx/exactlp.hpp"

#include <algorithm>
#include <deque>

namespace mdx::lp {

namespace {

// Dense two-phase simplex tableau in standard form: A y = b, y >= 0, b >= 0.
struct Tableau {
    int m = 0, n = 0;           // rows, structural + slack columns
    int n_total = 0;            // including artificials
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    std::vector<Rat> cost;      // reduced cost row, length n_total
    std::vector<int> basis;     // basic column per row

    void pivot(int r, int c) {
        Rat piv = a[r][c];
        for (int j = 0; j < n_total; ++j) a[r][j] /= piv;
        b[r] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (int j = 0; j < n_total; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        if (cost[c] != 0) {
            Rat f = cost[c];
            for (int j = 0; j < n_total; ++j) cost[j] -= f * a[r][j];
        }
        basis[r] = c;
    }

    void load_cost(const std::vector<Rat>& c) {
        cost.assign(n_total, Rat(0));
        std::copy(c.begin(), c.end(), cost.begin());
        for (int i = 0; i < m; ++i) {
            if (cost[basis[i]] == 0) continue;
            Rat f = cost[basis[i]];
            for (int j = 0; j < n_total; ++j) cost[j] -= f * a[i][j];
        }
    }

    // Bland's rule; columns >= col_limit are never entered.
    // Returns Optimal or Unbounded.
    Status run(int col_limit) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < col_limit; ++j)
                if (cost[j] < 0) { enter = j; break; }
            if (enter < 0) return Status::Optimal;
            int leave = -1;
            Rat best_ratio;
            for (int i = 0; i < m; ++i) {
                if (a[i][enter] <= 0) continue;
                Rat ratio = b[i] / a[i][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return Status::Unbounded;
            pivot(leave, enter);
        }
    }
};

struct VarMap {
    enum Kind { ShiftLower, ShiftUpper, Split } kind = ShiftLower;
    int col0 = -1, col1 = -1;
    Rat shift;  // the finite bound used as reference
};

}  // namespace

LpSolution solve(const LinearProgram& lp) {
    const int nv = lp.num_vars();
    const int nc = static_cast<int>(lp.constraints.size());
    Caps& caps = global_caps();
    if (nv > caps.lp_variables || nc > caps.lp_constraints)
        throw Error(ErrorCode::ScaleExceeded, "LP beyond configured size limits");
    for (const auto& c : lp.constraints)
        if (static_cast<int>(c.row.size()) != nv)
            throw Error(ErrorCode::DimensionMismatch, "constraint row length mismatch");

    auto lower = lp.lower, upper = lp.upper;
    lower.resize(nv, Rat(0));
    upper.resize(nv, std::nullopt);
    for (int j = 0; j < nv; ++j)
        if (lower[j] && upper[j] && *lower[j] > *upper[j])
            throw Error(ErrorCode::InvalidInput, "variable bounds crossed");

    // Standard-form variables.
    std::vector<VarMap> vmap(nv);
    int ncols = 0;
    std::vector<std::pair<int, Rat>> bound_rows;  // column <= value
    for (int j = 0; j < nv; ++j) {
        if (lower[j]) {
            vmap[j] = {VarMap::ShiftLower, ncols++, -1, *lower[j]};
            if (upper[j]) bound_rows.push_back({vmap[j].col0, *upper[j] - *lower[j]});
        } else if (upper[j]) {
            vmap[j] = {VarMap::ShiftUpper, ncols++, -1, *upper[j]};
        } else {
            vmap[j] = {VarMap::Split, ncols, ncols + 1, Rat(0)};
            ncols += 2;
        }
    }

    const int m = nc + static_cast<int>(bound_rows.size());
    std::vector<std::vector<Rat>> rows(m, std::vector<Rat>(ncols, Rat(0)));
    std::vector<Rat> rhs(m, Rat(0));
    std::vector<Rel> rels(m, Rel::Le);

    auto expand = [&](int r, int j, const Rat& coef) {
        const VarMap& v = vmap[j];
        switch (v.kind) {
            case VarMap::ShiftLower:
                rows[r][v.col0] += coef;
                rhs[r] -= coef * v.shift;
                break;
            case VarMap::ShiftUpper:
                rows[r][v.col0] -= coef;
                rhs[r] -= coef * v.shift;
                break;
            case VarMap::Split:
                rows[r][v.col0] += coef;
                rows[r][v.col1] -= coef;
                break;
        }
    };

    for (int r = 0; r < nc; ++r) {
        const auto& c = lp.constraints[r];
        rhs[r] = c.rhs;
        rels[r] = c.rel;
        for (int j = 0; j < nv; ++j)
            if (c.row[j] != 0) expand(r, j, c.row[j]);
        if (c.rel == Rel::Ge) {
            for (auto& x : rows[r]) x = -x;
            rhs[r] = -rhs[r];
            rels[r] = Rel::Le;
        }
    }
    for (size_t k = 0; k < bound_rows.size(); ++k) {
        int r = nc + static_cast<int>(k);
        rows[r][bound_rows[k].first] = 1;
        rhs[r] = bound_rows[k].second;
        rels[r] = Rel::Le;
    }

    // Slacks for inequalities.
    int nslack = 0;
    for (int r = 0; r < m; ++r)
        if (rels[r] == Rel::Le) ++nslack;
    Tableau t;
    t.m = m;
    t.n = ncols + nslack;
    t.n_total = t.n + m;  // one artificial per row
    t.a.assign(m, std::vector<Rat>(t.n_total, Rat(0)));
    t.b = rhs;
    t.basis.assign(m, -1);
    int slack = ncols;
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < ncols; ++j) t.a[r][j] = rows[r][j];
        if (rels[r] == Rel::Le) t.a[r][slack++] = 1;
    }
    for (int r = 0; r < m; ++r) {
        if (t.b[r] < 0) {
            for (int j = 0; j < t.n; ++j) t.a[r][j] = -t.a[r][j];
            t.b[r] = -t.b[r];
        }
        t.a[r][t.n + r] = 1;
        t.basis[r] = t.n + r;
    }

    // Phase 1.
    std::vector<Rat> phase1(t.n_total, Rat(0));
    for (int r = 0; r < m; ++r) phase1[t.n + r] = 1;
    t.load_cost(phase1);
    t.run(t.n);  // artificials never re-enter
    Rat infeas = 0;
    for (int r = 0; r < m; ++r)
        if (t.basis[r] >= t.n) infeas += t.b[r];
    LpSolution sol;
    if (infeas > 0) {
        sol.status = Status::Infeasible;
        // Phase-1 duals: y_i = 1 - reduced cost of artificial i.
        sol.farkas.resize(m);
        for (int r = 0; r < m; ++r) sol.farkas[r] = Rat(1) - t.cost[t.n + r];
        return sol;
    }
    // Drive basic artificials (at value 0) out where possible.
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] < t.n) continue;
        for (int j = 0; j < t.n; ++j) {
            if (t.a[r][j] != 0) {
                t.pivot(r, j);
                break;
            }
        }
    }

    // Phase 2.
    std::vector<Rat> obj(t.n_total, Rat(0));
    Rat constant = 0;
    for (int j = 0; j < nv; ++j) {
        Rat coef = lp.objective[j];
        if (lp.sense == Sense::Max) coef = -coef;
        if (coef == 0) continue;
        const VarMap& v = vmap[j];
        switch (v.kind) {
            case VarMap::ShiftLower:
                obj[v.col0] += coef;
                constant += coef * v.shift;
                break;
            case VarMap::ShiftUpper:
                obj[v.col0] -= coef;
                constant += coef * v.shift;
                break;
            case VarMap::Split:
                obj[v.col0] += coef;
                obj[v.col1] -= coef;
                break;
        }
    }
    t.load_cost(obj);
    Status st = t.run(t.n);
    if (st == Status::Unbounded) {
        sol.status = Status::Unbounded;
        return sol;
    }

    std::vector<Rat> y(t.n, Rat(0));
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < t.n) y[t.basis[r]] = t.b[r];
    sol.status = Status::Optimal;
    sol.point.resize(nv);
    for (int j = 0; j < nv; ++j) {
        const VarMap& v = vmap[j];
        switch (v.kind) {
            case VarMap::ShiftLower: sol.point[j] = v.shift + y[v.col0]; break;
            case VarMap::ShiftUpper: sol.point[j] = v.shift - y[v.col0]; break;
            case VarMap::Split: sol.point[j] = y[v.col0] - y[v.col1]; break;
        }
    }
    sol.value = 0;
    for (int j = 0; j < nv; ++j) sol.value += lp.objective[j] * sol.point[j];
    sol.basis = t.basis;
    return sol;
}

namespace {

// Row-reduces a in place; returns pivot columns.
std::vector<int> row_reduce(std::vector<std::vector<Rat>>& a) {
    std::vector<int> pivots;
    if (a.empty()) return pivots;
    int rows = static_cast<int>(a.size());
    int cols = static_cast<int>(a[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int sel = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c] != 0) { sel = i; break; }
        if (sel < 0) continue;
        std::swap(a[r], a[sel]);
        Rat piv = a[r][c];
        for (int j = c; j < cols; ++j) a[r][j] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

int matrix_rank(std::vector<std::vector<Rat>> m) {
    return static_cast<int>(row_reduce(m).size());
}

std::optional<std::vector<Rat>> solve_linear(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    int rows = static_cast<int>(a.size());
    int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
    for (int i = 0; i < rows; ++i) a[i].push_back(b[i]);
    auto pivots = row_reduce(a);
    for (int c : pivots)
        if (c == cols) return std::nullopt;  // 0 = 1 row
    // Check trailing zero rows.
    int r = static_cast<int>(pivots.size());
    for (int i = r; i < rows; ++i)
        if (a[i][cols] != 0) return std::nullopt;
    std::vector<Rat> x(cols, Rat(0));
    for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = a[i][cols];
    return x;
}

std::optional<std::vector<Rat>> kernel_vector(std::vector<std::vector<Rat>> a) {
    int cols = a.empty() ? 0 : static_cast<int>(a[0].size());
    auto pivots = row_reduce(a);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    int free_col = -1;
    for (int c = 0; c < cols; ++c)
        if (!is_pivot[c]) { free_col = c; break; }
    if (free_col < 0) return std::nullopt;
    std::vector<Rat> x(cols, Rat(0));
    x[free_col] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -a[i][free_col];
    return x;
}

std::optional<std::vector<Rat>> convex_combination(
    const std::vector<Rat>& target, const std::vector<std::vector<Rat>>& vertices) {
    const int d = static_cast<int>(target.size());
    const int k = static_cast<int>(vertices.size());
    for (const auto& v : vertices)
        if (static_cast<int>(v.size()) != d)
            throw Error(ErrorCode::DimensionMismatch, "vertex dimension mismatch");
    if (k == 0) return std::nullopt;

    LinearProgram lp;
    lp.objective.assign(k, Rat(0));
    for (int i = 0; i < d; ++i) {
        std::vector<Rat> row(k);
        for (int j = 0; j < k; ++j) row[j] = vertices[j][i];
        lp.add_constraint(std::move(row), Rel::Eq, target[i]);
    }
    lp.add_constraint(std::vector<Rat>(k, Rat(1)), Rel::Eq, Rat(1));
    LpSolution sol = solve(lp);
    if (sol.status != Status::Optimal) return std::nullopt;
    std::vector<Rat> w = sol.point;

    // Caratheodory reduction: eliminate affine dependencies until the support
    // has at most d+1 vertices.
    for (;;) {
        std::vector<int> active;
        for (int j = 0; j < k; ++j)
            if (w[j] > 0) active.push_back(j);
        if (static_cast<int>(active.size()) <= d + 1) break;
        std::vector<std::vector<Rat>> a(d + 1, std::vector<Rat>(active.size()));
        for (size_t jj = 0; jj < active.size(); ++jj) {
            for (int i = 0; i < d; ++i) a[i][jj] = vertices[active[jj]][i];
            a[d][jj] = 1;
        }
        auto mu = kernel_vector(std::move(a));
        if (!mu) break;  // affinely independent; nothing to reduce
        bool has_positive = false;
        for (const Rat& v : *mu)
            if (v > 0) has_positive = true;
        if (!has_positive)
            for (Rat& v : *mu) v = -v;
        Rat t;
        bool first = true;
        for (size_t jj = 0; jj < active.size(); ++jj) {
            if ((*mu)[jj] <= 0) continue;
            Rat ratio = w[active[jj]] / (*mu)[jj];
            if (first || ratio < t) t = ratio, first = false;
        }
        for (size_t jj = 0; jj < active.size(); ++jj) w[active[jj]] -= t * (*mu)[jj];
    }
    return w;
}

TransportResult transport_feasible(const std::vector<Rat>& supplies,
                                   const std::vector<Rat>& demands,
                                   const std::vector<TransportArc>& arcs) {
    Rat total_supply = 0, total_demand = 0;
    for (const Rat& s : supplies) total_supply += s;
    for (const Rat& d : demands) total_demand += d;
    if (total_supply != total_demand)
        throw Error(ErrorCode::BalanceMismatch, "supply and demand totals differ");

    const int ns = static_cast<int>(supplies.size());
    const int nt = static_cast<int>(demands.size());
    const int src = ns + nt, snk = ns + nt + 1, nn = ns + nt + 2;

    struct Edge {
        int to;
        Rat cap;
        int rev;
        int arc_index;  // -1 for source/sink edges and reverse edges
    };
    std::vector<std::vector<Edge>> g(nn);
    auto add_edge = [&](int u, int v, Rat cap, int idx) {
        g[u].push_back({v, std::move(cap), static_cast<int>(g[v].size()), idx});
        g[v].push_back({u, Rat(0), static_cast<int>(g[u].size()) - 1, -1});
    };
    for (int i = 0; i < ns; ++i) add_edge(src, i, supplies[i], -1);
    for (int j = 0; j < nt; ++j) add_edge(ns + j, snk, demands[j], -1);
    for (size_t a = 0; a < arcs.size(); ++a) {
        const auto& arc = arcs[a];
        if (arc.source < 0 || arc.source >= ns || arc.sink < 0 || arc.sink >= nt)
            throw Error(ErrorCode::InvalidInput, "transport arc endpoint out of range");
        add_edge(arc.source, ns + arc.sink, arc.cap, static_cast<int>(a));
    }

    // Edmonds-Karp.
    Rat flow = 0;
    for (;;) {
        std::vector<std::pair<int, int>> parent(nn, {-1, -1});
        std::deque<int> queue{src};
        parent[src] = {src, -1};
        while (!queue.empty() && parent[snk].first < 0) {
            int u = queue.front();
            queue.pop_front();
            for (size_t i = 0; i < g[u].size(); ++i) {
                const Edge& e = g[u][i];
                if (e.cap > 0 && parent[e.to].first < 0) {
                    parent[e.to] = {u, static_cast<int>(i)};
                    queue.push_back(e.to);
                }
            }
        }
        if (parent[snk].first < 0) break;
        Rat aug;
        bool first = true;
        for (int v = snk; v != src; v = parent[v].first) {
            const Edge& e = g[parent[v].first][parent[v].second];
            if (first || e.cap < aug) aug = e.cap, first = false;
        }
        for (int v = snk; v != src; v = parent[v].first) {
            Edge& e = g[parent[v].first][parent[v].second];
            e.cap -= aug;
            g[v][e.rev].cap += aug;
        }
        flow += aug;
    }

    TransportResult res;
    if (flow == total_demand) {
        res.feasible = true;
        res.flow.assign(arcs.size(), Rat(0));
        for (int u = 0; u < nn; ++u)
            for (const Edge& e : g[u])
                if (e.arc_index >= 0) res.flow[e.arc_index] = arcs[e.arc_index].cap - e.cap;
        return res;
    }
    // Residual reachability gives the violated cut: sources and sinks outside
    // the reachable set.
    std::vector<bool> reach(nn, false);
    std::deque<int> queue{src};
    reach[src] = true;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (const Edge& e : g[u])
            if (e.cap > 0 && !reach[e.to]) {
                reach[e.to] = true;
                queue.push_back(e.to);
            }
    }
    for (int i = 0; i < ns; ++i)
        if (!reach[i]) res.cut_sources.push_back(i);
    for (int j = 0; j < nt; ++j)
        if (!reach[ns + j]) res.cut_sinks.push_back(j);
    return res;
}

}  // namespace mdx::lp
