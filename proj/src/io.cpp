#include "mdx/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mdx::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

Rat rat_field(const json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_rat(j.get<std::string>());
        } catch (const std::exception& ex) {
            fail(where + ": " + ex.what());
        }
    }
    if (j.is_number_integer()) return Rat(j.get<long long>());
    fail(where + ": expected a rational string");
}

ElemSet member_field(const json& j, const GroundSet& ground, const std::string& where) {
    if (!j.is_array()) fail(where + ": expected an array of element names");
    ElemSet s = 0;
    for (const auto& name : j) {
        if (!name.is_string()) fail(where + ": element names must be strings");
        s |= singleton(ground.index(name.get<std::string>()));
    }
    return s;
}

std::vector<std::pair<int, int>> edge_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + ": expected an array of [u,v] pairs");
    std::vector<std::pair<int, int>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            fail(where + ": expected [u,v] integer pairs");
        out.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return out;
}

std::map<ElemSet, Rat> requirement_table(const json& req, const GroundSet& ground) {
    if (!req.contains("values") || !req["values"].is_array())
        fail("requirements.values: expected an array");
    std::map<ElemSet, Rat> table;
    for (const auto& entry : req["values"]) {
        if (!entry.contains("member") || !entry.contains("pi"))
            fail("requirements.values: entries need member and pi");
        ElemSet m = member_field(entry["member"], ground, "requirements.values.member");
        if (!table.emplace(m, rat_field(entry["pi"], "requirements.values.pi")).second)
            fail("requirements.values: duplicate member entry");
    }
    return table;
}

std::vector<Rat> mu_vector(const json& req, const GroundSet& ground) {
    if (!req.contains("mu") || !req["mu"].is_object())
        fail("requirements.mu: expected an object keyed by element name");
    std::vector<Rat> mu(ground.size(), Rat(0));
    for (const auto& [name, value] : req["mu"].items())
        mu[ground.index(name)] = rat_field(value, "requirements.mu");
    for (const Rat& v : mu)
        if (v < 0 || v > 1) fail("requirements.mu: coefficients must lie in [0,1]");
    return mu;
}

}  // namespace

Rat parse_rational(const std::string& text) {
    try {
        return parse_rat(text);
    } catch (const std::exception& ex) {
        fail(std::string("bad rational: ") + ex.what());
    }
}

std::string set_to_string(const GroundSet& ground, ElemSet s) {
    std::string out = "{";
    bool first = true;
    for_each_element(s, [&](int e) {
        if (!first) out += ",";
        out += ground.name(e);
        first = false;
    });
    return out + "}";
}

ParsedInstance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        fail(std::string("not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) fail("instance document must be an object");
    if (!doc.contains("schema_version") || doc["schema_version"] != 1)
        fail("schema_version must be 1");
    if (!doc.contains("ground_set") || !doc["ground_set"].is_array())
        fail("ground_set: expected an array of names");
    std::vector<std::string> names;
    for (const auto& n : doc["ground_set"]) {
        if (!n.is_string()) fail("ground_set: names must be strings");
        names.push_back(n.get<std::string>());
    }

    ParsedInstance out;
    out.ground = GroundSet(std::move(names));
    int n = out.ground.size();

    if (!doc.contains("family") || !doc["family"].is_object() || !doc["family"].contains("kind"))
        fail("family.kind: required");
    const json& fam = doc["family"];
    std::string kind = fam["kind"].get<std::string>();

    json req = doc.contains("requirements") ? doc["requirements"] : json{{"kind", "derived"}};
    if (!req.is_object() || !req.contains("kind")) fail("requirements.kind: required");
    std::string req_kind = req["kind"].get<std::string>();

    if (doc.contains("marginals")) {
        if (!doc["marginals"].is_object()) fail("marginals: expected an object");
        std::vector<Rat> rho(n, Rat(0));
        for (const auto& [name, value] : doc["marginals"].items())
            rho[out.ground.index(name)] = rat_field(value, "marginals");
        out.marginals = Marginals{std::move(rho)};
        out.marginals->validate();
    }
    if (fam.contains("costs")) {
        if (!fam["costs"].is_array() || static_cast<int>(fam["costs"].size()) != n)
            fail("family.costs: expected one value per element");
        for (const auto& c : fam["costs"]) out.costs.push_back(rat_field(c, "family.costs"));
    }

    auto make_table_req = [&](const std::vector<ElemSet>& members) {
        std::map<ElemSet, Rat> table = requirement_table(req, out.ground);
        for (ElemSet m : members)
            if (!table.count(m))
                fail("requirements.values: missing entry for member " +
                     set_to_string(out.ground, m));
        return Requirements::table(std::move(table));
    };

    if (kind == "explicit") {
        out.kind = FamilyKind::Explicit;
        if (!fam.contains("members") || !fam["members"].is_array())
            fail("family.members: expected an array");
        Instance inst;
        inst.ground = out.ground;
        for (const auto& m : fam["members"])
            inst.members.push_back(member_field(m, out.ground, "family.members"));
        inst.sort_members();
        if (req_kind == "table") inst.req = make_table_req(inst.members);
        else if (req_kind == "affine") {
            out.mu = mu_vector(req, out.ground);
            out.affine = true;
            inst.req = Requirements::affine(out.mu);
        } else
            fail("requirements.kind: explicit families need table or affine");
        inst.validate();
        bool nonempty = true;
        for (ElemSet m : inst.members)
            if (m == 0) nonempty = false;
        if (nonempty) out.hypergraph = Hypergraph{out.ground, inst.members};
        out.instance = std::move(inst);
    } else if (kind == "digraph") {
        out.kind = FamilyKind::Digraph;
        if (!fam.contains("nodes") || !fam["nodes"].is_number_integer())
            fail("family.nodes: required integer");
        Digraph g;
        g.num_nodes = fam["nodes"].get<int>();
        g.arcs = edge_list(fam.contains("arcs") ? fam["arcs"] : json::array(), "family.arcs");
        if (static_cast<int>(g.arcs.size()) != n)
            fail("family.arcs: expected one arc per ground element");
        if (!fam.contains("source") || !fam.contains("sink"))
            fail("family.source/sink: required");
        out.digraph = std::make_shared<DigraphPathSystem>(g, fam["source"].get<int>(),
                                                          fam["sink"].get<int>());
        out.network = out.digraph->to_network(out.ground);
        Instance inst;
        if (req_kind == "affine") {
            out.mu = mu_vector(req, out.ground);
            out.affine = true;
            inst = make_digraph_instance(*out.digraph, out.ground, Requirements::affine(out.mu),
                                         true, out.mu);
        } else if (req_kind == "table") {
            Instance base = make_abstract_instance(*out.network, Requirements::callback([](ElemSet) {
                                                       return Rat(0);
                                                   }));
            inst = make_abstract_instance(*out.network, make_table_req(base.members));
        } else
            fail("requirements.kind: digraph families need table or affine");
        out.instance = std::move(inst);
    } else if (kind == "supermodular_table") {
        out.kind = FamilyKind::SupermodularTable;
        if (req_kind != "table") fail("requirements.kind: table required");
        if (n > global_caps().enumeration_elements)
            throw Error(ErrorCode::ScaleExceeded, "ground set too large for a full table");
        std::map<ElemSet, Rat> table = requirement_table(req, out.ground);
        ElemSet full = out.ground.full_set();
        for (ElemSet p = 0;; ++p) {
            if (!table.count(p))
                fail("requirements.values: missing entry for subset " +
                     set_to_string(out.ground, p));
            if (p == full) break;
        }
        out.sup_oracle = std::make_shared<SupermodularOracle>(
            n, [table](ElemSet p) { return table.at(p); });
        if (!out.sup_oracle->spot_check_supermodular(256, 7))
            fail("requirements.values: table is not supermodular");
        out.instance = make_supermodular_instance(out.ground, out.sup_oracle);
    } else if (kind == "rooted_cuts") {
        out.kind = FamilyKind::RootedCuts;
        if (req_kind != "derived") fail("requirements.kind: derived required for rooted_cuts");
        if (!fam.contains("nodes") || !fam.contains("root") || !fam.contains("alpha") ||
            !fam.contains("beta"))
            fail("family: rooted_cuts needs nodes, edges, root, alpha, beta");
        auto edges = edge_list(fam["edges"], "family.edges");
        if (static_cast<int>(edges.size()) != n)
            fail("family.edges: expected one edge per ground element");
        std::vector<Rat> alpha;
        for (const auto& a : fam["alpha"]) alpha.push_back(rat_field(a, "family.alpha"));
        out.lattice = std::make_shared<RootedCutLattice>(
            fam["nodes"].get<int>(), edges, fam["root"].get<int>(), alpha,
            rat_field(fam["beta"], "family.beta"));
        Instance inst = make_lattice_instance(*out.lattice);
        inst.ground = out.ground;
        out.instance = std::move(inst);
    } else if (kind == "smuggling_tree") {
        out.kind = FamilyKind::SmugglingTree;
        if (req_kind != "derived") fail("requirements.kind: derived required for smuggling_tree");
        if (!fam.contains("nodes") || !fam.contains("edges") || !fam.contains("beta"))
            fail("family: smuggling_tree needs nodes, edges, rewards, beta");
        SmugglingTree tree;
        tree.num_nodes = fam["nodes"].get<int>();
        tree.edges = edge_list(fam["edges"], "family.edges");
        if (static_cast<int>(tree.edges.size()) != n)
            fail("family.edges: expected one edge per ground element");
        tree.beta = rat_field(fam["beta"], "family.beta");
        if (fam.contains("rewards"))
            for (const auto& r : fam["rewards"]) {
                if (!r.contains("pair") || !r.contains("value"))
                    fail("family.rewards: entries need pair and value");
                auto pair = edge_list(json::array({r["pair"]}), "family.rewards.pair")[0];
                if (pair.first > pair.second) std::swap(pair.first, pair.second);
                tree.pair_rewards[pair] = rat_field(r["value"], "family.rewards.value");
            }
        out.sup_oracle = tree.oracle();
        out.instance = make_supermodular_instance(out.ground, out.sup_oracle);
        out.tree = std::move(tree);
    } else if (kind == "coverage") {
        out.kind = FamilyKind::Coverage;
        if (req_kind != "derived") fail("requirements.kind: derived required for coverage");
        CoverageInstance cov;
        cov.ground = out.ground;
        if (!fam.contains("universe") || !fam.contains("covered") || !fam.contains("scenarios"))
            fail("family: coverage needs universe, covered, scenarios");
        cov.universe_size = fam["universe"].get<int>();
        for (const auto& c : fam["covered"]) {
            if (!c.is_array()) fail("family.covered: expected arrays of item indices");
            std::uint64_t mask = 0;
            for (const auto& item : c) {
                int u = item.get<int>();
                if (u < 0 || u >= cov.universe_size) fail("family.covered: item out of range");
                mask |= std::uint64_t{1} << u;
            }
            cov.covered.push_back(mask);
        }
        for (const auto& sc : fam["scenarios"]) {
            std::vector<Rat> r, c;
            for (const auto& v : sc["rewards"]) r.push_back(rat_field(v, "scenario rewards"));
            for (const auto& v : sc["costs"]) c.push_back(rat_field(v, "scenario costs"));
            cov.rewards.push_back(std::move(r));
            cov.costs.push_back(std::move(c));
        }
        cov.validate();
        out.coverage = std::move(cov);
    } else if (kind == "committee") {
        out.kind = FamilyKind::Committee;
        CommitteeInstance com;
        com.ground = out.ground;
        if (!fam.contains("votes") || !fam.contains("k")) fail("family: committee needs votes, k");
        for (const auto& v : fam["votes"]) com.votes.push_back(v.get<long long>());
        com.k = fam["k"].get<int>();
        if (fam.contains("groups")) {
            if (!fam.contains("group_pi")) fail("family.group_pi: required with groups");
            for (const auto& g : fam["groups"])
                com.groups.push_back(member_field(g, out.ground, "family.groups"));
            for (const auto& p : fam["group_pi"])
                com.group_pi.push_back(rat_field(p, "family.group_pi"));
        }
        com.validate();
        // Engine view: the groups as an explicit family.
        Instance inst;
        inst.ground = out.ground;
        std::map<ElemSet, Rat> table;
        for (size_t i = 0; i < com.groups.size(); ++i) {
            auto [it, fresh] = table.emplace(com.groups[i], com.group_pi[i]);
            if (!fresh && com.group_pi[i] > it->second) it->second = com.group_pi[i];
        }
        for (const auto& [p, v] : table) inst.members.push_back(p);
        inst.req = Requirements::table(std::move(table));
        inst.validate();
        out.instance = std::move(inst);
        if (!out.marginals) out.marginals = com.marginals();
        out.committee = std::move(com);
    } else {
        fail("family.kind: unknown kind '" + kind + "'");
    }
    return out;
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

ParsedInstance parse_instance_file(const std::string& path) {
    return parse_instance(slurp(path));
}

std::string result_to_json(const GroundSet& ground, const Decomposition& z,
                           const Diagnostics& diag) {
    json doc;
    doc["schema_version"] = 1;
    doc["status"] = "ok";
    json gs = json::array();
    for (int i = 0; i < ground.size(); ++i) gs.push_back(ground.name(i));
    doc["ground_set"] = gs;
    json rows = json::array();
    for (const auto& [s, w] : z.support) {
        json row;
        json set = json::array();
        for_each_element(s, [&](int e) { set.push_back(ground.name(e)); });
        row["set"] = set;
        row["weight"] = to_string(w);
        rows.push_back(row);
    }
    doc["decomposition"] = rows;
    doc["diagnostics"] = {{"iterations", diag.iterations},
                          {"support_size", diag.support_size},
                          {"worst_slack", to_string(diag.worst_slack)}};
    return doc.dump(2) + "\n";
}

ParsedResult parse_result(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        fail(std::string("not valid JSON: ") + ex.what());
    }
    if (!doc.is_object() || doc.value("schema_version", 0) != 1)
        fail("schema_version must be 1");
    if (!doc.contains("ground_set") || !doc.contains("decomposition"))
        fail("result document needs ground_set and decomposition");
    std::vector<std::string> names;
    for (const auto& name : doc["ground_set"]) names.push_back(name.get<std::string>());
    ParsedResult out;
    out.ground = GroundSet(std::move(names));
    for (const auto& row : doc["decomposition"]) {
        if (!row.contains("set") || !row.contains("weight"))
            fail("decomposition rows need set and weight");
        ElemSet s = member_field(row["set"], out.ground, "decomposition.set");
        out.z.add(s, rat_field(row["weight"], "decomposition.weight"));
    }
    if (out.z.total() != 1) fail("decomposition weights must sum to 1");
    for (const auto& [s, w] : out.z.support)
        if (w < 0) fail("negative decomposition weight");
    return out;
}

ParsedResult parse_result_file(const std::string& path) { return parse_result(slurp(path)); }

}  // namespace mdx::io
