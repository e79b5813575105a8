#include "formint/config.hpp"

#include <fstream>

namespace formint {

using nlohmann::json;

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(ctx + ": unknown key \"" + it.key() + "\"");
    }
}

namespace {

const json& require(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + ": missing key \"" + key + "\"");
    return *it;
}

}  // namespace

double get_double(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) throw ConfigError(ctx + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

std::int64_t get_int(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number_integer()) throw ConfigError(ctx + ": \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

FormationGraph parse_graph(const json& j) {
    check_keys(j, {"agents", "dim", "edges"}, "graph");
    const int agents = int(get_int(j, "agents", "graph"));
    const int dim = int(get_int(j, "dim", "graph"));
    const json& edges = require(j, "edges", "graph");
    if (!edges.is_array()) throw ConfigError("graph: \"edges\" must be an array of pairs");
    std::vector<std::pair<int, int>> es;
    for (const json& e : edges) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            throw ConfigError("graph: each edge must be a pair of agent indices");
        es.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    try {
        return FormationGraph(agents, dim, es);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

PotentialSpec parse_potential(const json& j, const FormationGraph& graph) {
    check_keys(j, {"kind", "desired_distances", "desired_offsets"}, "potential");
    const json& kind = require(j, "kind", "potential");
    if (!kind.is_string()) throw ConfigError("potential: \"kind\" must be a string");
    const std::string k = kind.get<std::string>();
    try {
        if (k == "distance") {
            const json& d = require(j, "desired_distances", "potential");
            if (!d.is_array()) throw ConfigError("potential: \"desired_distances\" must be an array");
            std::vector<double> dist;
            for (const json& x : d) {
                if (!x.is_number())
                    throw ConfigError("potential: desired distances must be numbers");
                dist.push_back(x.get<double>());
            }
            if (j.contains("desired_offsets"))
                throw ConfigError("potential: \"desired_offsets\" is not a distance-based field");
            return PotentialSpec::distance_based(graph, std::move(dist));
        }
        if (k == "displacement") {
            const json& d = require(j, "desired_offsets", "potential");
            if (!d.is_array() || int(d.size()) != graph.num_edges())
                throw ConfigError("potential: need one desired offset per edge");
            if (j.contains("desired_distances"))
                throw ConfigError("potential: \"desired_distances\" is not a displacement-based field");
            std::vector<double> offs;
            for (const json& row : d) {
                if (!row.is_array() || int(row.size()) != graph.dim())
                    throw ConfigError("potential: each desired offset must have length dim");
                for (const json& x : row) {
                    if (!x.is_number()) throw ConfigError("potential: offsets must be numbers");
                    offs.push_back(x.get<double>());
                }
            }
            return PotentialSpec::displacement_based(graph, std::move(offs));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("potential: \"kind\" must be \"distance\" or \"displacement\"");
}

Configuration parse_positions(const json& arr, const FormationGraph& graph,
                              const std::string& ctx) {
    if (!arr.is_array() || int(arr.size()) != graph.num_agents())
        throw ConfigError(ctx + ": need one row per agent");
    Configuration q(graph.num_agents(), graph.dim());
    for (int i = 0; i < graph.num_agents(); ++i) {
        const json& row = arr[std::size_t(i)];
        if (!row.is_array() || int(row.size()) != graph.dim())
            throw ConfigError(ctx + ": each row must have length dim");
        for (int a = 0; a < graph.dim(); ++a) {
            if (!row[std::size_t(a)].is_number())
                throw ConfigError(ctx + ": entries must be numbers");
            q.agent(i)[a] = row[std::size_t(a)].get<double>();
        }
    }
    if (!q.finite()) throw ConfigError(ctx + ": entries must be finite");
    return q;
}

void parse_initial(const json& j, const FormationGraph& graph, Configuration& q0,
                   Configuration& v0) {
    if (j.contains("positions")) {
        check_keys(j, {"positions", "velocities"}, "initial");
        q0 = parse_positions(require(j, "positions", "initial"), graph, "initial.positions");
        v0 = parse_positions(require(j, "velocities", "initial"), graph, "initial.velocities");
        return;
    }
    check_keys(j, {"desired_positions", "displaced_agent", "displaced_position"}, "initial");
    q0 = parse_positions(require(j, "desired_positions", "initial"), graph,
                         "initial.desired_positions");
    const int agent = int(get_int(j, "displaced_agent", "initial"));
    if (agent < 0 || agent >= graph.num_agents())
        throw ConfigError("initial: displaced_agent out of range");
    const json& pos = require(j, "displaced_position", "initial");
    if (!pos.is_array() || int(pos.size()) != graph.dim())
        throw ConfigError("initial: displaced_position must have length dim");
    for (int a = 0; a < graph.dim(); ++a) {
        if (!pos[std::size_t(a)].is_number())
            throw ConfigError("initial: displaced_position entries must be numbers");
        q0.agent(agent)[a] = pos[std::size_t(a)].get<double>();
    }
    v0 = Configuration(graph.num_agents(), graph.dim(), 0.0);
}

}  // namespace formint
