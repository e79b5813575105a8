#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "formint/potentials.hpp"
#include "formint/roa.hpp"

namespace formint {

/// Malformed or inconsistent configuration input; message names the field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json load_json_file(const std::filesystem::path& path);

/// Reject any key of `j` not in `allowed`; `ctx` names the object in errors.
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx);

double get_double(const nlohmann::json& j, const char* key, const std::string& ctx);
std::int64_t get_int(const nlohmann::json& j, const char* key, const std::string& ctx);

FormationGraph parse_graph(const nlohmann::json& j);
PotentialSpec parse_potential(const nlohmann::json& j, const FormationGraph& graph);

/// Initial conditions: explicit positions/velocities, or the desired-shape
/// shorthand (one agent moved, all at rest).
void parse_initial(const nlohmann::json& j, const FormationGraph& graph, Configuration& q0,
                   Configuration& v0);

Configuration parse_positions(const nlohmann::json& arr, const FormationGraph& graph,
                              const std::string& ctx);

}  // namespace formint
