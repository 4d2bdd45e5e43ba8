#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "pe/target.hpp"
#include "pe/value.hpp"

namespace pe {

struct ScenarioOptions {
    unsigned seed = 0;
    std::optional<double> dt;
    std::optional<double> t_max;
    std::vector<int> grid;       // sweep grid counts
    std::optional<Vec> grid_min; // sweep extent; defaults derived from the scene
    std::optional<Vec> grid_max;
    int resolution = 720; // oracle resolution
    int samples = 200;    // verify sample count
};

/// A parsed scenario file: the full game instance plus tool options.
struct Scenario {
    int schema_version = 1;
    int dimension = 2;
    std::vector<PursuerParams> params;
    GameState initial;
    TerminalCost cost;
    bool defense = false; // cost given as a target shape
    TargetShape target;
    ScenarioOptions options;

    std::vector<OvalConfig> configs() const { return oval_configs(initial, params); }
};

/// Parses and validates; throws ValidationError with field paths on failure.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

nlohmann::json shape_to_json(const TargetShape& s);
TargetShape shape_from_json(const nlohmann::json& j, const std::string& path);

} // namespace pe
