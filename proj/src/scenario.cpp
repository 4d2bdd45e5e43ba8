#include "pe/scenario.hpp"

#include <fstream>

namespace pe {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

Vec parse_vec(const json& j, const std::string& path, int expect_dim = -1) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        v[Eigen::Index(i)] = j[i].get<double>();
    }
    if (expect_dim >= 0 && int(v.size()) != expect_dim)
        fail(path, "expected " + std::to_string(expect_dim) + " components, got " +
                       std::to_string(v.size()));
    return v;
}

double parse_num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

} // namespace

TargetShape shape_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) fail(path, "expected a shape object with 'kind'");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "disk") {
        if (!j.contains("center") || !j.contains("radius")) fail(path, "disk needs center, radius");
        TargetShape s = TargetShape::disk(parse_vec(j["center"], path + ".center"),
                                          parse_num(j["radius"], path + ".radius"));
        if (s.radius <= 0) fail(path + ".radius", "must be positive");
        return s;
    }
    if (kind == "box") {
        if (!j.contains("min") || !j.contains("max")) fail(path, "box needs min, max");
        TargetShape s = TargetShape::box(parse_vec(j["min"], path + ".min"),
                                         parse_vec(j["max"], path + ".max"));
        if (s.box_min.size() != s.box_max.size()) fail(path, "min/max dimension mismatch");
        for (Eigen::Index i = 0; i < s.box_min.size(); ++i)
            if (s.box_min[i] >= s.box_max[i]) fail(path, "box min must be below max");
        return s;
    }
    if (kind == "polygon") {
        if (!j.contains("vertices")) fail(path, "polygon needs vertices");
        std::vector<Vec> verts;
        for (std::size_t i = 0; i < j["vertices"].size(); ++i)
            verts.push_back(
                parse_vec(j["vertices"][i], path + ".vertices[" + std::to_string(i) + "]", 2));
        if (verts.size() < 3) fail(path + ".vertices", "need at least 3 vertices");
        return TargetShape::polygon(std::move(verts));
    }
    if (kind == "union") {
        if (!j.contains("members") || j["members"].empty()) fail(path, "union needs members");
        std::vector<TargetShape> members;
        for (std::size_t i = 0; i < j["members"].size(); ++i)
            members.push_back(
                shape_from_json(j["members"][i], path + ".members[" + std::to_string(i) + "]"));
        return TargetShape::union_of(std::move(members));
    }
    fail(path + ".kind", "unknown shape kind '" + kind + "'");
}

nlohmann::json shape_to_json(const TargetShape& s) {
    json j;
    switch (s.kind) {
        case TargetShape::Kind::Disk:
            j["kind"] = "disk";
            j["center"] = std::vector<double>(s.center.data(), s.center.data() + s.center.size());
            j["radius"] = s.radius;
            break;
        case TargetShape::Kind::Box:
            j["kind"] = "box";
            j["min"] = std::vector<double>(s.box_min.data(), s.box_min.data() + s.box_min.size());
            j["max"] = std::vector<double>(s.box_max.data(), s.box_max.data() + s.box_max.size());
            break;
        case TargetShape::Kind::Polygon: {
            j["kind"] = "polygon";
            j["vertices"] = json::array();
            for (const auto& v : s.vertices)
                j["vertices"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
            break;
        }
        case TargetShape::Kind::Union: {
            j["kind"] = "union";
            j["members"] = json::array();
            for (const auto& m : s.members) j["members"].push_back(shape_to_json(m));
            break;
        }
    }
    return j;
}

namespace {

TerminalCost cost_from_json(const json& j, const std::string& path, int dim) {
    if (!j.is_object() || !j.contains("kind")) fail(path, "expected a cost object with 'kind'");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "point-distance") {
        if (!j.contains("anchor")) fail(path, "point-distance needs anchor");
        return TerminalCost::point_distance(parse_vec(j["anchor"], path + ".anchor", dim));
    }
    if (kind == "shape-signed-distance") {
        if (!j.contains("shape")) fail(path, "shape-signed-distance needs shape");
        return TerminalCost::shape_signed_distance(shape_from_json(j["shape"], path + ".shape"));
    }
    if (kind == "weighted-min") {
        if (!j.contains("anchors") || j["anchors"].empty()) fail(path, "weighted-min needs anchors");
        std::vector<Vec> anchors;
        for (std::size_t i = 0; i < j["anchors"].size(); ++i)
            anchors.push_back(
                parse_vec(j["anchors"][i], path + ".anchors[" + std::to_string(i) + "]", dim));
        std::vector<double> weights(anchors.size(), 1.0);
        if (j.contains("weights")) {
            if (j["weights"].size() != anchors.size())
                fail(path + ".weights", "length must match anchors");
            for (std::size_t i = 0; i < weights.size(); ++i) {
                weights[i] = parse_num(j["weights"][i], path + ".weights[" + std::to_string(i) + "]");
                if (weights[i] <= 0) fail(path + ".weights", "weights must be positive");
            }
        }
        return TerminalCost::weighted_min(std::move(anchors), std::move(weights));
    }
    if (kind == "fixed-affine") {
        if (!j.contains("slope")) fail(path, "fixed-affine needs slope");
        double offset = j.contains("offset") ? parse_num(j["offset"], path + ".offset") : 0.0;
        return TerminalCost::affine(parse_vec(j["slope"], path + ".slope", dim), offset);
    }
    fail(path + ".kind", "unknown cost kind '" + kind + "'");
}

} // namespace

Scenario parse_scenario(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("$: scenario must be a JSON object");
    Scenario s;
    if (j.contains("schema_version")) s.schema_version = j["schema_version"].get<int>();
    if (s.schema_version != 1) fail("$.schema_version", "unsupported schema version");

    if (!j.contains("dimension")) fail("$.dimension", "missing");
    s.dimension = j["dimension"].get<int>();
    if (s.dimension < 2) fail("$.dimension", "must be >= 2");

    if (!j.contains("evader")) fail("$.evader", "missing");
    s.initial.evader = parse_vec(j["evader"], "$.evader", s.dimension);

    if (!j.contains("pursuers") || !j["pursuers"].is_array() || j["pursuers"].empty())
        fail("$.pursuers", "need a nonempty array");
    for (std::size_t i = 0; i < j["pursuers"].size(); ++i) {
        const auto& pj = j["pursuers"][i];
        std::string path = "$.pursuers[" + std::to_string(i) + "]";
        if (!pj.is_object()) fail(path, "expected an object");
        if (!pj.contains("position")) fail(path + ".position", "missing");
        if (!pj.contains("alpha")) fail(path + ".alpha", "missing");
        PursuerParams p;
        p.alpha = parse_num(pj["alpha"], path + ".alpha");
        p.capture_radius =
            pj.contains("capture_radius") ? parse_num(pj["capture_radius"], path + ".capture_radius")
                                          : 0.0;
        if (p.alpha <= 1.0) fail(path + ".alpha", "speed ratio must exceed 1");
        if (p.capture_radius < 0.0) fail(path + ".capture_radius", "must be >= 0");
        s.params.push_back(p);
        s.initial.pursuers.push_back(parse_vec(pj["position"], path + ".position", s.dimension));
    }

    const bool has_cost = j.contains("cost");
    const bool has_target = j.contains("target");
    if (has_cost == has_target)
        fail("$", "exactly one of 'cost' and 'target' is required");
    if (has_target) {
        s.defense = true;
        s.target = shape_from_json(j["target"], "$.target");
        s.cost = TerminalCost::shape_signed_distance(s.target);
    } else {
        s.cost = cost_from_json(j["cost"], "$.cost", s.dimension);
    }

    if (j.contains("options")) {
        const auto& oj = j["options"];
        if (!oj.is_object()) fail("$.options", "expected an object");
        if (oj.contains("seed")) s.options.seed = oj["seed"].get<unsigned>();
        if (oj.contains("dt")) s.options.dt = parse_num(oj["dt"], "$.options.dt");
        if (oj.contains("t_max")) s.options.t_max = parse_num(oj["t_max"], "$.options.t_max");
        if (oj.contains("resolution")) s.options.resolution = oj["resolution"].get<int>();
        if (oj.contains("samples")) s.options.samples = oj["samples"].get<int>();
        if (oj.contains("grid")) {
            for (const auto& g : oj["grid"]) s.options.grid.push_back(g.get<int>());
        }
        if (oj.contains("grid_min"))
            s.options.grid_min = parse_vec(oj["grid_min"], "$.options.grid_min", s.dimension);
        if (oj.contains("grid_max"))
            s.options.grid_max = parse_vec(oj["grid_max"], "$.options.grid_max", s.dimension);
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(j);
}

} // namespace pe
