#include "mfit/package.hpp"
#include "mfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace mfit {

namespace {

// Reserved node-id marker for a layer's default region.
constexpr const char* kDefaultRegionMarker = "_default";

bool rects_overlap(double ax, double ay, double aw, double ah,
                   double bx, double by, double bw, double bh) {
    const double ox = std::min(ax + aw, bx + bw) - std::max(ax, bx);
    const double oy = std::min(ay + ah, by + bh) - std::max(ay, by);
    return ox > 0.0 && oy > 0.0;
}

bool valid_identifier(const std::string& s) {
    if (s.empty() || s == kDefaultRegionMarker) return false;
    return s.find('/') == std::string::npos && s.find(',') == std::string::npos &&
           s.find_first_of(" \t\r\n") == std::string::npos;
}

double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw SchemaError(path + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw SchemaError(path + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

std::string require_string(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw SchemaError(path + ": missing key '" + key + "'");
    if (!j.at(key).is_string()) throw SchemaError(path + "." + key + ": expected a string");
    return j.at(key).get<std::string>();
}

std::pair<double, double> require_pair(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw SchemaError(path + ": missing key '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw SchemaError(path + "." + key + ": expected [number, number]");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::pair<int, int> require_grid(const json& j, const std::string& path) {
    if (!j.contains("grid")) throw SchemaError(path + ": missing key 'grid'");
    const json& v = j.at("grid");
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw SchemaError(path + ".grid: expected [nx, ny] integers");
    return {v[0].get<int>(), v[1].get<int>()};
}

PowerBlock parse_power_block(const json& j, const std::string& path) {
    PowerBlock pb;
    pb.id = require_string(j, path, "id");
    std::tie(pb.origin_x, pb.origin_y) = require_pair(j, path, "origin_m");
    std::tie(pb.width, pb.height) = require_pair(j, path, "size_m");
    return pb;
}

Block parse_block(const json& j, const std::string& path) {
    Block b;
    b.name = require_string(j, path, "name");
    std::tie(b.origin_x, b.origin_y) = require_pair(j, path, "origin_m");
    std::tie(b.width, b.height) = require_pair(j, path, "size_m");
    b.material = require_string(j, path, "material");
    std::tie(b.nx, b.ny) = require_grid(j, path);
    if (j.contains("capacitance_scale")) {
        if (!j.at("capacitance_scale").is_number())
            throw SchemaError(path + ".capacitance_scale: expected a number");
        b.capacitance_scale = j.at("capacitance_scale").get<double>();
    }
    if (j.contains("heat_source")) {
        if (!j.at("heat_source").is_boolean())
            throw SchemaError(path + ".heat_source: expected a boolean");
        b.is_heat_source = j.at("heat_source").get<bool>();
    }
    if (j.contains("power_blocks")) {
        const json& pbs = j.at("power_blocks");
        if (!pbs.is_array()) throw SchemaError(path + ".power_blocks: expected an array");
        for (size_t k = 0; k < pbs.size(); ++k) {
            b.power_blocks.push_back(
                parse_power_block(pbs[k], path + ".power_blocks[" + std::to_string(k) + "]"));
        }
    }
    return b;
}

Layer parse_layer(const json& j, const std::string& path) {
    Layer l;
    l.name = require_string(j, path, "name");
    if (!j.contains("z_order") || !j.at("z_order").is_number_integer())
        throw SchemaError(path + ": missing or non-integer 'z_order'");
    l.z_order = j.at("z_order").get<int>();
    l.thickness = require_number(j, path, "thickness_m");
    if (!j.contains("material")) throw SchemaError(path + ": missing key 'material'");
    if (j.at("material").is_null()) {
        l.material.clear(); // absent default region
    } else if (j.at("material").is_string()) {
        l.material = j.at("material").get<std::string>();
    } else {
        throw SchemaError(path + ".material: expected a string or null");
    }
    std::tie(l.nx, l.ny) = require_grid(j, path);
    if (j.contains("blocks")) {
        const json& bs = j.at("blocks");
        if (!bs.is_array()) throw SchemaError(path + ".blocks: expected an array");
        for (size_t k = 0; k < bs.size(); ++k)
            l.blocks.push_back(parse_block(bs[k], path + ".blocks[" + std::to_string(k) + "]"));
    }
    return l;
}

void check(std::vector<Diagnostic>& out, bool ok, const std::string& path, const std::string& msg) {
    if (!ok) out.push_back({Diagnostic::Severity::Error, path, msg});
}

} // namespace

const Material& PackageSpec::material(const std::string& mname) const {
    for (const Material& m : materials)
        if (m.name == mname) return m;
    throw SemanticError("unknown material '" + mname + "'");
}

std::vector<Diagnostic> validate_package(const PackageSpec& spec) {
    std::vector<Diagnostic> d;
    check(d, valid_identifier(spec.name), "name", "invalid package name");
    check(d, spec.footprint_w > 0 && spec.footprint_h > 0, "footprint_m",
          "footprint dimensions must be positive");

    check(d, spec.boundary.top_htc >= 0 && spec.boundary.bottom_htc >= 0 &&
                 spec.boundary.lateral_htc >= 0,
          "boundary", "HTCs must be non-negative");
    check(d,
          spec.boundary.top_htc > 0 || spec.boundary.bottom_htc > 0 ||
              spec.boundary.lateral_htc > 0,
          "boundary", "no heat sink: all HTCs are zero, steady state is undefined");

    std::set<std::string> mat_names;
    for (size_t i = 0; i < spec.materials.size(); ++i) {
        const Material& m = spec.materials[i];
        const std::string path = "materials[" + std::to_string(i) + "]";
        check(d, valid_identifier(m.name), path, "invalid material name");
        check(d, m.k_x > 0 && m.k_y > 0 && m.k_z > 0, path, "conductivities must be positive");
        check(d, m.rho > 0, path, "density must be positive");
        check(d, m.c_v > 0, path, "specific heat must be positive");
        check(d, mat_names.insert(m.name).second, path, "duplicate material name");
    }

    auto material_known = [&](const std::string& n) { return mat_names.count(n) != 0; };

    // z_order values must be consecutive from 0
    std::vector<int> zs;
    for (const Layer& l : spec.layers) zs.push_back(l.z_order);
    std::sort(zs.begin(), zs.end());
    for (size_t i = 0; i < zs.size(); ++i)
        if (zs[i] != static_cast<int>(i)) {
            d.push_back({Diagnostic::Severity::Error, "layers",
                         "layer z_order values are not consecutive from 0"});
            break;
        }

    std::set<std::string> pb_ids;
    std::set<std::string> layer_names;
    for (size_t li = 0; li < spec.layers.size(); ++li) {
        const Layer& l = spec.layers[li];
        const std::string lpath = "layers[" + std::to_string(li) + "]";
        check(d, valid_identifier(l.name), lpath, "invalid layer name");
        check(d, layer_names.insert(l.name).second, lpath, "duplicate layer name");
        check(d, l.thickness > 0, lpath, "thickness must be positive");
        check(d, l.nx >= 1 && l.ny >= 1, lpath, "grid dims must be >= 1");
        if (!l.material.empty())
            check(d, material_known(l.material), lpath,
                  "dangling material reference '" + l.material + "'");
        check(d, !l.material.empty() || !l.blocks.empty(), lpath,
              "layer has neither default material nor blocks");

        std::set<std::string> block_names;
        for (size_t bi = 0; bi < l.blocks.size(); ++bi) {
            const Block& b = l.blocks[bi];
            const std::string bpath = lpath + ".blocks[" + std::to_string(bi) + "]";
            check(d, valid_identifier(b.name), bpath, "invalid block name");
            check(d, block_names.insert(b.name).second, bpath, "duplicate block name in layer");
            check(d, b.width > 0 && b.height > 0, bpath, "block size must be positive");
            check(d, b.nx >= 1 && b.ny >= 1, bpath, "grid dims must be >= 1");
            check(d, b.capacitance_scale > 0, bpath, "capacitance_scale must be positive");
            check(d, material_known(b.material), bpath,
                  "dangling material reference '" + b.material + "'");
            check(d,
                  b.origin_x >= 0 && b.origin_y >= 0 &&
                      b.origin_x + b.width <= spec.footprint_w + 1e-15 &&
                      b.origin_y + b.height <= spec.footprint_h + 1e-15,
                  bpath, "block extends outside the layer footprint");
            check(d, b.is_heat_source || b.power_blocks.empty(), bpath,
                  "power_blocks present on a block not flagged heat_source");
            for (size_t bj = 0; bj < bi; ++bj) {
                const Block& o = l.blocks[bj];
                if (rects_overlap(b.origin_x, b.origin_y, b.width, b.height,
                                  o.origin_x, o.origin_y, o.width, o.height))
                    d.push_back({Diagnostic::Severity::Error, bpath,
                                 "block '" + b.name + "' overlaps block '" + o.name + "'"});
            }
            for (size_t pi = 0; pi < b.power_blocks.size(); ++pi) {
                const PowerBlock& pb = b.power_blocks[pi];
                const std::string ppath = bpath + ".power_blocks[" + std::to_string(pi) + "]";
                check(d, valid_identifier(pb.id), ppath, "invalid power block id");
                check(d, pb_ids.insert(pb.id).second, ppath,
                      "duplicate power block id '" + pb.id + "'");
                check(d, pb.width > 0 && pb.height > 0, ppath, "size must be positive");
                check(d,
                      pb.origin_x >= 0 && pb.origin_y >= 0 &&
                          pb.origin_x + pb.width <= b.width + 1e-15 &&
                          pb.origin_y + pb.height <= b.height + 1e-15,
                      ppath, "power block extends outside its parent block");
                for (size_t pj = 0; pj < pi; ++pj) {
                    const PowerBlock& opb = b.power_blocks[pj];
                    if (rects_overlap(pb.origin_x, pb.origin_y, pb.width, pb.height,
                                      opb.origin_x, opb.origin_y, opb.width, opb.height))
                        d.push_back({Diagnostic::Severity::Error, ppath,
                                     "power block '" + pb.id + "' overlaps '" + opb.id + "'"});
                }
            }
        }
    }
    return d;
}

PackageSpec parse_package(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("document is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("top level: expected an object");

    PackageSpec spec;
    spec.name = require_string(j, "top level", "name");
    std::tie(spec.footprint_w, spec.footprint_h) = require_pair(j, "top level", "footprint_m");
    spec.ambient_c = require_number(j, "top level", "ambient_c");

    if (!j.contains("boundary") || !j.at("boundary").is_object())
        throw SchemaError("top level: missing object 'boundary'");
    const json& bj = j.at("boundary");
    spec.boundary.top_htc = require_number(bj, "boundary", "top_htc");
    spec.boundary.bottom_htc = require_number(bj, "boundary", "bottom_htc");
    spec.boundary.lateral_htc =
        bj.contains("lateral_htc") ? require_number(bj, "boundary", "lateral_htc") : 0.0;

    if (!j.contains("materials") || !j.at("materials").is_array())
        throw SchemaError("top level: missing array 'materials'");
    for (size_t i = 0; i < j.at("materials").size(); ++i) {
        const json& mj = j.at("materials")[i];
        const std::string path = "materials[" + std::to_string(i) + "]";
        Material m;
        m.name = require_string(mj, path, "name");
        m.k_x = require_number(mj, path, "k_x");
        m.k_y = require_number(mj, path, "k_y");
        m.k_z = require_number(mj, path, "k_z");
        m.rho = require_number(mj, path, "rho");
        m.c_v = require_number(mj, path, "c_v");
        spec.materials.push_back(m);
    }

    if (!j.contains("layers") || !j.at("layers").is_array())
        throw SchemaError("top level: missing array 'layers'");
    for (size_t i = 0; i < j.at("layers").size(); ++i)
        spec.layers.push_back(
            parse_layer(j.at("layers")[i], "layers[" + std::to_string(i) + "]"));

    std::sort(spec.layers.begin(), spec.layers.end(),
              [](const Layer& a, const Layer& b) { return a.z_order < b.z_order; });

    std::vector<Diagnostic> diags = validate_package(spec);
    if (!diags.empty()) {
        std::ostringstream msg;
        msg << "package '" << spec.name << "' failed validation:";
        for (const Diagnostic& dg : diags) msg << "\n  " << dg.path << ": " << dg.message;
        throw SemanticError(msg.str());
    }
    return spec;
}

PackageSpec parse_package_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open package file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_package(buf.str());
}

std::string serialize_package(const PackageSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["footprint_m"] = {spec.footprint_w, spec.footprint_h};
    j["ambient_c"] = spec.ambient_c;
    j["boundary"] = {{"top_htc", spec.boundary.top_htc},
                     {"bottom_htc", spec.boundary.bottom_htc},
                     {"lateral_htc", spec.boundary.lateral_htc}};
    j["materials"] = json::array();
    for (const Material& m : spec.materials)
        j["materials"].push_back({{"name", m.name}, {"k_x", m.k_x}, {"k_y", m.k_y},
                                  {"k_z", m.k_z}, {"rho", m.rho}, {"c_v", m.c_v}});
    j["layers"] = json::array();
    for (const Layer& l : spec.layers) {
        json lj;
        lj["name"] = l.name;
        lj["z_order"] = l.z_order;
        lj["thickness_m"] = l.thickness;
        if (l.material.empty())
            lj["material"] = nullptr;
        else
            lj["material"] = l.material;
        lj["grid"] = {l.nx, l.ny};
        lj["blocks"] = json::array();
        for (const Block& b : l.blocks) {
            json bj;
            bj["name"] = b.name;
            bj["origin_m"] = {b.origin_x, b.origin_y};
            bj["size_m"] = {b.width, b.height};
            bj["material"] = b.material;
            bj["grid"] = {b.nx, b.ny};
            bj["capacitance_scale"] = b.capacitance_scale;
            bj["heat_source"] = b.is_heat_source;
            bj["power_blocks"] = json::array();
            for (const PowerBlock& pb : b.power_blocks)
                bj["power_blocks"].push_back({{"id", pb.id},
                                              {"origin_m", {pb.origin_x, pb.origin_y}},
                                              {"size_m", {pb.width, pb.height}}});
            lj["blocks"].push_back(bj);
        }
        j["layers"].push_back(lj);
    }
    return j.dump(2) + "\n";
}

} // namespace mfit
