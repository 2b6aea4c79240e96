#ifndef MFIT_PACKAGE_HPP
#define MFIT_PACKAGE_HPP

#include <optional>
#include <string>
#include <vector>

namespace mfit {

/// Isotropic or anisotropic solid material. Units: k in W/(m K),
/// rho in kg/m^3, c_v (mass specific heat) in J/(kg K).
struct Material {
    std::string name;
    double k_x = 0.0;
    double k_y = 0.0;
    double k_z = 0.0;
    double rho = 0.0;
    double c_v = 0.0;
};

/// Heat-injection footprint inside a chiplet block. Coordinates are
/// relative to the parent block origin, in meters.
struct PowerBlock {
    std::string id;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Rectangular material region inside a layer with its own grid.
/// Blocks carrying power_blocks are heat sources (chiplets).
struct Block {
    std::string name;
    double origin_x = 0.0; // package coordinates, m
    double origin_y = 0.0;
    double width = 0.0;
    double height = 0.0;
    std::string material;
    int nx = 1;
    int ny = 1;
    double capacitance_scale = 1.0;
    bool is_heat_source = false;
    std::vector<PowerBlock> power_blocks;
};

/// One horizontal slice of the package. If material is empty the region
/// outside the blocks holds no nodes (air gap between chiplets).
struct Layer {
    std::string name;
    int z_order = 0; // 0 = bottom substrate
    double thickness = 0.0; // m
    std::string material; // empty => absent default region
    int nx = 1;
    int ny = 1;
    std::vector<Block> blocks;
};

/// Convective boundary condition set. HTCs in W/(m^2 K), ambient in deg C.
struct BoundarySpec {
    double top_htc = 0.0;
    double bottom_htc = 0.0;
    double lateral_htc = 0.0;
};

struct PackageSpec {
    std::string name;
    double footprint_w = 0.0; // m
    double footprint_h = 0.0;
    double ambient_c = 0.0;
    BoundarySpec boundary;
    std::vector<Material> materials;
    std::vector<Layer> layers; // sorted by z_order after parse

    const Material& material(const std::string& name) const;
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string path;    // location of the offending element, e.g. "layers[2].blocks[0]"
    std::string message;
};

/// Parse and fully validate a package document (JSON text).
/// Throws SchemaError for structural problems, SemanticError when the
/// document is well-formed but violates an invariant.
PackageSpec parse_package(const std::string& document);
PackageSpec parse_package_file(const std::string& path);

/// Re-check every invariant; empty result iff the spec is valid.
std::vector<Diagnostic> validate_package(const PackageSpec& spec);

/// Serialize back to the document format. parse(serialize(parse(d)))
/// equals parse(d) field for field.
std::string serialize_package(const PackageSpec& spec);

} // namespace mfit

#endif
