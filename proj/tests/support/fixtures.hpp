#ifndef MFIT_TESTS_FIXTURES_HPP
#define MFIT_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "mfit/package.hpp"
#include "mfit/rc_model.hpp"

namespace mfit::testing {

inline Material make_material(const std::string& name, double k, double rho, double c_v) {
    return Material{name, k, k, k, rho, c_v};
}

/// Single uniform layer, 1x1 grid, 1 mm cube footprint, k = 1 W/(m K).
inline PackageSpec single_cube_spec(double top_htc = 100.0) {
    PackageSpec spec;
    spec.name = "cube";
    spec.footprint_w = 1e-3;
    spec.footprint_h = 1e-3;
    spec.ambient_c = 25.0;
    spec.boundary.top_htc = top_htc;
    spec.materials.push_back(make_material("unit", 1.0, 1000.0, 500.0));
    Layer l;
    l.name = "only";
    l.z_order = 0;
    l.thickness = 1e-3;
    l.material = "unit";
    l.nx = 1;
    l.ny = 1;
    spec.layers.push_back(l);
    return spec;
}

/// Two stacked identical uniform layers (1x1 grids each).
inline PackageSpec two_stack_spec(double k = 1.0, double top_htc = 100.0) {
    PackageSpec spec = single_cube_spec(top_htc);
    spec.name = "two_stack";
    spec.materials[0] = make_material("unit", k, 1000.0, 500.0);
    spec.layers[0].name = "bottom";
    Layer top = spec.layers[0];
    top.name = "top";
    top.z_order = 1;
    spec.layers.push_back(top);
    return spec;
}

/// Two stacked layers where the bottom one is a heat-source block covering
/// the footprint; only the top convects. Gives the hand-solvable 2-node chain.
inline PackageSpec two_node_chain_spec() {
    PackageSpec spec = two_stack_spec();
    Layer& bottom = spec.layers[0];
    Block b;
    b.name = "heater";
    b.origin_x = 0;
    b.origin_y = 0;
    b.width = spec.footprint_w;
    b.height = spec.footprint_h;
    b.material = "unit";
    b.nx = 1;
    b.ny = 1;
    b.is_heat_source = true;
    b.power_blocks.push_back(PowerBlock{"q0", 0, 0, b.width, b.height});
    bottom.blocks.push_back(b);
    bottom.material.clear(); // block covers everything
    return spec;
}

/// Small 2x2-chiplet package (~56 nodes) shaped like the bundled systems:
/// substrate / interposer / chiplets (absent gaps) / tim blocks / lid.
inline PackageSpec small_chiplet_spec(double chiplet_power_grid = 2) {
    PackageSpec spec;
    spec.name = "small2x2";
    spec.footprint_w = 8e-3;
    spec.footprint_h = 8e-3;
    spec.ambient_c = 25.0;
    spec.boundary.top_htc = 2000.0;
    spec.boundary.bottom_htc = 10.0;
    spec.materials.push_back(make_material("silicon", 130.0, 2330.0, 700.0));
    spec.materials.push_back(make_material("copper", 400.0, 8960.0, 385.0));
    spec.materials.push_back(make_material("tim", 4.0, 2300.0, 1000.0));

    auto grid_layer = [&](const std::string& name, int z, double th, const std::string& mat) {
        Layer l;
        l.name = name;
        l.z_order = z;
        l.thickness = th;
        l.material = mat;
        l.nx = 2;
        l.ny = 2;
        return l;
    };
    spec.layers.push_back(grid_layer("substrate", 0, 0.5e-3, "silicon"));
    spec.layers.push_back(grid_layer("interposer", 1, 0.1e-3, "silicon"));

    Layer chips;
    chips.name = "chiplets";
    chips.z_order = 2;
    chips.thickness = 0.1e-3;
    chips.nx = 1;
    chips.ny = 1; // absent default
    Layer tim;
    tim.name = "tim";
    tim.z_order = 3;
    tim.thickness = 0.05e-3;
    tim.nx = 1;
    tim.ny = 1;
    const double size = 1.5e-3, pitch = 4e-3, margin = 1.25e-3;
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            Block c;
            c.name = "c" + std::to_string(i) + "_" + std::to_string(j);
            c.origin_x = margin + i * pitch;
            c.origin_y = margin + j * pitch;
            c.width = size;
            c.height = size;
            c.material = "silicon";
            c.nx = static_cast<int>(chiplet_power_grid);
            c.ny = static_cast<int>(chiplet_power_grid);
            c.is_heat_source = true;
            c.power_blocks.push_back(PowerBlock{"p" + std::to_string(i) + "_" + std::to_string(j),
                                                0, 0, size, size});
            chips.blocks.push_back(c);
            Block t = c;
            t.name = "t" + c.name;
            t.material = "tim";
            t.nx = 1;
            t.ny = 1;
            t.is_heat_source = false;
            t.power_blocks.clear();
            tim.blocks.push_back(t);
        }
    }
    spec.layers.push_back(chips);
    spec.layers.push_back(tim);
    spec.layers.push_back(grid_layer("lid", 4, 0.5e-3, "copper"));
    return spec;
}

/// Hand-built one-node RC model: G_conv = g, C = c, one power block.
inline RCModel scalar_model(double g = 0.1, double c = 1.0, double ambient_c = 25.0) {
    RCModel m;
    NodeRecord n;
    n.index = 0;
    n.layer = "l";
    n.block = kDefaultRegion;
    n.lx = n.ly = n.lz = 1e-3;
    n.cx = n.cy = n.cz = 0.5e-3;
    n.capacitance = c;
    m.nodes.push_back(n);
    m.G.resize(1, 1);
    m.G.insert(0, 0) = -g;
    m.G.makeCompressed();
    m.gconv = Eigen::VectorXd::Constant(1, g);
    m.capacitance = Eigen::VectorXd::Constant(1, c);
    m.power_block_ids = {"q0"};
    m.power_map = {{{0, 1.0}}};
    m.ambient_c = ambient_c;
    return m;
}

} // namespace mfit::testing

#endif
