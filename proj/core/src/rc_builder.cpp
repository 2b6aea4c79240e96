#include "mfit/rc_model.hpp"
#include "mfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfit {

namespace {

struct Region {
    std::string layer;
    std::string block; // kDefaultRegion for the layer's own grid
    double x0 = 0, y0 = 0, w = 0, h = 0;
    int nx = 1, ny = 1;
    const Material* mat = nullptr;
    double cap_scale = 1.0;
    bool is_chiplet = false;
    const std::vector<PowerBlock>* power_blocks = nullptr; // package coords offset by x0,y0
};

double overlap_1d(double a0, double a1, double b0, double b1) {
    return std::min(a1, b1) - std::max(a0, b0);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

RCModel build_rc(const PackageSpec& spec) {
    const double eps = 1e-12 * std::max(spec.footprint_w, spec.footprint_h);

    RCModel model;
    model.ambient_c = spec.ambient_c;

    // Gather regions per layer: declared blocks, then the default grid.
    // Default cells that overlap any block are dropped; blocks are expected
    // to align with the default grid when both are present.
    std::vector<std::vector<Region>> layer_regions(spec.layers.size());
    std::vector<double> layer_z0(spec.layers.size());
    double z = 0.0;
    for (size_t li = 0; li < spec.layers.size(); ++li) {
        const Layer& l = spec.layers[li];
        layer_z0[li] = z;
        z += l.thickness;
        for (const Block& b : l.blocks) {
            Region r;
            r.layer = l.name;
            r.block = b.name;
            r.x0 = b.origin_x;
            r.y0 = b.origin_y;
            r.w = b.width;
            r.h = b.height;
            r.nx = b.nx;
            r.ny = b.ny;
            r.mat = &spec.material(b.material);
            r.cap_scale = b.capacitance_scale;
            r.is_chiplet = b.is_heat_source;
            r.power_blocks = &b.power_blocks;
            layer_regions[li].push_back(r);
        }
        if (!l.material.empty()) {
            Region r;
            r.layer = l.name;
            r.block = kDefaultRegion;
            r.x0 = 0;
            r.y0 = 0;
            r.w = spec.footprint_w;
            r.h = spec.footprint_h;
            r.nx = l.nx;
            r.ny = l.ny;
            r.mat = &spec.material(l.material);
            layer_regions[li].push_back(r);
        }
    }

    // Enumerate nodes.
    struct NodeAux {
        const Material* mat;
    };
    std::vector<NodeAux> aux;
    std::vector<std::vector<int>> layer_nodes(spec.layers.size());

    for (size_t li = 0; li < spec.layers.size(); ++li) {
        const Layer& l = spec.layers[li];
        for (const Region& r : layer_regions[li]) {
            const double dx = r.w / r.nx;
            const double dy = r.h / r.ny;
            for (int cj = 0; cj < r.ny; ++cj) {
                for (int ci = 0; ci < r.nx; ++ci) {
                    const double cx0 = r.x0 + ci * dx;
                    const double cy0 = r.y0 + cj * dy;
                    if (r.block == kDefaultRegion) {
                        bool covered = false;
                        for (const Block& b : l.blocks) {
                            if (overlap_1d(cx0, cx0 + dx, b.origin_x, b.origin_x + b.width) > eps &&
                                overlap_1d(cy0, cy0 + dy, b.origin_y, b.origin_y + b.height) > eps) {
                                covered = true;
                                break;
                            }
                        }
                        if (covered) continue;
                    }
                    NodeRecord n;
                    n.index = static_cast<int>(model.nodes.size());
                    n.layer = r.layer;
                    n.block = r.block;
                    n.cell_i = ci;
                    n.cell_j = cj;
                    n.lx = dx;
                    n.ly = dy;
                    n.lz = l.thickness;
                    n.cx = cx0 + 0.5 * dx;
                    n.cy = cy0 + 0.5 * dy;
                    n.cz = layer_z0[li] + 0.5 * l.thickness;
                    n.capacitance = r.mat->rho * r.mat->c_v * dx * dy * l.thickness * r.cap_scale;
                    n.is_chiplet = r.is_chiplet;
                    layer_nodes[li].push_back(n.index);
                    model.nodes.push_back(n);
                    aux.push_back({r.mat});
                }
            }
        }
        if (layer_nodes[li].empty())
            throw SemanticError("layer '" + l.name + "' produced no nodes");
    }

    const int N = model.size();
    model.capacitance.resize(N);
    model.gconv = Eigen::VectorXd::Zero(N);
    for (int i = 0; i < N; ++i) model.capacitance[i] = model.nodes[i].capacitance;

    // Couplings (i < j), one arithmetic path shared by both triangle halves.
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> diag(N, 0.0);
    UnionFind uf(N);

    auto couple = [&](int i, int j, double g) {
        if (g <= 0) return;
        triplets.emplace_back(i, j, g);
        triplets.emplace_back(j, i, g);
        diag[i] += g;
        diag[j] += g;
        uf.unite(i, j);
    };

    // Lateral coupling: series combination of the two half-cells across the
    // shared face, face area = overlap length * layer thickness.
    for (size_t li = 0; li < spec.layers.size(); ++li) {
        const auto& idx = layer_nodes[li];
        for (size_t a = 0; a < idx.size(); ++a) {
            for (size_t b = a + 1; b < idx.size(); ++b) {
                const NodeRecord& na = model.nodes[idx[a]];
                const NodeRecord& nb = model.nodes[idx[b]];
                const Material* ma = aux[idx[a]].mat;
                const Material* mb = aux[idx[b]].mat;
                // x-adjacent faces
                const double ax1 = na.cx + 0.5 * na.lx, bx0 = nb.cx - 0.5 * nb.lx;
                const double bx1 = nb.cx + 0.5 * nb.lx, ax0 = na.cx - 0.5 * na.lx;
                const double oy = overlap_1d(na.cy - 0.5 * na.ly, na.cy + 0.5 * na.ly,
                                             nb.cy - 0.5 * nb.ly, nb.cy + 0.5 * nb.ly);
                const double ox = overlap_1d(ax0, ax1, bx0, bx1);
                if ((std::abs(ax1 - bx0) <= eps || std::abs(bx1 - ax0) <= eps) && oy > eps) {
                    const double area = oy * na.lz;
                    const double g = 1.0 / (na.lx / (2.0 * ma->k_x * area) +
                                            nb.lx / (2.0 * mb->k_x * area));
                    couple(idx[a], idx[b], g);
                    continue;
                }
                // y-adjacent faces
                const double ay1 = na.cy + 0.5 * na.ly, by0 = nb.cy - 0.5 * nb.ly;
                const double by1 = nb.cy + 0.5 * nb.ly, ay0 = na.cy - 0.5 * na.ly;
                if ((std::abs(ay1 - by0) <= eps || std::abs(by1 - ay0) <= eps) && ox > eps) {
                    const double area = ox * na.lz;
                    const double g = 1.0 / (na.ly / (2.0 * ma->k_y * area) +
                                            nb.ly / (2.0 * mb->k_y * area));
                    couple(idx[a], idx[b], g);
                }
            }
        }
    }

    // Vertical coupling between adjacent layers by x-y overlap area.
    for (size_t li = 0; li + 1 < spec.layers.size(); ++li) {
        for (int ia : layer_nodes[li]) {
            for (int ib : layer_nodes[li + 1]) {
                const NodeRecord& na = model.nodes[ia];
                const NodeRecord& nb = model.nodes[ib];
                const double ox = overlap_1d(na.cx - 0.5 * na.lx, na.cx + 0.5 * na.lx,
                                             nb.cx - 0.5 * nb.lx, nb.cx + 0.5 * nb.lx);
                const double oy = overlap_1d(na.cy - 0.5 * na.ly, na.cy + 0.5 * na.ly,
                                             nb.cy - 0.5 * nb.ly, nb.cy + 0.5 * nb.ly);
                if (ox <= eps || oy <= eps) continue;
                const double area = ox * oy;
                const double g = area / (na.lz / (2.0 * aux[ia].mat->k_z) +
                                         nb.lz / (2.0 * aux[ib].mat->k_z));
                couple(ia, ib, g);
            }
        }
    }

    // Convection on the outer boundary nodes.
    const size_t top = spec.layers.size() - 1;
    if (spec.boundary.bottom_htc > 0)
        for (int i : layer_nodes[0])
            model.gconv[i] += spec.boundary.bottom_htc * model.nodes[i].lx * model.nodes[i].ly;
    if (spec.boundary.top_htc > 0)
        for (int i : layer_nodes[top])
            model.gconv[i] += spec.boundary.top_htc * model.nodes[i].lx * model.nodes[i].ly;
    if (spec.boundary.lateral_htc > 0) {
        const double h = spec.boundary.lateral_htc;
        for (const NodeRecord& n : model.nodes) {
            double g = 0.0;
            if (n.cx - 0.5 * n.lx <= eps) g += h * n.ly * n.lz;
            if (n.cx + 0.5 * n.lx >= spec.footprint_w - eps) g += h * n.ly * n.lz;
            if (n.cy - 0.5 * n.ly <= eps) g += h * n.lx * n.lz;
            if (n.cy + 0.5 * n.ly >= spec.footprint_h - eps) g += h * n.lx * n.lz;
            model.gconv[n.index] += g;
        }
    }

    if (N > 1) {
        const int root = uf.find(0);
        for (int i = 1; i < N; ++i)
            if (uf.find(i) != root)
                throw SemanticError("disconnected stack: node " + model.nodes[i].id() +
                                    " has no conduction path to " + model.nodes[0].id());
    }

    for (int i = 0; i < N; ++i)
        triplets.emplace_back(i, i, -(diag[i] + model.gconv[i]));

    model.G.resize(N, N);
    model.G.setFromTriplets(triplets.begin(), triplets.end(),
                            [](double a, double b) { return a + b; });
    model.G.makeCompressed();

    // Power routing: each power block spreads over its parent block's cells
    // by overlap-area fraction.
    for (size_t li = 0; li < spec.layers.size(); ++li) {
        for (const Region& r : layer_regions[li]) {
            if (!r.power_blocks) continue;
            for (const PowerBlock& pb : *r.power_blocks) {
                const double px0 = r.x0 + pb.origin_x;
                const double py0 = r.y0 + pb.origin_y;
                const double parea = pb.width * pb.height;
                std::vector<std::pair<int, double>> weights;
                for (int ni : layer_nodes[li]) {
                    const NodeRecord& n = model.nodes[ni];
                    if (n.block != r.block) continue;
                    const double ox = overlap_1d(n.cx - 0.5 * n.lx, n.cx + 0.5 * n.lx,
                                                 px0, px0 + pb.width);
                    const double oy = overlap_1d(n.cy - 0.5 * n.ly, n.cy + 0.5 * n.ly,
                                                 py0, py0 + pb.height);
                    if (ox > eps && oy > eps) weights.emplace_back(ni, ox * oy / parea);
                }
                model.power_block_ids.push_back(pb.id);
                model.power_map.push_back(std::move(weights));
            }
        }
    }

    return model;
}

int node_lookup(const RCModel& model, const std::string& layer, double x, double y) {
    double fw = 0.0, fh = 0.0;
    bool layer_seen = false;
    for (const NodeRecord& n : model.nodes) {
        fw = std::max(fw, n.cx + 0.5 * n.lx);
        fh = std::max(fh, n.cy + 0.5 * n.ly);
        if (n.layer == layer) layer_seen = true;
    }
    if (!layer_seen) throw DomainError("node_lookup: unknown layer '" + layer + "'");
    if (x < -1e-12 || y < -1e-12 || x > fw + 1e-12 || y > fh + 1e-12)
        throw DomainError("node_lookup: position outside the layer footprint");

    const double eps = 1e-12 * std::max(fw, fh);
    int best = -1;
    bool best_is_block = false;
    for (const NodeRecord& n : model.nodes) {
        if (n.layer != layer) continue;
        if (x < n.cx - 0.5 * n.lx - eps || x > n.cx + 0.5 * n.lx + eps ||
            y < n.cy - 0.5 * n.ly - eps || y > n.cy + 0.5 * n.ly + eps)
            continue;
        const bool is_block = n.block != kDefaultRegion;
        if (best < 0) {
            best = n.index;
            best_is_block = is_block;
            continue;
        }
        const NodeRecord& b = model.nodes[best];
        if (is_block != best_is_block) {
            if (is_block) { // blocks shadow the default region
                best = n.index;
                best_is_block = true;
            }
            continue;
        }
        // tie on a shared edge: lower (i, j) wins
        if (n.block == b.block &&
            (n.cell_j < b.cell_j || (n.cell_j == b.cell_j && n.cell_i < b.cell_i)))
            best = n.index;
    }
    if (best < 0)
        throw DomainError("node_lookup: no node at the given position (gap region)");
    return best;
}

Eigen::VectorXd RCModel::inject(const std::map<std::string, double>& powers) const {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(size());
    for (const auto& [id, watts] : powers) {
        auto it = std::find(power_block_ids.begin(), power_block_ids.end(), id);
        if (it == power_block_ids.end())
            throw DomainError("unknown power block id '" + id + "'");
        const size_t p = it - power_block_ids.begin();
        for (const auto& [node, w] : power_map[p]) q[node] += watts * w;
    }
    return q;
}

Eigen::VectorXd RCModel::inject_uniform(double watts) const {
    std::map<std::string, double> powers;
    for (const std::string& id : power_block_ids) powers[id] = watts;
    return inject(powers);
}

} // namespace mfit
