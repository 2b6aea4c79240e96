#ifndef MFIT_RC_MODEL_HPP
#define MFIT_RC_MODEL_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mfit/package.hpp"

namespace mfit {

/// Node-id component used for cells of a layer's default region.
inline constexpr const char* kDefaultRegion = "_default";

struct NodeRecord {
    int index = -1;
    std::string layer;
    std::string block; // block name or kDefaultRegion
    int cell_i = 0;    // x index within the region grid
    int cell_j = 0;    // y index
    double cx = 0.0, cy = 0.0, cz = 0.0; // center, m
    double lx = 0.0, ly = 0.0, lz = 0.0; // extents, m
    double capacitance = 0.0;            // J/K, includes capacitance_scale
    bool is_chiplet = false;

    std::string id() const {
        return layer + "/" + block + "/" + std::to_string(cell_i) + "_" +
               std::to_string(cell_j);
    }
};

/// Assembled thermal network. G rows sum to -gconv; temperatures are kept
/// as rise above ambient so convection appears only on the diagonal.
struct RCModel {
    std::vector<NodeRecord> nodes;
    Eigen::SparseMatrix<double> G; // W/K, symmetric, negative diagonal
    Eigen::VectorXd gconv;         // W/K per node
    Eigen::VectorXd capacitance;   // J/K per node (diagonal C)
    std::vector<std::string> power_block_ids; // fixes the input ordering P
    std::vector<std::vector<std::pair<int, double>>> power_map; // per power block
    double ambient_c = 0.0;

    int size() const { return static_cast<int>(nodes.size()); }

    /// Per-node heat injection vector (W) from per-power-block watts.
    /// Throws DomainError on an unknown power block id.
    Eigen::VectorXd inject(const std::map<std::string, double>& powers) const;

    /// Same power applied to every power block.
    Eigen::VectorXd inject_uniform(double watts) const;
};

/// Grid every layer/block, form conductances and capacitances, route power
/// blocks to nodes by overlap area. Throws SemanticError if the resulting
/// network is not connected (disconnected stack).
RCModel build_rc(const PackageSpec& spec);

/// Node whose footprint contains (x, y) in the named layer. Blocks take
/// precedence over the default region; ties on shared edges resolve to the
/// lower (i, j) cell. Throws DomainError when outside the footprint or in
/// a gap with no node.
int node_lookup(const RCModel& model, const std::string& layer, double x, double y);

/// Text persistence, >= 15 significant digits. load_model round-trips
/// save_model bit-exactly on the matrix entries.
void save_model(const RCModel& model, const std::string& path);
RCModel load_model(const std::string& path);

/// FNV-1a 64-bit hash of a file's bytes; binds DSS files to their source model.
std::string file_fingerprint(const std::string& path);

} // namespace mfit

#endif
