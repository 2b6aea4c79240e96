#include "mfit/rc_model.hpp"
#include "mfit/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfit {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void save_model(const RCModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    const int n = model.size();

    out << "mfit-model 1\n";
    out << "ambient_c " << fmt(model.ambient_c) << '\n';

    out << "nodes " << n << '\n';
    out << "# index layer block i j cx cy cz lx ly lz is_chiplet\n";
    for (const NodeRecord& nd : model.nodes) {
        out << nd.index << ' ' << nd.layer << ' ' << nd.block << ' ' << nd.cell_i << ' '
            << nd.cell_j << ' ' << fmt(nd.cx) << ' ' << fmt(nd.cy) << ' ' << fmt(nd.cz) << ' '
            << fmt(nd.lx) << ' ' << fmt(nd.ly) << ' ' << fmt(nd.lz) << ' '
            << (nd.is_chiplet ? 1 : 0) << '\n';
    }

    // upper-triangle couplings only; the diagonal is reconstructed
    std::vector<std::tuple<int, int, double>> edges;
    for (int k = 0; k < model.G.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.G, k); it; ++it)
            if (it.row() < it.col()) edges.emplace_back(it.row(), it.col(), it.value());
    out << "conductances " << edges.size() << '\n';
    for (const auto& [i, j, g] : edges) out << i << ' ' << j << ' ' << fmt(g) << '\n';

    out << "gconv " << n << '\n';
    for (int i = 0; i < n; ++i) out << i << ' ' << fmt(model.gconv[i]) << '\n';

    out << "capacitances " << n << '\n';
    for (int i = 0; i < n; ++i) out << i << ' ' << fmt(model.capacitance[i]) << '\n';

    out << "power_blocks " << model.power_block_ids.size() << '\n';
    for (size_t p = 0; p < model.power_block_ids.size(); ++p) {
        out << model.power_block_ids[p] << ' ' << model.power_map[p].size() << '\n';
        for (const auto& [node, w] : model.power_map[p])
            out << node << ' ' << fmt(w) << '\n';
    }
}

RCModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file '" + path + "'");
    std::string word;
    auto expect = [&](const std::string& tag) {
        if (!(in >> word) || word != tag)
            throw DomainError(path + ": malformed model file, expected '" + tag + "'");
    };
    expect("mfit-model");
    int version;
    in >> version;
    if (version != 1) throw DomainError(path + ": unsupported model file version");

    RCModel model;
    expect("ambient_c");
    in >> model.ambient_c;

    expect("nodes");
    int n;
    in >> n;
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    std::string line;
    std::getline(in, line); // column comment
    model.nodes.resize(n);
    for (int i = 0; i < n; ++i) {
        NodeRecord& nd = model.nodes[i];
        int chip;
        in >> nd.index >> nd.layer >> nd.block >> nd.cell_i >> nd.cell_j >> nd.cx >> nd.cy >>
            nd.cz >> nd.lx >> nd.ly >> nd.lz >> chip;
        nd.is_chiplet = chip != 0;
    }

    expect("conductances");
    size_t m;
    in >> m;
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> diag(n, 0.0);
    for (size_t e = 0; e < m; ++e) {
        int i, j;
        double g;
        in >> i >> j >> g;
        triplets.emplace_back(i, j, g);
        triplets.emplace_back(j, i, g);
        diag[i] += g;
        diag[j] += g;
    }

    expect("gconv");
    int ng;
    in >> ng;
    model.gconv.resize(n);
    for (int e = 0; e < ng; ++e) {
        int i;
        in >> i >> model.gconv[i];
    }

    expect("capacitances");
    int nc;
    in >> nc;
    model.capacitance.resize(n);
    for (int e = 0; e < nc; ++e) {
        int i;
        in >> i >> model.capacitance[i];
    }

    expect("power_blocks");
    size_t np;
    in >> np;
    for (size_t p = 0; p < np; ++p) {
        std::string id;
        size_t nw;
        in >> id >> nw;
        std::vector<std::pair<int, double>> weights(nw);
        for (auto& [node, w] : weights) in >> node >> w;
        model.power_block_ids.push_back(id);
        model.power_map.push_back(std::move(weights));
    }
    if (!in) throw DomainError(path + ": truncated model file");

    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, -(diag[i] + model.gconv[i]));
    model.G.resize(n, n);
    model.G.setFromTriplets(triplets.begin(), triplets.end());
    model.G.makeCompressed();

    // carry node capacitance back onto the records
    for (int i = 0; i < n; ++i) model.nodes[i].capacitance = model.capacitance[i];
    return model;
}

std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open file '" + path + "' for fingerprinting");
    uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

} // namespace mfit
