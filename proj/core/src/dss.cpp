#include "mfit/dss.hpp"
#include "mfit/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mfit {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

DSSModel discretize(const RCModel& model, double ts) {
    if (ts <= 0) throw DomainError("discretize: Ts must be positive");
    const int n = model.size();
    const int p = static_cast<int>(model.power_block_ids.size());
    if (model.gconv.maxCoeff() <= 0)
        throw NumericalError("discretize: model has no convection, C^-1 G is singular");

    // Symmetrize: Ms = C^-1/2 G C^-1/2 shares eigenvalues with M = C^-1 G
    // and is symmetric negative definite.
    const Eigen::VectorXd sqrt_c = model.capacitance.cwiseSqrt();
    const Eigen::VectorXd inv_sqrt_c = sqrt_c.cwiseInverse();
    Eigen::MatrixXd ms = Eigen::MatrixXd(model.G);
    ms = inv_sqrt_c.asDiagonal() * ms * inv_sqrt_c.asDiagonal();
    ms = 0.5 * (ms + ms.transpose()); // kill rounding asymmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ms);
    if (eig.info() != Eigen::Success)
        throw NumericalError("discretize: eigendecomposition did not converge");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::MatrixXd& v = eig.eigenvectors();

    Eigen::VectorXd exp_l(n), phi_l(n);
    for (int i = 0; i < n; ++i) {
        const double x = lambda[i] * ts;
        exp_l[i] = std::exp(x);
        // phi = (e^x - 1)/lambda, exact ZOH integral weight
        phi_l[i] = lambda[i] == 0.0 ? ts : std::expm1(x) / lambda[i];
    }

    DSSModel dss;
    dss.ts = ts;
    dss.ambient_c = model.ambient_c;
    dss.A = inv_sqrt_c.asDiagonal() * (v * exp_l.asDiagonal() * v.transpose()) *
            sqrt_c.asDiagonal();

    Eigen::MatrixXd routing = Eigen::MatrixXd::Zero(n, p); // watts -> per-node watts
    for (int c = 0; c < p; ++c)
        for (const auto& [node, w] : model.power_map[c]) routing(node, c) += w;
    dss.B = inv_sqrt_c.asDiagonal() * (v * phi_l.asDiagonal() * v.transpose()) *
            inv_sqrt_c.asDiagonal() * routing;

    dss.node_ids.reserve(n);
    for (const NodeRecord& nr : model.nodes) dss.node_ids.push_back(nr.id());
    dss.power_block_ids = model.power_block_ids;
    return dss;
}

double spectral_radius_estimate(const Eigen::MatrixXd& a, int iters) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(a.rows());
    for (int i = 0; i < a.rows(); ++i) x[i] += 1e-3 * ((i * 2654435761u) % 97) / 97.0;
    x.normalize();
    double rho = 0.0;
    for (int k = 0; k < iters; ++k) {
        Eigen::VectorXd y = a * x;
        const double norm = y.norm();
        if (norm == 0.0) return 0.0;
        rho = norm;
        x = y / norm;
    }
    return rho;
}

Eigen::VectorXd step(const DSSModel& dss, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& powers) {
    if (state.size() != dss.A.rows() || powers.size() != dss.B.cols())
        throw DomainError("step: dimension mismatch");
    return dss.A * state + dss.B * powers;
}

TemperatureTrace run_dss(const DSSModel& dss, const PowerTrace& trace,
                         const Eigen::VectorXd* t_init_c) {
    if (trace.segments() == 0) throw DomainError("run_dss: empty power trace");
    const double ts = dss.ts;
    for (double t : trace.change_times) {
        const double k = t / ts;
        if (std::abs(t - std::round(k) * ts) > 1e-9)
            throw DomainError("run_dss: change time " + std::to_string(t) +
                              " is not a multiple of Ts");
    }

    // trace column -> dss power index
    std::vector<int> cols;
    for (const std::string& id : trace.power_block_ids) {
        auto it = std::find(dss.power_block_ids.begin(), dss.power_block_ids.end(), id);
        if (it == dss.power_block_ids.end())
            throw DomainError("run_dss: power trace column '" + id +
                              "' is not a power block of the model");
        cols.push_back(static_cast<int>(it - dss.power_block_ids.begin()));
    }

    const int n = dss.size();
    const int p = static_cast<int>(dss.power_block_ids.size());
    Eigen::VectorXd state = Eigen::VectorXd::Zero(n);
    if (t_init_c) {
        if (t_init_c->size() != n) throw DomainError("run_dss: t_init dimension mismatch");
        state = t_init_c->array() - dss.ambient_c;
    }

    const long steps = std::lround((trace.end_time - trace.change_times.front()) / ts);

    TemperatureTrace out;
    out.node_ids = dss.node_ids;
    out.values.resize(steps + 1, n);
    out.times.reserve(steps + 1);

    int seg = 0;
    Eigen::VectorXd q(p);
    for (long k = 0; k <= steps; ++k) {
        const double t = trace.change_times.front() + k * ts;
        out.times.push_back(t);
        out.values.row(k) = (state.array() + dss.ambient_c).transpose();
        if (k == steps) break;
        while (seg + 1 < trace.segments() && trace.change_times[seg + 1] <= t + 0.5 * ts) ++seg;
        q.setZero();
        for (size_t c = 0; c < cols.size(); ++c) q[cols[c]] += trace.values[seg][c];
        state = dss.A * state + dss.B * q;
    }
    return out;
}

void save_dss(const DSSModel& dss, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    const int n = dss.size();
    const int p = static_cast<int>(dss.power_block_ids.size());
    out << "mfit-dss 1\n";
    out << "ts " << fmt(dss.ts) << '\n';
    out << "ambient_c " << fmt(dss.ambient_c) << '\n';
    out << "fingerprint " << (dss.model_fingerprint.empty() ? "-" : dss.model_fingerprint)
        << '\n';
    out << "nodes " << n << '\n';
    for (const std::string& id : dss.node_ids) out << id << '\n';
    out << "power_blocks " << p << '\n';
    for (const std::string& id : dss.power_block_ids) out << id << '\n';
    out << "A\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out << (j ? " " : "") << fmt(dss.A(i, j));
        out << '\n';
    }
    out << "B\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) out << (j ? " " : "") << fmt(dss.B(i, j));
        out << '\n';
    }
}

DSSModel load_dss(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open DSS file '" + path + "'");
    std::string word;
    auto expect = [&](const std::string& tag) {
        if (!(in >> word) || word != tag)
            throw DomainError(path + ": malformed DSS file, expected '" + tag + "'");
    };
    expect("mfit-dss");
    int version;
    in >> version;
    if (version != 1) throw DomainError(path + ": unsupported DSS file version");

    DSSModel dss;
    expect("ts");
    in >> dss.ts;
    expect("ambient_c");
    in >> dss.ambient_c;
    expect("fingerprint");
    in >> dss.model_fingerprint;
    if (dss.model_fingerprint == "-") dss.model_fingerprint.clear();
    expect("nodes");
    int n;
    in >> n;
    dss.node_ids.resize(n);
    for (int i = 0; i < n; ++i) in >> dss.node_ids[i];
    expect("power_blocks");
    int p;
    in >> p;
    dss.power_block_ids.resize(p);
    for (int i = 0; i < p; ++i) in >> dss.power_block_ids[i];
    expect("A");
    dss.A.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) in >> dss.A(i, j);
    expect("B");
    dss.B.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) in >> dss.B(i, j);
    if (!in) throw DomainError(path + ": truncated DSS file");
    return dss;
}

} // namespace mfit
