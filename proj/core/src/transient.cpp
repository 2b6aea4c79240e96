#include "mfit/transient.hpp"
#include "mfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/SparseCholesky>

namespace mfit {

namespace {

Eigen::SparseMatrix<double> negated(const Eigen::SparseMatrix<double>& g) {
    return Eigen::SparseMatrix<double>(-g);
}

// Map trace power columns onto model power-block indices.
std::vector<int> trace_to_model_columns(const RCModel& model, const PowerTrace& trace) {
    std::vector<int> cols;
    cols.reserve(trace.power_block_ids.size());
    for (const std::string& id : trace.power_block_ids) {
        auto it = std::find(model.power_block_ids.begin(), model.power_block_ids.end(), id);
        if (it == model.power_block_ids.end())
            throw DomainError("power trace column '" + id + "' is not a power block of the model");
        cols.push_back(static_cast<int>(it - model.power_block_ids.begin()));
    }
    return cols;
}

} // namespace

Eigen::VectorXd steady_state(const RCModel& model, const Eigen::VectorXd& q) {
    if (model.gconv.maxCoeff() <= 0)
        throw NumericalError("steady_state: no convection anywhere, G is singular");
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(negated(model.G));
    if (solver.info() != Eigen::Success)
        throw NumericalError("steady_state: factorization of G failed");
    Eigen::VectorXd rise = solver.solve(q);
    const double residual = (model.G * rise + q).lpNorm<Eigen::Infinity>();
    if (residual > 1e-8 * std::max(1.0, q.lpNorm<Eigen::Infinity>()))
        throw NumericalError("steady_state: residual " + std::to_string(residual) +
                             " exceeds tolerance");
    return rise.array() + model.ambient_c;
}

Eigen::VectorXd steady_state(const RCModel& model,
                             const std::map<std::string, double>& powers) {
    for (const auto& [id, w] : powers)
        if (w < 0) throw DomainError("steady_state: negative power on '" + id + "'");
    return steady_state(model, model.inject(powers));
}

namespace {

// TR-BDF2 over one constant-input interval, emitting samples at the given
// output instants (all inside (t0, t1]). State is K-rise and is updated in
// place. gamma = 2 - sqrt(2); both stage matrices share C - d*h*G with
// d = 1 - 1/sqrt(2).
class TrBdf2 {
public:
    TrBdf2(const RCModel& model, const SolverConfig& cfg)
        : model_(model), cfg_(cfg), cap_(model.capacitance) {
        const double s2 = std::sqrt(2.0);
        gamma_ = 2.0 - s2;
        d_ = 1.0 - 1.0 / s2;
        w1_ = 1.0 / (gamma_ * (2.0 - gamma_));
        w2_ = (1.0 - gamma_) * (1.0 - gamma_) / (gamma_ * (2.0 - gamma_));
        // weights of the embedded third-order error estimate
        const double bh2 = 1.0 / (6.0 * gamma_ * (1.0 - gamma_));
        const double bh3 = 0.5 - gamma_ * bh2;
        const double b1 = 1.0 / (2.0 * (2.0 - gamma_));
        e1_ = b1 - (1.0 - bh2 - bh3);
        e2_ = b1 - bh2;
        e3_ = d_ - bh3;
        identity_c_.resize(model.size());
    }

    void integrate(Eigen::VectorXd& rise, double t0, double t1, const Eigen::VectorXd& q,
                   const std::vector<double>& outputs, // sorted, in (t0, t1]
                   TemperatureTrace& out) {
        double t = t0;
        size_t next_out = 0;
        double h = initial_step(t1 - t0);
        int rejects_in_a_row = 0;

        while (t < t1 - 1e-15 * std::max(1.0, t1)) {
            double limit = t1;
            if (next_out < outputs.size()) limit = std::min(limit, outputs[next_out]);
            h = std::min(h, limit - t);
            if (cfg_.max_step > 0) h = std::min(h, cfg_.max_step);
            if (h <= 0) h = limit - t;

            factorize(h);

            const Eigen::VectorXd k1 = f(rise, q);
            const double dh = d_ * h;

            Eigen::VectorXd rhs = cap_.cwiseProduct(rise) + dh * (model_.G * rise) + 2.0 * dh * q;
            const Eigen::VectorXd t_gamma = lu_.solve(rhs);
            const Eigen::VectorXd k2 = f(t_gamma, q);

            rhs = cap_.cwiseProduct(w1_ * t_gamma - w2_ * rise) + dh * q;
            const Eigen::VectorXd t_next = lu_.solve(rhs);
            const Eigen::VectorXd k3 = f(t_next, q);

            // smoothed embedded error estimate
            const Eigen::VectorXd est_raw = h * (e1_ * k1 + e2_ * k2 + e3_ * k3);
            const Eigen::VectorXd est = lu_.solve(cap_.cwiseProduct(est_raw));

            double err = 0.0;
            for (int i = 0; i < rise.size(); ++i) {
                const double scale =
                    cfg_.atol + cfg_.rtol * std::max(std::abs(rise[i]), std::abs(t_next[i]));
                err = std::max(err, std::abs(est[i]) / scale);
            }

            if (err <= 1.0 || h <= 1e-14 * std::max(1.0, t1)) {
                t += h;
                rise = t_next;
                rejects_in_a_row = 0;
                while (next_out < outputs.size() && outputs[next_out] <= t + 1e-12 * std::max(1.0, t)) {
                    out.times.push_back(outputs[next_out]);
                    rows_.push_back(rise.array() + model_.ambient_c);
                    ++next_out;
                }
            } else if (++rejects_in_a_row > 50) {
                throw NumericalError("simulate: step size control failed at t = " +
                                     std::to_string(t));
            }
            const double factor =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -1.0 / 3.0), 0.2, 5.0);
            h = std::max(h * factor, 1e-14 * std::max(1.0, t1));
        }
    }

    std::vector<Eigen::VectorXd> take_rows() { return std::move(rows_); }

private:
    double initial_step(double span) const { return span / 16.0; }

    Eigen::VectorXd f(const Eigen::VectorXd& rise, const Eigen::VectorXd& q) const {
        return (model_.G * rise + q).cwiseQuotient(cap_);
    }

    void factorize(double h) {
        const double dh = d_ * h;
        if (factored_ && dh == last_dh_) return;
        Eigen::SparseMatrix<double> w = negated(model_.G) * dh;
        for (int i = 0; i < model_.size(); ++i) w.coeffRef(i, i) += cap_[i];
        lu_.compute(w);
        if (lu_.info() != Eigen::Success)
            throw NumericalError("simulate: stage matrix factorization failed");
        factored_ = true;
        last_dh_ = dh;
    }

    const RCModel& model_;
    const SolverConfig& cfg_;
    Eigen::VectorXd cap_;
    Eigen::VectorXd identity_c_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> lu_;
    bool factored_ = false;
    double last_dh_ = -1.0;
    double gamma_, d_, w1_, w2_, e1_, e2_, e3_;
    std::vector<Eigen::VectorXd> rows_;
};

} // namespace

TemperatureTrace simulate(const RCModel& model, const PowerTrace& trace,
                          const SolverConfig& config,
                          const std::optional<Eigen::VectorXd>& t_init_c) {
    if (trace.segments() == 0) throw DomainError("simulate: empty power trace");
    if (config.rtol <= 0 || config.atol <= 0 || config.output_dt <= 0)
        throw DomainError("simulate: tolerances and output_dt must be positive");

    const int N = model.size();
    const std::vector<int> cols = trace_to_model_columns(model, trace);

    Eigen::VectorXd rise = Eigen::VectorXd::Zero(N);
    if (t_init_c) {
        if (t_init_c->size() != N) throw DomainError("simulate: t_init dimension mismatch");
        rise = t_init_c->array() - model.ambient_c;
    }

    TemperatureTrace out;
    out.node_ids.reserve(N);
    for (const NodeRecord& n : model.nodes) out.node_ids.push_back(n.id());

    const double t_start = trace.change_times.front();
    const double t_end = trace.end_time;
    std::vector<double> output_times;
    for (long k = 0;; ++k) {
        const double t = t_start + k * config.output_dt;
        if (t > t_end + 1e-12 * std::max(1.0, t_end)) break;
        output_times.push_back(t);
    }

    TrBdf2 stepper(model, config);
    std::vector<Eigen::VectorXd> rows;
    rows.push_back(rise.array() + model.ambient_c); // initial condition
    out.times.push_back(t_start);

    size_t out_idx = 1; // output_times[0] == t_start already emitted
    for (int seg = 0; seg < trace.segments(); ++seg) {
        const double seg_t0 = trace.change_times[seg];
        const double seg_t1 = trace.segment_end(seg);

        Eigen::VectorXd q = Eigen::VectorXd::Zero(N);
        for (size_t c = 0; c < cols.size(); ++c) {
            const double watts = trace.values[seg][c];
            for (const auto& [node, w] : model.power_map[cols[c]]) q[node] += watts * w;
        }

        std::vector<double> seg_outputs;
        while (out_idx < output_times.size() &&
               output_times[out_idx] <= seg_t1 + 1e-12 * std::max(1.0, seg_t1)) {
            seg_outputs.push_back(output_times[out_idx]);
            ++out_idx;
        }

        stepper.integrate(rise, seg_t0, seg_t1, q, seg_outputs, out);
        for (auto& r : stepper.take_rows()) rows.push_back(std::move(r));
    }

    out.values.resize(static_cast<int>(rows.size()), N);
    for (size_t r = 0; r < rows.size(); ++r) out.values.row(static_cast<int>(r)) = rows[r];
    if (out.times.size() != rows.size())
        throw NumericalError("simulate: internal output bookkeeping mismatch");
    return out;
}

Heatmap layer_heatmap(const TemperatureTrace& trace, const RCModel& model,
                      const std::string& layer, double t) {
    std::vector<const NodeRecord*> nodes;
    for (const NodeRecord& n : model.nodes)
        if (n.layer == layer) nodes.push_back(&n);
    if (nodes.empty()) throw DomainError("layer_heatmap: unknown layer '" + layer + "'");
    if (trace.rows() == 0) throw DomainError("layer_heatmap: empty trace");

    // nearest sample
    int row = 0;
    double best = std::abs(trace.times[0] - t);
    for (int r = 1; r < trace.rows(); ++r) {
        const double dist = std::abs(trace.times[r] - t);
        if (dist < best) {
            best = dist;
            row = r;
        }
    }

    const double eps = 1e-12;
    auto collect_edges = [&](bool x_axis) {
        std::vector<double> edges;
        for (const NodeRecord* n : nodes) {
            const double c = x_axis ? n->cx : n->cy;
            const double l = x_axis ? n->lx : n->ly;
            edges.push_back(c - 0.5 * l);
            edges.push_back(c + 0.5 * l);
        }
        std::sort(edges.begin(), edges.end());
        std::vector<double> uniq;
        for (double e : edges)
            if (uniq.empty() || e - uniq.back() > eps) uniq.push_back(e);
        return uniq;
    };

    Heatmap map;
    map.x_edges = collect_edges(true);
    map.y_edges = collect_edges(false);
    const int nx = static_cast<int>(map.x_edges.size()) - 1;
    const int ny = static_cast<int>(map.y_edges.size()) - 1;
    map.values = Eigen::MatrixXd::Constant(ny, nx, std::numeric_limits<double>::quiet_NaN());

    // trace column per node id
    std::map<std::string, int> col_of;
    for (int c = 0; c < trace.cols(); ++c) col_of[trace.node_ids[c]] = c;

    for (const NodeRecord* n : nodes) {
        auto it = col_of.find(n->id());
        if (it == col_of.end())
            throw DomainError("layer_heatmap: trace has no column for node " + n->id());
        const double v = trace.values(row, it->second);
        for (int j = 0; j < ny; ++j) {
            const double yc = 0.5 * (map.y_edges[j] + map.y_edges[j + 1]);
            if (yc < n->cy - 0.5 * n->ly || yc > n->cy + 0.5 * n->ly) continue;
            for (int i = 0; i < nx; ++i) {
                const double xc = 0.5 * (map.x_edges[i] + map.x_edges[i + 1]);
                if (xc >= n->cx - 0.5 * n->lx && xc <= n->cx + 0.5 * n->lx)
                    map.values(j, i) = v;
            }
        }
    }
    return map;
}

void save_heatmap_csv(const Heatmap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    for (int j = 0; j < map.values.rows(); ++j) {
        for (int i = 0; i < map.values.cols(); ++i) {
            if (i) out << ',';
            const double v = map.values(j, i);
            if (std::isnan(v)) {
                out << "NA";
            } else {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out << buf;
            }
        }
        out << '\n';
    }
}

} // namespace mfit
