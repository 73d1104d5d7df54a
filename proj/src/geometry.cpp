#include "submaslov/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

namespace submaslov {

Vector Tensor3::contract(const Vector& v, const Vector& w) const {
    Vector out(dim());
    for (int k = 0; k < dim(); ++k) out(k) = v.dot(comps[std::size_t(k)] * w);
    return out;
}

Matrix Tensor3::contract_left(const Vector& v) const {
    Matrix out(dim(), dim());
    for (int k = 0; k < dim(); ++k) out.row(k) = v.transpose() * comps[std::size_t(k)];
    return out;
}

Matrix MetricField::at(const Vector& x) const {
    if (!in_domain(x)) throw PatchExit(0.0);
    Matrix g = eval(x);
    if (g.rows() != dim || g.cols() != dim)
        throw InvalidDimension("MetricField: evaluator returned wrong shape");
    g = 0.5 * (g + g.transpose()).eval();
    if (std::abs(g.determinant()) < tol)
        throw DegenerateMetric("MetricField: metric is degenerate at the queried point");
    return g;
}

void MetricField::validate_at(const Vector& x) const {
    const Matrix g = at(x);
    const Matrix raw = eval(x);
    if ((raw - raw.transpose()).norm() > tol * std::max(1.0, raw.norm()))
        throw DegenerateMetric("MetricField: evaluator is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    int neg = 0;
    for (int i = 0; i < dim; ++i)
        if (es.eigenvalues()(i) < 0.0) ++neg;
    if (neg != index)
        throw DegenerateMetric("MetricField: eigenvalue index mismatch (got " +
                               std::to_string(neg) + ", declared " + std::to_string(index) + ")");
}

Tensor3 christoffel(const MetricField& metric, const Vector& x) {
    const int n = metric.dim;
    if (metric.christoffel) return metric.christoffel(x);
    std::vector<Matrix> dg; // dg[i] = ∂_i g
    dg.resize(std::size_t(n));
    if (metric.deriv) {
        dg = metric.deriv(x);
    } else {
        const double h = metric.fd_step * (1.0 + x.norm());
        for (int i = 0; i < n; ++i) {
            Vector xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            dg[std::size_t(i)] = (metric.eval(xp) - metric.eval(xm)) / (2.0 * h);
        }
    }
    const Matrix ginv = metric.at(x).inverse();
    Tensor3 gamma;
    gamma.comps.assign(std::size_t(n), Matrix::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) *
                         (dg[std::size_t(i)](l, j) + dg[std::size_t(j)](l, i) -
                          dg[std::size_t(l)](i, j));
                gamma.comps[std::size_t(k)](i, j) = 0.5 * s;
                gamma.comps[std::size_t(k)](j, i) = 0.5 * s;
            }
    return gamma;
}

Matrix curvature_operator(const MetricField& metric, const Vector& x, const Vector& v) {
    const int n = metric.dim;
    const double h = Defaults::curvature_fd_step * (1.0 + x.norm());
    // gradient of the Christoffel symbols
    std::vector<Tensor3> dgamma;
    dgamma.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const Tensor3 gp = christoffel(metric, xp);
        const Tensor3 gm = christoffel(metric, xm);
        dgamma[std::size_t(i)].comps.resize(std::size_t(n));
        for (int k = 0; k < n; ++k)
            dgamma[std::size_t(i)].comps[std::size_t(k)] =
                (gp.comps[std::size_t(k)] - gm.comps[std::size_t(k)]) / (2.0 * h);
    }
    const Tensor3 gamma = christoffel(metric, x);
    // (R(v,e_j)v)^k = v^i v^l [∂_i Γᵏⱼₗ − ∂_j Γᵏᵢₗ + Γᵏᵢₘ Γᵐⱼₗ − Γᵏⱼₘ Γᵐᵢₗ];
    // the tidal operator is its negative.
    Matrix op = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) {
                    double term = dgamma[std::size_t(i)].comps[std::size_t(k)](j, l) -
                                  dgamma[std::size_t(j)].comps[std::size_t(k)](i, l);
                    for (int m = 0; m < n; ++m)
                        term += gamma.comps[std::size_t(k)](i, m) *
                                    gamma.comps[std::size_t(m)](j, l) -
                                gamma.comps[std::size_t(k)](j, m) *
                                    gamma.comps[std::size_t(m)](i, l);
                    s += v(i) * v(l) * term;
                }
            op(k, j) = -s;
        }
    return op;
}

namespace {

void hermite_weights(double s, double& h00, double& h10, double& h01, double& h11) {
    h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    h10 = s * (1 - s) * (1 - s);
    h01 = s * s * (3 - 2 * s);
    h11 = s * s * (s - 1);
}

void hermite_dweights(double s, double& d00, double& d10, double& d01, double& d11) {
    d00 = 6 * s * (s - 1);
    d10 = (1 - s) * (1 - 3 * s);
    d01 = 6 * s * (1 - s);
    d11 = s * (3 * s - 2);
}

} // namespace

GeodesicPath::GeodesicPath(std::vector<double> grid, std::vector<Vector> points,
                           std::vector<Vector> velocities)
    : grid_(std::move(grid)), points_(std::move(points)), velocities_(std::move(velocities)) {
    if (grid_.size() != points_.size() || grid_.size() != velocities_.size() || grid_.size() < 2)
        throw InvalidDimension("GeodesicPath: inconsistent sample arrays");
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
        if (!(grid_[i] < grid_[i + 1]))
            throw InvalidArgument("GeodesicPath: grid must be strictly increasing");
    h_ = (grid_.back() - grid_.front()) / double(grid_.size() - 1);
}

std::size_t GeodesicPath::segment(double t) const {
    if (t <= grid_.front()) return 0;
    if (t >= grid_.back()) return grid_.size() - 2;
    auto idx = std::size_t((t - grid_.front()) / h_);
    if (idx > grid_.size() - 2) idx = grid_.size() - 2;
    while (idx > 0 && t < grid_[idx]) --idx;
    while (idx + 2 < grid_.size() && t > grid_[idx + 1]) ++idx;
    return idx;
}

Vector GeodesicPath::point_at(double t) const {
    const std::size_t i = segment(t);
    const double dt = grid_[i + 1] - grid_[i];
    const double s = (t - grid_[i]) / dt;
    double h00, h10, h01, h11;
    hermite_weights(s, h00, h10, h01, h11);
    return h00 * points_[i] + h10 * dt * velocities_[i] + h01 * points_[i + 1] +
           h11 * dt * velocities_[i + 1];
}

Vector GeodesicPath::velocity_at(double t) const {
    const std::size_t i = segment(t);
    const double dt = grid_[i + 1] - grid_[i];
    const double s = (t - grid_[i]) / dt;
    double d00, d10, d01, d11;
    hermite_dweights(s, d00, d10, d01, d11);
    return (d00 * points_[i] + d01 * points_[i + 1]) / dt + d10 * velocities_[i] +
           d11 * velocities_[i + 1];
}

double GeodesicPath::max_residual(const MetricField& metric) const {
    // 4th-order midpoint stencils on the raw samples, interior midpoints only
    double worst = 0.0;
    for (std::size_t i = 1; i + 2 < grid_.size(); ++i) {
        const Vector xm = (9.0 * (points_[i] + points_[i + 1]) -
                           (points_[i - 1] + points_[i + 2])) / 16.0;
        const Vector vm = (9.0 * (velocities_[i] + velocities_[i + 1]) -
                           (velocities_[i - 1] + velocities_[i + 2])) / 16.0;
        const Vector acc = (27.0 * (velocities_[i + 1] - velocities_[i]) -
                            (velocities_[i + 2] - velocities_[i - 1])) / (24.0 * h_);
        const Tensor3 gamma = christoffel(metric, xm);
        worst = std::max(worst, (acc + gamma.contract(vm, vm)).norm());
    }
    return worst;
}

double GeodesicPath::energy_drift(const MetricField& metric) const {
    const double e0 = velocities_.front().dot(metric.at(points_.front()) * velocities_.front());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double e = velocities_[i].dot(metric.at(points_[i]) * velocities_[i]);
        worst = std::max(worst, std::abs(e - e0));
    }
    return worst / std::max(1.0, std::abs(e0));
}

namespace {

std::vector<Vector> integrate_state(const MetricField& metric,
                                    const std::function<Vector(double, const Vector&)>& rhs,
                                    const Vector& y0, double a, double b, int steps, int dim) {
    std::vector<Vector> states;
    states.reserve(std::size_t(steps) + 1);
    states.push_back(y0);
    const double h = (b - a) / steps;
    Vector y = y0;
    for (int i = 0; i < steps; ++i) {
        const double t = a + i * h;
        if (dim > 0 && !metric.in_domain(y.head(dim))) throw PatchExit(t);
        const Vector k1 = rhs(t, y);
        const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(t + h, y + h * k3);
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) throw IntegrationFailure("integration produced non-finite state at t=" +
                                                     std::to_string(t + h));
        states.push_back(y);
    }
    if (dim > 0 && !metric.in_domain(states.back().head(dim))) throw PatchExit(b);
    return states;
}

} // namespace

GeodesicPath integrate_geodesic(const MetricField& metric, const Vector& x0, const Vector& v0,
                                double a, double b, int steps, const IntegrateOptions& opts) {
    const int n = metric.dim;
    if (x0.size() != n || v0.size() != n)
        throw InvalidDimension("integrate_geodesic: seed dimension mismatch");
    auto rhs = [&](double t, const Vector& y) {
        const Vector x = y.head(n);
        const Vector v = y.tail(n);
        if (!metric.in_domain(x)) throw PatchExit(t);
        const Tensor3 gamma = christoffel(metric, x);
        Vector dy(2 * n);
        dy.head(n) = v;
        dy.tail(n) = -gamma.contract(v, v);
        return dy;
    };
    Vector y0(2 * n);
    y0 << x0, v0;
    const auto states = integrate_state(metric, rhs, y0, a, b, steps, n);

    std::vector<double> grid(std::size_t(steps) + 1);
    std::vector<Vector> xs(states.size()), vs(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        grid[i] = a + (b - a) * double(i) / steps;
        xs[i] = states[i].head(n);
        vs[i] = states[i].tail(n);
    }
    GeodesicPath path(std::move(grid), std::move(xs), std::move(vs));

    if (opts.check_invariants) {
        const double drift = path.energy_drift(metric);
        if (drift > opts.conservation_tol)
            throw IntegrationFailure("integrate_geodesic: g(x',x') drift " +
                                     std::to_string(drift) + " exceeds tolerance");
        // the midpoint stencil itself resolves O(h^4)
        const double h = path.step();
        const double floor = 200.0 * h * h * h * h;
        const double res = path.max_residual(metric);
        if (res > opts.residual_tol + floor)
            throw IntegrationFailure("integrate_geodesic: geodesic residual " +
                                     std::to_string(res));
    }
    return path;
}

GeodesicPath integrate_curve(const MetricField& metric,
                             const std::function<Vector(double, const Vector&)>& velocity,
                             const Vector& x0, double a, double b, int steps) {
    const int n = metric.dim;
    auto rhs = [&](double t, const Vector& y) { return velocity(t, y); };
    const auto states = integrate_state(metric, rhs, x0, a, b, steps, n);
    std::vector<double> grid(std::size_t(steps) + 1);
    std::vector<Vector> xs(states.size()), vs(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        grid[i] = a + (b - a) * double(i) / steps;
        xs[i] = states[i];
        vs[i] = velocity(grid[i], states[i]);
    }
    return GeodesicPath(std::move(grid), std::move(xs), std::move(vs));
}

Matrix FrameField::at(double t) const {
    // cubic Hermite in the entries; falls back to linear without derivatives
    if (grid.size() < 2) return frames.front();
    const double h = (grid.back() - grid.front()) / double(grid.size() - 1);
    auto i = std::size_t(std::clamp((t - grid.front()) / h, 0.0, double(grid.size() - 2)));
    while (i > 0 && t < grid[i]) --i;
    while (i + 2 < grid.size() && t > grid[i + 1]) ++i;
    const double dt = grid[i + 1] - grid[i];
    const double s = (t - grid[i]) / dt;
    if (frame_dots.empty()) return (1 - s) * frames[i] + s * frames[i + 1];
    double h00, h10, h01, h11;
    hermite_weights(s, h00, h10, h01, h11);
    return h00 * frames[i] + h10 * dt * frame_dots[i] + h01 * frames[i + 1] +
           h11 * dt * frame_dots[i + 1];
}

Matrix FrameField::dot_at(double t) const {
    if (grid.size() < 2) return Matrix::Zero(frames.front().rows(), frames.front().cols());
    const double h = (grid.back() - grid.front()) / double(grid.size() - 1);
    auto i = std::size_t(std::clamp((t - grid.front()) / h, 0.0, double(grid.size() - 2)));
    while (i > 0 && t < grid[i]) --i;
    while (i + 2 < grid.size() && t > grid[i + 1]) ++i;
    const double dt = grid[i + 1] - grid[i];
    const double s = (t - grid[i]) / dt;
    if (frame_dots.empty()) return (frames[i + 1] - frames[i]) / dt;
    double d00, d10, d01, d11;
    hermite_dweights(s, d00, d10, d01, d11);
    return (d00 * frames[i] + d01 * frames[i + 1]) / dt + d10 * frame_dots[i] +
           d11 * frame_dots[i + 1];
}

void FrameField::validate(double tol) const {
    for (const auto& p : frames)
        if (std::abs(p.determinant()) < tol)
            throw InvalidFrame("FrameField: frame is singular along the curve");
}

FrameField parallel_transport_frame(const MetricField& metric, const GeodesicPath& curve,
                                    const Matrix& p_a) {
    const int n = metric.dim;
    if (std::abs(p_a.determinant()) < Defaults::rank_tol)
        throw InvalidFrame("parallel_transport_frame: initial frame is singular");
    auto rhs = [&](double t, const Vector& y) {
        const Matrix p = Eigen::Map<const Matrix>(y.data(), n, n);
        const Tensor3 gamma = christoffel(metric, curve.point_at(t));
        const Matrix dp = -gamma.contract_left(curve.velocity_at(t)) * p;
        return Vector(Eigen::Map<const Vector>(dp.data(), n * n));
    };
    Vector y0 = Eigen::Map<const Vector>(p_a.data(), n * n);
    const auto states = integrate_state(metric, rhs, y0, curve.a(), curve.b(),
                                        int(curve.size()) - 1, 0);
    FrameField out;
    out.grid = curve.grid();
    out.frames.resize(states.size());
    out.frame_dots.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.frames[i] = Eigen::Map<const Matrix>(states[i].data(), n, n);
        const Tensor3 gamma = christoffel(metric, curve.point(i));
        out.frame_dots[i] = -gamma.contract_left(curve.velocity(i)) * out.frames[i];
    }
    out.validate();
    return out;
}

FrameField modulated_frame(const MetricField& metric, const GeodesicPath& curve,
                           const FrameField& parallel, const std::function<Matrix(double)>& K,
                           const std::function<Matrix(double)>& Kdot) {
    (void)metric;
    FrameField out;
    out.grid = curve.grid();
    out.frames.resize(out.grid.size());
    out.frame_dots.resize(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double t = out.grid[i];
        out.frames[i] = parallel.frames[i] * K(t);
        out.frame_dots[i] = parallel.frame_dots[i] * K(t) + parallel.frames[i] * Kdot(t);
    }
    out.validate();
    return out;
}

std::vector<Matrix> connection_form(const FrameField& frame, const MetricField& metric,
                                    const GeodesicPath& curve) {
    const std::size_t n_samples = frame.grid.size();
    std::vector<Matrix> dots;
    if (!frame.frame_dots.empty()) {
        dots = frame.frame_dots;
    } else {
        const double h = (frame.grid.back() - frame.grid.front()) / double(n_samples - 1);
        dots = sampled_derivative(frame.frames, h);
    }
    std::vector<Matrix> out(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Tensor3 gamma = christoffel(metric, curve.point(i));
        const Matrix cov_dot = dots[i] + gamma.contract_left(curve.velocity(i)) * frame.frames[i];
        out[i] = frame.frames[i].partialPivLu().solve(cov_dot);
    }
    return out;
}

void SymplecticSystemData::validate(double tol) const {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(gtilde[i].determinant()) < Defaults::rank_tol)
            throw DegenerateMetric("SymplecticSystemData: gtilde degenerate");
        const Matrix gr = gtilde[i] * Rtilde[i];
        if ((gr - gr.transpose()).norm() > tol * std::max(1.0, gr.norm()))
            throw InvalidArgument("SymplecticSystemData: Rtilde is not gtilde-symmetric");
    }
    if (compatibility_residual() > tol)
        throw InvalidArgument("SymplecticSystemData: gtilde'/varpi compatibility violated");
}

double SymplecticSystemData::compatibility_residual() const {
    if (grid.size() < 5) return 0.0;
    const double h = (grid.back() - grid.front()) / double(grid.size() - 1);
    const auto dg = sampled_derivative(gtilde, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Matrix expected = gtilde[i] * varpi[i] + varpi[i].transpose() * gtilde[i];
        worst = std::max(worst, (dg[i] - expected).norm() / std::max(1.0, expected.norm()));
    }
    return worst;
}

SymplecticSystemData build_geodesic_system(const MetricField& metric, const GeodesicPath& geo,
                                           const FrameField& frame) {
    SymplecticSystemData data;
    data.grid = geo.grid();
    const std::size_t m = data.grid.size();
    data.gtilde.resize(m);
    data.varpi.resize(m);
    data.Rtilde.resize(m);
    const auto varpis = connection_form(frame, metric, geo);
    for (std::size_t i = 0; i < m; ++i) {
        const Matrix& p = frame.frames[i];
        data.gtilde[i] = p.transpose() * metric.at(geo.point(i)) * p;
        data.varpi[i] = varpis[i];
        const Matrix tidal = curvature_operator(metric, geo.point(i), geo.velocity(i));
        data.Rtilde[i] = p.partialPivLu().solve(tidal * p);
    }
    // exact evaluator through the Hermite interpolants, for off-grid flow stages
    data.exact_eval = [metric, geo, frame](double t, Matrix& g, Matrix& w, Matrix& r) {
        const Vector x = geo.point_at(t);
        const Vector v = geo.velocity_at(t);
        const Matrix p = frame.at(t);
        const Matrix pdot = frame.dot_at(t);
        const Matrix gx = metric.at(x);
        const Tensor3 gamma = christoffel(metric, x);
        g = p.transpose() * gx * p;
        Eigen::PartialPivLU<Matrix> lu(p);
        w = lu.solve(pdot + gamma.contract_left(v) * p);
        r = lu.solve(curvature_operator(metric, x, v) * p);
    };
    return data;
}

double sp_membership_residual(const Matrix& x) {
    const Matrix omega = canonical_omega(int(x.rows()) / 2);
    return (x.transpose() * omega + omega * x).norm();
}

CoefficientMap assemble_symplectic_system(const SymplecticSystemData& data) {
    const int n = int(data.gtilde.front().rows());
    for (const auto& g : data.gtilde)
        if (std::abs(g.determinant()) < Defaults::rank_tol)
            throw DegenerateMetric("assemble_symplectic_system: gtilde degenerate");

    auto block_x = [n](const Matrix& g, const Matrix& w, const Matrix& r) {
        Matrix x(2 * n, 2 * n);
        x.topLeftCorner(n, n) = -w;
        x.topRightCorner(n, n) = g.inverse();
        x.bottomLeftCorner(n, n) = -(g * r);
        x.bottomRightCorner(n, n) = w.transpose();
        // symmetrize the symmetric blocks: kills FD noise in the sp-membership
        x.topRightCorner(n, n) = 0.5 * (x.topRightCorner(n, n) +
                                        x.topRightCorner(n, n).transpose().eval());
        x.bottomLeftCorner(n, n) = 0.5 * (x.bottomLeftCorner(n, n) +
                                          x.bottomLeftCorner(n, n).transpose().eval());
        return x;
    };

    if (data.exact_eval) {
        auto eval = data.exact_eval;
        // memoize the last evaluation: RK4 queries each midpoint twice
        auto cache_t = std::make_shared<double>(std::nan(""));
        auto cache_x = std::make_shared<Matrix>();
        return [eval, block_x, cache_t, cache_x](double t) {
            if (t == *cache_t) return *cache_x;
            Matrix g, w, r;
            eval(t, g, w, r);
            *cache_x = block_x(g, w, r);
            *cache_t = t;
            return *cache_x;
        };
    }

    // sample-interpolating fallback (Catmull-Rom style cubic on 4 nodes)
    auto interp = [](const std::vector<double>& grid, const std::vector<Matrix>& vals, double t) {
        const double h = (grid.back() - grid.front()) / double(grid.size() - 1);
        auto i = std::ptrdiff_t((t - grid.front()) / h);
        i = std::clamp<std::ptrdiff_t>(i, 0, std::ptrdiff_t(grid.size()) - 2);
        const auto lo = std::max<std::ptrdiff_t>(0, i - 1);
        const auto hi = std::min<std::ptrdiff_t>(std::ptrdiff_t(grid.size()) - 1, i + 2);
        Matrix acc = Matrix::Zero(vals.front().rows(), vals.front().cols());
        for (auto a = lo; a <= hi; ++a) {
            double w = 1.0;
            for (auto b = lo; b <= hi; ++b)
                if (a != b) w *= (t - grid[std::size_t(b)]) / (grid[std::size_t(a)] - grid[std::size_t(b)]);
            acc += w * vals[std::size_t(a)];
        }
        return acc;
    };
    auto grid = data.grid;
    auto gt = data.gtilde;
    auto vp = data.varpi;
    auto rt = data.Rtilde;
    return [=](double t) {
        return block_x(interp(grid, gt, t), interp(grid, vp, t), interp(grid, rt, t));
    };
}

FlowResult flow(const CoefficientMap& X, const std::vector<double>& grid,
                const FlowOptions& opts) {
    if (grid.size() < 2) throw InvalidDimension("flow: need at least two grid points");
    const Matrix x0 = X(grid.front());
    const int two_n = int(x0.rows());
    FlowResult out;
    out.Phi.reserve(grid.size());
    Matrix phi = Matrix::Identity(two_n, two_n);
    out.Phi.push_back(phi);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double t = grid[i];
        const double h = grid[i + 1] - grid[i];
        const Matrix k1 = X(t) * phi;
        const Matrix k2 = X(t + 0.5 * h) * (phi + 0.5 * h * k1);
        const Matrix k3 = X(t + 0.5 * h) * (phi + 0.5 * h * k2);
        const Matrix k4 = X(t + h) * (phi + h * k3);
        phi = phi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.Phi.push_back(phi);
    }
    const Matrix omega = canonical_omega(two_n / 2);
    for (const auto& p : out.Phi) {
        const double d = (p.transpose() * omega * p - omega).norm();
        out.max_drift = std::max(out.max_drift, d);
        out.max_drift_rel = std::max(out.max_drift_rel, d / std::max(1.0, p.squaredNorm()));
    }
    if (opts.check_drift && out.max_drift_rel > 100.0 * opts.sympl_tol)
        throw IntegrationFailure("flow: symplecticity drift " +
                                 std::to_string(out.max_drift_rel) + "; use a smaller step");
    return out;
}

FieldAlongCurve jacobi_field_direct(const MetricField& metric, const GeodesicPath& geo,
                                    const Vector& J_a, const Vector& Jdot_a) {
    const int n = metric.dim;
    auto rhs = [&](double t, const Vector& y) {
        const Vector x = geo.point_at(t);
        const Vector v = geo.velocity_at(t);
        const Vector j = y.head(n);
        const Vector u = y.tail(n);
        const Tensor3 gamma = christoffel(metric, x);
        const Matrix tidal = curvature_operator(metric, x, v);
        Vector dy(2 * n);
        dy.head(n) = u - gamma.contract_left(v) * j;
        dy.tail(n) = -gamma.contract_left(v) * u - tidal * j;
        return dy;
    };
    Vector y0(2 * n);
    y0 << J_a, Jdot_a;
    const auto states = integrate_state(metric, rhs, y0, geo.a(), geo.b(),
                                        int(geo.size()) - 1, 0);
    FieldAlongCurve out;
    out.grid = geo.grid();
    out.values.resize(states.size());
    out.cov_derivs.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.values[i] = states[i].head(n);
        out.cov_derivs[i] = states[i].tail(n);
    }
    return out;
}

std::vector<Vector> covariant_derivative(const MetricField& metric, const GeodesicPath& curve,
                                         const std::vector<Vector>& values) {
    const double h = curve.step();
    auto plain = sampled_derivative(values, h);
    std::vector<Vector> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Tensor3 gamma = christoffel(metric, curve.point(i));
        out[i] = plain[i] + gamma.contract_left(curve.velocity(i)) * values[i];
    }
    return out;
}

} // namespace submaslov
