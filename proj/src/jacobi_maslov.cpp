#include "submaslov/jacobi_maslov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace submaslov {

LagrangianFrame lagrangian_LQ(const BoundaryData& bd) {
    const int n = int(bd.tangent_frame.rows());
    const int q = int(bd.tangent_frame.cols());
    if (q > 0 && (bd.shape.n != q))
        throw InvalidBoundaryData("lagrangian_LQ: shape form does not match the tangent frame");
    Matrix cols = Matrix::Zero(2 * n, n);
    if (q > 0) {
        // tangent columns: v = T e_i, w any solution of Tᵀ w = S e_i
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(bd.tangent_frame.transpose());
        const Matrix w_part = cod.solve(bd.shape.entries);
        cols.block(0, 0, n, q) = bd.tangent_frame;
        cols.block(n, 0, n, q) = w_part;
    }
    // conormal columns: v = 0, w annihilating the tangent frame
    const Matrix ann = q > 0 ? kernel_basis(Matrix(bd.tangent_frame.transpose()))
                             : Matrix(Matrix::Identity(n, n));
    if (int(ann.cols()) != n - q)
        throw InvalidBoundaryData("lagrangian_LQ: tangent frame is rank deficient");
    cols.block(n, q, n, n - q) = ann;
    return LagrangianFrame(cols);
}

void validate_boundary_data(const BoundaryData& bd, const Matrix& frame_a, const Matrix& g_a,
                            const Vector& gammadot_a, double tol) {
    const int q = int(bd.tangent_frame.cols());
    if (q == 0) return;
    const Matrix coord_frame = frame_a * bd.tangent_frame;
    const Vector pairings = coord_frame.transpose() * g_a * gammadot_a;
    if (pairings.norm() > tol * std::max(1.0, gammadot_a.norm()))
        throw InvalidBoundaryData("boundary data: velocity is not orthogonal to the submanifold");
    const Matrix induced = coord_frame.transpose() * g_a * coord_frame;
    if (std::abs(induced.determinant()) < tol)
        throw InvalidBoundaryData("boundary data: induced metric is degenerate");
}

bool FocalReport::any_flags() const {
    for (const auto& in : instants)
        if (in.degenerate || in.endpoint || in.cluster) return true;
    return false;
}

HalfInt FocalReport::contribution_sum() const {
    HalfInt s{};
    for (const auto& in : instants) s += in.contribution;
    return s;
}

// ---------------------------------------------------------------------------

struct QMaslovAnalysis::Impl {
    MetricField metric;
    GeodesicPath geo;
    BoundaryData bd;
    FrameField frame;
    QMaslovOptions opts;

    SymplecticSystemData sys;
    CoefficientMap X;
    FlowResult fl;
    LagrangianFrame LQ;
    int n;
    std::size_t start_index = 0;
    HalfInt index;
    FocalReport rep;

    Impl(const MetricField& metric_, const GeodesicPath& geo_, const BoundaryData& bd_,
         const FrameField& frame_, QMaslovOptions opts_)
        : metric(metric_), geo(geo_), bd(bd_), frame(frame_), opts(opts_),
          sys(build_geodesic_system(metric, geo, frame)), X(assemble_symplectic_system(sys)),
          fl(flow(X, geo.grid())), LQ(lagrangian_LQ(bd)), n(metric.dim) {
        validate_boundary_data(bd, frame.frames.front(), metric.at(geo.point(0)),
                               geo.velocity(0));
        run();
    }

    Matrix raw_frame(std::size_t i) const { return fl.Phi[i] * LQ.columns(); }

    // Φ(t)·L_Q off the grid: re-integrate from the grid node below t.
    Matrix raw_frame_at(double t) const {
        const auto& grid = geo.grid();
        if (t <= grid.front()) return raw_frame(0);
        const double h = geo.step();
        auto i = std::size_t(std::min((t - grid.front()) / h, double(grid.size() - 1)));
        while (i > 0 && grid[i] > t) --i;
        Matrix phi = fl.Phi[i];
        const double span = t - grid[i];
        if (span > 1e-14) {
            const int sub = 4;
            const double dt = span / sub;
            for (int s = 0; s < sub; ++s) {
                const double ts = grid[i] + s * dt;
                const Matrix k1 = X(ts) * phi;
                const Matrix k2 = X(ts + 0.5 * dt) * (phi + 0.5 * dt * k1);
                const Matrix k3 = X(ts + 0.5 * dt) * (phi + 0.5 * dt * k2);
                const Matrix k4 = X(ts + dt) * (phi + dt * k3);
                phi = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        return phi * LQ.columns();
    }

    // σ-values of the v-block of the orthonormalized path frame
    Vector vblock_sigmas(const Matrix& raw) const {
        const Matrix on = orthonormal_columns(raw);
        Eigen::JacobiSVD<Matrix> svd(on.topRows(n));
        return svd.singularValues();
    }

    double smin(const Matrix& raw) const {
        const Vector s = vblock_sigmas(raw);
        return s(s.size() - 1);
    }

    int kernel_dim_of(const Matrix& raw, double cut) const {
        const Vector s = vblock_sigmas(raw);
        int k = 0;
        for (int j = 0; j < s.size(); ++j)
            if (s(j) < cut) ++k;
        return k;
    }

    // determinant of the raw v-block: Φ(t)·L_Q columns vary continuously,
    // so the sign is meaningful (per-sample orthonormalization would not be)
    double det_vblock(const Matrix& raw) const {
        return Matrix(raw.topRows(n)).determinant();
    }

    JacobiEvaluation evaluate(double t0, const Matrix& raw) const {
        JacobiEvaluation ev;
        const Matrix on = orthonormal_columns(raw);
        Eigen::JacobiSVD<Matrix> svd(Matrix(on.topRows(n)),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector s = svd.singularValues();
        const double cut = std::max(opts.crossing_sigma, 1e-9);
        int rank = 0;
        for (int j = 0; j < s.size(); ++j)
            if (s(j) > cut) ++rank;
        ev.kernel_dim = n - rank;
        const Matrix p = frame.at(t0);
        ev.space = p * svd.matrixU().leftCols(rank); // J[t0] in tangent coordinates
        const Matrix g = metric.at(geo.point_at(t0));
        ev.complement = kernel_basis(Matrix(ev.space.transpose() * g));
        const SymmetricForm induced(ev.complement.transpose() * g * ev.complement,
                                    Defaults::rank_tol);
        ev.complement_signature = signature(induced);
        ev.degenerate = ev.complement_signature.n_zero > 0;
        return ev;
    }

    void run() {
        const auto& grid = geo.grid();
        const std::size_t m = grid.size();
        const double sigma_cut = 1e-6;

        // skip the initial tangency of Φ(t)[L_Q] with the vertical Lagrangian
        start_index = 0;
        while (start_index < m && kernel_dim_of(raw_frame(start_index), sigma_cut) > 0)
            ++start_index;
        if (start_index + 4 >= m)
            throw ResolutionError("q_maslov: the path never leaves the singular cycle");
        rep.start_skip = grid[start_index] - grid.front();
        rep.flow_drift = fl.max_drift;

        // restricted Maslov index through chart signatures
        std::vector<double> ts(grid.begin() + std::ptrdiff_t(start_index), grid.end());
        std::vector<LagrangianFrame> frames;
        frames.reserve(ts.size());
        for (std::size_t i = start_index; i < m; ++i)
            frames.emplace_back(raw_frame(i));
        index = maslov_index(LagrangianPath(std::move(ts), std::move(frames)),
                             LagrangianFrame::vertical(n), opts.maslov);
        rep.total_index = index;

        // crossing scan: sign changes of det plus refined σ-minima
        std::vector<double> smins(m), dets(m);
        for (std::size_t i = start_index; i < m; ++i) {
            const Matrix raw = raw_frame(i);
            smins[i] = smin(raw);
            dets[i] = det_vblock(raw);
        }
        const double t_tol = opts.t_tol_factor * (geo.b() - geo.a());
        std::vector<double> found;
        auto refine_bisect = [&](double lo, double hi, double flo) {
            while (hi - lo > t_tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = det_vblock(raw_frame_at(mid));
                if (flo * fm <= 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            return 0.5 * (lo + hi);
        };
        auto refine_min = [&](double lo, double hi) {
            while (hi - lo > t_tol) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (smin(raw_frame_at(m1)) < smin(raw_frame_at(m2))) hi = m2;
                else lo = m1;
            }
            return 0.5 * (lo + hi);
        };
        for (std::size_t i = start_index; i + 1 < m; ++i) {
            if (dets[i] * dets[i + 1] < 0.0) {
                const double t_hat = refine_bisect(grid[i], grid[i + 1], dets[i]);
                if (smin(raw_frame_at(t_hat)) < opts.crossing_sigma) found.push_back(t_hat);
            } else if (i > start_index && smins[i] < opts.prefilter && smins[i] <= smins[i - 1] &&
                       smins[i] <= smins[i + 1]) {
                const double t_hat = refine_min(grid[i - 1], grid[i + 1]);
                if (smin(raw_frame_at(t_hat)) < opts.crossing_sigma) found.push_back(t_hat);
            }
        }
        if (!found.empty() && kernel_dim_of(raw_frame(m - 1), sigma_cut) > 0) {
            // endpoint sitting on the singular cycle: keep only one instant there
        }
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end(),
                                [&](double a, double b) { return std::abs(a - b) < 2 * t_tol; }),
                    found.end());

        for (std::size_t j = 0; j < found.size(); ++j) {
            FocalInstant inst;
            inst.t = found[j];
            const Matrix raw = raw_frame_at(inst.t);
            const JacobiEvaluation ev = evaluate(inst.t, raw);
            inst.kernel_dim = std::max(ev.kernel_dim, 1);
            inst.degenerate = ev.degenerate;
            inst.contribution = HalfInt::whole(ev.complement_signature.sign());
            inst.endpoint = (geo.b() - inst.t) < 10.0 * std::max(t_tol, geo.step());
            if (j > 0 && inst.t - found[j - 1] < 10.0 * t_tol) inst.cluster = true;
            if (j + 1 < found.size() && found[j + 1] - inst.t < 10.0 * t_tol) inst.cluster = true;
            rep.instants.push_back(inst);
        }
    }
};

QMaslovAnalysis::QMaslovAnalysis(const MetricField& metric, const GeodesicPath& geo,
                                 const BoundaryData& bd, const FrameField& frame,
                                 QMaslovOptions opts)
    : impl_(std::make_unique<Impl>(metric, geo, bd, frame, opts)) {}

QMaslovAnalysis::~QMaslovAnalysis() = default;
QMaslovAnalysis::QMaslovAnalysis(QMaslovAnalysis&&) noexcept = default;

HalfInt QMaslovAnalysis::index() const { return impl_->index; }
const FocalReport& QMaslovAnalysis::report() const { return impl_->rep; }
double QMaslovAnalysis::flow_drift() const { return impl_->fl.max_drift; }
const std::vector<Matrix>& QMaslovAnalysis::flow_matrices() const { return impl_->fl.Phi; }
const SymplecticSystemData& QMaslovAnalysis::system() const { return impl_->sys; }

LagrangianFrame QMaslovAnalysis::path_frame(double t) const {
    return LagrangianFrame(impl_->raw_frame_at(t));
}

JacobiEvaluation QMaslovAnalysis::evaluate_at(double t0) const {
    return impl_->evaluate(t0, impl_->raw_frame_at(t0));
}

HalfInt q_maslov_index(const MetricField& metric, const GeodesicPath& geo, const BoundaryData& bd,
                       const FrameField& frame, const QMaslovOptions& opts) {
    return QMaslovAnalysis(metric, geo, bd, frame, opts).index();
}

FocalReport detect_focal_instants(const MetricField& metric, const GeodesicPath& geo,
                                  const BoundaryData& bd, const FrameField& frame,
                                  const QMaslovOptions& opts) {
    return QMaslovAnalysis(metric, geo, bd, frame, opts).report();
}

JacobiEvaluation jacobi_space_evaluation(const MetricField& metric, const GeodesicPath& geo,
                                         const BoundaryData& bd, const FrameField& frame,
                                         double t0, const QMaslovOptions& opts) {
    return QMaslovAnalysis(metric, geo, bd, frame, opts).evaluate_at(t0);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vector> field_cov_derivs(const MetricField& metric, const GeodesicPath& geo,
                                     const FieldAlongCurve& E) {
    if (E.has_derivs()) return E.cov_derivs;
    return covariant_derivative(metric, geo, E.values);
}

} // namespace

double index_form(const IndexFormContext& ctx, const FieldAlongCurve& E,
                  const FieldAlongCurve& F) {
    const MetricField& metric = *ctx.metric;
    const GeodesicPath& geo = *ctx.geo;
    const std::size_t m = geo.size();
    if (E.grid.size() != m || F.grid.size() != m)
        throw InvalidField("index_form: field grids do not match the geodesic");
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        scale = std::max({scale, E.values[i].norm(), F.values[i].norm()});
    if (E.values.back().norm() > ctx.tol * (1.0 + scale) ||
        F.values.back().norm() > ctx.tol * (1.0 + scale))
        throw InvalidField("index_form: fields must vanish at the final instant");
    // tangency at the initial instant, checked against an explicit frame
    if (ctx.tangent_frame.cols() > 0) {
        auto tangency_defect = [&](const Vector& v) {
            return (v -
                    ctx.tangent_frame * ctx.tangent_frame.colPivHouseholderQr().solve(v)).norm();
        };
        if (tangency_defect(E.values.front()) > ctx.tol * (1.0 + scale) ||
            tangency_defect(F.values.front()) > ctx.tol * (1.0 + scale))
            throw InvalidField("index_form: fields must start tangent to the submanifold");
    }

    const auto dE = field_cov_derivs(metric, geo, E);
    const auto dF = field_cov_derivs(metric, geo, F);
    std::vector<double> integrand(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Matrix g = metric.at(geo.point(i));
        const Matrix tidal = curvature_operator(metric, geo.point(i), geo.velocity(i));
        integrand[i] = dE[i].dot(g * dF[i]) - (tidal * E.values[i]).dot(g * F.values[i]);
    }
    double val = simpson(integrand, geo.step());
    if (ctx.tangent_frame.cols() > 0) {
        const Vector ce = ctx.tangent_frame.colPivHouseholderQr().solve(E.values.front());
        const Vector cf = ctx.tangent_frame.colPivHouseholderQr().solve(F.values.front());
        val -= ce.dot(ctx.shape_form * cf);
    }
    return val;
}

IndexIdentityResult verify_index_identity(const SubmersionSpec& spec, const GeodesicPath& geo,
                                          const SubmanifoldData& Pdata, const FieldAlongCurve& E,
                                          const FieldAlongCurve& F) {
    IndexIdentityResult out;
    const Vector p_a = geo.point(0);
    const Vector gdot_a = geo.velocity(0);

    IndexFormContext ctx_total;
    ctx_total.metric = &spec.total;
    ctx_total.geo = &geo;
    ctx_total.tangent_frame = lift_tangent_frame(spec, p_a, Pdata);
    ctx_total.shape_form = lifted_shape_form(spec, p_a, Pdata, gdot_a);
    out.lhs = index_form(ctx_total, E, F);

    const GeodesicPath base = project_curve(spec, geo);
    FieldAlongCurve Es = project_field(spec, geo, E);
    FieldAlongCurve Fs = project_field(spec, geo, F);
    IndexFormContext ctx_base;
    ctx_base.metric = &spec.base;
    ctx_base.geo = &base;
    ctx_base.tangent_frame = Pdata.tangent_frame;
    ctx_base.shape_form = Pdata.shape_form;
    out.base_term = index_form(ctx_base, Es, Fs);

    const FieldAlongCurve dE = derived_field(spec, geo, E);
    const FieldAlongCurve dF = derived_field(spec, geo, F);
    std::vector<double> integrand(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const Matrix g = spec.total.at(geo.point(i));
        integrand[i] = dE.values[i].dot(g * dF.values[i]);
    }
    out.correction = simpson(integrand, geo.step());
    out.residual = std::abs(out.lhs - out.base_term - out.correction);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

int endpoint_kernel_dim(const MetricField& metric, const GeodesicPath& geo, bool* near_cut) {
    const FrameField frame =
        parallel_transport_frame(metric, geo, Matrix::Identity(metric.dim, metric.dim));
    const auto sys = build_geodesic_system(metric, geo, frame);
    const auto fl = flow(assemble_symplectic_system(sys), geo.grid());
    const Matrix b_block = fl.Phi.back().topRightCorner(metric.dim, metric.dim);
    Eigen::JacobiSVD<Matrix> svd(b_block);
    const Vector s = svd.singularValues();
    const double cut = 1e-6 * std::max(1.0, s(0));
    int k = 0;
    for (int j = 0; j < s.size(); ++j) {
        if (s(j) < cut) ++k;
        if (near_cut && s(j) > 0.1 * cut && s(j) < 10.0 * cut) *near_cut = true;
    }
    return k;
}

} // namespace

ConjugateCounts conjugate_counts(const SubmersionSpec& spec, const GeodesicPath& geo) {
    ConjugateCounts out;
    bool flag_total = false, flag_base = false;
    out.omega = endpoint_kernel_dim(spec.total, geo, &flag_total);
    const GeodesicPath base = project_curve(spec, geo);
    out.omega_delta = endpoint_kernel_dim(spec.base, base, &flag_base);
    out.omega_n = out.omega - out.omega_delta;
    out.flagged = flag_total || flag_base;
    return out;
}

int causal_index(const MetricField& metric, const GeodesicPath& geo, const QMaslovOptions& opts) {
    const int n = metric.dim;
    const Vector x_a = geo.point(0);
    const Vector v_a = geo.velocity(0);
    const Matrix g_a = metric.at(x_a);
    const double energy = v_a.dot(g_a * v_a);
    const double scale = v_a.squaredNorm() * g_a.norm();
    const bool lightlike = std::abs(energy) < 1e-9 * std::max(1.0, scale);
    if (!lightlike && energy > 0.0)
        throw InvalidArgument("causal_index: geodesic is spacelike");

    // adapted start frame: γ̇ first, then (for lightlike) a null partner with
    // pairing −1, then a g-orthonormal spacelike completion
    std::vector<Vector> basis;
    Vector b0 = v_a;
    if (!lightlike) b0 /= std::sqrt(-energy);
    basis.push_back(b0);
    if (lightlike) {
        int pick = 0;
        double best = 0.0;
        for (int i = 0; i < n; ++i) {
            const double pr = std::abs(Vector::Unit(n, i).dot(g_a * b0));
            if (pr > best) { best = pr; pick = i; }
        }
        Vector w = Vector::Unit(n, pick) / -(Vector::Unit(n, pick).dot(g_a * b0));
        Vector b1 = w + 0.5 * w.dot(g_a * w) * b0;
        basis.push_back(b1);
    }
    for (int i = 0; i < n && int(basis.size()) < n; ++i) {
        Vector cand = Vector::Unit(n, i);
        // remove pairings with the basis so far
        for (std::size_t rep = 0; rep < 3; ++rep) {
            if (!lightlike) {
                cand -= (cand.dot(g_a * basis[0]) / basis[0].dot(g_a * basis[0])) * basis[0];
            } else {
                // null pair: subtract via the dual pairing g(b0,b1) = −1
                const double c0 = cand.dot(g_a * basis[1]) / basis[1].dot(g_a * basis[0]);
                const double c1 = cand.dot(g_a * basis[0]) / basis[0].dot(g_a * basis[1]);
                cand -= c0 * basis[0] + c1 * basis[1];
            }
            for (std::size_t j = lightlike ? 2 : 1; j < basis.size(); ++j)
                cand -= (cand.dot(g_a * basis[j]) / basis[j].dot(g_a * basis[j])) * basis[j];
        }
        const double nn = cand.dot(g_a * cand);
        if (nn < 1e-10) continue; // degenerate with the span so far
        basis.push_back(cand / std::sqrt(nn));
    }
    if (int(basis.size()) != n)
        throw InvalidArgument("causal_index: failed to build an adapted frame");
    Matrix p0(n, n);
    for (int i = 0; i < n; ++i) p0.col(i) = basis[std::size_t(i)];

    const FrameField frame = parallel_transport_frame(metric, geo, p0);
    const auto sys = build_geodesic_system(metric, geo, frame);

    // screen block: strip γ̇ (and the null partner for lightlike geodesics)
    const int drop = lightlike ? 2 : 1;
    const int r = n - drop;
    if (r == 0) return 0;
    SymplecticSystemData red;
    red.grid = sys.grid;
    red.gtilde.resize(sys.grid.size());
    red.varpi.resize(sys.grid.size());
    red.Rtilde.resize(sys.grid.size());
    for (std::size_t i = 0; i < sys.grid.size(); ++i) {
        red.gtilde[i] = sys.gtilde[i].bottomRightCorner(r, r);
        red.varpi[i] = sys.varpi[i].bottomRightCorner(r, r);
        red.Rtilde[i] = sys.Rtilde[i].bottomRightCorner(r, r);
    }
    const auto fl = flow(assemble_symplectic_system(red), red.grid);

    // conjugate instants in the open interval: kernel of the upper-right block
    const double t_tol = opts.t_tol_factor * (geo.b() - geo.a());
    auto det_b = [&](const Matrix& phi) {
        return Matrix(phi.topRightCorner(r, r)).determinant();
    };
    const auto Xred = assemble_symplectic_system(red);
    auto phi_at = [&](double t) {
        const auto& grid = red.grid;
        const double h = geo.step();
        auto i = std::size_t(std::min((t - grid.front()) / h, double(grid.size() - 1)));
        while (i > 0 && grid[i] > t) --i;
        Matrix phi = fl.Phi[i];
        const double span = t - grid[i];
        if (span > 1e-14) {
            const int sub = 4;
            const double dt = span / sub;
            for (int s = 0; s < sub; ++s) {
                const double ts = grid[i] + s * dt;
                const Matrix k1 = Xred(ts) * phi;
                const Matrix k2 = Xred(ts + 0.5 * dt) * (phi + 0.5 * dt * k1);
                const Matrix k3 = Xred(ts + 0.5 * dt) * (phi + 0.5 * dt * k2);
                const Matrix k4 = Xred(ts + dt) * (phi + dt * k3);
                phi = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        return phi;
    };

    int count = 0;
    std::vector<double> smins(red.grid.size());
    std::vector<double> dets(red.grid.size());
    for (std::size_t i = 0; i < red.grid.size(); ++i) {
        Eigen::JacobiSVD<Matrix> svd(Matrix(fl.Phi[i].topRightCorner(r, r)));
        smins[i] = svd.singularValues()(r - 1);
        dets[i] = det_b(fl.Phi[i]);
    }
    std::vector<double> found;
    for (std::size_t i = 1; i + 1 < red.grid.size(); ++i) {
        const bool sign_change = dets[i] * dets[i + 1] < 0.0;
        const bool local_min = smins[i] < opts.prefilter && smins[i] <= smins[i - 1] &&
                               smins[i] <= smins[i + 1];
        if (!sign_change && !local_min) continue;
        double lo = red.grid[i - (local_min ? 1 : 0)];
        double hi = red.grid[i + 1];
        if (sign_change) {
            double flo = dets[i];
            lo = red.grid[i];
            while (hi - lo > t_tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = det_b(phi_at(mid));
                if (flo * fm <= 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
        } else {
            while (hi - lo > t_tol) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                Eigen::JacobiSVD<Matrix> s1(Matrix(phi_at(m1).topRightCorner(r, r)));
                Eigen::JacobiSVD<Matrix> s2(Matrix(phi_at(m2).topRightCorner(r, r)));
                if (s1.singularValues()(r - 1) < s2.singularValues()(r - 1)) hi = m2;
                else lo = m1;
            }
        }
        const double t_hat = 0.5 * (lo + hi);
        if (t_hat <= geo.a() + 10 * t_tol || t_hat >= geo.b() - 10 * std::max(t_tol, geo.step()))
            continue; // open interval only
        Eigen::JacobiSVD<Matrix> svd(Matrix(phi_at(t_hat).topRightCorner(r, r)));
        const Vector s = svd.singularValues();
        int k = 0;
        for (int j = 0; j < s.size(); ++j)
            if (s(j) < opts.crossing_sigma * std::max(1.0, s(0))) ++k;
        if (k > 0 && (found.empty() || t_hat - found.back() > 10 * t_tol)) {
            found.push_back(t_hat);
            count += k;
        }
    }
    return count;
}

} // namespace submaslov
