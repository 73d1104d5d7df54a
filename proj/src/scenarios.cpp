#include "submaslov/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace submaslov {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Quat {
    double w, x, y, z;
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
    Quat conj() const { return {w, -x, -y, -z}; }
};

} // namespace

MetricField euclidean_metric(int n) {
    MetricField m;
    m.dim = n;
    m.index = 0;
    m.eval = [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); };
    m.christoffel = [n](const Vector&) {
        Tensor3 g;
        g.comps.assign(std::size_t(n), Matrix::Zero(n, n));
        return g;
    };
    m.deriv = [n](const Vector&) {
        return std::vector<Matrix>(std::size_t(n), Matrix::Zero(n, n));
    };
    return m;
}

MetricField minkowski_metric(int n) {
    MetricField m = euclidean_metric(n);
    m.index = 1;
    m.eval = [n](const Vector&) {
        Matrix g = Matrix::Identity(n, n);
        g(0, 0) = -1.0;
        return g;
    };
    return m;
}

MetricField sphere_stereographic(int dim, double radius) {
    MetricField m;
    m.dim = dim;
    m.index = 0;
    const double r2 = radius * radius;
    m.eval = [dim, r2](const Vector& u) {
        const double denom = r2 + u.squaredNorm();
        const double factor = 4.0 * r2 * r2 / (denom * denom);
        return Matrix(factor * Matrix::Identity(dim, dim));
    };
    // conformal metric e^{2f} δ with f = log(2r²) − log(r² + |u|²)
    m.christoffel = [dim, r2](const Vector& u) {
        const Vector df = -2.0 * u / (r2 + u.squaredNorm());
        Tensor3 g;
        g.comps.assign(std::size_t(dim), Matrix::Zero(dim, dim));
        for (int k = 0; k < dim; ++k)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    double v = 0.0;
                    if (k == i) v += df(j);
                    if (k == j) v += df(i);
                    if (i == j) v -= df(k);
                    g.comps[std::size_t(k)](i, j) = v;
                }
        return g;
    };
    m.deriv = [dim, r2](const Vector& u) {
        const double denom = r2 + u.squaredNorm();
        const double factor = 4.0 * r2 * r2 / (denom * denom);
        std::vector<Matrix> dg;
        dg.resize(std::size_t(dim));
        for (int k = 0; k < dim; ++k)
            dg[std::size_t(k)] = (-4.0 * u(k) / denom) * factor * Matrix::Identity(dim, dim);
        return dg;
    };
    m.domain = [](const Vector& u) { return u.norm() < 1e4; };
    return m;
}

MetricField product_metric(const MetricField& first, const MetricField& second) {
    MetricField m;
    const int n1 = first.dim, n2 = second.dim;
    m.dim = n1 + n2;
    m.index = first.index + second.index;
    m.eval = [first, second, n1, n2](const Vector& x) {
        Matrix g = Matrix::Zero(n1 + n2, n1 + n2);
        g.topLeftCorner(n1, n1) = first.eval(x.head(n1));
        g.bottomRightCorner(n2, n2) = second.eval(x.tail(n2));
        return g;
    };
    if (first.christoffel && second.christoffel) {
        m.christoffel = [first, second, n1, n2](const Vector& x) {
            const Tensor3 g1 = first.christoffel(x.head(n1));
            const Tensor3 g2 = second.christoffel(x.tail(n2));
            Tensor3 g;
            g.comps.assign(std::size_t(n1 + n2), Matrix::Zero(n1 + n2, n1 + n2));
            for (int k = 0; k < n1; ++k)
                g.comps[std::size_t(k)].topLeftCorner(n1, n1) = g1.comps[std::size_t(k)];
            for (int k = 0; k < n2; ++k)
                g.comps[std::size_t(n1 + k)].bottomRightCorner(n2, n2) = g2.comps[std::size_t(k)];
            return g;
        };
    }
    if (first.deriv && second.deriv) {
        m.deriv = [first, second, n1, n2](const Vector& x) {
            const auto d1 = first.deriv(x.head(n1));
            const auto d2 = second.deriv(x.tail(n2));
            std::vector<Matrix> dg(std::size_t(n1 + n2), Matrix::Zero(n1 + n2, n1 + n2));
            for (int k = 0; k < n1; ++k) dg[std::size_t(k)].topLeftCorner(n1, n1) = d1[std::size_t(k)];
            for (int k = 0; k < n2; ++k)
                dg[std::size_t(n1 + k)].bottomRightCorner(n2, n2) = d2[std::size_t(k)];
            return dg;
        };
    }
    if (first.domain || second.domain) {
        m.domain = [first, second, n1, n2](const Vector& x) {
            return first.in_domain(x.head(n1)) && second.in_domain(x.tail(n2));
        };
    }
    return m;
}

SubmersionSpec product_submersion(const MetricField& base, const MetricField& fiber) {
    SubmersionSpec spec;
    spec.total = product_metric(base, fiber);
    spec.base = base;
    const int m = base.dim, n = spec.total.dim;
    spec.proj = [m](const Vector& x) { return Vector(x.head(m)); };
    spec.dproj = [m, n](const Vector&) {
        Matrix d = Matrix::Zero(m, n);
        d.leftCols(m) = Matrix::Identity(m, m);
        return d;
    };
    return spec;
}

SubmersionSpec stationary_spacetime(const MetricField& g0, const ScalarField& beta,
                                    const PatchVectorField& delta) {
    const int m = g0.dim;
    const int n = m + 1;
    auto beta_checked = [beta](const Vector& u) {
        const double b = beta.value(u);
        if (b <= 0.0)
            throw InvalidStationaryData("stationary_spacetime: beta must be positive");
        return b;
    };

    SubmersionSpec spec;
    spec.total.dim = n;
    spec.total.index = 1;
    spec.total.eval = [g0, beta_checked, delta, m, n](const Vector& x) {
        const Vector u = x.head(m);
        const Matrix G0 = g0.eval(u);
        const Vector w = G0 * delta.value(u);
        Matrix g = Matrix::Zero(n, n);
        g.topLeftCorner(m, m) = G0;
        g.block(0, m, m, 1) = w;
        g.block(m, 0, 1, m) = w.transpose();
        g(m, m) = -beta_checked(u);
        return g;
    };
    if (g0.deriv && beta.gradient && delta.jacobian) {
        spec.total.deriv = [g0, beta, delta, m, n](const Vector& x) {
            const Vector u = x.head(m);
            const Matrix G0 = g0.eval(u);
            const auto dG0 = g0.deriv(u);
            const Vector d = delta.value(u);
            const Matrix J = delta.jacobian(u);
            const Vector db = beta.gradient(u);
            std::vector<Matrix> out(std::size_t(n), Matrix::Zero(n, n));
            for (int i = 0; i < m; ++i) {
                const Vector dw = dG0[std::size_t(i)] * d + G0 * J.col(i);
                out[std::size_t(i)].topLeftCorner(m, m) = dG0[std::size_t(i)];
                out[std::size_t(i)].block(0, m, m, 1) = dw;
                out[std::size_t(i)].block(m, 0, 1, m) = dw.transpose();
                out[std::size_t(i)](m, m) = -db(i);
            }
            return out;
        };
    }
    spec.total.domain = [g0, m](const Vector& x) { return g0.in_domain(x.head(m)); };

    spec.base.dim = m;
    spec.base.index = 0;
    spec.base.eval = [g0, beta_checked, delta, m](const Vector& u) {
        const Matrix G0 = g0.eval(u);
        const Vector w = G0 * delta.value(u);
        return Matrix(G0 + w * w.transpose() / beta_checked(u));
    };
    if (g0.deriv && beta.gradient && delta.jacobian) {
        spec.base.deriv = [g0, beta, delta, m](const Vector& u) {
            const Matrix G0 = g0.eval(u);
            const auto dG0 = g0.deriv(u);
            const Vector d = delta.value(u);
            const Matrix J = delta.jacobian(u);
            const double b = beta.value(u);
            const Vector db = beta.gradient(u);
            const Vector w = G0 * d;
            std::vector<Matrix> out;
            out.resize(std::size_t(m));
            for (int i = 0; i < m; ++i) {
                const Vector dw = dG0[std::size_t(i)] * d + G0 * J.col(i);
                out[std::size_t(i)] = dG0[std::size_t(i)] +
                                      (dw * w.transpose() + w * dw.transpose()) / b -
                                      (db(i) / (b * b)) * (w * w.transpose());
            }
            return out;
        };
    }
    spec.base.domain = g0.domain;

    spec.proj = [m](const Vector& x) { return Vector(x.head(m)); };
    spec.dproj = [m, n](const Vector&) {
        Matrix dp = Matrix::Zero(m, n);
        dp.leftCols(m) = Matrix::Identity(m, m);
        return dp;
    };
    return spec;
}

namespace {

// chart ℝ³ → S³ ⊂ ℝ⁴: pole on the i-axis, u = (x₀,x₂,x₃)/(1−x₁)
Quat embed_s3(const Vector& u) {
    const double s = u.squaredNorm();
    const double c = 1.0 / (1.0 + s);
    return {2.0 * u(0) * c, (s - 1.0) * c, 2.0 * u(1) * c, 2.0 * u(2) * c};
}

// chart value on S²(1/2): pole on the b₁-axis, w = (b₀,b₂)/(1 − 2b₁)
double hopf_base_denominator(const Vector& u) {
    const Quat q = embed_s3(u);
    const Quat r = q * Quat{0, 1, 0, 0} * q.conj();
    return 1.0 - r.y; // 1 − b₁/r with b = r·(x,y,z)/|…|, r = 1/2
}

} // namespace

SubmersionSpec hopf_fibration() {
    SubmersionSpec spec;
    spec.total = sphere_stereographic(3, 1.0);
    spec.base = sphere_stereographic(2, 0.5);
    spec.total.domain = [](const Vector& u) {
        return u.norm() < 50.0 && hopf_base_denominator(u) > 0.05;
    };
    spec.proj = [](const Vector& u) {
        const Quat q = embed_s3(u);
        const Quat r = q * Quat{0, 1, 0, 0} * q.conj();
        // b = (r.x, r.y, r.z)/2 on S²(1/2); chart from the pole on the b₁ axis
        const double denom = 1.0 - r.y;
        Vector w(2);
        w << 0.5 * r.x / denom, 0.5 * r.z / denom;
        return w;
    };
    return spec;
}

SubmersionSpec kaluza_klein_toy(const MetricField& base, double fiber_scale,
                                const PatchVectorField& tilt) {
    if (base.index != 1)
        throw InvalidKKData("kaluza_klein_toy: base metric must be Lorentzian");
    if (fiber_scale <= 0.0) throw InvalidKKData("kaluza_klein_toy: fiber scale must be positive");
    const int m = base.dim;
    const int n = m + 1;
    const double l2 = fiber_scale * fiber_scale;

    SubmersionSpec spec;
    spec.total.dim = n;
    spec.total.index = 1;
    spec.total.eval = [base, tilt, l2, m, n](const Vector& x) {
        const Vector u = x.head(m);
        const Vector w = tilt.value(u);
        Matrix g = Matrix::Zero(n, n);
        g.topLeftCorner(m, m) = base.eval(u) + l2 * w * w.transpose();
        g.block(0, m, m, 1) = l2 * w;
        g.block(m, 0, 1, m) = l2 * w.transpose();
        g(m, m) = l2;
        return g;
    };
    if (base.deriv && tilt.jacobian) {
        spec.total.deriv = [base, tilt, l2, m, n](const Vector& x) {
            const Vector u = x.head(m);
            const Vector w = tilt.value(u);
            const Matrix J = tilt.jacobian(u);
            const auto dh = base.deriv(u);
            std::vector<Matrix> out(std::size_t(n), Matrix::Zero(n, n));
            for (int i = 0; i < m; ++i) {
                const Vector dw = J.col(i);
                out[std::size_t(i)].topLeftCorner(m, m) =
                    dh[std::size_t(i)] + l2 * (dw * w.transpose() + w * dw.transpose());
                out[std::size_t(i)].block(0, m, m, 1) = l2 * dw;
                out[std::size_t(i)].block(m, 0, 1, m) = l2 * dw.transpose();
            }
            return out;
        };
    }
    spec.total.domain = [base, m](const Vector& x) { return base.in_domain(x.head(m)); };
    spec.base = base;
    spec.proj = [m](const Vector& x) { return Vector(x.head(m)); };
    spec.dproj = [m, n](const Vector&) {
        Matrix dp = Matrix::Zero(m, n);
        dp.leftCols(m) = Matrix::Identity(m, m);
        return dp;
    };
    return spec;
}

// ---------------------------------------------------------------------------

const CheckRecord* ScenarioResult::find_check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

SubmanifoldData base_point_data(const SubmersionSpec& spec, const Vector& x0) {
    SubmanifoldData P;
    P.point = spec.proj(x0);
    P.tangent_frame = Matrix(spec.base.dim, 0);
    P.shape_form = Matrix(0, 0);
    return P;
}

bool is_causal(const SubmersionSpec& spec, const GeodesicSeed& seed) {
    if (spec.total.index != 1) return false;
    const Matrix g = spec.total.at(seed.x0);
    return seed.v0.dot(g * seed.v0) < 1e-9;
}

} // namespace

ScenarioResult verify_main_theorem(const SubmersionSpec& spec, const GeodesicSeed& seed,
                                   const SubmanifoldData& Pdata, const VerifyOptions& opts) {
    ScenarioResult res;
    spec.validate_at(seed.x0);

    // integrate the total-space geodesic; a patch exit shortens the interval
    double b = seed.b;
    std::optional<GeodesicPath> geo;
    for (int attempt = 0; attempt < 4 && !geo; ++attempt) {
        try {
            geo.emplace(integrate_geodesic(spec.total, seed.x0, seed.v0, seed.a, b, seed.steps));
        } catch (const PatchExit& e) {
            b = seed.a + 0.9 * (e.t - seed.a);
            res.interval_shortened = true;
            if (b - seed.a < 0.05 * (seed.b - seed.a)) throw;
        }
    }
    if (!geo) throw PatchExit(b);
    res.effective_end = b;

    const auto diag = lift_geodesic_check(spec, *geo);
    res.max_verticality = diag.max_verticality;
    res.projected_residual = diag.projected_residual;

    const GeodesicPath base_geo = project_curve(spec, *geo);
    const int n = spec.total.dim, m = spec.base.dim;

    // identity trivializations at the start; boundary data in those coordinates
    const FrameField frame_total =
        parallel_transport_frame(spec.total, *geo, Matrix::Identity(n, n));
    const FrameField frame_base =
        parallel_transport_frame(spec.base, base_geo, Matrix::Identity(m, m));

    BoundaryData bd_total;
    bd_total.tangent_frame = lift_tangent_frame(spec, geo->point(0), Pdata);
    bd_total.shape = SymmetricForm(lifted_shape_form(spec, geo->point(0), Pdata,
                                                     geo->velocity(0)));
    BoundaryData bd_base;
    bd_base.tangent_frame = Pdata.tangent_frame;
    bd_base.shape = SymmetricForm(Pdata.shape_form.size() > 0 ? Pdata.shape_form : Matrix(0, 0));

    QMaslovAnalysis total(spec.total, *geo, bd_total, frame_total, opts.qopts);
    QMaslovAnalysis base(spec.base, base_geo, bd_base, frame_base, opts.qopts);
    res.mu_total = total.index();
    res.mu_base = base.index();
    res.report_total = total.report();
    res.report_base = base.report();

    auto add_check = [&](const std::string& name, bool pass, double value, double threshold) {
        res.checks.push_back({name, pass, value, threshold});
    };
    add_check("index-equality", res.mu_total == res.mu_base,
              std::abs(res.mu_total.value() - res.mu_base.value()), 0.0);
    add_check("horizontality", res.max_verticality < opts.horizontality_tol, res.max_verticality,
              opts.horizontality_tol);
    add_check("projected-geodesic", res.projected_residual < opts.projected_residual_tol,
              res.projected_residual, opts.projected_residual_tol);
    const double drift = std::max(res.report_total.flow_drift, res.report_base.flow_drift);
    add_check("flow-drift", drift < opts.flow_drift_tol, drift, opts.flow_drift_tol);

    // per-instant correspondence where both sides are clean
    bool pairing_ok = res.report_total.instants.size() == res.report_base.instants.size();
    double worst_gap = 0.0;
    if (pairing_ok) {
        for (std::size_t i = 0; i < res.report_total.instants.size(); ++i) {
            const auto& it = res.report_total.instants[i];
            const auto& ib = res.report_base.instants[i];
            worst_gap = std::max(worst_gap, std::abs(it.t - ib.t));
            if (!it.degenerate && !ib.degenerate && !(it.contribution == ib.contribution))
                pairing_ok = false;
        }
        pairing_ok = pairing_ok && worst_gap < opts.instant_match_tol;
    }
    add_check("per-instant", pairing_ok, worst_gap, opts.instant_match_tol);

    if (!res.report_total.any_flags())
        add_check("sum-contributions-total",
                  res.report_total.contribution_sum() == res.report_total.total_index,
                  res.report_total.contribution_sum().value(), 0.0);
    if (!res.report_base.any_flags())
        add_check("sum-contributions-base",
                  res.report_base.contribution_sum() == res.report_base.total_index,
                  res.report_base.contribution_sum().value(), 0.0);

    if (opts.causal_checks && is_causal(spec, seed)) {
        res.counts = conjugate_counts(spec, *geo);
        res.i_total = causal_index(spec.total, *geo, opts.qopts);
        res.i_base = causal_index(spec.base, base_geo, opts.qopts);
        add_check("causal-inequality", res.i_base >= res.i_total + res.counts.omega_n,
                  double(res.i_base - res.i_total - res.counts.omega_n), 0.0);
    }

    res.pass = std::all_of(res.checks.begin(), res.checks.end(),
                           [](const CheckRecord& c) { return c.pass; });
    return res;
}

double StructuralResiduals::max() const {
    return std::max({covariant_identity, derivative_identity, tensor_skew, tensor_t_symmetric,
                     tensor_a_alternating, sff_combination, compatibility});
}

StructuralResiduals structural_identity_checks(const SubmersionSpec& spec,
                                               const GeodesicPath& geo, int samples,
                                               std::mt19937_64& rng) {
    StructuralResiduals out;
    const int n = spec.total.dim;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> interior(geo.a() + 0.05 * (geo.b() - geo.a()),
                                                    geo.b() - 0.05 * (geo.b() - geo.a()));
    auto rand_vec = [&](int d) {
        Vector v(d);
        for (int i = 0; i < d; ++i) v(i) = unit(rng);
        return v;
    };

    const GeodesicPath base_geo = project_curve(spec, geo);
    const double hfd = 1e-5;

    for (int s = 0; s < samples; ++s) {
        const double t = interior(rng);
        const Vector p = geo.point_at(t);
        const Vector xdot = geo.velocity_at(t);
        const auto pr = projectors(spec, p);
        const Matrix g = spec.total.at(p);

        // analytic random field along the geodesic near t
        const Vector c0 = rand_vec(n), c1 = rand_vec(n), c2 = rand_vec(n);
        const double om1 = 1.0 + unit(rng), om2 = 2.0 + unit(rng);
        auto field = [&](double s_) {
            return Vector(c0 + std::sin(om1 * s_) * c1 + std::cos(om2 * s_) * c2);
        };
        auto dfield = [&](double s_) {
            return Vector(om1 * std::cos(om1 * s_) * c1 - om2 * std::sin(om2 * s_) * c2);
        };
        const Vector E = field(t);
        const Tensor3 gamma = christoffel(spec.total, p);
        const Vector DE = dfield(t) + gamma.contract(xdot, E);
        const Vector H = pr.horiz * E;
        const Vector V = pr.vert * E;
        const Vector vd = pr.vert * xdot;  // ≈ 0 on horizontal geodesics
        const Vector hd = pr.horiz * xdot;

        // base-side covariant derivative of the projected field
        auto estar = [&](double s_) {
            const Vector q = geo.point_at(s_);
            return Vector(spec.dproj_at(q) * field(s_));
        };
        const Vector es = estar(t);
        const Vector des = (estar(t + hfd) - estar(t - hfd)) / (2.0 * hfd);
        const Tensor3 gamma_b = christoffel(spec.base, spec.proj(p));
        const Vector DEs = des + gamma_b.contract(base_geo.velocity_at(t), es);
        const Vector DEs_lift = horizontal_lift_vector(spec, p, DEs);

        // split identity for DE/dt
        const Vector horiz_res = pr.horiz * DE - DEs_lift - tensor_A(spec, p, H, vd) -
                                 tensor_A(spec, p, hd, V) - tensor_T(spec, p, vd, V);
        auto vpart = [&](double s_) {
            return Vector(projectors(spec, geo.point_at(s_)).vert * field(s_));
        };
        const Vector dV = (vpart(t + hfd) - vpart(t - hfd)) / (2.0 * hfd) +
                          gamma.contract(xdot, V);
        const Vector vert_res = pr.vert * DE - tensor_A(spec, p, hd, H) -
                                tensor_T(spec, p, vd, H) - pr.vert * dV;
        out.covariant_identity =
            std::max({out.covariant_identity, horiz_res.norm(), vert_res.norm()});

        // derived-field identity on horizontal geodesics
        const Vector derived = pr.vert * dV - tensor_T(spec, p, V, xdot) +
                               2.0 * tensor_A(spec, p, xdot, H);
        const Vector edea = DE - DEs_lift - tensor_A(spec, p, xdot, V) +
                            tensor_A(spec, p, xdot, H) - tensor_T(spec, p, V, xdot) - derived;
        out.derivative_identity = std::max(out.derivative_identity, edea.norm());

        // pointwise tensor symmetries
        const Vector e = rand_vec(n), f = rand_vec(n), w = rand_vec(n);
        const double skew_t = (tensor_T(spec, p, e, f).dot(g * w) +
                               f.dot(g * tensor_T(spec, p, e, w)));
        const double skew_a = (tensor_A(spec, p, e, f).dot(g * w) +
                               f.dot(g * tensor_A(spec, p, e, w)));
        out.tensor_skew = std::max({out.tensor_skew, std::abs(skew_t), std::abs(skew_a)});

        const Vector v1 = pr.vert * e, v2 = pr.vert * f;
        out.tensor_t_symmetric =
            std::max(out.tensor_t_symmetric,
                     (tensor_T(spec, p, v1, v2) - tensor_T(spec, p, v2, v1)).norm());
        const Vector x1 = pr.horiz * e, x2 = pr.horiz * f;
        out.tensor_a_alternating =
            std::max(out.tensor_a_alternating,
                     (tensor_A(spec, p, x1, x2) + tensor_A(spec, p, x2, x1)).norm());

        const Vector wh = pr.horiz * w;
        out.sff_combination =
            std::max(out.sff_combination,
                     (second_fundamental_form_distribution(spec, p, e, wh) -
                      tensor_A(spec, p, e, wh) - tensor_T(spec, p, e, wh)).norm());
    }

    const FrameField frame = parallel_transport_frame(spec.total, geo, Matrix::Identity(n, n));
    const auto sys = build_geodesic_system(spec.total, geo, frame);
    out.compatibility = sys.compatibility_residual();
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> builtin_scenario_names() {
    return {"flat-product", "hopf", "stationary-s2", "stationary-tilted", "kk-toy", "kk-product"};
}

Scenario builtin_scenario(const std::string& name, int steps) {
    Scenario sc;
    sc.name = name;
    if (name == "flat-product") {
        sc.spec = product_submersion(euclidean_metric(2), euclidean_metric(1));
        sc.seed.x0 = Vector::Zero(3);
        sc.seed.v0 = Vector::Zero(3);
        sc.seed.v0(0) = 1.0;
        sc.seed.a = 0.0;
        sc.seed.b = 3.0;
    } else if (name == "hopf") {
        sc.spec = hopf_fibration();
        sc.seed.x0 = Vector(3);
        sc.seed.x0 << 1.0, 0.0, 0.0;
        sc.seed.v0 = Vector(3);
        sc.seed.v0 << 0.0, 1.0, 0.0;
        sc.seed.a = 0.0;
        sc.seed.b = kPi + 0.2;
    } else if (name == "stationary-s2") {
        ScalarField beta{[](const Vector&) { return 1.0; },
                         [](const Vector& u) { return Vector(Vector::Zero(u.size())); }};
        PatchVectorField delta{[](const Vector& u) { return Vector(Vector::Zero(u.size())); },
                               [](const Vector& u) {
                                   return Matrix(Matrix::Zero(u.size(), u.size()));
                               }};
        sc.spec = stationary_spacetime(sphere_stereographic(2, 1.0), beta, delta);
        sc.seed.x0 = Vector(3);
        sc.seed.x0 << 1.0, 0.0, 0.0; // equator point, τ = 0
        sc.seed.v0 = Vector(3);
        sc.seed.v0 << 0.0, 1.0, 0.0; // spacelike, orthogonal to ∂_τ
        sc.seed.a = 0.0;
        sc.seed.b = 2.0 * kPi + 0.3;
    } else if (name == "stationary-tilted") {
        ScalarField beta{[](const Vector& u) { return 1.2 + 0.1 * std::sin(u(0)); },
                         [](const Vector& u) {
                             Vector g(2);
                             g << 0.1 * std::cos(u(0)), 0.0;
                             return g;
                         }};
        PatchVectorField delta{[](const Vector& u) {
                                   Vector d(2);
                                   d << -0.3 * u(1), 0.3 * u(0);
                                   return d;
                               },
                               [](const Vector&) {
                                   Matrix j(2, 2);
                                   j << 0.0, -0.3, 0.3, 0.0;
                                   return j;
                               }};
        sc.spec = stationary_spacetime(sphere_stereographic(2, 1.0), beta, delta);
        sc.seed.x0 = Vector(3);
        sc.seed.x0 << 1.0, 0.0, 0.0;
        // horizontal spacelike seed: ξ normalized in the base metric, τ̇ from
        // g(γ̇, ∂_τ) = 0
        const Vector u0 = sc.seed.x0.head(2);
        Vector xi(2);
        xi << 0.0, 1.0;
        const Matrix gt = sc.spec.base.at(u0);
        xi /= std::sqrt(xi.dot(gt * xi));
        const Matrix g0 = sphere_stereographic(2, 1.0).eval(u0);
        Vector d0(2);
        d0 << -0.3 * u0(1), 0.3 * u0(0);
        const double tau_dot = d0.dot(g0 * xi) / (1.2 + 0.1 * std::sin(u0(0)));
        sc.seed.v0 = Vector(3);
        sc.seed.v0 << xi(0), xi(1), tau_dot;
        sc.seed.a = 0.0;
        sc.seed.b = 2.0 * kPi;
    } else if (name == "kk-toy" || name == "kk-product") {
        const MetricField base = product_metric(minkowski_metric(1), sphere_stereographic(2, 1.0));
        const double tilt_strength = (name == "kk-toy") ? 0.2 : 0.0;
        PatchVectorField tilt{[tilt_strength](const Vector& x) {
                                  Vector w(3);
                                  w << 0.0, -tilt_strength * x(2), tilt_strength * x(1);
                                  return w;
                              },
                              [tilt_strength](const Vector&) {
                                  Matrix j = Matrix::Zero(3, 3);
                                  j(1, 2) = -tilt_strength;
                                  j(2, 1) = tilt_strength;
                                  return j;
                              }};
        sc.spec = kaluza_klein_toy(base, 0.7, tilt);
        sc.seed.x0 = Vector(4);
        sc.seed.x0 << 0.0, 1.0, 0.0, 0.0; // (τ, u, θ)
        Vector xi(3);                      // timelike base direction
        xi << std::sqrt(1.2), 0.0, 1.0;
        const double omega_xi = tilt.value(sc.seed.x0.head(3)).dot(xi);
        sc.seed.v0 = Vector(4);
        sc.seed.v0 << xi(0), xi(1), xi(2), -omega_xi;
        sc.seed.a = 0.0;
        sc.seed.b = 2.0 * kPi + 0.4;
        sc.causal = true;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    sc.seed.steps = steps;
    sc.base_P = base_point_data(sc.spec, sc.seed.x0);
    return sc;
}

Scenario random_stationary_scenario(std::uint64_t case_seed, int steps, std::string* config_text) {
    std::mt19937_64 rng(case_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const bool round_based = (rng() % 5) != 0; // mostly perturbed spheres

    // base factor with a bounded relative trig perturbation
    const double amp = 0.05 + 0.05 * std::abs(unit(rng));
    Matrix sym1(2, 2), sym2(2, 2);
    sym1 << unit(rng), unit(rng), 0.0, unit(rng);
    sym1 = 0.5 * (sym1 + sym1.transpose()).eval();
    sym2 << unit(rng), unit(rng), 0.0, unit(rng);
    sym2 = 0.5 * (sym2 + sym2.transpose()).eval();
    const double k1 = 0.5 + 0.5 * std::abs(unit(rng));
    const double k2 = 0.5 + 0.5 * std::abs(unit(rng));
    const double norm_cap = std::max(1.0, (sym1.norm() + sym2.norm()) * amp / 0.1);
    sym1 *= amp / norm_cap;
    sym2 *= amp / norm_cap;

    auto pert = [sym1, sym2, k1, k2](const Vector& u) {
        return Matrix(std::sin(k1 * (u(0) + 0.3 * u(1))) * sym1 +
                      std::cos(k2 * (u(1) - 0.4 * u(0))) * sym2);
    };
    auto dpert = [sym1, sym2, k1, k2](const Vector& u) {
        std::vector<Matrix> d(2);
        const double c1 = std::cos(k1 * (u(0) + 0.3 * u(1)));
        const double s2 = -std::sin(k2 * (u(1) - 0.4 * u(0)));
        d[0] = k1 * c1 * sym1 + (-0.4 * k2) * s2 * sym2;
        d[1] = 0.3 * k1 * c1 * sym1 + k2 * s2 * sym2;
        return d;
    };

    MetricField g0;
    g0.dim = 2;
    g0.index = 0;
    if (round_based) {
        const MetricField sphere = sphere_stereographic(2, 1.0);
        g0.eval = [sphere, pert](const Vector& u) {
            return Matrix(sphere.eval(u) * (Matrix::Identity(2, 2) + pert(u)));
        };
        g0.deriv = [sphere, pert, dpert](const Vector& u) {
            const auto ds = sphere.deriv(u);
            const auto dp = dpert(u);
            const Matrix s = sphere.eval(u);
            const Matrix ip = Matrix::Identity(2, 2) + pert(u);
            std::vector<Matrix> out(2);
            for (int i = 0; i < 2; ++i) out[std::size_t(i)] = ds[std::size_t(i)] * ip + s * dp[std::size_t(i)];
            return out;
        };
        // symmetrize the product form
        auto raw_eval = g0.eval;
        g0.eval = [raw_eval](const Vector& u) {
            const Matrix g = raw_eval(u);
            return Matrix(0.5 * (g + g.transpose()));
        };
        auto raw_deriv = g0.deriv;
        g0.deriv = [raw_deriv](const Vector& u) {
            auto d = raw_deriv(u);
            for (auto& m : d) m = 0.5 * (m + m.transpose()).eval();
            return d;
        };
        g0.domain = [](const Vector& u) { return u.norm() < 8.0; };
    } else {
        g0.eval = [pert](const Vector& u) {
            const Matrix g = Matrix::Identity(2, 2) + pert(u);
            return Matrix(0.5 * (g + g.transpose()));
        };
        g0.deriv = [dpert](const Vector& u) {
            auto d = dpert(u);
            for (auto& m : d) m = 0.5 * (m + m.transpose()).eval();
            return d;
        };
    }

    const double beta0 = 0.8 + 0.6 * std::abs(unit(rng));
    const double beta1 = 0.25 * unit(rng);
    const double kb = 0.5 + std::abs(unit(rng));
    ScalarField beta{[beta0, beta1, kb](const Vector& u) {
                         return beta0 + beta1 * std::sin(kb * (u(0) - 0.5 * u(1)));
                     },
                     [beta0, beta1, kb](const Vector& u) {
                         const double c = beta1 * kb * std::cos(kb * (u(0) - 0.5 * u(1)));
                         Vector g(2);
                         g << c, -0.5 * c;
                         return g;
                     }};

    Vector d0(2), d1(2);
    d0 << 0.3 * unit(rng), 0.3 * unit(rng);
    d1 << 0.15 * unit(rng), 0.15 * unit(rng);
    const double kd = 0.5 + std::abs(unit(rng));
    PatchVectorField delta{[d0, d1, kd](const Vector& u) {
                               return Vector(d0 + std::sin(kd * u(1)) * d1);
                           },
                           [d0, d1, kd](const Vector& u) {
                               Matrix j = Matrix::Zero(2, 2);
                               j.col(1) = kd * std::cos(kd * u(1)) * d1;
                               return j;
                           }};

    Scenario sc;
    sc.name = "fuzz-stationary-" + std::to_string(case_seed);
    sc.spec = stationary_spacetime(g0, beta, delta);

    Vector u0(2);
    if (round_based) {
        const double ang = kPi * unit(rng);
        u0 << std::cos(ang), std::sin(ang);
        u0 *= 1.0 + 0.1 * unit(rng);
    } else {
        u0 << 0.3 * unit(rng), 0.3 * unit(rng);
    }
    const double dir = kPi * unit(rng);
    Vector xi(2);
    xi << std::cos(dir), std::sin(dir);
    const Matrix gt = sc.spec.base.at(u0);
    xi /= std::sqrt(xi.dot(gt * xi));
    const Matrix g0m = g0.eval(u0);
    const double tau_dot = (g0m * delta.value(u0)).dot(xi) / beta.value(u0);
    sc.seed.x0 = Vector(3);
    sc.seed.x0 << u0(0), u0(1), 0.0;
    sc.seed.v0 = Vector(3);
    sc.seed.v0 << xi(0), xi(1), tau_dot;
    sc.seed.a = 0.0;
    sc.seed.b = round_based ? 4.5 : 5.0;
    sc.seed.steps = steps;
    sc.base_P = base_point_data(sc.spec, sc.seed.x0);

    if (config_text) {
        std::ostringstream os;
        os << "# reproduction config for a randomized stationary case\n";
        os << "scenario = fuzz-stationary\n";
        os << "[fuzz]\n";
        os << "case_seed = " << case_seed << "\n";
        os << "steps = " << steps << "\n";
        *config_text = os.str();
    }
    return sc;
}

} // namespace submaslov
