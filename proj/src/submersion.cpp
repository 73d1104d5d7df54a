#include "submaslov/submersion.hpp"

#include <cmath>

namespace submaslov {

namespace {

// 4-point Lagrange interpolation of sampled vectors on a uniform grid.
Vector interp_samples(const std::vector<double>& grid, const std::vector<Vector>& vals, double t) {
    const double h = (grid.back() - grid.front()) / double(grid.size() - 1);
    auto i = std::ptrdiff_t((t - grid.front()) / h);
    i = std::clamp<std::ptrdiff_t>(i, 0, std::ptrdiff_t(grid.size()) - 2);
    const auto lo = std::max<std::ptrdiff_t>(0, i - 1);
    const auto hi = std::min<std::ptrdiff_t>(std::ptrdiff_t(grid.size()) - 1, i + 2);
    Vector acc = Vector::Zero(vals.front().size());
    for (auto a = lo; a <= hi; ++a) {
        double w = 1.0;
        for (auto b = lo; b <= hi; ++b)
            if (a != b) w *= (t - grid[std::size_t(b)]) / (grid[std::size_t(a)] - grid[std::size_t(b)]);
        acc += w * vals[std::size_t(a)];
    }
    return acc;
}

} // namespace

Matrix SubmersionSpec::dproj_at(const Vector& p) const {
    if (dproj) return dproj(p);
    const double h = Defaults::dproj_step * (1.0 + p.norm());
    Matrix out(base.dim, total.dim);
    for (int i = 0; i < total.dim; ++i) {
        Vector pp = p, pm = p;
        pp(i) += h;
        pm(i) -= h;
        out.col(i) = (proj(pp) - proj(pm)) / (2.0 * h);
    }
    return out;
}

void SubmersionSpec::validate_at(const Vector& p) const {
    const int n = total.dim, m = base.dim;
    const Matrix dp = dproj_at(p);
    if (numerical_rank(dp) != m)
        throw InvalidArgument("SubmersionSpec: projection is not of maximal rank");
    const auto pr = projectors(*this, p); // throws on degenerate fiber
    // horizontal isometry against the base metric
    const Matrix g = total.at(p);
    const Matrix h = base.at(proj(p));
    const Matrix hb = pr.horiz_basis;
    const Matrix up = g.ldlt().solve(Matrix::Identity(n, n)); // unused guard for conditioning
    (void)up;
    const Matrix lhs = hb.transpose() * g * hb;
    const Matrix img = dp * hb;
    const Matrix rhs = img.transpose() * h * img;
    if ((lhs - rhs).norm() > tol * std::max(1.0, lhs.norm()))
        throw InvalidArgument("SubmersionSpec: dπ is not an isometry on the horizontal space "
                              "(residual " + std::to_string((lhs - rhs).norm()) + ")");
}

Projectors projectors(const SubmersionSpec& spec, const Vector& p) {
    const int n = spec.total.dim, m = spec.base.dim;
    const Matrix dp = spec.dproj_at(p);
    Matrix vb = kernel_basis(dp);
    if (vb.cols() != n - m)
        throw InvalidArgument("projectors: kernel of dπ has wrong dimension");
    const Matrix g = spec.total.at(p);
    const Matrix gv = vb.transpose() * g * vb;
    if (n > m && std::abs(gv.determinant()) < spec.total.tol)
        throw DegenerateMetric("projectors: fiber metric is degenerate (S1 fails)");
    Projectors out;
    out.vert_basis = vb;
    if (n > m) {
        out.vert = vb * gv.ldlt().solve(vb.transpose() * g);
    } else {
        out.vert = Matrix::Zero(n, n);
    }
    out.horiz = Matrix::Identity(n, n) - out.vert;
    out.horiz_basis = kernel_basis(vb.transpose() * g);
    if (out.horiz_basis.cols() != m)
        throw DegenerateMetric("projectors: horizontal space has wrong dimension");
    return out;
}

Vector horizontal_lift_vector(const SubmersionSpec& spec, const Vector& p,
                              const Vector& base_vec) {
    const int n = spec.total.dim, m = spec.base.dim;
    const Matrix dp = spec.dproj_at(p);
    const Matrix g = spec.total.at(p);
    const Matrix vb = kernel_basis(dp);
    Matrix sys(n, n);
    sys.topRows(m) = dp;
    sys.bottomRows(n - m) = vb.transpose() * g;
    Vector rhs = Vector::Zero(n);
    rhs.head(m) = base_vec;
    return sys.partialPivLu().solve(rhs);
}

namespace {

// ∇ along v at p of the field x ↦ field(x), with `field` evaluated exactly;
// central finite differences in the direction of v plus the connection term.
Vector covariant_directional(const SubmersionSpec& spec, const Vector& p, const Vector& v,
                             const std::function<Vector(const Vector&)>& field) {
    const double scale = v.norm();
    if (scale < 1e-14) return Vector::Zero(spec.total.dim);
    const double h = spec.total.fd_step * (1.0 + p.norm()) / scale;
    const Vector d = (field(p + h * v) - field(p - h * v)) / (2.0 * h);
    const Tensor3 gamma = christoffel(spec.total, p);
    return d + gamma.contract(v, field(p));
}

} // namespace

Vector tensor_T(const SubmersionSpec& spec, const Vector& p, const Vector& e, const Vector& f) {
    const auto pr = projectors(spec, p);
    const Vector ve = pr.vert * e;
    auto vert_f = [&](const Vector& x) { return Vector(projectors(spec, x).vert * f); };
    auto horiz_f = [&](const Vector& x) { return Vector(projectors(spec, x).horiz * f); };
    return pr.horiz * covariant_directional(spec, p, ve, vert_f) +
           pr.vert * covariant_directional(spec, p, ve, horiz_f);
}

Vector tensor_A(const SubmersionSpec& spec, const Vector& p, const Vector& e, const Vector& f) {
    const auto pr = projectors(spec, p);
    const Vector he = pr.horiz * e;
    auto vert_f = [&](const Vector& x) { return Vector(projectors(spec, x).vert * f); };
    auto horiz_f = [&](const Vector& x) { return Vector(projectors(spec, x).horiz * f); };
    return pr.horiz * covariant_directional(spec, p, he, vert_f) +
           pr.vert * covariant_directional(spec, p, he, horiz_f);
}

Vector second_fundamental_form_distribution(const SubmersionSpec& spec, const Vector& p,
                                            const Vector& v, const Vector& w) {
    const auto pr = projectors(spec, p);
    if ((pr.vert * w).norm() > spec.tol * std::max(1.0, w.norm()))
        throw InvalidArgument("second_fundamental_form_distribution: w is not horizontal");
    return tensor_A(spec, p, v, w) + tensor_T(spec, p, v, w);
}

GeodesicPath horizontal_lift_curve(const SubmersionSpec& spec, const GeodesicPath& base_curve,
                                   const Vector& p0) {
    if ((spec.proj(p0) - base_curve.point(0)).norm() > spec.tol * (1.0 + p0.norm()))
        throw IncompatibleSeed("horizontal_lift_curve: p0 does not project to the curve start");
    const int steps = int(base_curve.size()) - 1;
    const double a = base_curve.a(), b = base_curve.b();
    const double h = (b - a) / steps;
    std::vector<double> grid{a};
    std::vector<Vector> xs{p0};
    std::vector<Vector> vs{horizontal_lift_vector(spec, p0, base_curve.velocity(0))};
    Vector y = p0;
    auto rhs = [&](double t, const Vector& x) {
        return horizontal_lift_vector(spec, x, base_curve.velocity_at(t));
    };
    for (int i = 0; i < steps; ++i) {
        const double t = a + i * h;
        try {
            if (!spec.total.in_domain(y)) throw PatchExit(t);
            const Vector k1 = rhs(t, y);
            const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
            const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
            const Vector k4 = rhs(t + h, y + h * k3);
            y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!y.allFinite() || !spec.total.in_domain(y)) throw PatchExit(t + h);
        } catch (const PatchExit&) {
            if (grid.size() < 2) throw; // nothing lifted at all
            return GeodesicPath(std::move(grid), std::move(xs), std::move(vs)); // maximal partial lift
        }
        grid.push_back(t + h);
        xs.push_back(y);
        vs.push_back(horizontal_lift_vector(spec, y, base_curve.velocity(std::size_t(i) + 1)));
    }
    return GeodesicPath(std::move(grid), std::move(xs), std::move(vs));
}

GeodesicPath project_curve(const SubmersionSpec& spec, const GeodesicPath& geo) {
    std::vector<Vector> xs(geo.size()), vs(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) {
        xs[i] = spec.proj(geo.point(i));
        vs[i] = spec.dproj_at(geo.point(i)) * geo.velocity(i);
    }
    return GeodesicPath(geo.grid(), std::move(xs), std::move(vs));
}

LiftDiagnostics lift_geodesic_check(const SubmersionSpec& spec, const GeodesicPath& geo) {
    LiftDiagnostics diag{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const auto pr = projectors(spec, geo.point(i));
        diag.max_verticality = std::max(diag.max_verticality,
                                        (pr.vert * geo.velocity(i)).norm());
    }
    const GeodesicPath projected = project_curve(spec, geo);
    diag.projected_residual = projected.max_residual(spec.base);
    diag.projected_energy_drift = projected.energy_drift(spec.base);
    return diag;
}

FieldAlongCurve derived_field(const SubmersionSpec& spec, const GeodesicPath& geo,
                              const FieldAlongCurve& E) {
    if (E.grid.size() != geo.size())
        throw InvalidDimension("derived_field: field grid does not match the curve");
    const std::size_t m = geo.size();
    std::vector<Vector> vert_part(m);
    for (std::size_t i = 0; i < m; ++i)
        vert_part[i] = projectors(spec, geo.point(i)).vert * E.values[i];
    const auto dv = covariant_derivative(spec.total, geo, vert_part);
    FieldAlongCurve out;
    out.grid = E.grid;
    out.values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto pr = projectors(spec, geo.point(i));
        const Vector h_part = pr.horiz * E.values[i];
        out.values[i] = pr.vert * dv[i] - tensor_T(spec, geo.point(i), vert_part[i], geo.velocity(i)) +
                        2.0 * tensor_A(spec, geo.point(i), geo.velocity(i), h_part);
    }
    return out;
}

FieldAlongCurve project_field(const SubmersionSpec& spec, const GeodesicPath& geo,
                              const FieldAlongCurve& E) {
    if (E.grid.size() != geo.size())
        throw InvalidDimension("project_field: field grid does not match the curve");
    FieldAlongCurve out;
    out.grid = E.grid;
    out.values.resize(E.values.size());
    for (std::size_t i = 0; i < E.values.size(); ++i)
        out.values[i] = spec.dproj_at(geo.point(i)) * E.values[i];
    return out;
}

FieldAlongCurve lift_field_D_zero(const SubmersionSpec& spec, const GeodesicPath& geo,
                                  const FieldAlongCurve& P, const Vector& z) {
    return lift_field_D_zero_from(spec, geo, P, z, 0);
}

FieldAlongCurve lift_field_D_zero_from(const SubmersionSpec& spec, const GeodesicPath& geo,
                                       const FieldAlongCurve& P, const Vector& z,
                                       std::size_t seed_index) {
    const std::size_t m = geo.size();
    if (P.grid.size() != m) throw InvalidDimension("lift_field_D_zero: grid mismatch");
    if (seed_index >= m) throw InvalidArgument("lift_field_D_zero: seed index out of range");
    const Vector p_seed = geo.point(seed_index);
    if ((spec.dproj_at(p_seed) * z - P.values[seed_index]).norm() >
        spec.tol * (1.0 + P.values[seed_index].norm()))
        throw IncompatibleSeed("lift_field_D_zero: dπ(z) != P at the seed instant");

    // horizontal part: pointwise lift of P
    std::vector<Vector> hpart(m);
    for (std::size_t i = 0; i < m; ++i)
        hpart[i] = horizontal_lift_vector(spec, geo.point(i), P.values[i]);

    // vertical part: DV/dt = T_V(γ̇) − 2A_{γ̇}(H) + A_{γ̇}(V); the A_{γ̇}(V)
    // term keeps V vertical along the run.
    auto rhs = [&](double t, const Vector& v) {
        const Vector x = geo.point_at(t);
        const Vector xdot = geo.velocity_at(t);
        const Vector h_here = horizontal_lift_vector(spec, x, interp_samples(P.grid, P.values, t));
        const Vector cov = tensor_T(spec, x, v, xdot) - 2.0 * tensor_A(spec, x, xdot, h_here) +
                           tensor_A(spec, x, xdot, v);
        const Tensor3 gamma = christoffel(spec.total, x);
        return Vector(cov - gamma.contract(xdot, v));
    };

    std::vector<Vector> vpart(m);
    const Vector v_seed = projectors(spec, p_seed).vert * z;
    vpart[seed_index] = v_seed;
    const double h = geo.step();
    auto rk_step = [&](double t, const Vector& v, double dt) {
        const Vector k1 = rhs(t, v);
        const Vector k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
        const Vector k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
        const Vector k4 = rhs(t + dt, v + dt * k3);
        return Vector(v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };
    for (std::size_t i = seed_index; i + 1 < m; ++i)
        vpart[i + 1] = rk_step(geo.grid()[i], vpart[i], h);
    for (std::size_t i = seed_index; i > 0; --i)
        vpart[i - 1] = rk_step(geo.grid()[i], vpart[i], -h);

    FieldAlongCurve out;
    out.grid = geo.grid();
    out.values.resize(m);
    out.cov_derivs.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.values[i] = hpart[i] + vpart[i];
    const auto dh = covariant_derivative(spec.total, geo, hpart);
    for (std::size_t i = 0; i < m; ++i) {
        const Vector x = geo.point(i);
        const Vector xdot = geo.velocity(i);
        const Vector cov_v = tensor_T(spec, x, vpart[i], xdot) -
                             2.0 * tensor_A(spec, x, xdot, hpart[i]) +
                             tensor_A(spec, x, xdot, vpart[i]);
        out.cov_derivs[i] = dh[i] + cov_v;
    }
    return out;
}

namespace {

// tangent projection in the base, w.r.t. the base metric
Vector base_tangent_part(const SubmersionSpec& spec, const SubmanifoldData& P, const Vector& w) {
    if (P.tangent_frame.cols() == 0) return Vector::Zero(w.size());
    const Matrix h = spec.base.at(P.point);
    const Matrix gram = P.tangent_frame.transpose() * h * P.tangent_frame;
    const Vector coords = gram.ldlt().solve(P.tangent_frame.transpose() * h * w);
    return P.tangent_frame * coords;
}

// shape vector 𝒮^𝒫(x̂, normal) from the stored form
Vector base_shape_vector(const SubmersionSpec& spec, const SubmanifoldData& P, const Vector& xhat) {
    if (P.tangent_frame.cols() == 0) return Vector::Zero(P.point.size());
    const Matrix h = spec.base.at(P.point);
    const Matrix gram = P.tangent_frame.transpose() * h * P.tangent_frame;
    const Vector coords = gram.ldlt().solve(P.tangent_frame.transpose() * h * xhat);
    const Vector pairing = P.shape_form * coords; // h(S(x̂,n), frame_j)
    return P.tangent_frame * gram.ldlt().solve(pairing);
}

} // namespace

Vector second_fundamental_form_lift(const SubmersionSpec& spec, const Vector& p,
                                    const SubmanifoldData& Pdata, const Vector& v,
                                    const Vector& z) {
    const auto pr = projectors(spec, p);
    if ((pr.vert * z).norm() > spec.tol * std::max(1.0, z.norm()))
        throw InvalidArgument("second_fundamental_form_lift: z is not horizontal");
    const Matrix dp = spec.dproj_at(p);
    const Vector z_base = dp * z;
    if (Pdata.tangent_frame.cols() > 0) {
        const Matrix h = spec.base.at(Pdata.point);
        const Vector pairings = Pdata.tangent_frame.transpose() * h * z_base;
        if (pairings.norm() > spec.tol * std::max(1.0, z_base.norm()))
            throw InvalidArgument("second_fundamental_form_lift: z is not normal to the lift");
    }

    const Vector v_vert = pr.vert * v;
    const Vector v_horiz = pr.horiz * v;

    Vector out = tensor_T(spec, p, v_vert, z);              // T_V(Z), vertical
    const Vector azv = tensor_A(spec, p, z, v_vert);        // A_Z(V), horizontal
    out += horizontal_lift_vector(spec, p, base_tangent_part(spec, Pdata, dp * azv));
    out += tensor_A(spec, p, v_horiz, z);                   // A_X(Z), vertical
    out += horizontal_lift_vector(spec, p,
                                  base_shape_vector(spec, Pdata, dp * v_horiz)); // lifted 𝒮^𝒫
    return out;
}

Matrix lift_tangent_frame(const SubmersionSpec& spec, const Vector& p,
                          const SubmanifoldData& Pdata) {
    const auto pr = projectors(spec, p);
    const int q = int(Pdata.tangent_frame.cols());
    Matrix out(spec.total.dim, pr.vert_basis.cols() + q);
    out.leftCols(pr.vert_basis.cols()) = pr.vert_basis;
    for (int j = 0; j < q; ++j)
        out.col(pr.vert_basis.cols() + j) =
            horizontal_lift_vector(spec, p, Pdata.tangent_frame.col(j));
    return out;
}

Matrix lifted_shape_form(const SubmersionSpec& spec, const Vector& p,
                         const SubmanifoldData& Pdata, const Vector& z) {
    const Matrix frame = lift_tangent_frame(spec, p, Pdata);
    const Matrix g = spec.total.at(p);
    const int q = int(frame.cols());
    Matrix s(q, q);
    for (int i = 0; i < q; ++i) {
        const Vector sv = second_fundamental_form_lift(spec, p, Pdata, frame.col(i), z);
        for (int j = 0; j < q; ++j) s(i, j) = sv.dot(g * frame.col(j));
    }
    return 0.5 * (s + s.transpose());
}

} // namespace submaslov
