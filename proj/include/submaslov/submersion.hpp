#pragma once

#include <functional>

#include "submaslov/geometry.hpp"

namespace submaslov {

/// A semi-Riemannian submersion between coordinate patches: total-space
/// metric, base metric, projection map and (optionally analytic)
/// differential. The differential falls back to central finite differences
/// of `proj`.
struct SubmersionSpec {
    MetricField total;
    MetricField base;
    std::function<Vector(const Vector&)> proj;
    std::function<Matrix(const Vector&)> dproj; // optional analytic callback
    double tol = 1e-6;

    Matrix dproj_at(const Vector& p) const;
    /// Checks maximal rank, fiber non-degeneracy and the horizontal isometry
    /// at a point; throws on violation.
    void validate_at(const Vector& p) const;
};

/// Vertical/horizontal projection operators and adapted bases at a point.
struct Projectors {
    Matrix vert;        // n×n projector onto ker dπ
    Matrix horiz;       // n×n projector onto the g-orthogonal complement
    Matrix vert_basis;  // n×(n−m)
    Matrix horiz_basis; // n×m
};

Projectors projectors(const SubmersionSpec& spec, const Vector& p);

/// The unique horizontal vector at p mapping to `base_vec` under dπ.
Vector horizontal_lift_vector(const SubmersionSpec& spec, const Vector& p,
                              const Vector& base_vec);

/// Fundamental tensor T_e(f) = ℋ∇_{𝒱e}(𝒱F) + 𝒱∇_{𝒱e}(ℋF).
Vector tensor_T(const SubmersionSpec& spec, const Vector& p, const Vector& e, const Vector& f);

/// Fundamental tensor A_e(f) = ℋ∇_{ℋe}(𝒱F) + 𝒱∇_{ℋe}(ℋF).
Vector tensor_A(const SubmersionSpec& spec, const Vector& p, const Vector& e, const Vector& f);

/// Second fundamental form of the horizontal distribution,
/// 𝒮(v, w) = A_v(w) + T_v(w) for horizontal w.
Vector second_fundamental_form_distribution(const SubmersionSpec& spec, const Vector& p,
                                            const Vector& v, const Vector& w);

/// Horizontal lift of a base curve from p0 over the fiber of its start.
/// Integration stops early with PatchExit if the lift leaves the patch.
GeodesicPath horizontal_lift_curve(const SubmersionSpec& spec, const GeodesicPath& base_curve,
                                   const Vector& p0);

struct LiftDiagnostics {
    double max_verticality; // max g-norm of the vertical part of the velocity
    double projected_residual;
    double projected_energy_drift;
};

/// Diagnostics of a horizontal geodesic: verticality of its velocity along
/// the run and the geodesic residual of the projected curve.
LiftDiagnostics lift_geodesic_check(const SubmersionSpec& spec, const GeodesicPath& geo);

/// Projection of a total-space geodesic, sampled on the same grid.
GeodesicPath project_curve(const SubmersionSpec& spec, const GeodesicPath& geo);

/// A non-degenerate submanifold germ: ambient point, tangent frame and the
/// shape form g(𝒮(·, normal), ·) on that frame for a fixed normal direction.
struct SubmanifoldData {
    Vector point;
    Matrix tangent_frame; // ambient_dim × q (may have zero columns)
    Matrix shape_form;    // q × q symmetric

    int codim_point() const { return int(tangent_frame.cols()); }
};

/// Derived vector field D(E) = 𝒱(DV/dt) − T_V(γ̇) + 2A_{γ̇}(H) along a
/// horizontal geodesic; values are vertical.
FieldAlongCurve derived_field(const SubmersionSpec& spec, const GeodesicPath& geo,
                              const FieldAlongCurve& E);

/// dπ-projection of a field along γ to a field along π∘γ.
FieldAlongCurve project_field(const SubmersionSpec& spec, const GeodesicPath& geo,
                              const FieldAlongCurve& E);

/// The unique field E along γ with E_* = P, D(E) = 0 and E(a) = z.
/// P is sampled on the same grid as γ; z must satisfy dπ(z) = P(a).
FieldAlongCurve lift_field_D_zero(const SubmersionSpec& spec, const GeodesicPath& geo,
                                  const FieldAlongCurve& P, const Vector& z);

/// Same, seeding the value z at an arbitrary grid index (integrates both
/// directions from there).
FieldAlongCurve lift_field_D_zero_from(const SubmersionSpec& spec, const GeodesicPath& geo,
                                       const FieldAlongCurve& P, const Vector& z,
                                       std::size_t seed_index);

/// Second fundamental form of the total lift 𝒬 = π⁻¹(𝒫): value on a tangent
/// vector v of 𝒬 and a horizontal normal z, from 𝒫's data at the projected
/// point.
Vector second_fundamental_form_lift(const SubmersionSpec& spec, const Vector& p,
                                    const SubmanifoldData& Pdata, const Vector& v,
                                    const Vector& z);

/// Tangent frame of 𝒬 = π⁻¹(𝒫) at p: vertical basis followed by horizontal
/// lifts of 𝒫's tangent frame.
Matrix lift_tangent_frame(const SubmersionSpec& spec, const Vector& p,
                          const SubmanifoldData& Pdata);

/// Shape form of 𝒬 = π⁻¹(𝒫) on lift_tangent_frame(...) in the direction of
/// a horizontal normal z.
Matrix lifted_shape_form(const SubmersionSpec& spec, const Vector& p,
                         const SubmanifoldData& Pdata, const Vector& z);

} // namespace submaslov
