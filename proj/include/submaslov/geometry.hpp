#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "submaslov/numerics.hpp"
#include "submaslov/symplectic.hpp"

namespace submaslov {

/// Christoffel symbols at a point: comps[k](i,j) = Γᵏᵢⱼ, symmetric in (i,j).
struct Tensor3 {
    std::vector<Matrix> comps;

    int dim() const { return int(comps.size()); }
    /// Vector Γ(v,w).
    Vector contract(const Vector& v, const Vector& w) const;
    /// Matrix w ↦ Γ(v,w).
    Matrix contract_left(const Vector& v) const;
};

/// A smooth semi-Riemannian metric on a coordinate patch.
///
/// `eval` must be pure and reentrant. `christoffel` is an optional analytic
/// callback; without it the symbols come from central finite differences of
/// `eval`. `domain` (optional) guards the patch: integrators report
/// PatchExit when a trajectory leaves it.
struct MetricField {
    int dim = 0;
    int index = 0;
    std::function<Matrix(const Vector&)> eval;
    std::function<Tensor3(const Vector&)> christoffel;
    /// Optional analytic coordinate derivatives ∂ᵢg (outer index i); used for
    /// exact Christoffel symbols when no direct callback is given.
    std::function<std::vector<Matrix>(const Vector&)> deriv;
    std::function<bool(const Vector&)> domain;
    double fd_step = Defaults::fd_step;
    double tol = Defaults::rank_tol;

    /// Metric matrix with a non-degeneracy check.
    Matrix at(const Vector& x) const;
    /// Full invariant check (symmetry, non-degeneracy, eigenvalue index).
    void validate_at(const Vector& x) const;
    bool in_domain(const Vector& x) const { return !domain || domain(x); }
};

Tensor3 christoffel(const MetricField& metric, const Vector& x);

/// Tidal operator of the Jacobi equation D²J/dt² + 𝐑J = 0 for the geodesic
/// with velocity v at x. On a space of constant curvature K it acts as
/// K·(g(v,v)·Id − v ⊗ g(v,·)); in particular 𝐑v = 0 and g𝐑 is symmetric.
Matrix curvature_operator(const MetricField& metric, const Vector& x, const Vector& v);

/// Sampled solution curve with a cubic-Hermite interpolation contract.
class GeodesicPath {
public:
    GeodesicPath(std::vector<double> grid, std::vector<Vector> points,
                 std::vector<Vector> velocities);

    int dim() const { return int(points_.front().size()); }
    std::size_t size() const { return grid_.size(); }
    double a() const { return grid_.front(); }
    double b() const { return grid_.back(); }
    double step() const { return h_; }
    const std::vector<double>& grid() const { return grid_; }
    const Vector& point(std::size_t i) const { return points_[i]; }
    const Vector& velocity(std::size_t i) const { return velocities_[i]; }

    Vector point_at(double t) const;
    Vector velocity_at(double t) const;

    /// Max geodesic-equation residual over grid midpoints, by finite
    /// differences of the interpolant.
    double max_residual(const MetricField& metric) const;
    /// Max drift of g(ẋ,ẋ) over the grid relative to the initial value.
    double energy_drift(const MetricField& metric) const;

private:
    std::size_t segment(double t) const;
    std::vector<double> grid_;
    std::vector<Vector> points_, velocities_;
    double h_;
};

struct IntegrateOptions {
    double conservation_tol = Defaults::conservation_tol;
    double residual_tol = Defaults::resid_tol;
    bool check_invariants = true;
};

/// Fixed-step RK4 geodesic integration with a half-step Richardson check.
GeodesicPath integrate_geodesic(const MetricField& metric, const Vector& x0, const Vector& v0,
                                double a, double b, int steps, const IntegrateOptions& opts = {});

/// Integrate a non-geodesic curve given an explicit velocity field
/// v(t, x); used for fibers and auxiliary curves (residual checks disabled).
GeodesicPath integrate_curve(const MetricField& metric,
                             const std::function<Vector(double, const Vector&)>& velocity,
                             const Vector& x0, double a, double b, int steps);

/// Invertible frames p(tᵢ): ℝⁿ → coordinates of the tangent space along a
/// curve, with derivative samples for Hermite evaluation off the grid.
struct FrameField {
    std::vector<double> grid;
    std::vector<Matrix> frames;
    std::vector<Matrix> frame_dots; // may be empty: finite differences then

    Matrix at(double t) const;
    Matrix dot_at(double t) const;
    void validate(double tol = Defaults::rank_tol) const;
};

/// Parallel frame along a geodesic from an invertible initial frame.
FrameField parallel_transport_frame(const MetricField& metric, const GeodesicPath& curve,
                                    const Matrix& p_a);

/// Frame p(t) = p_par(t)·K(t) for a smooth GL-valued curve K with derivative
/// K'. Used to build rotating and randomized trivializations.
FrameField modulated_frame(const MetricField& metric, const GeodesicPath& curve,
                           const FrameField& parallel,
                           const std::function<Matrix(double)>& K,
                           const std::function<Matrix(double)>& Kdot);

/// Connection coefficients ϖ(tᵢ) = p⁻¹(ṗ + Γ(ẋ)p) of a frame field.
std::vector<Matrix> connection_form(const FrameField& frame, const MetricField& metric,
                                    const GeodesicPath& curve);

/// Trivialized coefficient data of the Jacobi equation along a geodesic.
struct SymplecticSystemData {
    std::vector<double> grid;
    std::vector<Matrix> gtilde;
    std::vector<Matrix> varpi;
    std::vector<Matrix> Rtilde;
    /// Optional exact evaluator at arbitrary t: returns (g̃, ϖ, R̃).
    std::function<void(double, Matrix&, Matrix&, Matrix&)> exact_eval;

    void validate(double tol = Defaults::fd_tol) const;
    /// Max residual of g̃' − g̃ϖ − ϖᵀg̃ over interior nodes (finite differences).
    double compatibility_residual() const;
};

/// Assemble (g̃, ϖ, R̃) along a geodesic in a given trivialization.
SymplecticSystemData build_geodesic_system(const MetricField& metric, const GeodesicPath& geo,
                                           const FrameField& frame);

using CoefficientMap = std::function<Matrix(double)>;

/// Coefficient map X(t) = [[−ϖ, g̃⁻¹], [−g̃R̃, ϖᵀ]] ∈ sp(2n,ℝ).
CoefficientMap assemble_symplectic_system(const SymplecticSystemData& data);

/// ‖Xᵀ Ω + Ω X‖ — zero exactly when X ∈ sp(2n,ℝ).
double sp_membership_residual(const Matrix& x);

struct FlowResult {
    std::vector<Matrix> Phi;     // aligned with the grid, Phi.front() = Id
    double max_drift = 0.0;      // max ‖ΦᵀΩΦ − Ω‖_F over the grid
    double max_drift_rel = 0.0;  // same, relative to ‖Φ‖²
};

struct FlowOptions {
    double sympl_tol = Defaults::sympl_tol;
    bool check_drift = true;
};

/// RK4 flow of Φ' = X(t)Φ, Φ(a) = Id on the given grid.
FlowResult flow(const CoefficientMap& X, const std::vector<double>& grid,
                const FlowOptions& opts = {});

/// Vector field sampled along a curve, optionally with covariant-derivative
/// samples produced by an integrator.
struct FieldAlongCurve {
    std::vector<double> grid;
    std::vector<Vector> values;
    std::vector<Vector> cov_derivs; // empty unless produced by an integrator

    bool has_derivs() const { return !cov_derivs.empty(); }
};

/// Direct integration of D²J/dt² + 𝐑J = 0 from initial value and covariant
/// derivative. The returned field carries covariant-derivative samples.
FieldAlongCurve jacobi_field_direct(const MetricField& metric, const GeodesicPath& geo,
                                    const Vector& J_a, const Vector& Jdot_a);

/// Covariant derivative samples of an arbitrary sampled field along a curve
/// (4th-order finite differences in t plus the connection term).
std::vector<Vector> covariant_derivative(const MetricField& metric, const GeodesicPath& curve,
                                         const std::vector<Vector>& values);

} // namespace submaslov
