#pragma once

#include <memory>

#include "submaslov/submersion.hpp"

namespace submaslov {

/// Boundary data of a geodesic orthogonal to a submanifold, expressed in
/// trivialization coordinates at the initial instant: tangent frame columns
/// and the shape form g(𝒮(·, γ̇(a)), ·) on them.
struct BoundaryData {
    Matrix tangent_frame; // n×q, q may be 0
    SymmetricForm shape;  // q×q

    static BoundaryData point(int n) { return {Matrix(n, 0), SymmetricForm(Matrix(0, 0))}; }
};

/// The Lagrangian of boundary-compatible Jacobi initial data,
/// L = {(v,w) : v tangent, w restricted to the tangent directions equals the
/// shape pairing}. For an empty tangent frame this is {0} ⊕ ℝⁿ*.
LagrangianFrame lagrangian_LQ(const BoundaryData& bd);

/// Validates boundary data against the geometry at the initial instant:
/// γ̇(a) orthogonal to the tangent frame and the induced metric
/// non-degenerate. Throws InvalidBoundaryData.
void validate_boundary_data(const BoundaryData& bd, const Matrix& frame_a, const Matrix& g_a,
                            const Vector& gammadot_a, double tol = 1e-6);

struct FocalInstant {
    double t = 0.0;
    int kernel_dim = 0;
    HalfInt contribution;
    bool degenerate = false; // induced metric on the complement is degenerate
    bool endpoint = false;   // instant at (or indistinguishable from) b
    bool cluster = false;    // closer than the resolution to a neighbour
};

struct FocalReport {
    std::vector<FocalInstant> instants;
    HalfInt total_index;    // Maslov index of the path past the initial degeneracy
    double start_skip = 0;  // length of the skipped initial segment
    double flow_drift = 0;

    bool any_flags() const;
    HalfInt contribution_sum() const;
};

/// Evaluation space J[t₀] of the boundary-compatible Jacobi fields and its
/// metric complement, in coordinates of the tangent space at γ(t₀).
struct JacobiEvaluation {
    Matrix space;                    // n×(n−k)
    Matrix complement;               // n×k, g-orthogonal complement
    Signature complement_signature;  // of g restricted to the complement
    int kernel_dim = 0;
    bool degenerate = false;
};

struct QMaslovOptions {
    double crossing_sigma = 1e-6;  // singular-value acceptance at a refined instant
    double t_tol_factor = 1e-8;    // instant refinement, relative to b−a
    double prefilter = 0.1;        // grid minima below this get refined
    MaslovOptions maslov;
};

/// Shared per-geodesic machinery: trivialized symplectic system, its flow,
/// the boundary Lagrangian, and the crossing scan.
class QMaslovAnalysis {
public:
    QMaslovAnalysis(const MetricField& metric, const GeodesicPath& geo, const BoundaryData& bd,
                    const FrameField& frame, QMaslovOptions opts = {});
    ~QMaslovAnalysis();
    QMaslovAnalysis(QMaslovAnalysis&&) noexcept;

    HalfInt index() const;
    const FocalReport& report() const;
    JacobiEvaluation evaluate_at(double t0) const;
    double flow_drift() const;
    const std::vector<Matrix>& flow_matrices() const;
    const SymplecticSystemData& system() const;
    /// Lagrangian path frame Φ(t)[L_Q] at arbitrary t (re-integrated off-grid).
    LagrangianFrame path_frame(double t) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Maslov index of t ↦ Φ(t)[L_Q] relative to {0}⊕ℝⁿ*, taken past the initial
/// tangency (the path starts inside the singular cycle whenever the boundary
/// submanifold has positive codimension in the screen).
HalfInt q_maslov_index(const MetricField& metric, const GeodesicPath& geo, const BoundaryData& bd,
                       const FrameField& frame, const QMaslovOptions& opts = {});

FocalReport detect_focal_instants(const MetricField& metric, const GeodesicPath& geo,
                                  const BoundaryData& bd, const FrameField& frame,
                                  const QMaslovOptions& opts = {});

JacobiEvaluation jacobi_space_evaluation(const MetricField& metric, const GeodesicPath& geo,
                                         const BoundaryData& bd, const FrameField& frame,
                                         double t0, const QMaslovOptions& opts = {});

/// Second-variation form of the energy along a geodesic with submanifold
/// boundary data at a and a fixed endpoint at b, in coordinates.
struct IndexFormContext {
    const MetricField* metric = nullptr;
    const GeodesicPath* geo = nullptr;
    Matrix tangent_frame; // coordinate tangent frame of the submanifold at γ(a)
    Matrix shape_form;    // shape pairing on that frame, direction γ̇(a)
    double tol = 1e-6;
};

double index_form(const IndexFormContext& ctx, const FieldAlongCurve& E,
                  const FieldAlongCurve& F);

struct IndexIdentityResult {
    double lhs = 0;        // total-space index form
    double base_term = 0;  // projected index form
    double correction = 0; // ∫ g(D(E), D(F)) dt
    double residual = 0;   // |lhs − base_term − correction|
};

/// Compares the index form along a horizontal geodesic with the projected
/// index form plus the derived-field correction term.
IndexIdentityResult verify_index_identity(const SubmersionSpec& spec, const GeodesicPath& geo,
                                          const SubmanifoldData& Pdata, const FieldAlongCurve& E,
                                          const FieldAlongCurve& F);

struct ConjugateCounts {
    int omega = 0;       // dim of Jacobi fields vanishing at both ends
    int omega_delta = 0; // same count through the base correspondence
    int omega_n = 0;     // omega − omega_delta
    bool flagged = false; // a rank decision sat near the tolerance
};

ConjugateCounts conjugate_counts(const SubmersionSpec& spec, const GeodesicPath& geo);

/// Conjugate-point count (with multiplicity) of a causal geodesic in the
/// open interval, computed from the symplectic system reduced to the
/// γ̇-orthogonal screen (timelike) or to γ̇⊥/γ̇ (lightlike).
int causal_index(const MetricField& metric, const GeodesicPath& geo,
                 const QMaslovOptions& opts = {});

} // namespace submaslov
