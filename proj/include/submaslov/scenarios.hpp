#pragma once

#include <random>
#include <string>

#include "submaslov/jacobi_maslov.hpp"

namespace submaslov {

/// Scalar field on a patch with an optional analytic gradient.
struct ScalarField {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
};

/// Vector field on a patch with an optional analytic Jacobian
/// (J(i,j) = ∂vᵢ/∂xⱼ).
struct PatchVectorField {
    std::function<Vector(const Vector&)> value;
    std::function<Matrix(const Vector&)> jacobian;
};

// --- building-block metrics ---

MetricField euclidean_metric(int n);
MetricField minkowski_metric(int n); // diag(−1, 1, …, 1)
/// Round sphere of the given radius in a stereographic patch (conformal
/// metric with analytic Christoffel symbols).
MetricField sphere_stereographic(int dim, double radius);
/// Block product of two metrics (first factor's coordinates first).
MetricField product_metric(const MetricField& first, const MetricField& second);

/// Coordinate projection onto the first factor of a product metric.
SubmersionSpec product_submersion(const MetricField& base, const MetricField& fiber);

// --- the built-in submersions ---

/// Standard stationary spacetime (S×ℝ, g) over (S, g̃):
/// g((ξ,τ),(ξ,τ)) = g0(ξ,ξ) + 2τ g0(δ,ξ) − β τ²,
/// g̃(ξ,ξ) = g0(ξ,ξ) + g0(ξ,δ)²/β. β must be positive on the patch.
SubmersionSpec stationary_spacetime(const MetricField& g0, const ScalarField& beta,
                                    const PatchVectorField& delta);

/// S³(1) → S²(1/2) in stereographic patches.
SubmersionSpec hopf_fibration();

/// Principal-circle toy: total metric h(dπ·, dπ·) + λ²(dθ + ω)² over a
/// Lorentzian base. `tilt` is the connection 1-form ω in base coordinates.
SubmersionSpec kaluza_klein_toy(const MetricField& base, double fiber_scale,
                                const PatchVectorField& tilt);

// --- scenario harness ---

struct GeodesicSeed {
    Vector x0, v0;
    double a = 0.0, b = 1.0;
    int steps = 2000;
};

struct Scenario {
    std::string name;
    SubmersionSpec spec;
    GeodesicSeed seed;
    SubmanifoldData base_P; // boundary submanifold in the base
    bool causal = false;    // also run the causal-index comparison
};

struct CheckRecord {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct ScenarioResult {
    std::string name;
    HalfInt mu_total, mu_base;
    FocalReport report_total, report_base;
    double max_verticality = 0.0;
    double projected_residual = 0.0;
    bool interval_shortened = false;
    double effective_end = 0.0;
    int i_base = -1, i_total = -1;
    ConjugateCounts counts;
    std::vector<CheckRecord> checks;
    bool pass = false;

    const CheckRecord* find_check(const std::string& name) const;
};

struct VerifyOptions {
    QMaslovOptions qopts;
    double horizontality_tol = 1e-6;
    double projected_residual_tol = 1e-5;
    double flow_drift_tol = 1e-8;
    double instant_match_tol = 1e-6;
    bool causal_checks = false;
};

/// Runs the full comparison between a horizontal geodesic and its projection:
/// indices, focal instants, per-instant contributions, and (for causal runs)
/// the index inequality. PatchExit shortens the interval and is recorded.
ScenarioResult verify_main_theorem(const SubmersionSpec& spec, const GeodesicSeed& seed,
                                   const SubmanifoldData& Pdata, const VerifyOptions& opts = {});

/// Pointwise identity residuals of the structural submersion relations,
/// sampled at random instants and vectors along a geodesic.
struct StructuralResiduals {
    double covariant_identity = 0.0;   // both components of the split of DE/dt
    double derivative_identity = 0.0;  // DE/dt through the derived field
    double tensor_skew = 0.0;          // g(T_e f, w) + g(f, T_e w), same for A
    double tensor_t_symmetric = 0.0;   // T_V(W) − T_W(V), vertical arguments
    double tensor_a_alternating = 0.0; // A_X(Y) + A_Y(X), horizontal arguments
    double sff_combination = 0.0;      // 𝒮(v,w) − A_v(w) − T_v(w)
    double compatibility = 0.0;        // trivialized g̃'-varpi relation

    double max() const;
};

StructuralResiduals structural_identity_checks(const SubmersionSpec& spec,
                                               const GeodesicPath& geo, int samples,
                                               std::mt19937_64& rng);

// --- registry ---

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name, int steps = 2000);

/// Deterministic randomized stationary scenario for fuzzing; `config_text`
/// (optional) receives a config document that reruns exactly this case.
Scenario random_stationary_scenario(std::uint64_t case_seed, int steps = 2000,
                                    std::string* config_text = nullptr);

} // namespace submaslov
