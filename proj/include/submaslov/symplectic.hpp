#pragma once

#include <utility>
#include <vector>

#include "submaslov/halfint.hpp"
#include "submaslov/numerics.hpp"

namespace submaslov {

/// Matrix of the canonical symplectic form on ℝⁿ ⊕ ℝⁿ*,
/// ω((v,α),(w,β)) = β(v) − α(w), in stacked (v,α) coordinates.
Matrix canonical_omega(int n);

/// Real symmetric bilinear form with a rank-decision threshold.
struct SymmetricForm {
    int n = 0;
    Matrix entries; // symmetrized on construction
    double tol = Defaults::rank_tol;

    SymmetricForm() = default;
    explicit SymmetricForm(const Matrix& m, double tol = Defaults::rank_tol);
};

struct Signature {
    int n_plus = 0, n_minus = 0, n_zero = 0;
    int sign() const { return n_plus - n_minus; }
    bool operator==(const Signature&) const = default;
};

/// Eigenvalue sign counts; |λ| ≤ tol·max(1, spectral radius) counts as zero.
Signature signature(const SymmetricForm& form);

/// An n-plane of (ℝⁿ⊕ℝⁿ*, ω) spanned by 2n×n full-rank isotropic columns.
/// Columns are orthonormalized on construction.
class LagrangianFrame {
public:
    explicit LagrangianFrame(const Matrix& columns, double tol = Defaults::rank_tol);

    static LagrangianFrame vertical(int n);   // {0} ⊕ ℝⁿ*
    static LagrangianFrame horizontal(int n); // ℝⁿ ⊕ {0}

    int n() const { return n_; }
    const Matrix& columns() const { return cols_; }
    double tol() const { return tol_; }

    /// dim of the intersection of the two spans.
    int intersection_dim(const LagrangianFrame& other) const;
    /// true iff the two frames span the same subspace (within tol).
    bool same_span(const LagrangianFrame& other) const;

private:
    int n_;
    Matrix cols_; // 2n×n, orthonormal
    double tol_;
};

/// Element of Sp(2n, ℝ); construction checks MᵀΩM = Ω.
class SymplecticMatrix {
public:
    explicit SymplecticMatrix(const Matrix& m, double tol = 1e-6);
    int n() const { return n_; }
    const Matrix& entries() const { return m_; }
    /// Frobenius norm of MᵀΩM − Ω.
    double drift() const;

private:
    int n_;
    Matrix m_;
};

/// Sampled continuous Lagrangian path. The interpolation contract between
/// samples is linear in frame entries followed by re-orthonormalization;
/// consecutive samples must stay within π/4 in principal angles.
struct LagrangianPath {
    std::vector<double> t;
    std::vector<LagrangianFrame> frames;

    LagrangianPath(std::vector<double> instants, std::vector<LagrangianFrame> fr);

    std::size_t size() const { return t.size(); }
    /// Path with midpoint samples inserted per the interpolation contract.
    LagrangianPath refined() const;
};

/// σ_min of the stacked orthonormal frames; 0 iff the spans intersect.
double transversality_margin(const LagrangianFrame& a, const LagrangianFrame& b);

/// Chart φ_{L0,L1}: the symmetric form ω(T·,·) on L0, where T : L0 → L1 has
/// graph L in L0 ⊕ L1. Expressed in the basis given by L0's stored columns.
/// The kernel of the returned form is L ∩ L0.
SymmetricForm chart_value(const LagrangianFrame& L, const LagrangianFrame& L0,
                          const LagrangianFrame& L1);

/// The 2ⁿ diagonal-graph Lagrangians over Ω·L0 plus Ω·L0 itself; every one of
/// them is transverse to L0.
std::vector<LagrangianFrame> chart_candidates(const LagrangianFrame& L0);

struct MaslovOptions {
    double trans_tol = 1e-7; // minimum admissible transversality margin for a chart
};

/// Maslov index of a sampled Lagrangian path relative to L0.
///
/// The interval is adaptively bisected until a single auxiliary Lagrangian
/// from chart_candidates is transverse to every sampled frame of the piece;
/// each piece contributes the half-signature difference of the chart values
/// at its endpoints, and pieces are summed. Endpoint intersections with L0
/// are admissible and may make the result a genuine half-integer.
HalfInt maslov_index(const LagrangianPath& path, const LagrangianFrame& L0,
                     const MaslovOptions& opts = {});

/// Image frame Φ(L).
LagrangianFrame apply_symplectomorphism(const SymplecticMatrix& phi, const LagrangianFrame& L);

/// Maslov index split along a symplectic direct sum V = V1 ⊕ V2. Each factor
/// is given by a 2n×2k frame spanning a symplectic subspace; ℓ(t) ∩ Vi and
/// L0 ∩ Vi must be Lagrangian in the factors. The two indices sum to
/// maslov_index(path, L0).
std::pair<HalfInt, HalfInt> direct_sum_split(const LagrangianPath& path,
                                             const LagrangianFrame& L0, const Matrix& V1,
                                             const Matrix& V2, const MaslovOptions& opts = {});

/// Darboux (standard symplectic) basis of the span of a 2n×2k frame; returns
/// 2n×2k columns B with BᵀΩB equal to the canonical 2k form.
Matrix darboux_basis(const Matrix& frame, const Matrix& omega, double tol = Defaults::rank_tol);

} // namespace submaslov
