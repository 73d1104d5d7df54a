#include "submaslov/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace submaslov {

Matrix canonical_omega(int n) {
    if (n < 1) throw InvalidDimension("canonical_omega: n must be >= 1");
    Matrix omega = Matrix::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Matrix::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return omega;
}

SymmetricForm::SymmetricForm(const Matrix& m, double tol_) : n(int(m.rows())), tol(tol_) {
    if (m.rows() != m.cols()) throw InvalidDimension("SymmetricForm: matrix must be square");
    if (tol < 0.0) throw InvalidArgument("SymmetricForm: tol must be nonnegative");
    entries = 0.5 * (m + m.transpose());
}

Signature signature(const SymmetricForm& form) {
    Signature sig;
    if (form.n == 0) return sig;
    Eigen::SelfAdjointEigenSolver<Matrix> es(form.entries, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const double radius = ev.cwiseAbs().maxCoeff();
    const double cut = form.tol * std::max(1.0, radius);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut) ++sig.n_plus;
        else if (ev(i) < -cut) ++sig.n_minus;
        else ++sig.n_zero;
    }
    return sig;
}

LagrangianFrame::LagrangianFrame(const Matrix& columns, double tol) : tol_(tol) {
    if (columns.rows() % 2 != 0 || columns.rows() == 0)
        throw InvalidDimension("LagrangianFrame: expected 2n x n columns");
    n_ = int(columns.rows()) / 2;
    if (columns.cols() != n_) throw InvalidDimension("LagrangianFrame: expected 2n x n columns");
    if (numerical_rank(columns, tol) != n_)
        throw InvalidFrame("LagrangianFrame: columns are rank deficient");
    cols_ = orthonormal_columns(columns, tol);
    if (cols_.cols() != n_) throw InvalidFrame("LagrangianFrame: span collapsed");

    // Interpolated or integrated frames carry a small isotropy defect. It is
    // quadratic in the input error, so a Newton projection onto the isotropy
    // manifold restores ω-isotropy without moving the span noticeably.
    // Grossly non-isotropic input is rejected rather than repaired.
    const Matrix omega = canonical_omega(n_);
    for (int iter = 0; iter < 4; ++iter) {
        const Matrix m = cols_.transpose() * omega * cols_;
        const double residual = m.norm();
        if (residual <= tol) break;
        if (residual > 0.2)
            throw InvalidFrame("LagrangianFrame: columns are not omega-isotropic (residual " +
                               std::to_string(residual) + ")");
        cols_ = orthonormal_columns(cols_ + 0.5 * omega * cols_ * m, tol);
        if (cols_.cols() != n_) throw InvalidFrame("LagrangianFrame: span collapsed");
    }
    const double iso = (cols_.transpose() * omega * cols_).norm();
    if (iso > 10.0 * tol)
        throw InvalidFrame("LagrangianFrame: isotropy projection failed (residual " +
                           std::to_string(iso) + ")");
}

LagrangianFrame LagrangianFrame::vertical(int n) {
    Matrix c = Matrix::Zero(2 * n, n);
    c.bottomRows(n) = Matrix::Identity(n, n);
    return LagrangianFrame(c);
}

LagrangianFrame LagrangianFrame::horizontal(int n) {
    Matrix c = Matrix::Zero(2 * n, n);
    c.topRows(n) = Matrix::Identity(n, n);
    return LagrangianFrame(c);
}

int LagrangianFrame::intersection_dim(const LagrangianFrame& other) const {
    Matrix joint(2 * n_, 2 * n_);
    joint << cols_, other.columns();
    return 2 * n_ - numerical_rank(joint, std::max(tol_, other.tol()));
}

bool LagrangianFrame::same_span(const LagrangianFrame& other) const {
    return intersection_dim(other) == n_;
}

SymplecticMatrix::SymplecticMatrix(const Matrix& m, double tol) : m_(m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
        throw InvalidDimension("SymplecticMatrix: expected 2n x 2n");
    n_ = int(m.rows()) / 2;
    const Matrix omega = canonical_omega(n_);
    const double d = (m.transpose() * omega * m - omega).norm();
    if (d > tol * std::max(1.0, m.squaredNorm()))
        throw InvalidSymplectomorphism("SymplecticMatrix: M^T Omega M != Omega (drift " +
                                       std::to_string(d) + ")");
}

double SymplecticMatrix::drift() const {
    const Matrix omega = canonical_omega(n_);
    return (m_.transpose() * omega * m_ - omega).norm();
}

namespace {

// Largest principal angle between two orthonormal-frame spans stays below
// π/4 iff σ_min(AᵀB) > cos(π/4).
bool principal_angles_ok(const LagrangianFrame& a, const LagrangianFrame& b) {
    const Matrix m = a.columns().transpose() * b.columns();
    return sigma_min(m) > std::cos(3.14159265358979323846 / 4.0);
}

} // namespace

LagrangianPath::LagrangianPath(std::vector<double> instants, std::vector<LagrangianFrame> fr)
    : t(std::move(instants)), frames(std::move(fr)) {
    if (t.size() != frames.size() || t.empty())
        throw InvalidDimension("LagrangianPath: instants/frames mismatch or empty");
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!(t[i] < t[i + 1]))
            throw InvalidArgument("LagrangianPath: instants must be strictly increasing");
        if (frames[i].n() != frames[i + 1].n())
            throw InvalidDimension("LagrangianPath: mixed dimensions");
        if (!principal_angles_ok(frames[i], frames[i + 1]))
            throw ResolutionError("LagrangianPath: consecutive frames exceed pi/4 in principal "
                                  "angle near t = " + std::to_string(t[i]));
    }
}

LagrangianPath LagrangianPath::refined() const {
    std::vector<double> rt;
    std::vector<LagrangianFrame> rf;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        rt.push_back(t[i]);
        rf.push_back(frames[i]);
        // entrywise average of column-aligned representatives (the stored
        // orthonormal bases of nearby spans need not correspond columnwise)
        const Matrix& f1 = frames[i].columns();
        const Matrix& f2 = frames[i + 1].columns();
        const Matrix mid = 0.5 * (f1 + f2 * (f2.transpose() * f1));
        rt.push_back(0.5 * (t[i] + t[i + 1]));
        rf.push_back(LagrangianFrame(mid, frames[i].tol()));
    }
    rt.push_back(t.back());
    rf.push_back(frames.back());
    return LagrangianPath(std::move(rt), std::move(rf));
}

double transversality_margin(const LagrangianFrame& a, const LagrangianFrame& b) {
    Matrix joint(2 * a.n(), a.n() + b.n());
    joint << a.columns(), b.columns();
    return sigma_min(joint);
}

SymmetricForm chart_value(const LagrangianFrame& L, const LagrangianFrame& L0,
                          const LagrangianFrame& L1) {
    const int n = L.n();
    if (L0.n() != n || L1.n() != n) throw InvalidDimension("chart_value: dimension mismatch");
    Matrix decomp(2 * n, 2 * n);
    decomp << L0.columns(), L1.columns();
    if (sigma_min(decomp) < L0.tol())
        throw InvalidChart("chart_value: (L0, L1) is not a Lagrangian decomposition");
    // write L's columns as L0 a + L1 b
    Eigen::PartialPivLU<Matrix> lu(decomp);
    const Matrix ab = lu.solve(L.columns());
    const Matrix a = ab.topRows(n);
    const Matrix b = ab.bottomRows(n);
    if (numerical_rank(a, L.tol()) < n)
        throw ChartDomainError("chart_value: L is not transverse to L1");
    // graph map in L0's basis: c ↦ b a⁻¹ c; the form is (b a⁻¹)ᵀ (L1ᵀ Ω L0)
    const Matrix t_map = a.transpose().partialPivLu().solve(b.transpose()).transpose();
    const Matrix omega = canonical_omega(n);
    const Matrix pairing = L1.columns().transpose() * omega * L0.columns();
    return SymmetricForm(t_map.transpose() * pairing, L.tol());
}

std::vector<LagrangianFrame> chart_candidates(const LagrangianFrame& L0) {
    const int n = L0.n();
    const Matrix omega = canonical_omega(n);
    const Matrix comp = omega * L0.columns(); // canonical Lagrangian complement
    std::vector<LagrangianFrame> out;
    out.emplace_back(comp, L0.tol());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Vector d(n);
        for (int i = 0; i < n; ++i) d(i) = (mask & (1u << i)) ? -1.0 : 1.0;
        out.emplace_back(comp + L0.columns() * d.asDiagonal(), L0.tol());
    }
    return out;
}

namespace {

HalfInt half_signature(const SymmetricForm& f) {
    return HalfInt::from_twice(signature(f).sign());
}

struct MaslovWorker {
    const LagrangianPath& path;
    const LagrangianFrame& L0;
    const std::vector<LagrangianFrame>& candidates;
    double trans_tol;
    std::vector<double> gap; // chordal distance between consecutive sample spans

    MaslovWorker(const LagrangianPath& p, const LagrangianFrame& l0,
                 const std::vector<LagrangianFrame>& cand, double tol)
        : path(p), L0(l0), candidates(cand), trans_tol(tol) {
        gap.resize(path.size() > 0 ? path.size() - 1 : 0);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const double c =
                sigma_min(path.frames[i].columns().transpose() * path.frames[i + 1].columns());
            gap[i] = std::sqrt(std::max(0.0, 1.0 - c * c));
        }
    }

    // Best candidate for samples [lo, hi], or -1. The admissible margin grows
    // with the sampling gap so the interpolated path cannot slip across the
    // chart boundary between samples.
    int find_chart(std::size_t lo, std::size_t hi) const {
        double required = trans_tol;
        for (std::size_t k = lo; k < hi; ++k) required = std::max(required, 2.0 * gap[k]);
        int best = -1;
        double best_margin = required;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double margin = transversality_margin(candidates[c], L0);
            for (std::size_t k = lo; k <= hi && margin > best_margin; ++k)
                margin = std::min(margin, transversality_margin(candidates[c], path.frames[k]));
            if (margin > best_margin) {
                best_margin = margin;
                best = int(c);
            }
        }
        return best;
    }

    HalfInt index(std::size_t lo, std::size_t hi) const {
        const int c = find_chart(lo, hi);
        if (c >= 0) {
            const auto& L1 = candidates[std::size_t(c)];
            return half_signature(chart_value(path.frames[hi], L0, L1)) -
                   half_signature(chart_value(path.frames[lo], L0, L1));
        }
        if (hi == lo + 1 || hi == lo) throw PartitionFailure(path.t[lo], path.t[hi]);
        const std::size_t mid = lo + (hi - lo) / 2;
        return index(lo, mid) + index(mid, hi);
    }
};

} // namespace

HalfInt maslov_index(const LagrangianPath& path, const LagrangianFrame& L0,
                     const MaslovOptions& opts) {
    if (path.frames.front().n() != L0.n())
        throw InvalidDimension("maslov_index: dimension mismatch");
    if (path.size() == 1) return HalfInt{};
    const auto candidates = chart_candidates(L0);
    const MaslovWorker w(path, L0, candidates, opts.trans_tol);
    return w.index(0, path.size() - 1);
}

LagrangianFrame apply_symplectomorphism(const SymplecticMatrix& phi, const LagrangianFrame& L) {
    if (phi.n() != L.n()) throw InvalidDimension("apply_symplectomorphism: dimension mismatch");
    return LagrangianFrame(phi.entries() * L.columns(), L.tol());
}

Matrix darboux_basis(const Matrix& frame, const Matrix& omega, double tol) {
    const int two_k = int(frame.cols());
    if (two_k % 2 != 0) throw InvalidDimension("darboux_basis: odd frame dimension");
    const int k = two_k / 2;
    std::vector<Vector> pool;
    for (int i = 0; i < two_k; ++i) pool.push_back(frame.col(i));
    Matrix out(frame.rows(), two_k);
    auto w = [&](const Vector& x, const Vector& y) { return x.dot(omega * y); };
    for (int pair = 0; pair < k; ++pair) {
        // pick the pool pair with the largest pairing
        int bi = -1, bj = -1;
        double best = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                const double p = std::abs(w(pool[i], pool[j]));
                if (p > best) { best = p; bi = int(i); bj = int(j); }
            }
        if (best < tol) throw SplitInapplicable("darboux_basis: degenerate restriction of omega");
        Vector u = pool[std::size_t(bi)];
        Vector v = pool[std::size_t(bj)] / w(u, pool[std::size_t(bj)]);
        pool.erase(pool.begin() + bj);
        pool.erase(pool.begin() + bi);
        for (auto& x : pool) x = x - w(x, v) * u + w(x, u) * v;
        out.col(pair) = u;
        out.col(k + pair) = v;
    }
    return out;
}

namespace {

// ℓ ∩ V expressed in the factor's Darboux coordinates.
LagrangianFrame factor_component(const LagrangianFrame& ell, const Matrix& darboux, double tol) {
    const int k = int(darboux.cols()) / 2;
    Matrix joint(ell.columns().rows(), ell.n() + darboux.cols());
    joint << ell.columns(), -darboux;
    const Matrix null = kernel_basis(joint, tol);
    Matrix inter = ell.columns() * null.topRows(ell.n());
    inter = orthonormal_columns(inter, tol);
    if (inter.cols() != k)
        throw SplitInapplicable("direct_sum_split: ell ∩ V_i is not Lagrangian in the factor");
    // coordinates in the Darboux basis (least squares; darboux has full column rank)
    const Matrix coords = darboux.colPivHouseholderQr().solve(inter);
    return LagrangianFrame(coords, tol);
}

} // namespace

std::pair<HalfInt, HalfInt> direct_sum_split(const LagrangianPath& path,
                                             const LagrangianFrame& L0, const Matrix& V1,
                                             const Matrix& V2, const MaslovOptions& opts) {
    const int n = L0.n();
    const Matrix omega = canonical_omega(n);
    const double tol = L0.tol();
    if (V1.cols() + V2.cols() != 2 * n)
        throw InvalidDimension("direct_sum_split: factor dimensions must sum to 2n");
    const Matrix d1 = darboux_basis(V1, omega, tol);
    const Matrix d2 = darboux_basis(V2, omega, tol);

    const LagrangianFrame L01 = factor_component(L0, d1, tol);
    const LagrangianFrame L02 = factor_component(L0, d2, tol);
    std::vector<LagrangianFrame> f1, f2;
    f1.reserve(path.size());
    f2.reserve(path.size());
    for (const auto& fr : path.frames) {
        f1.push_back(factor_component(fr, d1, tol));
        f2.push_back(factor_component(fr, d2, tol));
    }
    const LagrangianPath p1(path.t, std::move(f1));
    const LagrangianPath p2(path.t, std::move(f2));
    return {maslov_index(p1, L01, opts), maslov_index(p2, L02, opts)};
}

} // namespace submaslov
