#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "submaslov/errors.hpp"

namespace submaslov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Library-wide default tolerances. All knobs are overridable per call site.
struct Defaults {
    static constexpr double rank_tol = 1e-8;          // relative rank / zero-eigenvalue decisions
    static constexpr double conservation_tol = 1e-7;  // geodesic energy drift
    static constexpr double fd_tol = 1e-5;            // finite-difference identity residuals
    static constexpr double sympl_tol = 1e-8;         // flow symplecticity drift
    static constexpr double resid_tol = 1e-6;         // ODE residual checks
    static constexpr double fd_step = 1e-5;           // first-derivative FD step scale
    static constexpr double curvature_fd_step = 1e-4; // step for differentiating Christoffel data
    static constexpr double dproj_step = 1e-6;        // differential of a projection map
};

/// Numerical rank with threshold tol * max(1, sigma_max).
inline int numerical_rank(const Matrix& m, double tol = Defaults::rank_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

/// Orthonormal basis of the column space (thin QR with rank truncation).
inline Matrix orthonormal_columns(const Matrix& m, double tol = Defaults::rank_tol) {
    if (m.cols() == 0) return m;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s(0));
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of ker(m) (right singular vectors below threshold).
inline Matrix kernel_basis(const Matrix& m, double tol = Defaults::rank_tol) {
    if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

/// Smallest singular value.
inline double sigma_min(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return s.size() > 0 ? s(s.size() - 1) : 0.0;
}

/// Derivative of uniformly sampled data, 4th order central with one-sided ends.
/// Requires at least 5 samples.
template <typename T>
std::vector<T> sampled_derivative(const std::vector<T>& f, double h) {
    const int n = static_cast<int>(f.size());
    if (n < 5) throw ResolutionError("sampled_derivative: need at least 5 samples");
    std::vector<T> d(n);
    for (int i = 2; i < n - 2; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    // 4th order one-sided stencils
    auto oneside = [&](int i, int s) {
        return (-25.0 * f[i] + 48.0 * f[i + s] - 36.0 * f[i + 2 * s] + 16.0 * f[i + 3 * s] -
                3.0 * f[i + 4 * s]) / (12.0 * h * s);
    };
    d[0] = oneside(0, 1);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 1] = oneside(n - 1, -1);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) /
               (12.0 * h);
    return d;
}

/// Composite Simpson quadrature on a uniform grid (3/8 rule patch for odd interval counts).
inline double simpson(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1; // interval count
    if (n < 3) {
        double s = 0.0; // trapezoid fallback for tiny grids
        for (int i = 0; i < n; ++i) s += 0.5 * h * (f[i] + f[i + 1]);
        return s;
    }
    double total = 0.0;
    int m = n;
    int start = 0;
    if (n % 2 == 1) { // peel a 3/8 block
        total += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
        start = 3;
        m = n - 3;
    }
    if (m > 0) {
        double s = f[start] + f[start + m];
        for (int i = 1; i < m; i += 2) s += 4.0 * f[start + i];
        for (int i = 2; i < m; i += 2) s += 2.0 * f[start + i];
        total += h / 3.0 * s;
    }
    return total;
}

/// Classic RK4 for vector-valued first order systems on a fixed grid.
inline std::vector<Vector> rk4(const std::function<Vector(double, const Vector&)>& rhs,
                               const Vector& y0, double a, double b, int steps) {
    if (steps < 1) throw InvalidDimension("rk4: steps must be positive");
    std::vector<Vector> out;
    out.reserve(steps + 1);
    out.push_back(y0);
    const double h = (b - a) / steps;
    Vector y = y0;
    for (int i = 0; i < steps; ++i) {
        const double t = a + i * h;
        const Vector k1 = rhs(t, y);
        const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back(y);
    }
    return out;
}

} // namespace submaslov
