#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "submaslov/symplectic.hpp"

using namespace submaslov;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix rotation_flow(double t) {
    Matrix m(2, 2);
    m << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    return m;
}

LagrangianPath sampled_path(const std::function<Matrix(double)>& frame_of_t, double a, double b,
                            int steps) {
    std::vector<double> ts;
    std::vector<LagrangianFrame> frames;
    for (int i = 0; i <= steps; ++i) {
        const double t = a + (b - a) * i / steps;
        ts.push_back(t);
        frames.emplace_back(frame_of_t(t));
    }
    return LagrangianPath(std::move(ts), std::move(frames));
}

} // namespace

TEST_CASE("canonical omega") {
    Matrix o1 = canonical_omega(1);
    CHECK(o1(0, 0) == 0.0);
    CHECK(o1(0, 1) == 1.0);
    CHECK(o1(1, 0) == -1.0);
    CHECK(o1(1, 1) == 0.0);

    Matrix o2 = canonical_omega(2);
    CHECK((o2.topRightCorner(2, 2) - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK((o2.bottomLeftCorner(2, 2) + Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(o2.topLeftCorner(2, 2).norm() == 0.0);

    for (int n : {1, 2, 3, 5}) {
        const Matrix o = canonical_omega(n);
        CHECK((o.transpose() + o).norm() == 0.0);
        CHECK((o * o + Matrix::Identity(2 * n, 2 * n)).norm() == 0.0);
    }
    CHECK_THROWS_AS(canonical_omega(0), InvalidDimension);
}

TEST_CASE("signature basics") {
    Matrix d = Vector::Zero(3).asDiagonal();
    d.diagonal() << 1.0, 1.0, -1.0;
    const Signature s = signature(SymmetricForm(d, 1e-9));
    CHECK(s == Signature{2, 1, 0});

    const Signature z = signature(SymmetricForm(Matrix::Zero(3, 3)));
    CHECK(z == Signature{0, 0, 3});
}

TEST_CASE("signature of a chart value cross-checked with characteristic-polynomial roots") {
    // two-frequency harmonic-oscillator flow a quarter period into the first
    // oscillator, chart over a transverse pair (distinct eigenvalues, so the
    // root finder sees simple sign changes)
    const int n = 2;
    const double t = kPi / 4.0;
    const double w1 = 1.0, w2 = 0.6;
    Matrix phi = Matrix::Zero(4, 4);
    phi(0, 0) = std::cos(w1 * t);
    phi(0, 2) = std::sin(w1 * t);
    phi(2, 0) = -std::sin(w1 * t);
    phi(2, 2) = std::cos(w1 * t);
    phi(1, 1) = std::cos(w2 * t);
    phi(1, 3) = std::sin(w2 * t);
    phi(3, 1) = -std::sin(w2 * t);
    phi(3, 3) = std::cos(w2 * t);
    const auto L0 = LagrangianFrame::vertical(n);
    const auto L1 = LagrangianFrame::horizontal(n);
    const LagrangianFrame ell(phi * L0.columns());
    const SymmetricForm form = chart_value(ell, L0, L1);

    const Signature s = signature(form);
    const auto roots = oracle::eigenvalues_by_bisection(form.entries, -50.0, 50.0);
    int plus = 0, minus = 0;
    for (double r : roots) {
        if (r > 1e-9) ++plus;
        if (r < -1e-9) ++minus;
    }
    CHECK(int(roots.size()) == n);
    CHECK(s.n_plus == plus);
    CHECK(s.n_minus == minus);
    CHECK(s.n_zero == n - plus - minus);
}

TEST_CASE("chart value: L equal to L0 gives the zero form") {
    std::mt19937_64 rng(7);
    for (int n : {1, 2, 3}) {
        const auto L0 = oracle::random_lagrangian(n, rng);
        const auto cands = chart_candidates(L0);
        const SymmetricForm f = chart_value(L0, L0, cands.front());
        CHECK(f.entries.norm() < 1e-10);
    }
}

TEST_CASE("chart value: one-dimensional hand-computed entry") {
    // L0 = span(1,0), L1 = span(0,1), L = span(1,c).  The graph map sends
    // e1 to (0,c), and ω((0,c),(1,0)) = -c.
    for (double c : {0.3, -1.25, 2.0}) {
        Matrix l0(2, 1), l1(2, 1), l(2, 1);
        l0 << 1, 0;
        l1 << 0, 1;
        l << 1, c;
        const SymmetricForm f =
            chart_value(LagrangianFrame(l), LagrangianFrame(l0), LagrangianFrame(l1));
        CHECK(f.entries(0, 0) == doctest::Approx(-c).epsilon(1e-12));
    }
}

TEST_CASE("chart value kernel dimension equals dim(L ∩ L0)") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(1, 4);
    int nontrivial = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = dim(rng);
        std::uniform_int_distribution<int> nullity(0, n);
        const int k = nullity(rng);
        // B symmetric with nullity k; L = graph {(B a, a)} meets the vertical
        // Lagrangian in exactly k dimensions.
        Matrix q = oracle::expm(Matrix(0.3 * (Matrix::Random(n, n) -
                                              Matrix::Random(n, n).transpose())));
        Vector d = Vector::Random(n).cwiseAbs() + Vector::Constant(n, 0.5);
        for (int i = 0; i < k; ++i) d(i) = 0.0;
        Matrix b = q.transpose() * d.asDiagonal() * q;
        Matrix cols(2 * n, n);
        cols << b, Matrix::Identity(n, n);
        // scramble by a random symplectomorphism applied to both L and L0
        const SymplecticMatrix phi(oracle::random_symplectic(n, rng), 1e-6);
        const LagrangianFrame L = apply_symplectomorphism(phi, LagrangianFrame(cols));
        const LagrangianFrame L0 =
            apply_symplectomorphism(phi, LagrangianFrame::vertical(n));

        CHECK(L.intersection_dim(L0) == k); // independent rank-based count
        // find a candidate chart transverse to both
        for (const auto& L1 : chart_candidates(L0)) {
            if (transversality_margin(L1, L) > 1e-4 && transversality_margin(L1, L0) > 1e-4) {
                const Signature s = signature(chart_value(L, L0, L1));
                CHECK(s.n_zero == k);
                if (k > 0) ++nontrivial;
                break;
            }
        }
    }
    CHECK(nontrivial > 10); // the sweep saw genuinely degenerate cases
}

TEST_CASE("maslov index: constant path is zero") {
    std::mt19937_64 rng(3);
    const auto L = oracle::random_lagrangian(2, rng);
    const auto L0 = oracle::random_lagrangian(2, rng);
    std::vector<double> ts{0.0, 0.5, 1.0};
    std::vector<LagrangianFrame> fr{L, L, L};
    CHECK(maslov_index(LagrangianPath(ts, fr), L0) == HalfInt{});
}

TEST_CASE("maslov index: harmonic oscillator rotation flow") {
    const auto L0 = LagrangianFrame::vertical(1);
    auto ell = [&](double t) { return Matrix(rotation_flow(t) * L0.columns()); };

    // Away from the initial tangency the single interior crossing at t = pi
    // contributes +1.
    const auto restricted = sampled_path(ell, 0.05, kPi + 0.1, 400);
    CHECK(maslov_index(restricted, L0) == HalfInt::whole(1));

    // Starting exactly on L0 adds a half contribution at the departure.
    const auto full = sampled_path(ell, 0.0, kPi + 0.1, 400);
    CHECK(maslov_index(full, L0) == HalfInt::from_twice(3));

    // Independent fine-grained chart-formula oracle agrees on both.
    auto frame_of = [&](double t) { return LagrangianFrame(ell(t)); };
    CHECK(oracle::maslov_fine_chart(frame_of, 0.05, kPi + 0.1, L0) == HalfInt::whole(1));
    CHECK(oracle::maslov_fine_chart(frame_of, 0.0, kPi + 0.1, L0) == HalfInt::from_twice(3));
}

TEST_CASE("maslov index: concatenation additivity on random flows") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + int(trial % 3);
        const Matrix x = oracle::random_sp_algebra(n, rng, 1.2);
        const auto start = oracle::random_lagrangian(n, rng);
        const auto L0 = oracle::random_lagrangian(n, rng);
        auto ell = [&](double t) { return Matrix(oracle::expm(Matrix(t * x)) * start.columns()); };
        const auto whole = sampled_path(ell, 0.0, 2.0, 256);
        const auto first = sampled_path(ell, 0.0, 0.875, 112);
        const auto second = sampled_path(ell, 0.875, 2.0, 144);
        CHECK(maslov_index(whole, L0) ==
              maslov_index(first, L0) + maslov_index(second, L0));
    }
}

TEST_CASE("maslov index: invariance under a fixed symplectomorphism") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + trial % 2;
        const Matrix x = oracle::random_sp_algebra(n, rng, 1.0);
        const auto start = oracle::random_lagrangian(n, rng);
        const auto L0 = oracle::random_lagrangian(n, rng);
        const SymplecticMatrix phi(oracle::random_symplectic(n, rng), 1e-6);
        auto ell = [&](double t) { return Matrix(oracle::expm(Matrix(t * x)) * start.columns()); };
        auto mapped = [&](double t) { return Matrix(phi.entries() * ell(t)); };
        const auto p = sampled_path(ell, 0.0, 1.7, 256);
        const auto q = sampled_path(mapped, 0.0, 1.7, 256);
        CHECK(maslov_index(p, L0) == maslov_index(q, apply_symplectomorphism(phi, L0)));
    }
}

TEST_CASE("maslov index: invariance under continuous families fixing L0") {
    // phi_t of block form [[Z,0],[Z^-T W, Z^-T]] preserves the vertical
    // Lagrangian; the index of t -> phi_t(ell(t)) must match ell's.
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + trial % 3;
        const auto L0 = LagrangianFrame::vertical(n);
        const Matrix x = oracle::random_sp_algebra(n, rng, 1.0);
        const auto start = oracle::random_lagrangian(n, rng);
        const Matrix z0 = Matrix::Random(n, n);
        const Matrix z1 = Matrix::Random(n, n);
        const Matrix w0 = Matrix::Random(n, n);
        auto phi = [&](double t) {
            Matrix z = Matrix::Identity(n, n) + 0.4 * std::sin(t) * z0 + 0.3 * std::cos(2 * t) * z1;
            Matrix w = std::sin(3 * t) * (w0 + w0.transpose());
            Matrix zimt = z.inverse().transpose();
            Matrix m(2 * n, 2 * n);
            m << z, Matrix::Zero(n, n), zimt * w, zimt;
            return m;
        };
        auto ell = [&](double t) { return Matrix(oracle::expm(Matrix(t * x)) * start.columns()); };
        auto moved = [&](double t) { return Matrix(phi(t) * ell(t)); };
        const auto p = sampled_path(ell, 0.0, 1.5, 300);
        const auto q = sampled_path(moved, 0.0, 1.5, 300);
        CHECK(maslov_index(p, L0) == maslov_index(q, L0));
    }
}

TEST_CASE("maslov index: stable under grid refinement") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + trial % 3;
        const Matrix x = oracle::random_sp_algebra(n, rng, 1.0);
        const auto start = oracle::random_lagrangian(n, rng);
        const auto L0 = oracle::random_lagrangian(n, rng);
        auto ell = [&](double t) { return Matrix(oracle::expm(Matrix(t * x)) * start.columns()); };
        const auto p = sampled_path(ell, 0.0, 2.0, 200);
        CHECK(maslov_index(p, L0) == maslov_index(p.refined(), L0));
    }
}

TEST_CASE("maslov index: partition failure reports the offending subinterval") {
    // A two-sample path cannot be refined further; with the admissible
    // margin pushed near its theoretical maximum every candidate chart is
    // rejected and the failure must carry the subinterval.
    std::mt19937_64 rng(71);
    const auto L0 = LagrangianFrame::vertical(2);
    const auto f0 = oracle::random_lagrangian(2, rng);
    const Matrix drift = oracle::expm(Matrix(0.02 * oracle::random_sp_algebra(2, rng)));
    std::vector<double> ts{0.25, 0.75};
    std::vector<LagrangianFrame> fr{f0, LagrangianFrame(drift * f0.columns())};
    MaslovOptions opts;
    opts.trans_tol = 0.999; // no pair of orthonormal frames clears this
    try {
        maslov_index(LagrangianPath(ts, fr), L0, opts);
        FAIL("expected PartitionFailure");
    } catch (const PartitionFailure& e) {
        CHECK(e.t_lo == doctest::Approx(0.25));
        CHECK(e.t_hi == doctest::Approx(0.75));
    }
}

TEST_CASE("direct sum split of two independent rotations") {
    // coordinates (v1, v2, a1, a2); factor i spans {e_vi, e_ai}
    const int n = 2;
    auto frame = [&](double t) {
        Matrix m(4, 2);
        m << std::sin(t), 0.0, 0.0, std::sin(0.35 * t), std::cos(t), 0.0, 0.0,
            std::cos(0.35 * t);
        return m;
    };
    Matrix v1(4, 2), v2(4, 2);
    v1 << 1, 0, 0, 0, 0, 1, 0, 0;
    v2 << 0, 0, 1, 0, 0, 0, 0, 1;
    const auto L0 = LagrangianFrame::vertical(n);
    const auto path = sampled_path(frame, 0.05, 4.0, 500);
    const auto [i1, i2] = direct_sum_split(path, L0, v1, v2);

    // factor oracles computed independently in dimension one
    const auto L0_1 = LagrangianFrame::vertical(1);
    auto f1 = [&](double t) { return Matrix(rotation_flow(t) * L0_1.columns()); };
    auto f2 = [&](double t) { return Matrix(rotation_flow(0.35 * t) * L0_1.columns()); };
    const HalfInt m1 = maslov_index(sampled_path(f1, 0.05, 4.0, 500), L0_1);
    const HalfInt m2 = maslov_index(sampled_path(f2, 0.05, 4.0, 500), L0_1);
    CHECK(i1 == m1);
    CHECK(i2 == m2);
    CHECK(i1 + i2 == maslov_index(path, L0));
}

TEST_CASE("direct sum split: constant second factor contributes zero") {
    auto frame = [&](double t) {
        Matrix m(4, 2);
        m << std::sin(t), 0.0, 0.0, 0.0, std::cos(t), 0.0, 0.0, 1.0;
        return m;
    };
    Matrix v1(4, 2), v2(4, 2);
    v1 << 1, 0, 0, 0, 0, 1, 0, 0;
    v2 << 0, 0, 1, 0, 0, 0, 0, 1;
    const auto path = sampled_path(frame, 0.1, 3.5, 400);
    const auto [i1, i2] = direct_sum_split(path, LagrangianFrame::vertical(2), v1, v2);
    CHECK(i2 == HalfInt{});
    CHECK(i1 + i2 == maslov_index(path, LagrangianFrame::vertical(2)));
}

TEST_CASE("apply symplectomorphism") {
    const int n = 3;
    const auto L0 = LagrangianFrame::vertical(n);
    const SymplecticMatrix id(Matrix::Identity(2 * n, 2 * n));
    CHECK(apply_symplectomorphism(id, L0).same_span(L0));

    const SymplecticMatrix omega(canonical_omega(n));
    CHECK(apply_symplectomorphism(omega, L0).same_span(LagrangianFrame::horizontal(n)));

    // the family [[Z,0],[Z^-T W, Z^-T]] fixes the vertical Lagrangian
    std::mt19937_64 rng(61);
    for (double t : {0.0, 0.4, 1.3, 2.9}) {
        Matrix z = Matrix::Identity(n, n) + 0.3 * std::sin(t) * Matrix::Random(n, n);
        Matrix w = Matrix::Random(n, n);
        w = std::cos(t) * (w + w.transpose()).eval();
        Matrix zimt = z.inverse().transpose();
        Matrix m(2 * n, 2 * n);
        m << z, Matrix::Zero(n, n), zimt * w, zimt;
        CHECK(apply_symplectomorphism(SymplecticMatrix(m), L0).same_span(L0));
    }

    Matrix bad = Matrix::Identity(2 * n, 2 * n);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(SymplecticMatrix{bad}, InvalidSymplectomorphism);
}

TEST_CASE("frame validation") {
    Matrix notiso(2, 1);
    notiso << 1.0, 1.0; // fine for n=1 (all lines are Lagrangian)
    CHECK_NOTHROW(LagrangianFrame{notiso});

    Matrix bad(4, 2); // span{e_v1, e_a1} is not isotropic: omega pairs them
    bad << 1, 0, 0, 0, 0, 1, 0, 0;
    CHECK_THROWS_AS(LagrangianFrame{bad}, InvalidFrame);

    Matrix deficient(4, 2);
    deficient << 1, 1, 0, 0, 0, 0, 0, 0;
    CHECK_THROWS_AS(LagrangianFrame{deficient}, InvalidFrame);
}
