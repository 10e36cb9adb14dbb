#include <gtest/gtest.h>

#include <cmath>

#include "mtctrl/benchmarks.hpp"
#include "mtctrl/lti.hpp"
#include "support/oracles.hpp"

using namespace mtctrl;
using testing_support::Rng;
using testing_support::stable_matrix;
using testing_support::stable_system;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
StateSpace scalar(double a, double b, double c) { return StateSpace::make(m1(a), m1(b), m1(c)); }

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no mtctrl::Error thrown";
    return ErrorCode::IoError;
}

}  // namespace

TEST(StateSpace, RejectsInconsistentShapes) {
    EXPECT_EQ(code_of([] { StateSpace::make(Matrix::Zero(2, 3), Matrix::Zero(2, 1), Matrix::Zero(1, 2)); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { StateSpace::make(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2)); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { StateSpace::make(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 3)); }),
              ErrorCode::DimensionMismatch);
}

TEST(StateSpace, RejectsNonFinite) {
    Matrix A = -Matrix::Identity(2, 2);
    A(0, 1) = std::nan("");
    EXPECT_EQ(code_of([&] { StateSpace::make(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2)); }),
              ErrorCode::NonFiniteInput);
}

// ---- Lyapunov -----------------------------------------------------------------

TEST(Lyapunov, NegativeIdentity) {
    const Matrix P = solve_lyapunov(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    EXPECT_LE((P - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(Lyapunov, Scalar) { EXPECT_NEAR(solve_lyapunov(m1(-1), m1(4))(0, 0), 2.0, 1e-14); }

TEST(Lyapunov, RandomResidualAndSymmetry) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix A = stable_matrix(rng, 5);
        const Matrix B = rng.matrix(5, 2);
        const Matrix M = B * B.transpose();
        const Matrix P = solve_lyapunov(A, M);
        EXPECT_LE(oracle::lyap_residual(A, P, M), 1e-9 * std::max(1.0, M.norm()));
        EXPECT_EQ((P - P.transpose()).norm(), 0.0);
    }
}

TEST(Lyapunov, NotHurwitz) {
    EXPECT_EQ(code_of([] { solve_lyapunov(m1(0.0), m1(1.0)); }), ErrorCode::NotHurwitz);
    Matrix A(2, 2);
    A << 0, 1, -1, 0;  // marginal
    EXPECT_EQ(code_of([&] { solve_lyapunov(A, Matrix::Identity(2, 2)); }), ErrorCode::NotHurwitz);
}

TEST(Lyapunov, SchurPathMatchesKronecker) {
    Rng rng(12);
    for (int n : {1, 2, 4, 7}) {
        const Matrix A = stable_matrix(rng, n);
        const Matrix X = rng.matrix(n, n);
        const Matrix M = X + X.transpose();
        const Matrix P1 = solve_lyapunov(A, M);
        const Matrix P2 = solve_lyapunov_schur(A, M);
        EXPECT_LE((P1 - P2).norm(), 1e-10 * std::max(1.0, P1.norm())) << "n=" << n;
        EXPECT_LE(oracle::lyap_residual(A, P2, M), 1e-9 * std::max(1.0, M.norm()));
    }
}

TEST(Sylvester, RectangularResidual) {
    Rng rng(13);
    const Matrix A = stable_matrix(rng, 3);
    const Matrix B = stable_matrix(rng, 5);
    const Matrix C = rng.matrix(3, 5);
    const Matrix X = solve_sylvester(SchurForm::of(A), SchurForm::of(B), C);
    EXPECT_LE((A * X + X * B + C).norm(), 1e-10 * C.norm());
}

TEST(Gramians, ScalarExamples) {
    const Gramians g = gramians(scalar(-1, 1, 2));
    EXPECT_NEAR(g.P(0, 0), 0.5, 1e-14);
    EXPECT_NEAR(g.Q(0, 0), 2.0, 1e-14);
    EXPECT_EQ(gramians(scalar(-1, 0, 1)).P(0, 0), 0.0);
}

TEST(Gramians, DualTraceIdentity) {
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const StateSpace sys = stable_system(rng, 3);
        const Gramians g = gramians(sys);
        const double a = (sys.C * g.P * sys.C.transpose()).trace();
        const double b = (sys.B.transpose() * g.Q * sys.B).trace();
        EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, a));
    }
}

// ---- norms ------------------------------------------------------------------

TEST(H2, Examples) {
    EXPECT_NEAR(h2_norm_sq(scalar(-1, 1, 2)), 2.0, 1e-14);
    EXPECT_EQ(h2_norm_sq(StateSpace::make(-Matrix::Identity(2, 2), Matrix::Ones(2, 1), Matrix::Zero(1, 2))),
              0.0);
    EXPECT_EQ(code_of([] { h2_norm_sq(scalar(0.5, 1, 1)); }), ErrorCode::NotHurwitz);
}

TEST(H2, MatchesImpulseQuadrature) {
    Rng rng(15);
    for (int trial = 0; trial < 5; ++trial) {
        const StateSpace sys = stable_system(rng, 4, 2, 2);
        const double exact = h2_norm_sq(sys);
        const double quad = oracle::h2_quadrature(sys, 40.0, 8000);
        EXPECT_NEAR(exact, quad, 1e-4 * exact);
    }
}

TEST(H2, SimilarityInvariant) {
    Rng rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        const StateSpace sys = stable_system(rng, 4, 2, 1);
        const Matrix T = rng.matrix(4, 4) + 3.0 * Matrix::Identity(4, 4);
        const Matrix Ti = T.inverse();
        const StateSpace moved = StateSpace::make(T * sys.A * Ti, T * sys.B, sys.C * Ti);
        const double h = h2_norm_sq(sys);
        EXPECT_NEAR(h2_norm_sq(moved), h, 1e-6 * h);
    }
}

TEST(Hinf, Examples) {
    EXPECT_NEAR(hinf_norm(scalar(-1, 1, 2)), 2.0, 2e-6);
    EXPECT_EQ(hinf_norm(StateSpace::make(-Matrix::Identity(2, 2), Matrix::Zero(2, 1), Matrix::Ones(1, 2))),
              0.0);
    EXPECT_EQ(code_of([] { hinf_norm(scalar(1, 1, 1)); }), ErrorCode::NotHurwitz);
}

TEST(Hinf, MatchesFrequencyGrid) {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const StateSpace sys = stable_system(rng, 3);
        const double h = hinf_norm(sys);
        const double grid = oracle::freq_grid_max(sys, 1e-3, 1e3, 4000);
        EXPECT_NEAR(h, grid, 1e-4 * grid) << "trial " << trial;
        // DC gain lower bound
        EXPECT_GE(h, oracle::sigma_max(oracle::transfer(sys, 0.0)) - 1e-6 * h);
    }
}

TEST(Hinf, ResonantPeak) {
    // lightly damped pair: the peak sits far from w = 0
    Matrix A(2, 2);
    A << -0.01, 5.0, -5.0, -0.01;
    const StateSpace sys = StateSpace::make(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2));
    const double grid = oracle::freq_grid_max(sys, 4.0, 6.0, 200001);
    EXPECT_NEAR(hinf_norm(sys, 1e-8), grid, 1e-5 * grid);
}

TEST(L1, Examples) {
    EXPECT_NEAR(l1_norm(scalar(-1, 1, 2)), 2.0, 1e-6);
    EXPECT_NEAR(l1_norm(scalar(-2, 1, 1)), 0.5, 1e-6);
    EXPECT_EQ(code_of([] { l1_norm(StateSpace::make(-Matrix::Identity(2, 2), Matrix::Ones(2, 2), Matrix::Ones(1, 2))); }),
              ErrorCode::NotSiso);
    EXPECT_EQ(code_of([] { l1_norm(scalar(0.1, 1, 1)); }), ErrorCode::NotHurwitz);
}

TEST(L1, ScalarErrorPairClosedForm) {
    // Desired (a_l, r_l) = (-1, 2) against a scalar approximant with r = 1
    // and pole x_l; for x_l in (a_l, 0) the L1 error has the closed form
    //   r (2 e^{y ln(r_l/r)} - 1) / (a_l y) + r/a_l - r_l/a_l,  y = x_l/(x_l - a_l).
    const double al = -1.0, rl = 2.0, r = 1.0;
    for (double x : {-0.70772, -0.9, -0.5, -0.2}) {
        const double y = x / (x - al);
        const double closed = r * (2.0 * std::exp(y * std::log(rl / r)) - 1.0) / (al * y) + r / al - rl / al;
        StateSpace err = difference_system(scalar(al, 1.0, rl), scalar(x, 1.0, r));
        EXPECT_NEAR(l1_norm(err), closed, 1e-4) << "x=" << x;
    }
}

TEST(SpectralAbscissa, Examples) {
    EXPECT_DOUBLE_EQ(spectral_abscissa(-Matrix::Identity(3, 3)), -1.0);
    Matrix J(2, 2);
    J << 0, 1, 0, 0;
    EXPECT_NEAR(spectral_abscissa(J), 0.0, 1e-14);
}

TEST(SpectralAbscissa, MatchesCharacteristicRoots) {
    Rng rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = rng.matrix(6, 6);
        EXPECT_NEAR(spectral_abscissa(A), oracle::max_real_root(A), 1e-8);
    }
}

// ---- balancing ----------------------------------------------------------------

TEST(Balanced, ScalarHankel) {
    const BalancedRealization b = balanced_minimal_realization(scalar(-1, 1, 2));
    ASSERT_EQ(b.order(), 1);
    EXPECT_NEAR(b.hankel(0), 1.0, 1e-12);
}

TEST(Balanced, DuplicatedSystemCollapses) {
    Rng rng(19);
    const StateSpace s = stable_system(rng, 3);
    MultiTaskProblem p{{s, s}, 1};
    const StateSpace ext = parallel_system(p);
    ASSERT_EQ(ext.states(), 6);
    EXPECT_EQ(balanced_minimal_realization(ext).order(), 3);
}

TEST(Balanced, GramiansDiagonalAndHankelMatch) {
    Rng rng(20);
    for (int trial = 0; trial < 10; ++trial) {
        const StateSpace sys = stable_system(rng, 4, 2, 2);
        const BalancedRealization b = balanced_minimal_realization(sys);
        const double s1 = b.hankel(0);
        const Gramians g = gramians(b.sys);
        const Matrix S = b.hankel.asDiagonal();
        EXPECT_LE((g.P - S).norm(), 1e-7 * s1);
        EXPECT_LE((g.Q - S).norm(), 1e-7 * s1);
        for (Eigen::Index k = 1; k < b.order(); ++k) EXPECT_GE(b.hankel(k - 1), b.hankel(k));

        // eigenvalue oracle on the original Gramians (Schur-path solves)
        const Matrix P = solve_lyapunov_schur(sys.A, sys.B * sys.B.transpose());
        const Matrix Q = solve_lyapunov_schur(sys.A.transpose(), sys.C.transpose() * sys.C);
        Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(P * Q).eigenvalues();
        std::vector<double> ref;
        for (Eigen::Index k = 0; k < ev.size(); ++k) ref.push_back(std::sqrt(std::max(0.0, ev(k).real())));
        std::sort(ref.rbegin(), ref.rend());
        ASSERT_EQ(b.order(), 4);
        for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(b.hankel(k), ref[static_cast<std::size_t>(k)], 1e-8);
    }
}

TEST(Balanced, PreservesTransfer) {
    Rng rng(21);
    const StateSpace sys = stable_system(rng, 5, 1, 2);
    const BalancedRealization b = balanced_minimal_realization(sys);
    for (double w : {0.0, 0.3, 2.0, 10.0}) {
        EXPECT_LE((oracle::transfer(sys, w) - oracle::transfer(b.sys, w)).norm(), 1e-8);
    }
}

// ---- LQR ------------------------------------------------------------------------

TEST(Lqr, Scalar) {
    const LqrSolution s = lqr(m1(0), m1(1), m1(1), m1(1));
    EXPECT_NEAR(s.K(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(s.P(0, 0), 1.0, 1e-12);
}

TEST(Lqr, DoubleIntegrator) {
    Matrix A(2, 2), B(2, 1);
    A << 0, 1, 0, 0;
    B << 0, 1;
    const LqrSolution s = lqr(A, B, Matrix::Identity(2, 2), m1(1));
    EXPECT_NEAR(s.K(0, 0), 1.0, 1e-10);
    EXPECT_NEAR(s.K(0, 1), std::sqrt(3.0), 1e-10);
    const Matrix care = A.transpose() * s.P + s.P * A - s.P * B * B.transpose() * s.P + Matrix::Identity(2, 2);
    EXPECT_LE(care.norm(), 1e-8);
    EXPECT_LT(spectral_abscissa(A - B * s.K), 0.0);
}

TEST(Lqr, CatalogPlantsAndResidual) {
    const PlantCatalog cat = plant_catalog();
    for (const StateSpace* p : cat.all()) {
        const Matrix Q = Matrix::Identity(p->states(), p->states());
        const Matrix R = Matrix::Identity(p->inputs(), p->inputs());
        const LqrSolution s = lqr(p->A, p->B, Q, R);
        const Matrix care = p->A.transpose() * s.P + s.P * p->A -
                            s.P * p->B * R.inverse() * p->B.transpose() * s.P + Q;
        EXPECT_LE(care.norm(), 1e-8 * std::max(1.0, s.P.norm()));
        EXPECT_LT(spectral_abscissa(p->A - p->B * s.K), 0.0);
    }
}

TEST(Lqr, RandomMimo) {
    Rng rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = rng.matrix(4, 4);
        const Matrix B = rng.matrix(4, 2);
        const Matrix Q = Matrix::Identity(4, 4);
        const Matrix R = Matrix::Identity(2, 2) * 0.5;
        const LqrSolution s = lqr(A, B, Q, R);
        const Matrix care = A.transpose() * s.P + s.P * A - s.P * B * R.inverse() * B.transpose() * s.P + Q;
        EXPECT_LE(care.norm(), 1e-8 * std::max(1.0, s.P.norm()));
        EXPECT_LT(spectral_abscissa(A - B * s.K), 0.0);
    }
}

TEST(Lqr, Errors) {
    EXPECT_EQ(code_of([] { lqr(m1(1), m1(0), m1(1), m1(1)); }), ErrorCode::NotStabilizable);
    EXPECT_EQ(code_of([] { lqr(m1(1), m1(1), m1(1), m1(0)); }), ErrorCode::DomainError);
}

// ---- interconnection and time domain -------------------------------------------

TEST(Feedback, ZeroControllerKeepsPlant) {
    Rng rng(23);
    const StateSpace plant = stable_system(rng, 3);
    const StateSpace ctrl = StateSpace::make(m1(-1), m1(0), m1(0));
    const StateSpace cl = negative_feedback(plant, ctrl);
    const std::vector<double> t{0.0, 0.5, 1.0, 3.0};
    const auto g1 = impulse_response(plant, t);
    const auto g2 = impulse_response(cl, t);
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(g1[k](0, 0), g2[k](0, 0), 1e-12);
}

TEST(Feedback, FastStaticLikeController) {
    const double k = 1e3;
    const StateSpace cl = negative_feedback(scalar(0, 1, 1), scalar(-k, k, 1));
    Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(cl.A).eigenvalues();
    double slow = -1e300;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) < 10.0) slow = ev(i).real();
    EXPECT_NEAR(slow, -1.0, 2e-3);
}

TEST(Feedback, PendulumWithLqg) {
    const PlantCatalog cat = plant_catalog();
    EXPECT_LT(spectral_abscissa(negative_feedback(cat.pendulum, lqg_controller(cat.pendulum)).A), 0.0);
}

TEST(Feedback, DimensionMismatch) {
    const StateSpace plant = StateSpace::make(m1(-1), Matrix::Ones(1, 2), m1(1));
    EXPECT_EQ(code_of([&] { negative_feedback(plant, scalar(-1, 1, 1)); }), ErrorCode::DimensionMismatch);
}

TEST(Impulse, Examples) {
    Rng rng(24);
    const StateSpace sys = stable_system(rng, 3, 2, 2);
    const auto g0 = impulse_response(sys, {0.0});
    EXPECT_EQ((g0[0] - sys.C * sys.B).norm(), 0.0);
    const auto g1 = impulse_response(scalar(-1, 1, 2), {1.0});
    EXPECT_NEAR(g1[0](0, 0), 2.0 * std::exp(-1.0), 1e-10);
}

TEST(Impulse, MatchesMatrixExponential) {
    Rng rng(25);
    for (int trial = 0; trial < 5; ++trial) {
        const StateSpace sys = stable_system(rng, 3);
        const auto g = impulse_response(sys, {0.0, 0.7, 2.0});
        EXPECT_NEAR(g[2](0, 0), (sys.C * oracle::expm(2.0 * sys.A) * sys.B)(0, 0), 1e-8);
        EXPECT_NEAR(g[1](0, 0), (sys.C * oracle::expm(0.7 * sys.A) * sys.B)(0, 0), 1e-8);
    }
}

TEST(Impulse, Rk4PropagatorIsTaylorPolynomial) {
    Rng rng(26);
    const Matrix A = rng.matrix(3, 3);
    const double h = 0.01;
    const Matrix Ah = A * h;
    const Matrix I = Matrix::Identity(3, 3);
    const Matrix taylor = I + Ah + Ah * Ah / 2.0 + Ah * Ah * Ah / 6.0 + Ah * Ah * Ah * Ah / 24.0;
    EXPECT_LE((rk4_propagator(A, h) - taylor).norm(), 1e-15);
}

TEST(DifferenceSystem, Shapes) {
    Rng rng(27);
    const StateSpace a = stable_system(rng, 2, 1, 2);
    const StateSpace b = stable_system(rng, 3, 1, 2);
    const StateSpace d = difference_system(a, b);
    EXPECT_EQ(d.states(), 5);
    EXPECT_EQ(d.inputs(), 1);
    EXPECT_EQ(d.outputs(), 2);
    EXPECT_EQ(code_of([&] { difference_system(a, stable_system(rng, 2, 2, 2)); }),
              ErrorCode::DimensionMismatch);
}
