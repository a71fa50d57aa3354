#include "levyfp/discretization.hpp"
#include "levyfp/operator_apply.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace levyfp;

namespace {

StableParams make(double alpha, double beta, double eps = 1.0, double sigma = 0.0, double b = 1.0) {
    StableParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.epsilon = eps;
    p.sigma = sigma;
    p.b = b;
    return p;
}

oracle::Params to_oracle(const StableParams& p) { return {p.alpha, p.beta, p.epsilon, p.sigma, p.b}; }

}  // namespace

TEST(Grid, Indexing) {
    Grid g(10);
    EXPECT_EQ(g.size(), 19u);
    EXPECT_DOUBLE_EQ(g.h(), 0.1);
    EXPECT_EQ(g.index_to_node(0), -9);
    EXPECT_EQ(g.node_to_index(9), 18u);
    EXPECT_EQ(g.node_to_index(0), 9u);
    const auto s = g.interior_nodes();
    ASSERT_EQ(s.size(), 19u);
    EXPECT_NEAR(s.front(), -0.9, 1e-15);
    EXPECT_NEAR(s.back(), 0.9, 1e-15);
    EXPECT_THROW(Grid(3), std::invalid_argument);
}

TEST(GFunction, Examples) {
    for (double a : {0.3, 1.0, 1.7}) EXPECT_EQ(g_function(0.0, a), 0.0);
    EXPECT_NEAR(g_function(0.5, 1.0), std::log(2.0), 1e-15);
    EXPECT_NEAR(g_function(0.75, 0.5), 1.0, 1e-15);
    EXPECT_NEAR(g_function(-0.75, 0.5), 1.0, 1e-15);
    EXPECT_THROW((void)g_function(1.0, 0.5), std::domain_error);
    EXPECT_THROW((void)g_function(-1.2, 0.5), std::domain_error);
}

TEST(DriftC, Examples) {
    const auto lin = DriftSpec::linear(-0.6);
    EXPECT_DOUBLE_EQ(drift_c(0.4, lin, make(0.5, 0.0)), -0.24);
    // b = 1 leaves only the K term
    EXPECT_NEAR(drift_c(0.4, lin, make(1.5, 0.5)), -0.24 + k_alpha_beta(make(1.5, 0.5)), 1e-15);
    EXPECT_NEAR(drift_c(0.0, DriftSpec::zero(), make(0.5, 0.5, 1.0, 0.0, 2.0)), 0.5641895835477563, 1e-14);
    const auto p = make(0.5, 0.5, 1.0, 0.0, 2.0);
    EXPECT_NEAR(drift_shift(p), static_cast<double>(oracle::shift(to_oracle(p))), 1e-14);
    const auto q = make(1.0, -0.3, 0.7, 0.0, 3.0);
    EXPECT_NEAR(drift_shift(q), static_cast<double>(oracle::shift(to_oracle(q))), 1e-12);
}

TEST(Coefficients, M1AtOriginIsScaledDrift) {
    const auto p = make(0.8, 0.6, 1.0, 0.0, 2.5);
    const auto lin = DriftSpec::linear(-1.2);
    EXPECT_NEAR(m1(0.0, lin, p), drift_c(0.0, lin, p) / 2.5, 1e-15);
}

TEST(Coefficients, M1M2MatchOracle) {
    for (double a : {0.5, 1.0, 1.5}) {
        for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            for (double b : {1.0, 3.0}) {
                const auto p = make(a, beta, 0.8, 0.2, b);
                const auto op = to_oracle(p);
                for (double s : {-0.95, -0.4, -0.01, 0.0, 0.3, 0.9}) {
                    const auto lin = DriftSpec::linear(-0.6);
                    EXPECT_NEAR(m1(s, lin, p), static_cast<double>(oracle::m1(s, -0.6, op)), 1e-12);
                    EXPECT_NEAR(m2(s, lin, p), static_cast<double>(oracle::m2(s, -0.6, op, true)), 1e-12);
                    EXPECT_NEAR(m2(s, lin, p, BoundaryCondition::natural), -0.6, 1e-15);
                }
            }
        }
    }
}

TEST(Coefficients, MinExitRate) {
    const auto p = make(0.5, 0.5);
    EXPECT_NEAR(min_exit_rate(p), 0.7624456237128342, 1e-9);
    EXPECT_NEAR(min_exit_rate(p), 0.76, 0.01);
    // no node beats the reported infimum
    for (int i = -999; i <= 999; ++i) EXPECT_GE(exit_rate(i / 1000.0, p), min_exit_rate(p) - 1e-12);
    EXPECT_NEAR(exit_rate(0.3506670224, p), min_exit_rate(p), 1e-12);
}

TEST(CorrectionCh, Examples) {
    EXPECT_NEAR(correction_ch(Grid(100), make(0.7, 0.2, 0.0, 0.5, 2.0)), 0.25 / 8.0, 1e-16);
    EXPECT_NEAR(correction_ch(Grid(50), make(1.0, 0.0)), 0.02 / (2 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(correction_ch(Grid(100), make(0.5, 0.0)), 4.14673023282556e-5, 1e-16);
    for (double a : {0.3, 1.2, 1.8}) {
        const auto p = make(a, 0.3, 0.9, 0.4, 1.7);
        EXPECT_NEAR(correction_ch(Grid(64), p), static_cast<double>(oracle::c_h(64, to_oracle(p))), 1e-14);
        EXPECT_GT(correction_ch(Grid(64), p), 0.0);
    }
}

TEST(AssembleB, PureDiffusionRows) {
    // eps = 0, zero drift: m1 = m2 = 0 and B is (C_h/h^2)(1, -2, 1)
    const Grid g(4);
    const auto p = make(0.5, 0.0, 0.0, 1.0, 1.0);
    const auto B = assemble_b(g, p, DriftSpec::zero(), BoundaryCondition::absorbing);
    const double lap = 0.5 / (g.h() * g.h());
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_DOUBLE_EQ(B.B.diag[i], -2 * lap);
        if (i > 0) EXPECT_DOUBLE_EQ(B.B.lower[i], lap);
        if (i + 1 < g.size()) EXPECT_DOUBLE_EQ(B.B.upper[i], lap);
    }
    EXPECT_EQ(B.B.lower[0], 0.0);
    EXPECT_EQ(B.B.upper[g.size() - 1], 0.0);
}

TEST(AssembleB, UpwindDirection) {
    const Grid g(8);
    const auto p = make(0.5, 0.0, 0.0, 0.0, 1.0);
    const auto right = assemble_b(g, p, DriftSpec::linear(0.0), BoundaryCondition::natural);
    for (double x : right.B.diag) EXPECT_EQ(x, 0.0);
    // f = x: m1 > 0 for s > 0 couples backwards, m1 < 0 for s < 0 couples forwards
    const auto B = assemble_b(g, p, DriftSpec::linear(1.0), BoundaryCondition::natural);
    const std::size_t pos = g.node_to_index(3), neg = g.node_to_index(-3);
    EXPECT_NEAR(B.B.lower[pos], 0.375 / g.h(), 1e-13);
    EXPECT_NEAR(B.B.upper[pos], 0.0, 1e-13);
    EXPECT_NEAR(B.B.diag[pos], -0.375 / g.h() - 1.0, 1e-13);
    EXPECT_NEAR(B.B.upper[neg], 0.375 / g.h(), 1e-13);
    EXPECT_NEAR(B.B.lower[neg], 0.0, 1e-13);
}

TEST(AssembleB, MatchesLiteralImplementation) {
    for (double a : {0.5, 1.0, 1.5}) {
        for (double beta : {-0.5, 0.5, 1.0}) {
            for (bool absorbing : {true, false}) {
                const int J = 16;
                const auto p = make(a, beta, 1.0, 0.3, 1.0);
                const auto bc = absorbing ? BoundaryCondition::absorbing : BoundaryCondition::natural;
                const auto B = reference::to_dense(assemble_b(Grid(J), p, DriftSpec::linear(-0.6), bc).B);
                const auto L = oracle::literal_b(J, to_oracle(p), -0.6L, absorbing);
                const double scale = L.cwiseAbs().maxCoeff();
                EXPECT_LE((B - L).cwiseAbs().maxCoeff(), 1e-14 * scale) << a << ' ' << beta;
            }
        }
    }
}

TEST(AssembleS, TSignsAndStructure) {
    for (double a : {0.5, 1.0, 1.5}) {
        for (double beta : {-1.0, 0.0, 0.5, 1.0}) {
            const auto s = assemble_s(Grid(16), make(a, beta));
            EXPECT_EQ(s.T.first_col[0], 0.0);
            EXPECT_EQ(s.T.first_row[0], 0.0);
            for (double x : s.T.first_col) EXPECT_GE(x, 0.0);
            for (double x : s.T.first_row) EXPECT_GE(x, 0.0);
            for (std::size_t i = 0; i < s.D.size(); ++i) {
                EXPECT_GE(s.D.lower[i], 0.0);
                EXPECT_GE(s.D.upper[i], 0.0);
                EXPECT_LE(s.D.diag[i], 0.0);
            }
            if (beta == 1.0) {
                for (double x : s.T.first_row) EXPECT_EQ(x, 0.0);
            }
        }
    }
}

TEST(AssembleS, ToeplitzEntriesAsDisplayed) {
    const int J = 8;
    const auto p = make(1.5, 0.5, 0.7, 0.0, 2.0);
    const auto s = assemble_s(Grid(J), p);
    const auto op = to_oracle(p);
    const oracle::ld h = 1.0L / J;
    const oracle::ld q = op.eps * std::pow(op.b, -op.alpha) * h;
    for (int k = 1; k < 2 * J - 1; ++k) {
        const oracle::ld d = std::pow(k * h, 1.0L + op.alpha);
        EXPECT_NEAR(s.T.first_col[k], static_cast<double>(q * oracle::c_p(op) / d), 1e-14 * s.T.first_col[1]);
        EXPECT_NEAR(s.T.first_row[k], static_cast<double>(q * oracle::c_n(op) / d), 1e-14 * s.T.first_col[1]);
    }
}

TEST(AssembleS, OnesVectorRowSums) {
    const int J = 16;
    for (double a : {0.5, 1.5}) {
        const auto p = make(a, 0.5);
        const auto s = assemble_s(Grid(J), p);
        const std::vector<double> ones(2 * J - 1, 1.0);
        const auto ref = oracle::direct_s(J, to_oracle(p), ones);
        // Row sums of O(0.1) cancel entries of O(1e2), so the bound is
        // absolute; the product itself is accumulated in extended precision.
        const Eigen::MatrixXd S = reference::to_dense(s.T) + reference::to_dense(s.D);
        for (int i = 0; i < 2 * J - 1; ++i) {
            oracle::ld got = 0.0L;
            for (int k = 0; k < 2 * J - 1; ++k) got += S(i, k);
            EXPECT_NEAR(static_cast<double>(got), static_cast<double>(ref[i]), 1e-13) << i;
        }
    }
}

TEST(AssembleS, TridiagonalPartMatchesDirectSums) {
    // The D entries are recovered from the direct sums by probing with unit
    // vectors and subtracting the Toeplitz part.
    const int J = 8;
    const auto p = make(1.5, 0.5);
    const auto s = assemble_s(Grid(J), p);
    const Eigen::MatrixXd T = reference::to_dense(s.T);
    for (int c = 0; c < 2 * J - 1; ++c) {
        std::vector<double> e(2 * J - 1, 0.0);
        e[c] = 1.0;
        const auto col = oracle::direct_s(J, to_oracle(p), e);
        for (int r = std::max(0, c - 1); r <= std::min(2 * J - 2, c + 1); ++r) {
            const double expect = static_cast<double>(col[r]) - T(r, c);
            const double got = r == c ? s.D.diag[r] : (r > c ? s.D.lower[r] : s.D.upper[r]);
            EXPECT_NEAR(got, expect, 1e-14 * std::max(1.0, std::fabs(expect))) << r << ' ' << c;
        }
        for (int r = 0; r < 2 * J - 1; ++r) {
            if (std::abs(r - c) > 1) EXPECT_NEAR(static_cast<double>(col[r]), T(r, c), 1e-15 * (1 + T(r, c)));
        }
    }
}

TEST(AssembleS, ArbitraryVectorsMatchDirectSums) {
    std::mt19937_64 rng(77);
    for (double a : {0.5, 1.0, 1.5}) {
        for (double beta : {-0.5, 0.5}) {
            const int J = 16;
            const auto p = make(a, beta, 0.9, 0.0, 1.5);
            const auto s = assemble_s(Grid(J), p);
            const Eigen::MatrixXd S = reference::to_dense(s.T) + reference::to_dense(s.D);
            for (int trial = 0; trial < 20; ++trial) {
                const auto v = oracle::random_vector(2 * J - 1, rng, 0.0, 1.0);
                const auto ref = oracle::direct_s(J, to_oracle(p), v);
                oracle::ld num = 0.0L, den = 0.0L;
                for (int i = 0; i < 2 * J - 1; ++i) {
                    oracle::ld got = 0.0L;
                    for (int k = 0; k < 2 * J - 1; ++k) got += static_cast<oracle::ld>(S(i, k)) * v[k];
                    num = std::max(num, std::fabs(got - ref[i]));
                    den = std::max(den, std::fabs(ref[i]));
                }
                EXPECT_LE(static_cast<double>(num / den), 1e-13) << a << ' ' << beta;
            }
        }
    }
}

TEST(AssembleS, DecompositionFidelity) {
    std::mt19937_64 rng(20260101);
    for (int J : {8, 16, 32}) {
        for (double a : {0.5, 1.0, 1.5}) {
            for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
                const auto p = make(a, beta);
                const auto s = assemble_s(Grid(J), p);
                const Eigen::MatrixXd S = reference::to_dense(s.T) + reference::to_dense(s.D);
                double worst = 0.0;
                for (int trial = 0; trial < 200; ++trial) {
                    const auto v = oracle::random_vector(2 * J - 1, rng);
                    const Eigen::VectorXd got = S * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
                    const auto ref = oracle::direct_s(J, to_oracle(p), v);
                    double num = 0.0, den = 0.0;
                    for (int i = 0; i < 2 * J - 1; ++i) {
                        num = std::max(num, std::fabs(got[i] - static_cast<double>(ref[i])));
                        den = std::max(den, std::fabs(static_cast<double>(ref[i])));
                    }
                    worst = std::max(worst, num / den);
                }
                EXPECT_LE(worst, 1e-12) << "J=" << J << " alpha=" << a << " beta=" << beta;
            }
        }
    }
}

TEST(Assemble, MirrorIsIndexReversal) {
    // A(beta, f) and A(-beta, -f(-x)) are related by reversing the indices.
    for (double a : {0.5, 1.0, 1.5}) {
        for (double beta : {0.5, 1.0}) {
            const auto p = make(a, beta, 1.0, 0.2, 1.0);
            const auto drift = DriftSpec::linear(-0.6);
            const auto A = reference::to_dense(assemble(Grid(24), p, drift, BoundaryCondition::absorbing));
            const auto M =
                reference::to_dense(assemble(Grid(24), p.mirrored(), drift.mirrored(), BoundaryCondition::absorbing));
            const Eigen::MatrixXd R = M.reverse();
            EXPECT_LE((A - R).cwiseAbs().maxCoeff(), 1e-12 * A.cwiseAbs().maxCoeff()) << a << ' ' << beta;
        }
    }
}

TEST(Assemble, RejectsAlphaTwo) {
    EXPECT_THROW((void)assemble(Grid(8), make(2.0, 0.0), DriftSpec::zero(), BoundaryCondition::absorbing),
                 std::invalid_argument);
}

TEST(DriftSpec, TabulatedInterpolationAndMirror) {
    const auto d = DriftSpec::tabulated({-1, 0, 1}, {1, 0, -3}, {-1, -2, -3});
    EXPECT_DOUBLE_EQ(d.f(0.5), -1.5);
    EXPECT_DOUBLE_EQ(d.fprime(-0.5), -1.5);
    const auto m = d.mirrored();
    EXPECT_DOUBLE_EQ(m.f(-0.5), 1.5);
    EXPECT_DOUBLE_EQ(m.fprime(0.5), -1.5);
    EXPECT_THROW((void)d.f(2.0), std::domain_error);
    EXPECT_THROW((void)DriftSpec::tabulated({0, 0}, {1, 1}, {0, 0}), std::invalid_argument);
    EXPECT_THROW((void)DriftSpec::tabulated({0, 1}, {1}, {0, 0}), std::invalid_argument);
}

TEST(Tridiagonal, ApplyMatchesDense) {
    const Grid g(6);
    const auto B = assemble_b(g, make(0.5, 0.5), DriftSpec::linear(-1), BoundaryCondition::absorbing).B;
    std::mt19937_64 rng(3);
    const auto v = oracle::random_vector(g.size(), rng);
    std::vector<double> out(g.size());
    B.apply(v, out);
    const Eigen::VectorXd ref = reference::to_dense(B) * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-12 * ref.cwiseAbs().maxCoeff());
    std::vector<double> wrong(3);
    EXPECT_THROW(B.apply(v, wrong), std::invalid_argument);
}
