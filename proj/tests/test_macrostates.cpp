#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "spinstein/macrostates.hpp"
#include "spinstein/spin_core.hpp"

using namespace spinstein;

TEST_CASE("critical inverse temperature") {
    REQUIRE(beta_c(3) == Catch::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    REQUIRE(beta_c(4) == Catch::Approx(1.5 * std::log(3.0)).epsilon(1e-15));
    for (int q = 3; q <= 8; ++q) {
        REQUIRE(beta_c(q) > 1.0);
        REQUIRE(beta_c(q) < q / 2.0);
    }
}

TEST_CASE("largest fixed point of the scalar equation") {
    SECTION("at beta_c the root is (q-2)/(q-1)") {
        for (int q : {3, 4, 5, 6}) {
            REQUIRE(solve_s_largest(beta_c(q), q) ==
                    Catch::Approx((q - 2.0) / (q - 1.0)).margin(1e-10));
        }
    }
    SECTION("no positive root deep in high temperature") {
        REQUIRE(solve_s_largest(0.5, 3) == 0.0);
        REQUIRE(solve_s_largest(1.0, 3) == 0.0);
    }
    SECTION("s_star of an ordered macrostate") {
        const double ss = s_star(1.6, 3);
        REQUIRE(ss > 1.0 / 3);
        REQUIRE(ss < 1.0);
        // s* and the minor coordinates sit on the simplex
        REQUIRE(ss + 2.0 * (1.0 - ss) / 2.0 == Catch::Approx(1.0));
    }
}

TEST_CASE("macrostates are fixed points of the update kernel") {
    for (int q : {3, 4, 5}) {
        for (double beta = 0.1; beta <= 5.0 + 1e-9; beta += 0.05) {
            for (const auto& x : macrostate_set(beta, q)) {
                const auto g = softmax_gbeta(x, beta);
                for (int k = 0; k < q; ++k) REQUIRE(std::abs(g[k] - x[k]) < 1e-10);
            }
        }
    }
}

TEST_CASE("macrostate set cardinality") {
    REQUIRE(macrostate_set(1.0, 3).size() == 1);
    REQUIRE(macrostate_set(beta_c(3), 3).size() == 4);
    REQUIRE(macrostate_set(1.6, 3).size() == 3);
    REQUIRE(macrostate_set(2.0, 5).size() == 5);
    // the degenerate critical point at beta_c: ordered coordinates are (2/3, 1/6, 1/6) for q=3
    const auto set = macrostate_set(beta_c(3), 3);
    bool found = false;
    for (const auto& x : set) {
        if (std::abs(x[0] - 2.0 / 3) < 1e-10 && std::abs(x[1] - 1.0 / 6) < 1e-10 &&
            std::abs(x[2] - 1.0 / 6) < 1e-10)
            found = true;
    }
    REQUIRE(found);
}

TEST_CASE("spinodal temperature") {
    for (int q = 3; q <= 8; ++q) {
        const double bs = beta_s(q);
        REQUIRE(bs > 1.0);
        REQUIRE(bs < beta_c(q));
        // just above beta_s a positive fixed point exists, just below it does not
        REQUIRE(solve_s_largest(bs + 1e-3, q) > 0.0);
        REQUIRE(solve_s_largest(bs - 1e-3, q) == 0.0);
    }
}

TEST_CASE("free energy stationarity and gradient") {
    const int q = 3;
    SECTION("gradient matches finite differences") {
        std::vector<double> s = {0.5, 0.3, 0.2};
        const double beta = 1.2, h = 1e-6;
        const auto grad = g_potential_grad(s, beta, q);
        for (int k = 0; k < q; ++k) {
            auto sp = s, sm = s;
            sp[k] += h;
            sm[k] -= h;
            const double fd = (g_potential(sp, beta, q) - g_potential(sm, beta, q)) / (2 * h);
            REQUIRE(grad[k] == Catch::Approx(fd).margin(1e-7));
        }
    }
    SECTION("gradient vanishes at macrostates") {
        for (double beta : {0.8, 1.6, 3.0}) {
            for (const auto& x : macrostate_set(beta, q)) {
                const auto grad = g_potential_grad(x, beta, q);
                for (double v : grad) REQUIRE(std::abs(v) < 1e-9);
            }
        }
    }
}

TEST_CASE("jacobian structure at macrostates") {
    SECTION("identity a = a' + (q-1) b") {
        for (int q : {3, 4, 5}) {
            for (double beta = beta_c(q); beta <= 5.0; beta += 0.25) {
                const auto c = jacobian_constants(beta, q);
                REQUIRE(c.a == Catch::Approx(c.a_prime + (q - 1.0) * c.b).margin(1e-12));
            }
        }
    }
    SECTION("A(x) d matches directional finite differences of g_beta") {
        const int q = 3;
        for (double beta : {1.0, 1.6, 2.5}) {
            for (const auto& x : macrostate_set(beta, q)) {
                const auto A = jacobian_A(x, beta, q);
                // tangent directions
                for (int c0 = 0; c0 < q; ++c0)
                    for (int c1 = c0 + 1; c1 < q; ++c1) {
                        std::vector<double> d(q, 0.0);
                        d[c0] = 1.0;
                        d[c1] = -1.0;
                        const double h = 1e-6;
                        std::vector<double> sp(q), sm(q);
                        for (int k = 0; k < q; ++k) {
                            sp[k] = x[k] + h * d[k];
                            sm[k] = x[k] - h * d[k];
                        }
                        const auto gp = softmax_gbeta(sp, beta);
                        const auto gm = softmax_gbeta(sm, beta);
                        for (int k = 0; k < q; ++k) {
                            double ad = 0.0;
                            for (int l = 0; l < q; ++l) ad += A[k][l] * d[l];
                            const double fd = (gp[k] - gm[k]) / (2 * h);
                            REQUIRE(ad == Catch::Approx(fd).margin(1e-6));
                        }
                    }
            }
        }
    }
    SECTION("closed-form lambda equals the numeric symmetrized eigenvalue") {
        const int q = 4;
        for (double beta : {1.0, beta_c(q), 2.0, 4.0}) {
            for (const auto& x : macrostate_set(beta, q)) {
                const auto A = jacobian_A(x, beta, q);
                Eigen::MatrixXd M(q, q);
                for (int i = 0; i < q; ++i)
                    for (int j = 0; j < q; ++j) M(i, j) = 0.5 * (A[i][j] + A[j][i]);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
                const double numeric = es.eigenvalues().cwiseAbs().maxCoeff();
                REQUIRE(lambda(x, beta, q) == Catch::Approx(numeric).margin(1e-10));
            }
        }
    }
    SECTION("ordering 0 < b < a' < a = theta < lambda < 1 above beta_c") {
        const int q = 3;
        for (double beta = beta_c(q); beta <= 5.0 + 1e-9; beta += 0.05) {
            const auto x = ordered_macrostate(beta, q, 0);
            const auto c = jacobian_constants(beta, q);
            REQUIRE(c.b > 0.0);
            REQUIRE(c.b < c.a_prime);
            REQUIRE(c.a_prime < c.a);
            REQUIRE(theta(x, beta, q) == Catch::Approx(c.a).margin(1e-14));
            REQUIRE(c.a < lambda(x, beta, q));
            REQUIRE(lambda(x, beta, q) < 1.0);
        }
    }
    SECTION("equiproportional point") {
        REQUIRE(theta(equiproportional(3), 1.0, 3) == Catch::Approx(2.0 / 3));
        REQUIRE(lambda(equiproportional(3), 1.0, 3) == Catch::Approx(2.0 / 3));
        REQUIRE(condition_holds(equiproportional(3), 1.0, 3));
        REQUIRE_FALSE(condition_holds(equiproportional(3), 2.0, 3));
    }
    SECTION("non-macrostate rejected") {
        REQUIRE_THROWS_AS(theta({0.5, 0.25, 0.25}, 1.6, 3), std::invalid_argument);
    }
}
