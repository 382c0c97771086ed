#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spinstein/spin_core.hpp"

namespace spinstein {

// Equilibrium macrostates of the Curie-Weiss-Potts free energy and the
// contraction constants derived from the Jacobian of g_beta at each of them.

inline double beta_c(int q) {
    if (q < 3) throw std::invalid_argument("beta_c: q must be >= 3");
    return (q - 1.0) * std::log(q - 1.0) / (q - 2.0);
}

namespace detail {

inline double fixed_point_rhs(double s, double beta, int q) {
    const double e = std::exp(-2.0 * beta * s);
    return (1.0 - e) / (1.0 + (q - 1.0) * e);
}

}  // namespace detail

// Largest root of s = (1 - e^{-2 beta s}) / (1 + (q-1) e^{-2 beta s}) in [0, 1].
// 0 is always a root; returns 0 when no positive root exists. The equation can
// have two positive roots, so we scan from the right for a sign change of
// s - rhs(s) and bisect.
inline double solve_s_largest(double beta, int q) {
    auto phi = [&](double s) { return s - detail::fixed_point_rhs(s, beta, q); };
    const int grid = 10000;
    double hi = 1.0;
    double lo = -1.0;
    for (int i = grid; i >= 1; --i) {
        double s = static_cast<double>(i) / grid;
        double sl = static_cast<double>(i - 1) / grid;
        if (sl == 0.0) break;  // s = 0 is the trivial root; stop before it
        if (phi(s) > 0.0 && phi(sl) <= 0.0) {
            hi = s;
            lo = sl;
            break;
        }
    }
    if (lo < 0.0) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double s_star(double beta, int q) {
    return (1.0 + (q - 1.0) * solve_s_largest(beta, q)) / q;
}

inline ProbVector equiproportional(int q) { return ProbVector(q, 1.0 / q); }

// Ordered macrostate with dominant color j (0-based).
inline ProbVector ordered_macrostate(double beta, int q, int j) {
    const double ss = s_star(beta, q);
    ProbVector x(q, (1.0 - ss) / (q - 1.0));
    x[j] = ss;
    return x;
}

// The set of global minimisers of the free energy: {e_hat} below beta_c,
// the q ordered states above, and all q+1 points at criticality
// (detected with tolerance 1e-9).
inline std::vector<ProbVector> macrostate_set(double beta, int q) {
    const double bc = beta_c(q);
    std::vector<ProbVector> out;
    if (beta < bc + 1e-9) out.push_back(equiproportional(q));
    if (beta > bc - 1e-9) {
        for (int j = 0; j < q; ++j) out.push_back(ordered_macrostate(beta, q, j));
    }
    return out;
}

namespace detail {

// f(x, beta) = (1 + (q-1) e^{2 beta (1-qx)/(q-1)})^{-1} - x on (1/q, 1).
inline double spinodal_f(double x, double beta, int q) {
    return 1.0 / (1.0 + (q - 1.0) * std::exp(2.0 * beta * (1.0 - q * x) / (q - 1.0))) - x;
}

// Interior maximum of f(., beta) over (1/q, 1). x = 1/q is always a root of f,
// so the scan starts a margin away from it; the stationary point of interest
// sits well inside the interval for all beta in (1, beta_c].
inline double spinodal_max_f(double beta, int q) {
    const double lo = 1.0 / q + 1e-3;
    const double hi = 1.0 - 1e-9;
    const int grid = 2000;
    double best_x = lo, best = -1e300;
    for (int i = 0; i <= grid; ++i) {
        double x = lo + (hi - lo) * i / grid;
        double v = spinodal_f(x, beta, q);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    // Ternary refinement around the grid argmax.
    double a = std::max(lo, best_x - (hi - lo) / grid);
    double b = std::min(hi, best_x + (hi - lo) / grid);
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (spinodal_f(m1, beta, q) < spinodal_f(m2, beta, q))
            a = m1;
        else
            b = m2;
    }
    return spinodal_f(0.5 * (a + b), beta, q);
}

}  // namespace detail

// Spinodal inverse temperature: the beta at which f(., beta) first acquires a
// root in (1/q, 1), located as the tangency max_x f(x, beta) = 0 by nested
// bisection. Satisfies 1 < beta_s < beta_c.
inline double beta_s(int q) {
    if (q < 3) throw std::invalid_argument("beta_s: q must be >= 3");
    double lo = 1.0, hi = beta_c(q);
    if (detail::spinodal_max_f(lo, q) >= 0.0 || detail::spinodal_max_f(hi, q) <= 0.0)
        throw std::runtime_error("beta_s: bracket invalid (solver bug)");
    while (hi - lo > 1e-11) {
        double mid = 0.5 * (lo + hi);
        (detail::spinodal_max_f(mid, q) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// Free energy G_beta(s) = beta ||s||_2^2 - log sum_i exp(2 beta s_i).
// The sign inside the log is fixed by requiring stationarity at the
// macrostates: grad G = 2 beta (s - g_beta(s)).
inline double g_potential(const std::vector<double>& s, double beta, int q) {
    (void)q;
    double m = s[0];
    for (double x : s) m = std::max(m, x);
    double norm2 = 0.0, z = 0.0;
    for (double x : s) {
        norm2 += x * x;
        z += std::exp(2.0 * beta * (x - m));
    }
    return beta * norm2 - (std::log(z) + 2.0 * beta * m);
}

inline std::vector<double> g_potential_grad(const std::vector<double>& s, double beta, int q) {
    ProbVector g = softmax_gbeta(s, beta);
    std::vector<double> grad(q);
    for (int k = 0; k < q; ++k) grad[k] = 2.0 * beta * (s[k] - g[k]);
    return grad;
}

namespace detail {

inline bool is_equiproportional(const ProbVector& x, double tol = 1e-8) {
    const double e = 1.0 / static_cast<double>(x.size());
    for (double v : x)
        if (std::abs(v - e) > tol) return false;
    return true;
}

// Identifies x among the macrostates for (beta, q); returns the dominant color
// for ordered states, nullopt for the equiproportional point.
inline std::optional<int> classify_macrostate(const ProbVector& x, double beta, int q,
                                              double tol = 1e-8) {
    if (is_equiproportional(x, tol)) return std::nullopt;
    if (beta < beta_c(q) - 1e-9)
        throw std::invalid_argument("x is not a macrostate for this beta");
    const double ss = s_star(beta, q);
    const double minor = (1.0 - ss) / (q - 1.0);
    int j = 0;
    for (int k = 1; k < q; ++k)
        if (x[k] > x[j]) j = k;
    for (int k = 0; k < q; ++k) {
        double want = (k == j) ? ss : minor;
        if (std::abs(x[k] - want) > tol)
            throw std::invalid_argument("x is not a macrostate for this beta");
    }
    return j;
}

}  // namespace detail

struct JacobianConstants {
    double a = 0.0;
    double a_prime = 0.0;
    double b = 0.0;
};

inline JacobianConstants jacobian_constants(double beta, int q) {
    const double ss = s_star(beta, q);
    const double m = (1.0 - ss) / (q - 1.0);
    JacobianConstants c;
    c.a = 2.0 * beta * q * ss * m;
    c.a_prime = 2.0 * beta * m;
    c.b = 2.0 * beta * m * (ss - m);
    return c;
}

// The q x q matrix A(x) with J(x) d = A(x) d for simplex-tangent d.
inline std::vector<std::vector<double>> jacobian_A(const ProbVector& x, double beta, int q) {
    auto dom = detail::classify_macrostate(x, beta, q);
    std::vector<std::vector<double>> A(q, std::vector<double>(q, 0.0));
    if (!dom) {
        for (int k = 0; k < q; ++k) A[k][k] = 2.0 * beta / q;
        return A;
    }
    const int j = *dom;
    const auto c = jacobian_constants(beta, q);
    for (int k = 0; k < q; ++k) {
        if (k == j) {
            A[k][k] = c.a;
        } else {
            A[k][k] = c.a_prime;
            A[k][j] = -c.b;
        }
    }
    return A;
}

// Local l1-Lipschitz constant of g_beta at the macrostate x.
inline double theta(const ProbVector& x, double beta, int q) {
    auto dom = detail::classify_macrostate(x, beta, q);
    if (!dom) return 2.0 * beta / q;
    return jacobian_constants(beta, q).a;
}

// Max absolute eigenvalue of (A + A^T)/2, in closed form.
inline double lambda(const ProbVector& x, double beta, int q) {
    auto dom = detail::classify_macrostate(x, beta, q);
    if (!dom) return 2.0 * beta / q;
    const auto c = jacobian_constants(beta, q);
    const double d = c.a - c.a_prime;
    return 0.5 * (c.a + c.a_prime + std::sqrt(d * d + (q - 1.0) * c.b * c.b));
}

inline bool condition_holds(const ProbVector& x, double beta, int q) {
    return theta(x, beta, q) < 1.0 && lambda(x, beta, q) < 1.0;
}

struct MacrostateAnalysis {
    ProbVector x;
    double s_star = 0.0;
    double a = 0.0;
    double a_prime = 0.0;
    double b = 0.0;
    double theta = 0.0;
    double lambda = 0.0;
    std::vector<std::vector<double>> matrix_A;
    std::optional<int> dominant_color;  // absent for the equiproportional point
};

inline MacrostateAnalysis analyze_macrostate(const ProbVector& x, double beta, int q) {
    MacrostateAnalysis m;
    m.x = x;
    m.dominant_color = detail::classify_macrostate(x, beta, q);
    m.s_star = m.dominant_color ? s_star(beta, q) : 1.0 / q;
    const auto c = m.dominant_color ? jacobian_constants(beta, q)
                                    : JacobianConstants{2.0 * beta / q, 2.0 * beta / q, 0.0};
    m.a = c.a;
    m.a_prime = c.a_prime;
    m.b = c.b;
    m.theta = theta(x, beta, q);
    m.lambda = lambda(x, beta, q);
    m.matrix_A = jacobian_A(x, beta, q);
    return m;
}

}  // namespace spinstein
