#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinstein/exact.hpp"
#include "spinstein/macrostates.hpp"
#include "spinstein/rng.hpp"
#include "spinstein/spin_core.hpp"

namespace spinstein {

// Evaluation of the approximation bounds and the scaling experiments.

// One-step contraction rate of the Glauber coupling on a bounded-degree graph.
inline double contraction_rate_bounded_degree(const Graph& g, const ModelParams& p) {
    const double dt = g.max_degree * std::tanh(p.beta / p.n_vertices);
    if (dt >= 1.0)
        throw std::domain_error("contraction requires max_degree * tanh(beta/N) < 1, got " +
                                std::to_string(dt));
    return 1.0 - (1.0 - dt) / p.n_vertices;
}

struct BoundReport {
    double bound_coarse = 0.0;   // ||L||_inf * beta sqrt(q-1) / (1 - D tanh(beta/N)) * sqrt(2|E|/N)
    double bound_refined = 0.0;  // same prefactor with (1/N) sum_v sqrt(deg v)
    double kappa = 0.0;
    double prefactor = 0.0;      // ||L||_inf * beta sqrt(q-1) / (1 - D tanh(beta/N))
    long long n_edges = 0;
    int max_degree = 0;
};

inline BoundReport bounded_degree_bound(const Graph& g, const ModelParams& p, double linf_h) {
    BoundReport r;
    r.kappa = contraction_rate_bounded_degree(g, p);
    r.n_edges = g.edge_count;
    r.max_degree = g.max_degree;
    const double denom = 1.0 - g.max_degree * std::tanh(p.beta / p.n_vertices);
    r.prefactor = linf_h * p.beta * std::sqrt(p.q - 1.0) / denom;
    r.bound_coarse = r.prefactor * std::sqrt(2.0 * g.edge_count / p.n_vertices);
    double degsum = 0.0;
    for (int v = 0; v < g.n_vertices; ++v) degsum += std::sqrt(static_cast<double>(g.adjacency[v].size()));
    r.bound_refined = r.prefactor * degsum / p.n_vertices;
    return r;
}

struct TNormReport {
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    double analytic_bound = 0.0;
    long long samples = 0;
};

// E||T(Y)||_1 for Y the product measure with per-vertex color law x, where
// T_v(Y) = tv(g_beta(S_v(Y)), g_beta(E S_v(Y))). Monte Carlo plus the moment
// bound beta sqrt(q) sum_v sqrt(deg(v)/N^2 * sum_k x_k (1 - x_k)).
inline TNormReport mean_T_norm(const Graph& g, const ModelParams& p, const ProbVector& x,
                               long long samples, RngStream& rng) {
    TNormReport r;
    r.samples = samples;
    const int N = p.n_vertices;
    const int q = p.q;

    double varsum = 0.0;
    for (int k = 0; k < q; ++k) varsum += x[k] * (1.0 - x[k]);
    for (int v = 0; v < N; ++v) {
        const double deg = static_cast<double>(g.adjacency[v].size());
        r.analytic_bound += std::sqrt(deg / (static_cast<double>(N) * N) * varsum);
    }
    r.analytic_bound *= p.beta * std::sqrt(static_cast<double>(q));

    if (p.beta == 0.0 || samples == 0) return r;  // T is identically 0 at beta = 0

    // reference conditionals at the mean field E S_v(Y) = (deg(v)/N) x
    std::vector<ProbVector> ref(N);
    for (int v = 0; v < N; ++v) {
        const double deg = static_cast<double>(g.adjacency[v].size());
        std::vector<double> s(q);
        for (int k = 0; k < q; ++k) s[k] = deg / N * x[k];
        ref[v] = softmax_gbeta(s, p.beta);
    }

    double sum = 0.0, sumsq = 0.0;
    Configuration y(N);
    for (long long it = 0; it < samples; ++it) {
        for (int v = 0; v < N; ++v) y[v] = rng.next_categorical(x);
        double t1 = 0.0;
        for (int v = 0; v < N; ++v) {
            const ProbVector g_sv = softmax_gbeta(neighbor_proportions(g, y, v, q), p.beta);
            t1 += tv_distance(g_sv, ref[v]);
        }
        sum += t1;
        sumsq += t1 * t1;
    }
    r.mc_estimate = sum / samples;
    const double var = std::max(0.0, sumsq / samples - r.mc_estimate * r.mc_estimate);
    r.mc_stderr = std::sqrt(var / samples);
    return r;
}

// Max over vertices and colors of |p_v^(k) - g_beta^(k)(E S_v(Y))| where the
// mean field E S_v(Y) = (1/N) sum_{u ~ v} p_u is exact under the product law.
inline double meanfield_residual(const Graph& g, const ModelParams& p,
                                 const std::vector<ProbVector>& pv) {
    const int q = p.q;
    double worst = 0.0;
    for (int v = 0; v < g.n_vertices; ++v) {
        std::vector<double> s(q, 0.0);
        for (int u : g.adjacency[v])
            for (int k = 0; k < q; ++k) s[k] += pv[u][k] / p.n_vertices;
        const ProbVector gv = softmax_gbeta(s, p.beta);
        for (int k = 0; k < q; ++k) worst = std::max(worst, std::abs(pv[v][k] - gv[k]));
    }
    return worst;
}

struct CltReport {
    std::vector<std::vector<double>> sigma_y;  // exact E[W W^T], W = sqrt(N)(S - e_hat), multinomial
    std::vector<std::vector<double>> sigma_x;  // same under the CWP Gibbs measure
    double stated_y_diag = 0.0;                // (q-1)/q^2
    double stated_y_offdiag = 0.0;             // -1/q^2
    double stated_x_diag = 0.0;                // (q-1)/(q^2 - 2 q beta)
    double stated_x_offdiag_printed = 0.0;     // -1/(q^2 - 2 beta), as printed
    double stated_x_offdiag_consistent = 0.0;  // -1/(q^2 - 2 q beta), zero row sums
    double max_dev_y = 0.0;
    double max_dev_x_diag = 0.0;
    double max_dev_x_offdiag_printed = 0.0;
    double max_dev_x_offdiag_consistent = 0.0;
};

inline CltReport clt_covariance_check(int N, int q, double beta) {
    if (beta >= beta_s(q))
        throw std::domain_error("clt_covariance_check requires beta < beta_s(q)");
    const auto states = enumerate_states(N, q);
    const LumpedMeasure gibbs = lumped_gibbs(states, N, beta);
    const LumpedMeasure mult = conditional_multinomial(states, N, equiproportional(q));

    auto second_moment = [&](const LumpedMeasure& m) {
        std::vector<std::vector<double>> c(q, std::vector<double>(q, 0.0));
        for (size_t i = 0; i < states.size(); ++i) {
            const double w = m.weights[i];
            if (w == 0.0) continue;
            for (int a = 0; a < q; ++a) {
                const double wa = std::sqrt(static_cast<double>(N)) *
                                  (static_cast<double>(states[i][a]) / N - 1.0 / q);
                for (int b = 0; b < q; ++b) {
                    const double wb = std::sqrt(static_cast<double>(N)) *
                                      (static_cast<double>(states[i][b]) / N - 1.0 / q);
                    c[a][b] += w * wa * wb;
                }
            }
        }
        return c;
    };

    CltReport r;
    r.sigma_y = second_moment(mult);
    r.sigma_x = second_moment(gibbs);
    r.stated_y_diag = (q - 1.0) / (static_cast<double>(q) * q);
    r.stated_y_offdiag = -1.0 / (static_cast<double>(q) * q);
    r.stated_x_diag = (q - 1.0) / (q * static_cast<double>(q) - 2.0 * q * beta);
    r.stated_x_offdiag_printed = -1.0 / (q * static_cast<double>(q) - 2.0 * beta);
    r.stated_x_offdiag_consistent = -1.0 / (q * static_cast<double>(q) - 2.0 * q * beta);
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
            const double want_y = (a == b) ? r.stated_y_diag : r.stated_y_offdiag;
            r.max_dev_y = std::max(r.max_dev_y, std::abs(r.sigma_y[a][b] - want_y));
            if (a == b) {
                r.max_dev_x_diag = std::max(r.max_dev_x_diag, std::abs(r.sigma_x[a][b] - r.stated_x_diag));
            } else {
                r.max_dev_x_offdiag_printed = std::max(
                    r.max_dev_x_offdiag_printed, std::abs(r.sigma_x[a][b] - r.stated_x_offdiag_printed));
                r.max_dev_x_offdiag_consistent =
                    std::max(r.max_dev_x_offdiag_consistent,
                             std::abs(r.sigma_x[a][b] - r.stated_x_offdiag_consistent));
            }
        }
    return r;
}

struct WassersteinRow {
    int N = 0;
    double dw = 0.0;
    double dw_over_sqrt_n = 0.0;
    double duality_gap = 0.0;
    long long n_states = 0;
};

// One row of the sqrt(N) scaling table: exact OT between the (optionally
// ball-conditioned) Gibbs pushforward and the matching conditioned product
// measure with per-vertex law x.
inline WassersteinRow wasserstein_scaling_row(int N, int q, double beta, const ProbVector& x,
                                              const std::optional<Region>& region,
                                              long long guard = 200'000) {
    const auto states = enumerate_states(N, q, region, guard);
    const LumpedMeasure mu = lumped_gibbs(states, N, beta);
    const LumpedMeasure nu = conditional_multinomial(states, N, x);
    const OtResult ot = exact_wasserstein_exchangeable(states, N, mu.weights, nu.weights);
    WassersteinRow row;
    row.N = N;
    row.dw = ot.value;
    row.dw_over_sqrt_n = ot.value / std::sqrt(static_cast<double>(N));
    row.duality_gap = ot.duality_gap;
    row.n_states = static_cast<long long>(states.size());
    return row;
}

// Prefactor proxy 4 q theta / (1 - theta) for the macrostate of the given type.
inline double theta_star_proxy(double beta, int q, bool ordered) {
    const ProbVector x = ordered ? ordered_macrostate(beta, q, 0) : equiproportional(q);
    const double th = theta(x, beta, q);
    if (th >= 1.0) throw std::domain_error("theta >= 1: proxy undefined");
    return 4.0 * q * th / (1.0 - th);
}

}  // namespace spinstein
