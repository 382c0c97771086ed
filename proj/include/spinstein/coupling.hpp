#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinstein/dynamics.hpp"
#include "spinstein/macrostates.hpp"
#include "spinstein/rng.hpp"
#include "spinstein/spin_core.hpp"

namespace spinstein {

// Maximal coupling of two categorical distributions: marginals are exact and
// P(i != j) = tv_distance(p, r). One uniform decides shared-vs-residual; the
// component draws walk CDFs in ascending color order.
inline std::pair<int, int> maximal_coupling_sample(const ProbVector& p, const ProbVector& r,
                                                   RngStream& rng) {
    const int q = static_cast<int>(p.size());
    double overlap = 0.0;
    for (int k = 0; k < q; ++k) overlap += std::min(p[k], r[k]);
    const double u = rng.next_double();
    if (u < overlap) {
        double acc = 0.0;
        for (int k = 0; k < q; ++k) {
            acc += std::min(p[k], r[k]);
            if (u < acc) return {k, k};
        }
        return {q - 1, q - 1};
    }
    const double rest = 1.0 - overlap;
    auto residual_draw = [&](const ProbVector& a, const ProbVector& b) {
        const double v = rng.next_double() * rest;
        double acc = 0.0;
        int last = 0;
        for (int k = 0; k < q; ++k) {
            const double w = a[k] - std::min(a[k], b[k]);
            if (w <= 0.0) continue;
            last = k;
            acc += w;
            if (v < acc) return k;
        }
        return last;
    };
    const int i = residual_draw(p, r);
    const int j = residual_draw(r, p);
    return {i, j};
}

// Two restricted chains driven by the contracting coupling: same vertex each
// step, colors from the maximal coupling of the two conditionals, rejection
// evaluated per chain. Hamming distance is maintained incrementally; once the
// chains coalesce the coupled draw keeps them identical forever.
struct CoupledPair {
    RestrictedChain w;
    RestrictedChain z;
    long long hamming_dist = 0;

    CoupledPair(const ModelParams& p, Configuration cw, Configuration cz, ProbVector x, double r)
        : w(p, std::move(cw), x, r), z(p, std::move(cz), std::move(x), r) {
        hamming_dist = static_cast<long long>(hamming(w.config, z.config));
    }

    bool coalesced() const { return hamming_dist == 0; }

    void step(RngStream& rng) {
        const int v = static_cast<int>(rng.next_below(w.params.n_vertices));
        const int cw = w.config[v];
        const int cz = z.config[v];
        const ProbVector pw = w.conditional(cw);
        const ProbVector pz = z.conditional(cz);
        auto [i, j] = maximal_coupling_sample(pw, pz, rng);
        const bool differed = cw != cz;
        w.try_recolor(v, i);
        z.try_recolor(v, j);
        const bool differs = w.config[v] != z.config[v];
        hamming_dist += (differs ? 1 : 0) - (differed ? 1 : 0);
    }
};

struct CouplingTrace {
    std::optional<long long> tau_couple;
    std::optional<long long> tau_counts;  // first time the two count vectors agree
    long long phase1_len = 0;
    long long max_hamming = 0;
    std::optional<long long> event_b_violated_at;  // first exit from the 4r/5 ball by either chain
    std::vector<long long> hamming;                // per-step, if recorded
};

// Phase 1: run the two chains on independent substreams until both are inside
// the r/5 ball. Phase 2: contracting coupled steps until coalescence or the
// step budget runs out. Steps are counted across both phases.
//
// tau_counts marks the first phase-2 time at which the two count vectors
// agree: from that moment the pair induces a coupling of the lumped chain
// whose copies can share every move, so tau_counts bounds the lumped mixing
// time the way tau_couple bounds the configuration-level one. With
// stop_at_count_match the run ends there.
inline CouplingTrace two_phase_coalescence(const Configuration& sigma, const Configuration& tau,
                                           const ProbVector& x, double r, const ModelParams& p,
                                           RngStream& rng, long long max_steps,
                                           bool record_hamming = false,
                                           bool stop_at_count_match = false) {
    RngStream rng_w = rng.substream(1);
    RngStream rng_z = rng.substream(2);
    RngStream rng_pair = rng.substream(3);

    CoupledPair pair(p, sigma, tau, x, r);
    CouplingTrace trace;
    trace.max_hamming = pair.hamming_dist;
    if (record_hamming) trace.hamming.push_back(pair.hamming_dist);

    auto check_b = [&](long long t) {
        if (trace.event_b_violated_at) return;
        if (!in_ball(pair.w.counts, x, 4.0 * r / 5.0, p.n_vertices) ||
            !in_ball(pair.z.counts, x, 4.0 * r / 5.0, p.n_vertices))
            trace.event_b_violated_at = t;
    };
    auto both_inner = [&] {
        return in_ball(pair.w.counts, x, r / 5.0, p.n_vertices) &&
               in_ball(pair.z.counts, x, r / 5.0, p.n_vertices);
    };

    check_b(0);
    if (pair.coalesced()) {
        trace.tau_couple = 0;
        trace.tau_counts = 0;
        return trace;
    }

    long long t = 0;
    bool phase2 = both_inner();
    if (phase2 && pair.w.counts == pair.z.counts) trace.tau_counts = 0;
    trace.phase1_len = 0;
    while (t < max_steps) {
        ++t;
        if (!phase2) {
            pair.w.step(rng_w);
            pair.z.step(rng_z);
            // Hamming is not maintained by the independent steps; recompute lazily
            // only when entering phase 2.
            if (both_inner()) {
                phase2 = true;
                trace.phase1_len = t;
                pair.hamming_dist = static_cast<long long>(hamming(pair.w.config, pair.z.config));
            }
        } else {
            pair.step(rng_pair);
        }
        check_b(t);
        if (phase2) {
            trace.max_hamming = std::max(trace.max_hamming, pair.hamming_dist);
            if (record_hamming) trace.hamming.push_back(pair.hamming_dist);
            if (!trace.tau_counts && pair.w.counts == pair.z.counts) {
                trace.tau_counts = t;
                if (stop_at_count_match) break;
            }
            if (pair.coalesced()) {
                trace.tau_couple = t;
                break;
            }
        }
    }
    if (!phase2) trace.phase1_len = t;
    return trace;
}

// Color of position v in the canonical block layout of a count vector. Two
// layouts disagree on exactly half the l1 distance of their counts, the
// minimum possible, which is what makes the lumped coupling below tight.
inline int block_color_at(const CountVector& n, long long v) {
    long long acc = 0;
    for (size_t k = 0; k < n.size(); ++k) {
        acc += n[k];
        if (v < acc) return static_cast<int>(k);
    }
    return static_cast<int>(n.size()) - 1;
}

// Coupling of two copies of the (restricted) lumped chain: the same uniform
// position is read off each copy's canonical block layout, the new colors come
// from the maximal coupling of the two conditionals, rejection is per copy.
// Returns the first time the count vectors agree (after which the copies can
// share every move), or max_steps + 1.
inline long long lumped_coupling_tau(const ProbVector& x, double r, const ModelParams& p,
                                     CountVector nw, CountVector nz, RngStream& rng,
                                     long long max_steps) {
    const int N = p.n_vertices;
    const int q = p.q;
    if (nw == nz) return 0;
    auto cond = [&](const CountVector& n, int c) {
        std::vector<double> s(q);
        for (int k = 0; k < q; ++k) s[k] = static_cast<double>(n[k]) / N;
        s[c] -= 1.0 / N;
        return softmax_gbeta(s, p.beta);
    };
    auto try_move = [&](CountVector& n, int c, int i) {
        if (i == c) return;
        --n[c];
        ++n[i];
        if (!in_ball(n, x, r, N)) {
            ++n[c];
            --n[i];
        }
    };
    for (long long t = 1; t <= max_steps; ++t) {
        const long long v = static_cast<long long>(rng.next_below(N));
        const int cw = block_color_at(nw, v);
        const int cz = block_color_at(nz, v);
        auto [i, j] = maximal_coupling_sample(cond(nw, cw), cond(nz, cz), rng);
        try_move(nw, cw, i);
        try_move(nz, cz, j);
        if (nw == nz) return t;
    }
    return max_steps + 1;
}

struct TmixUpperResult {
    std::optional<long long> t;
    std::string worst_pair;            // description of the pair achieving the max
    long long replicas_per_pair = 0;
    long long uncoupled_runs = 0;      // replicas that hit the budget
};

namespace detail {

// Point of the ball around x pushed as far as possible along e_k - x while
// staying on the simplex and within radius r.
inline ProbVector ball_extreme(const ProbVector& x, double r, int k) {
    const int q = static_cast<int>(x.size());
    std::vector<double> d(q);
    for (int i = 0; i < q; ++i) d[i] = ((i == k) ? 1.0 : 0.0) - x[i];
    double n2 = 0.0;
    for (double v : d) n2 += v * v;
    if (n2 < 1e-30) return x;
    double t = r / std::sqrt(n2);
    for (int i = 0; i < q; ++i) {
        if (d[i] < 0.0) t = std::min(t, x[i] / -d[i]);        // keep entries >= 0
        if (d[i] > 0.0) t = std::min(t, (1.0 - x[i]) / d[i]); // keep entries <= 1
    }
    t = std::max(0.0, t * (1.0 - 1e-9));
    ProbVector y(q);
    for (int i = 0; i < q; ++i) y[i] = x[i] + t * d[i];
    return y;
}

// CDF of Binomial(n, p) at m, by direct summation in log space.
inline double binomial_cdf(long long m, long long n, double p) {
    double cdf = 0.0;
    for (long long i = 0; i <= m; ++i) {
        double lg = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                    i * std::log(p) + (n - i) * std::log1p(-p);
        cdf += std::exp(lg);
    }
    return std::min(cdf, 1.0);
}

}  // namespace detail

// Empirical upper estimate of the lumped chain's t_mix(1/4) from coalescence
// times of the lumped coupling: for each sampled start pair, an upper
// confidence bound on the 75th percentile of the coalescence time (order
// statistic chosen via the binomial CDF), maximized over pairs. Start pairs
// are the axis-extreme points of the ball plus random pairs. Returns absent t
// if the chosen order statistic falls on a replica that never coalesced
// within the budget.
inline TmixUpperResult coupling_tmix_upper(const ProbVector& x, double r, const ModelParams& p,
                                           RngStream& rng, double confidence,
                                           long long replicas = 40, long long n_random_pairs = 4,
                                           long long max_steps = 0) {
    const int q = p.q;
    const int n = p.n_vertices;
    if (max_steps <= 0)
        max_steps = 200LL * n * static_cast<long long>(std::log(std::max(3, n)) + 1.0);

    std::vector<std::pair<Configuration, Configuration>> pairs;
    std::vector<std::string> labels;
    std::vector<ProbVector> extremes;
    for (int k = 0; k < q; ++k) extremes.push_back(detail::ball_extreme(x, r, k));
    for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b) {
            pairs.emplace_back(configuration_near(extremes[a], n), configuration_near(extremes[b], n));
            labels.push_back("axis:" + std::to_string(a) + "-" + std::to_string(b));
        }
    RngStream pair_rng = rng.substream(0x5041);
    for (long long i = 0; i < n_random_pairs; ++i) {
        auto random_point = [&] {
            // Rejection sample a simplex point in the ball around x.
            for (int tries = 0; tries < 1000; ++tries) {
                ProbVector y(q);
                double s = 0.0;
                for (int k = 0; k < q; ++k) {
                    y[k] = std::max(0.0, x[k] + (2.0 * pair_rng.next_double() - 1.0) * r);
                    s += y[k];
                }
                for (int k = 0; k < q; ++k) y[k] /= s;
                double d2 = 0.0;
                for (int k = 0; k < q; ++k) d2 += (y[k] - x[k]) * (y[k] - x[k]);
                if (d2 <= r * r) return y;
            }
            return x;
        };
        pairs.emplace_back(configuration_near(random_point(), n), configuration_near(random_point(), n));
        labels.push_back("random:" + std::to_string(i));
    }

    // Smallest order-statistic index m with P(Bin(replicas, 3/4) <= m-1) >= confidence.
    long long order_idx = replicas;
    for (long long m = 1; m <= replicas; ++m) {
        if (detail::binomial_cdf(m - 1, replicas, 0.75) >= confidence) {
            order_idx = m;
            break;
        }
    }

    TmixUpperResult result;
    result.replicas_per_pair = replicas;
    long long worst = -1;
    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        std::vector<long long> taus;
        bool censored_at_order = false;
        long long uncoupled = 0;
        for (long long rep = 0; rep < replicas; ++rep) {
            RngStream run_rng = rng.substream(1000003ULL * pi + rep + 7);
            CountVector nw(q, 0), nz(q, 0);
            for (int c : pairs[pi].first) ++nw[c];
            for (int c : pairs[pi].second) ++nz[c];
            const long long tau = lumped_coupling_tau(x, r, p, nw, nz, run_rng, max_steps);
            taus.push_back(tau);
            if (tau > max_steps) ++uncoupled;
        }
        result.uncoupled_runs += uncoupled;
        std::sort(taus.begin(), taus.end());
        long long t_pair = taus[order_idx - 1];
        if (t_pair > max_steps) censored_at_order = true;
        if (censored_at_order) {
            result.t.reset();
            result.worst_pair = labels[pi] + " (budget exhausted)";
            return result;
        }
        if (t_pair > worst) {
            worst = t_pair;
            result.worst_pair = labels[pi];
        }
    }
    result.t = worst;
    return result;
}

// Geometric contraction envelope (1 - (1-theta)/(2N))^t.
inline double contraction_envelope(double theta_x, int n_vertices, long long t) {
    return std::pow(1.0 - (1.0 - theta_x) / (2.0 * n_vertices), static_cast<double>(t));
}

}  // namespace spinstein
