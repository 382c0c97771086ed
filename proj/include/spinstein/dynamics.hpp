#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <utility>
#include <stdexcept>
#include <vector>

#include "spinstein/rng.hpp"
#include "spinstein/spin_core.hpp"

namespace spinstein {

// Single-site Glauber dynamics. One step: pick a uniform vertex, resample its
// color from the Gibbs conditional given the neighbors.

inline void glauber_step(const Graph& g, Configuration& c, const ModelParams& p, RngStream& rng) {
    const int v = static_cast<int>(rng.next_below(g.n_vertices));
    ProbVector dist = conditional_spin_dist(g, c, v, p);
    c[v] = rng.next_categorical(dist);
}

// Complete-graph fast step: maintains the count vector; the conditional for a
// vertex of color col depends only on S - e_col / N. O(q) per step.
struct MeanFieldChain {
    ModelParams params;
    Configuration config;
    CountVector counts;

    MeanFieldChain(const ModelParams& p, Configuration init) : params(p), config(std::move(init)) {
        if (static_cast<int>(config.size()) != params.n_vertices)
            throw std::invalid_argument("MeanFieldChain: configuration size mismatch");
        counts.assign(params.q, 0);
        for (int s : config) {
            if (s < 0 || s >= params.q)
                throw std::invalid_argument("MeanFieldChain: color out of range");
            ++counts[s];
        }
    }

    ProbVector proportions() const {
        ProbVector x(params.q);
        for (int k = 0; k < params.q; ++k)
            x[k] = static_cast<double>(counts[k]) / params.n_vertices;
        return x;
    }

    // Conditional distribution for a vertex currently colored `col`.
    ProbVector conditional(int col) const {
        const double n = params.n_vertices;
        std::vector<double> s(params.q);
        for (int k = 0; k < params.q; ++k) s[k] = counts[k] / n;
        s[col] -= 1.0 / n;
        return softmax_gbeta(s, params.beta);
    }

    // Returns the vertex updated.
    int step(RngStream& rng) {
        const int v = static_cast<int>(rng.next_below(params.n_vertices));
        const int old_color = config[v];
        const int new_color = rng.next_categorical(conditional(old_color));
        if (new_color != old_color) {
            --counts[old_color];
            ++counts[new_color];
            config[v] = new_color;
        }
        return v;
    }
};

// Membership in the l2 ball {||S(sigma) - x||_2 <= r}, computed on integer
// counts and biased slightly toward acceptance so boundary states round in.
inline bool in_ball(const CountVector& counts, const ProbVector& x, double r, int n_vertices) {
    double d2 = 0.0;
    for (size_t k = 0; k < counts.size(); ++k) {
        const double d = static_cast<double>(counts[k]) - n_vertices * x[k];
        d2 += d * d;
    }
    const double rn = n_vertices * r;
    return d2 <= rn * rn * (1.0 + 1e-12) + 1e-12;
}

struct RestrictedChain {
    ModelParams params;
    Configuration config;
    CountVector counts;
    ProbVector center;
    double radius;
    long long rejected = 0;

    RestrictedChain(const ModelParams& p, Configuration init, ProbVector x, double r)
        : params(p), config(std::move(init)), center(std::move(x)), radius(r) {
        if (static_cast<int>(center.size()) != params.q)
            throw std::invalid_argument("RestrictedChain: center size mismatch");
        counts.assign(params.q, 0);
        for (int s : config) ++counts[s];
        if (!in_ball(counts, center, radius, params.n_vertices))
            throw std::invalid_argument("RestrictedChain: initial configuration outside region");
    }

    ProbVector proportions() const {
        ProbVector x(params.q);
        for (int k = 0; k < params.q; ++k)
            x[k] = static_cast<double>(counts[k]) / params.n_vertices;
        return x;
    }

    ProbVector conditional(int col) const {
        const double n = params.n_vertices;
        std::vector<double> s(params.q);
        for (int k = 0; k < params.q; ++k) s[k] = counts[k] / n;
        s[col] -= 1.0 / n;
        return softmax_gbeta(s, params.beta);
    }

    // Applies the recoloring unless it leaves the region. Returns true if the
    // move was accepted (a no-op recolor counts as accepted).
    bool try_recolor(int v, int new_color) {
        const int old_color = config[v];
        if (new_color == old_color) return true;
        --counts[old_color];
        ++counts[new_color];
        if (!in_ball(counts, center, radius, params.n_vertices)) {
            ++counts[old_color];
            --counts[new_color];
            ++rejected;
            return false;
        }
        config[v] = new_color;
        return true;
    }

    // Glauber proposal; moves leaving the region are rejected (chain holds).
    // Returns true if the proposal was rejected.
    bool step(RngStream& rng) {
        const int v = static_cast<int>(rng.next_below(params.n_vertices));
        const int new_color = rng.next_categorical(conditional(config[v]));
        return !try_recolor(v, new_color);
    }
};

// Trajectory of proportions with the stopping times tau_out (first exit from
// the 4r/5 ball) and tau_in (first entry into the r/5 ball) around x.
struct TrajectoryRecord {
    std::vector<CountVector> counts;         // counts[t] after t steps (counts[0] = start)
    std::vector<long long> rejected_cum;     // cumulative rejections (0 for unrestricted)
    std::optional<long long> tau_out;
    std::optional<long long> tau_in;
};

template <typename Chain>
inline TrajectoryRecord run_with_stopping_times(Chain& chain, long long steps, const ProbVector& x,
                                                double r, RngStream& rng,
                                                long long record_every = 1) {
    TrajectoryRecord rec;
    rec.counts.push_back(chain.counts);
    rec.rejected_cum.push_back(0);
    auto check = [&](long long t) {
        if (!rec.tau_out && !in_ball(chain.counts, x, 4.0 * r / 5.0, chain.params.n_vertices))
            rec.tau_out = t;
        if (!rec.tau_in && in_ball(chain.counts, x, r / 5.0, chain.params.n_vertices))
            rec.tau_in = t;
    };
    check(0);
    long long rejected = 0;
    for (long long t = 1; t <= steps; ++t) {
        if constexpr (std::is_same_v<Chain, RestrictedChain>) {
            if (chain.step(rng)) ++rejected;
        } else {
            chain.step(rng);
        }
        check(t);
        if (t % record_every == 0 || t == steps) {
            rec.counts.push_back(chain.counts);
            rec.rejected_cum.push_back(rejected);
        }
    }
    return rec;
}

// Configuration with exact counts floor(N x_k), remainder spread over the
// largest fractional parts, colors laid out in blocks.
inline Configuration configuration_near(const ProbVector& x, int n_vertices) {
    const int q = static_cast<int>(x.size());
    std::vector<long long> n(q);
    long long total = 0;
    std::vector<std::pair<double, int>> frac(q);
    for (int k = 0; k < q; ++k) {
        n[k] = static_cast<long long>(std::floor(x[k] * n_vertices));
        total += n[k];
        frac[k] = {x[k] * n_vertices - n[k], k};
    }
    std::sort(frac.begin(), frac.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (long long i = 0; total < n_vertices; ++i, ++total) ++n[frac[i % q].second];
    Configuration c;
    c.reserve(n_vertices);
    for (int k = 0; k < q; ++k)
        for (long long i = 0; i < n[k]; ++i) c.push_back(k);
    return c;
}

}  // namespace spinstein
