#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinstein/dynamics.hpp"
#include "spinstein/spin_core.hpp"

namespace spinstein {

// Exact computations on the lumped (count-vector) chain: state enumeration,
// transition matrices, stationary measures, TV mixing curves, the Stein
// Poisson equation, and exact Wasserstein distances between exchangeable
// measures via min-cost flow on the count lattice.

struct Region {
    ProbVector center;
    double radius = 0.0;
};

namespace detail {

struct CountVectorHash {
    size_t operator()(const CountVector& n) const {
        uint64_t h = 1469598103934665603ull;
        for (long long v : n) {
            h ^= static_cast<uint64_t>(v);
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

inline long long simplex_count(int n, int q) {
    // C(n + q - 1, q - 1), saturating at a large sentinel.
    long long m = 1;
    for (int i = 1; i < q; ++i) {
        m = m * (n + i) / i;
        if (m > (1LL << 60)) return 1LL << 60;
    }
    return m;
}

}  // namespace detail

// All count vectors with sum N (optionally restricted to the l2 ball), in a
// deterministic order: the last coordinate varies slowest.
inline std::vector<CountVector> enumerate_states(int N, int q, const std::optional<Region>& region = {},
                                                 long long guard = 10'000'000) {
    const long long total = detail::simplex_count(N, q);
    if (total > guard)
        throw ResourceError("state count " + std::to_string(total) + " exceeds guard " +
                            std::to_string(guard));
    std::vector<CountVector> out;
    CountVector n(q, 0);
    std::function<void(int, long long)> rec = [&](int k, long long rem) {
        if (k == 0) {
            n[0] = rem;
            if (!region || in_ball(n, region->center, region->radius, N)) out.push_back(n);
            return;
        }
        for (long long v = 0; v <= rem; ++v) {
            n[k] = v;
            rec(k - 1, rem - v);
        }
    };
    rec(q - 1, N);
    return out;
}

struct LumpedChain {
    int N = 0;
    int q = 0;
    double beta = 0.0;
    std::optional<Region> region;
    std::vector<CountVector> states;
    std::unordered_map<CountVector, int, detail::CountVectorHash> index;
    // Sparse rows: (column, probability) pairs, diagonal included.
    std::vector<std::vector<std::pair<int, double>>> rows;

    int find(const CountVector& n) const {
        auto it = index.find(n);
        return it == index.end() ? -1 : it->second;
    }
};

// Exact one-step law of the count vector under CWP Glauber: the move k -> l
// has probability s_k * g_beta^{(l)}(s - e_k/N); the diagonal absorbs the rest
// (including moves rejected by the restriction).
inline LumpedChain lumped_transition_matrix(int N, int q, double beta,
                                            const std::optional<Region>& region = {},
                                            long long guard = 10'000'000) {
    LumpedChain chain;
    chain.N = N;
    chain.q = q;
    chain.beta = beta;
    chain.region = region;
    chain.states = enumerate_states(N, q, region, guard);
    const int M = static_cast<int>(chain.states.size());
    chain.index.reserve(M * 2);
    for (int i = 0; i < M; ++i) chain.index.emplace(chain.states[i], i);
    chain.rows.resize(M);
    std::vector<double> s(q);
    for (int i = 0; i < M; ++i) {
        const CountVector& n = chain.states[i];
        double diag = 1.0;
        auto& row = chain.rows[i];
        for (int k = 0; k < q; ++k) {
            if (n[k] == 0) continue;
            const double sk = static_cast<double>(n[k]) / N;
            for (int c = 0; c < q; ++c) s[c] = static_cast<double>(n[c]) / N;
            s[k] -= 1.0 / N;
            const ProbVector g = softmax_gbeta(s, beta);
            for (int l = 0; l < q; ++l) {
                if (l == k) continue;
                const double p = sk * g[l];
                if (p <= 0.0) continue;
                CountVector m = n;
                --m[k];
                ++m[l];
                const int j = chain.find(m);
                if (j < 0) continue;  // rejected: stays in the diagonal
                row.emplace_back(j, p);
                diag -= p;
            }
        }
        row.emplace_back(i, diag);
        std::sort(row.begin(), row.end());
        // merge duplicate columns (k->l and k'->l' can hit the same target)
        size_t w = 0;
        for (size_t r = 0; r < row.size(); ++r) {
            if (w > 0 && row[w - 1].first == row[r].first)
                row[w - 1].second += row[r].second;
            else
                row[w++] = row[r];
        }
        row.resize(w);
    }
    return chain;
}

struct LumpedMeasure {
    std::vector<double> weights;  // aligned with a LumpedChain's state list
};

namespace detail {

inline std::vector<double> normalize_log_weights(std::vector<double> logw) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logw) m = std::max(m, v);
    if (!(m > -std::numeric_limits<double>::infinity()))
        throw std::invalid_argument("measure has zero total mass");
    double z = 0.0;
    for (double v : logw) z += std::exp(v - m);
    std::vector<double> w(logw.size());
    for (size_t i = 0; i < logw.size(); ++i) w[i] = std::exp(logw[i] - m) / z;
    return w;
}

}  // namespace detail

// Gibbs measure pushed to counts: weight(n) proportional to
// multinomial(N; n) * exp((beta/N) * sum_k n_k (n_k - 1)), log-space.
inline LumpedMeasure lumped_gibbs(const std::vector<CountVector>& states, int N, double beta) {
    std::vector<double> logw(states.size());
    const double lgn = std::lgamma(N + 1.0);
    for (size_t i = 0; i < states.size(); ++i) {
        double lw = lgn;
        double energy = 0.0;
        for (long long nk : states[i]) {
            lw -= std::lgamma(nk + 1.0);
            energy += static_cast<double>(nk) * (nk - 1);
        }
        logw[i] = lw + beta / N * energy;
    }
    return {detail::normalize_log_weights(std::move(logw))};
}

// Product measure with per-vertex color law x, pushed to counts and
// conditioned on the given state list.
inline LumpedMeasure conditional_multinomial(const std::vector<CountVector>& states, int N,
                                             const ProbVector& x) {
    std::vector<double> logw(states.size());
    const double lgn = std::lgamma(N + 1.0);
    for (size_t i = 0; i < states.size(); ++i) {
        double lw = lgn;
        for (size_t k = 0; k < x.size(); ++k) {
            const long long nk = states[i][k];
            lw -= std::lgamma(nk + 1.0);
            if (nk > 0)
                lw += (x[k] > 0.0) ? nk * std::log(x[k]) : -std::numeric_limits<double>::infinity();
        }
        logw[i] = lw;
    }
    return {detail::normalize_log_weights(std::move(logw))};
}

namespace detail {

inline Eigen::MatrixXd dense_matrix(const LumpedChain& chain) {
    const int M = static_cast<int>(chain.states.size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i)
        for (auto& [j, p] : chain.rows[i]) P(i, j) = p;
    return P;
}

}  // namespace detail

// Stationary distribution as the left fixed vector, by dense least squares on
// the augmented system (P^T - I; 1^T) for M <= 4000, else power iteration.
inline LumpedMeasure stationary_distribution(const LumpedChain& chain) {
    const int M = static_cast<int>(chain.states.size());
    if (M <= 4000) {
        Eigen::MatrixXd A(M + 1, M);
        A.topRows(M) = detail::dense_matrix(chain).transpose() - Eigen::MatrixXd::Identity(M, M);
        A.row(M).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(M + 1);
        b(M) = 1.0;
        Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);
        // one round of refinement
        pi += A.colPivHouseholderQr().solve(b - A * pi);
        LumpedMeasure m;
        m.weights.assign(pi.data(), pi.data() + M);
        double s = 0.0;
        for (double& w : m.weights) {
            w = std::max(w, 0.0);
            s += w;
        }
        for (double& w : m.weights) w /= s;
        return m;
    }
    std::vector<double> pi(M, 1.0 / M), next(M);
    for (int it = 0; it < 200000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < M; ++i)
            for (auto& [j, p] : chain.rows[i]) next[j] += pi[i] * p;
        double diff = 0.0;
        for (int i = 0; i < M; ++i) diff += std::abs(next[i] - pi[i]);
        pi.swap(next);
        if (diff < 1e-14) break;
    }
    return {std::move(pi)};
}

inline double tv_between(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0, c = 0.0;  // compensated summation
    for (size_t i = 0; i < a.size(); ++i) {
        const double y = std::abs(a[i] - b[i]) - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return 0.5 * s;
}

struct TvCurve {
    std::vector<std::pair<long long, double>> points;  // (t, worst-case TV)
    long long t_mix = -1;
};

// Worst-case-over-starts TV distance to stationarity via cached dense matrix
// squarings; t_mix(eps) located by doubling then bisection on the cached
// power products.
inline TvCurve tv_curve_and_tmix(const LumpedChain& chain, double epsilon,
                                 long long max_time = (1LL << 40)) {
    const int M = static_cast<int>(chain.states.size());
    if (M > 4000)
        throw ResourceError("dense powering guard: M = " + std::to_string(M) + " > 4000");
    const LumpedMeasure pi = stationary_distribution(chain);
    Eigen::Map<const Eigen::RowVectorXd> piv(pi.weights.data(), M);

    auto worst_tv = [&](const Eigen::MatrixXd& Pt) {
        double worst = 0.0;
        for (int i = 0; i < M; ++i) {
            double s = 0.0, c = 0.0;
            for (int j = 0; j < M; ++j) {
                const double y = std::abs(Pt(i, j) - pi.weights[j]) - c;
                const double t = s + y;
                c = (t - s) - y;
                s = t;
            }
            worst = std::max(worst, 0.5 * s);
        }
        return worst;
    };

    TvCurve curve;
    std::vector<Eigen::MatrixXd> pow2;  // pow2[k] = P^(2^k)
    pow2.push_back(detail::dense_matrix(chain));
    curve.points.emplace_back(0, worst_tv(Eigen::MatrixXd::Identity(M, M)));
    if (curve.points.back().second <= epsilon) {
        curve.t_mix = 0;
        return curve;
    }
    long long t = 1;
    double d = worst_tv(pow2[0]);
    curve.points.emplace_back(1, d);
    while (d > epsilon) {
        if (2 * t > max_time)
            throw ResourceError("t_mix exceeds time guard " + std::to_string(max_time));
        pow2.push_back(pow2.back() * pow2.back());
        t *= 2;
        d = worst_tv(pow2.back());
        curve.points.emplace_back(t, d);
    }
    if (t == 1) {
        curve.t_mix = 1;
        return curve;
    }
    auto power = [&](long long e) {
        Eigen::MatrixXd R = Eigen::MatrixXd::Identity(M, M);
        for (size_t k = 0; k < pow2.size(); ++k)
            if (e >> k & 1) R = R * pow2[k];
        return R;
    };
    long long lo = t / 2, hi = t;  // d(lo) > eps >= d(hi)
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        const double dm = worst_tv(power(mid));
        curve.points.emplace_back(mid, dm);
        (dm > epsilon ? lo : hi) = mid;
    }
    std::sort(curve.points.begin(), curve.points.end());
    curve.t_mix = hi;
    return curve;
}

// Solves (P - I) f = -(h - E_pi h) with sum_i pi_i f_i = 0, by dense least
// squares on the augmented system plus iterative refinement.
inline std::vector<double> solve_stein_poisson(const LumpedChain& chain,
                                               const std::vector<double>& h,
                                               const LumpedMeasure* stationary = nullptr) {
    const int M = static_cast<int>(chain.states.size());
    if (M > 4000) throw ResourceError("stein solve guard: M > 4000");
    LumpedMeasure pi_local;
    const LumpedMeasure& pi = stationary ? *stationary : (pi_local = stationary_distribution(chain));
    double hbar = 0.0;
    for (int i = 0; i < M; ++i) hbar += pi.weights[i] * h[i];

    Eigen::MatrixXd A(M + 1, M);
    A.topRows(M) = detail::dense_matrix(chain) - Eigen::MatrixXd::Identity(M, M);
    for (int j = 0; j < M; ++j) A(M, j) = pi.weights[j];
    Eigen::VectorXd b(M + 1);
    for (int i = 0; i < M; ++i) b(i) = -(h[i] - hbar);
    b(M) = 0.0;
    auto qr = A.colPivHouseholderQr();
    Eigen::VectorXd f = qr.solve(b);
    for (int it = 0; it < 5; ++it) {
        Eigen::VectorXd res = b - A * f;
        if (res.head(M).lpNorm<Eigen::Infinity>() < 1e-12) break;
        f += qr.solve(res);
    }
    const double residual = (b - A * f).head(M).lpNorm<Eigen::Infinity>();
    if (residual > 1e-9)
        throw std::runtime_error("stein solve residual " + std::to_string(residual));
    return std::vector<double>(f.data(), f.data() + M);
}

// ---------------------------------------------------------------------------
// Min-cost flow with nonnegative integer arc costs, double capacities,
// successive shortest paths with potentials, Dial bucket queue.

class MinCostFlow {
  public:
    explicit MinCostFlow(int n) : head_(n, -1), potential_(n, 0) {}

    void add_edge(int u, int v, double cap, long long cost) {
        edges_.push_back({v, head_[u], cap, cost});
        head_[u] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({u, head_[v], 0.0, -cost});
        head_[v] = static_cast<int>(edges_.size()) - 1;
    }

    // Sends as much flow as possible from s to t; returns (flow, cost).
    std::pair<double, double> solve(int s, int t, long long max_dist_hint) {
        const int n = static_cast<int>(head_.size());
        const long long INF = std::numeric_limits<long long>::max() / 4;
        double total_flow = 0.0, total_cost = 0.0;
        std::vector<long long> dist(n);
        std::vector<int> prev_edge(n);
        for (;;) {
            std::fill(dist.begin(), dist.end(), INF);
            dist[s] = 0;
            std::vector<std::vector<int>> buckets(static_cast<size_t>(max_dist_hint) + 2);
            std::vector<char> done(n, 0);
            buckets[0].push_back(s);
            for (size_t d = 0; d < buckets.size(); ++d) {
                // note: buckets may be resized inside this loop; index, don't alias
                for (size_t bi = 0; bi < buckets[d].size(); ++bi) {
                    const int u = buckets[d][bi];
                    if (done[u] || dist[u] != static_cast<long long>(d)) continue;
                    done[u] = 1;
                    for (int e = head_[u]; e != -1; e = edges_[e].next) {
                        if (edges_[e].cap <= 1e-15) continue;
                        const int v = edges_[e].to;
                        const long long nd =
                            static_cast<long long>(d) + edges_[e].cost + potential_[u] - potential_[v];
                        if (nd < dist[v]) {
                            dist[v] = nd;
                            prev_edge[v] = e;
                            if (static_cast<size_t>(nd) >= buckets.size())
                                buckets.resize(static_cast<size_t>(nd) + 1);
                            buckets[nd].push_back(v);
                        }
                    }
                }
            }
            if (dist[t] >= INF) break;
            for (int v = 0; v < n; ++v)
                if (dist[v] < INF) potential_[v] += dist[v];
                else potential_[v] += dist[t];
            double push = std::numeric_limits<double>::infinity();
            for (int v = t; v != s; v = edges_[prev_edge[v] ^ 1].to)
                push = std::min(push, edges_[prev_edge[v]].cap);
            if (!(push > 0.0)) break;
            long long path_cost = 0;
            for (int v = t; v != s; v = edges_[prev_edge[v] ^ 1].to) {
                edges_[prev_edge[v]].cap -= push;
                edges_[prev_edge[v] ^ 1].cap += push;
                path_cost += edges_[prev_edge[v]].cost;
            }
            total_flow += push;
            total_cost += push * static_cast<double>(path_cost);
        }
        return {total_flow, total_cost};
    }

    long long potential(int v) const { return potential_[v]; }

  private:
    struct Edge {
        int to;
        int next;
        double cap;
        long long cost;
    };
    std::vector<int> head_;
    std::vector<long long> potential_;
    std::vector<Edge> edges_;
};

struct OtResult {
    double value = 0.0;       // d_W under the Hamming ground metric
    double duality_gap = 0.0; // |primal - dual| from the final potentials
};

// Exact Wasserstein distance between two exchangeable measures given by their
// count-vector laws, under the Hamming ground metric on configurations. The
// config-level distance equals the count-level OT with cost (1/2)||n - n'||_1,
// which is the unit-cost shortest-path metric of the count lattice, so the OT
// is a min-cost flow with node imbalances mu - nu on the lattice graph. The
// graph is built on the coordinate bounding box of the supports (monotone
// geodesics stay inside), and states carrying mass below mass_floor are
// dropped with their mass reassigned to the nearest kept state.
inline OtResult exact_wasserstein_exchangeable(const std::vector<CountVector>& states, int N,
                                               const std::vector<double>& mu,
                                               const std::vector<double>& nu,
                                               double mass_floor = 1e-18) {
    if (mu.size() != states.size() || nu.size() != states.size())
        throw std::invalid_argument("measure/state size mismatch");
    const int q = states.empty() ? 0 : static_cast<int>(states[0].size());
    const size_t M = states.size();

    std::vector<char> kept(M, 0);
    for (size_t i = 0; i < M; ++i) kept[i] = (mu[i] + nu[i] > mass_floor) ? 1 : 0;
    std::vector<double> mu2(mu), nu2(nu);
    auto l1 = [&](const CountVector& a, const CountVector& b) {
        long long s = 0;
        for (int k = 0; k < q; ++k) s += std::llabs(a[k] - b[k]);
        return s;
    };
    for (size_t i = 0; i < M; ++i) {
        if (kept[i] || (mu2[i] == 0.0 && nu2[i] == 0.0)) continue;
        long long best = std::numeric_limits<long long>::max();
        size_t bj = 0;
        for (size_t j = 0; j < M; ++j) {
            if (!kept[j]) continue;
            const long long d = l1(states[i], states[j]);
            if (d < best) {
                best = d;
                bj = j;
            }
        }
        mu2[bj] += mu2[i];
        nu2[bj] += nu2[i];
        mu2[i] = nu2[i] = 0.0;
    }

    // Bounding box of the kept support, then every simplex state inside it.
    CountVector lo(q, std::numeric_limits<long long>::max()), hi(q, 0);
    bool any = false;
    for (size_t i = 0; i < M; ++i) {
        if (!kept[i]) continue;
        any = true;
        for (int k = 0; k < q; ++k) {
            lo[k] = std::min(lo[k], states[i][k]);
            hi[k] = std::max(hi[k], states[i][k]);
        }
    }
    if (!any) throw std::invalid_argument("both measures have zero mass");

    std::vector<CountVector> nodes;
    std::unordered_map<CountVector, int, detail::CountVectorHash> node_index;
    CountVector cur(q, 0);
    std::function<void(int, long long)> rec = [&](int k, long long rem) {
        if (k == q - 1) {
            if (rem < lo[k] || rem > hi[k]) return;
            cur[k] = rem;
            node_index.emplace(cur, static_cast<int>(nodes.size()));
            nodes.push_back(cur);
            return;
        }
        for (long long v = lo[k]; v <= std::min<long long>(hi[k], rem); ++v) {
            cur[k] = v;
            rec(k + 1, rem - v);
        }
    };
    rec(0, N);

    const int V = static_cast<int>(nodes.size());
    const int S = V, T = V + 1;
    MinCostFlow mcf(V + 2);
    for (int i = 0; i < V; ++i) {
        for (int k = 0; k < q; ++k) {
            if (nodes[i][k] == 0) continue;
            for (int l = 0; l < q; ++l) {
                if (l == k) continue;
                CountVector m = nodes[i];
                --m[k];
                ++m[l];
                auto it = node_index.find(m);
                if (it != node_index.end() && it->second > i)
                    // one call per unordered pair; both directions, cost 1
                    mcf.add_edge(i, it->second, std::numeric_limits<double>::infinity(), 1),
                        mcf.add_edge(it->second, i, std::numeric_limits<double>::infinity(), 1);
            }
        }
    }
    double supply = 0.0;
    for (size_t i = 0; i < M; ++i) {
        if (!kept[i]) continue;
        const double b = mu2[i] - nu2[i];
        const int v = node_index.at(states[i]);
        if (b > 0) {
            mcf.add_edge(S, v, b, 0);
            supply += b;
        } else if (b < 0) {
            mcf.add_edge(v, T, -b, 0);
        }
    }
    auto [flow, cost] = mcf.solve(S, T, 2LL * N + 2);
    if (flow < supply - 1e-9)
        throw std::runtime_error("wasserstein flow infeasible (sent " + std::to_string(flow) +
                                 " of " + std::to_string(supply) + ")");
    // Dual value from the final potentials: phi = -potential is feasible for
    // the Kantorovich dual (|phi_u - phi_v| <= 1 on lattice edges).
    double dual = 0.0;
    for (size_t i = 0; i < M; ++i) {
        if (!kept[i]) continue;
        const int v = node_index.at(states[i]);
        dual -= (mu2[i] - nu2[i]) * static_cast<double>(mcf.potential(v) - mcf.potential(S));
    }
    OtResult r;
    r.value = cost;
    r.duality_gap = std::abs(cost - dual);
    return r;
}

// Generic exact OT between two measures over the same index set with an
// explicit integer cost matrix (used to validate the exchangeable reduction
// on tiny full configuration spaces).
inline OtResult exact_wasserstein_bipartite(const std::vector<double>& mu,
                                            const std::vector<double>& nu,
                                            const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(mu.size());
    long long maxc = 0;
    for (auto& row : cost)
        for (long long c : row) maxc = std::max(maxc, c);
    const int S = 2 * n, T = 2 * n + 1;
    MinCostFlow mcf(2 * n + 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mcf.add_edge(i, n + j, std::numeric_limits<double>::infinity(), cost[i][j]);
    for (int i = 0; i < n; ++i) {
        if (mu[i] > 0) mcf.add_edge(S, i, mu[i], 0);
        if (nu[i] > 0) mcf.add_edge(n + i, T, nu[i], 0);
    }
    auto [flow, c] = mcf.solve(S, T, maxc + 2);
    (void)flow;
    OtResult r;
    r.value = c;
    return r;
}

// ---------------------------------------------------------------------------
// Brute force over full configuration spaces (q^N states).

struct FullGibbs {
    int N = 0;
    int q = 0;
    double log_z = 0.0;
    std::vector<double> probs;  // indexed by base-q encoding of the configuration
};

inline Configuration decode_config(long long idx, int N, int q) {
    Configuration c(N);
    for (int v = 0; v < N; ++v) {
        c[v] = static_cast<int>(idx % q);
        idx /= q;
    }
    return c;
}

inline long long encode_config(const Configuration& c, int q) {
    long long idx = 0;
    for (int v = static_cast<int>(c.size()) - 1; v >= 0; --v) idx = idx * q + c[v];
    return idx;
}

// Exact Gibbs measure: weight(sigma) = exp((2 beta / N) * #monochromatic edges).
inline FullGibbs brute_force_gibbs(const Graph& g, const ModelParams& p, long long guard = 1'000'000) {
    double total = std::pow(static_cast<double>(p.q), p.n_vertices);
    if (total > static_cast<double>(guard))
        throw ResourceError("configuration count exceeds guard");
    const long long K = static_cast<long long>(std::llround(total));
    FullGibbs fg;
    fg.N = p.n_vertices;
    fg.q = p.q;
    std::vector<double> logw(K);
    double m = -std::numeric_limits<double>::infinity();
    for (long long i = 0; i < K; ++i) {
        const Configuration c = decode_config(i, p.n_vertices, p.q);
        logw[i] = 2.0 * p.beta / p.n_vertices * edge_energy(g, c);
        m = std::max(m, logw[i]);
    }
    double z = 0.0;
    for (double v : logw) z += std::exp(v - m);
    fg.log_z = m + std::log(z);
    fg.probs.resize(K);
    for (long long i = 0; i < K; ++i) fg.probs[i] = std::exp(logw[i] - fg.log_z);
    return fg;
}

}  // namespace spinstein
