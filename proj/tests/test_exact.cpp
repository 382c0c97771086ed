#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "spinstein/dynamics.hpp"
#include "spinstein/exact.hpp"
#include "spinstein/macrostates.hpp"

using namespace spinstein;

TEST_CASE("count-vector enumeration") {
    REQUIRE(enumerate_states(30, 3).size() == 496);  // C(32, 2)
    REQUIRE(enumerate_states(2, 2).size() == 3);
    REQUIRE(enumerate_states(1, 4).size() == 4);
    SECTION("restricted enumeration matches a brute filter") {
        const int n = 60;
        const Region region{ordered_macrostate(1.6, 3, 0), 0.1};
        const auto all = enumerate_states(n, 3);
        const auto restricted = enumerate_states(n, 3, region);
        long long expected = 0;
        for (const auto& s : all)
            if (in_ball(s, region.center, region.radius, n)) ++expected;
        REQUIRE(static_cast<long long>(restricted.size()) == expected);
        for (const auto& s : restricted) REQUIRE(in_ball(s, region.center, region.radius, n));
    }
    SECTION("guard trips on oversized requests") {
        REQUIRE_THROWS_AS(enumerate_states(5000, 5), ResourceError);
    }
}

TEST_CASE("lumped transition matrix is stochastic") {
    for (double beta : {0.0, 0.7, 1.6}) {
        const auto chain = lumped_transition_matrix(20, 3, beta);
        for (const auto& row : chain.rows) {
            double s = 0.0;
            for (auto [j, pij] : row) {
                REQUIRE(pij >= 0.0);
                s += pij;
            }
            REQUIRE(s == Catch::Approx(1.0).margin(1e-14));
        }
    }
}

TEST_CASE("infinite temperature moves are uniform over colors") {
    const int n = 12, q = 3;
    const auto chain = lumped_transition_matrix(n, q, 0.0);
    // from any state, the move k -> l (l != k) has probability s_k / q
    for (std::size_t i = 0; i < chain.states.size(); ++i) {
        const auto& s = chain.states[i];
        for (int k = 0; k < q; ++k) {
            if (s[k] == 0) continue;
            for (int l = 0; l < q; ++l) {
                if (l == k) continue;
                CountVector target = s;
                --target[k];
                ++target[l];
                const int j = chain.find(target);
                REQUIRE(j >= 0);
                double pij = 0.0;
                for (auto [col, v] : chain.rows[i])
                    if (col == j) pij += v;
                // two different k can map to the same target only via distinct l,
                // so the single-move probability is s_k/(n q) per (k, l)
                REQUIRE(pij == Catch::Approx(double(s[k]) / n / q).margin(1e-14));
            }
        }
    }
}

TEST_CASE("lumped gibbs at infinite temperature is multinomial") {
    const int n = 15, q = 3;
    const auto states = enumerate_states(n, q);
    const auto gibbs = lumped_gibbs(states, n, 0.0);
    const auto multi = conditional_multinomial(states, n, equiproportional(q));
    for (std::size_t i = 0; i < states.size(); ++i)
        REQUIRE(gibbs.weights[i] == Catch::Approx(multi.weights[i]).margin(1e-14));
}

TEST_CASE("stationary distribution solves pi P = pi and matches gibbs") {
    const int n = 30, q = 3;
    for (double beta : {0.5, 1.0, 1.6}) {
        const auto chain = lumped_transition_matrix(n, q, beta);
        const auto pi = stationary_distribution(chain);
        const auto gibbs = lumped_gibbs(chain.states, n, beta);
        // residual of the balance equations
        std::vector<double> piP(chain.states.size(), 0.0);
        for (std::size_t i = 0; i < chain.rows.size(); ++i)
            for (auto [j, pij] : chain.rows[i]) piP[j] += pi.weights[i] * pij;
        for (std::size_t i = 0; i < piP.size(); ++i)
            REQUIRE(std::abs(piP[i] - pi.weights[i]) < 1e-10);
        REQUIRE(tv_between(pi.weights, gibbs.weights) < 1e-10);
    }
}

TEST_CASE("restricted stationary law is the renormalized gibbs law") {
    const int n = 40, q = 3;
    const double beta = 1.6;
    const Region region{ordered_macrostate(beta, q, 0), 0.12};
    const auto chain = lumped_transition_matrix(n, q, beta, region);
    const auto pi = stationary_distribution(chain);
    const auto gibbs = lumped_gibbs(chain.states, n, beta);  // normalized over the ball
    REQUIRE(tv_between(pi.weights, gibbs.weights) < 1e-10);
}

TEST_CASE("simulated one-step frequencies match the matrix rows") {
    const int n = 20, q = 3;
    const double beta = 1.2;
    const auto chain = lumped_transition_matrix(n, q, beta);
    RngStream rng(314, 0);
    const long long reps = 1000000;
    int checked = 0;
    for (std::size_t i = 0; i < chain.states.size() && checked < 5; i += 46, ++checked) {
        const auto& s = chain.states[i];
        const Configuration c0 = configuration_near(
            ProbVector{s[0] / double(n), s[1] / double(n), s[2] / double(n)}, n);
        REQUIRE(color_counts(c0, q) == s);
        std::unordered_map<long long, long long> freq;
        const ModelParams p{q, beta, n};
        for (long long rep = 0; rep < reps; ++rep) {
            MeanFieldChain mc(p, c0);
            mc.step(rng);
            const auto& cnt = mc.counts;
            freq[(cnt[0] * (n + 1) + cnt[1])] += 1;
        }
        for (auto [j, pij] : chain.rows[i]) {
            const auto& t = chain.states[j];
            const double observed = freq[t[0] * (n + 1) + t[1]] / double(reps);
            const double sd = std::sqrt(pij * (1 - pij) / reps);
            REQUIRE(std::abs(observed - pij) < 4 * sd + 1e-6);
        }
    }
    REQUIRE(checked == 5);
}

TEST_CASE("worst-case tv curve and mixing time") {
    const int n = 10, q = 3;
    const auto chain = lumped_transition_matrix(n, q, 1.0);
    const auto pi = stationary_distribution(chain);
    const auto curve = tv_curve_and_tmix(chain, 0.25, 100000);
    REQUIRE(curve.t_mix > 0);
    // at t = 0 the worst start is a point mass: TV = 1 - min_i pi_i
    const double pimin = *std::min_element(pi.weights.begin(), pi.weights.end());
    REQUIRE(curve.points.front().first == 0);
    REQUIRE(curve.points.front().second == Catch::Approx(1.0 - pimin).margin(1e-12));
    // the recorded curve is non-increasing in t
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        REQUIRE(curve.points[k].first > curve.points[k - 1].first);
        REQUIRE(curve.points[k].second <= curve.points[k - 1].second + 1e-12);
    }
    // tighter epsilon cannot mix faster
    const auto curve8 = tv_curve_and_tmix(chain, 0.125, 100000);
    REQUIRE(curve8.t_mix >= curve.t_mix);
    SECTION("guard trips on large state spaces") {
        REQUIRE_THROWS_AS(tv_curve_and_tmix(lumped_transition_matrix(200, 3, 1.0), 0.25),
                          ResourceError);
    }
}

TEST_CASE("poisson equation solver") {
    const int n = 20, q = 3;
    const double beta = 1.0;
    const auto chain = lumped_transition_matrix(n, q, beta);
    const auto pi = stationary_distribution(chain);
    const int M = static_cast<int>(chain.states.size());
    SECTION("constant observable gives the zero solution") {
        const auto f = solve_stein_poisson(chain, std::vector<double>(M, 3.7), &pi);
        for (double v : f) REQUIRE(std::abs(v) < 1e-10);
    }
    SECTION("residual and centering of a generic solve") {
        std::vector<double> h(M);
        for (int i = 0; i < M; ++i) h[i] = chain.states[i][0] / double(n);
        const auto f = solve_stein_poisson(chain, h, &pi);
        double hbar = 0.0, fbar = 0.0;
        for (int i = 0; i < M; ++i) {
            hbar += pi.weights[i] * h[i];
            fbar += pi.weights[i] * f[i];
        }
        REQUIRE(std::abs(fbar) < 1e-10);
        // (P - I) f = -(h - hbar)
        for (int i = 0; i < M; ++i) {
            double pf = -f[i];
            for (auto [j, pij] : chain.rows[i]) pf += pij * f[j];
            REQUIRE(std::abs(pf + (h[i] - hbar)) < 1e-9);
        }
    }
    SECTION("solution matches the truncated series sum") {
        // f = sum_t P^t (h - hbar); the chain mixes fast enough at beta = 1
        std::vector<double> h(M);
        for (int i = 0; i < M; ++i) h[i] = std::cos(0.7 * chain.states[i][1]);
        const auto f = solve_stein_poisson(chain, h, &pi);
        double hbar = 0.0;
        for (int i = 0; i < M; ++i) hbar += pi.weights[i] * h[i];
        std::vector<double> series(M, 0.0), cur(M);
        for (int i = 0; i < M; ++i) cur[i] = h[i] - hbar;
        for (int t = 0; t < 4000; ++t) {
            for (int i = 0; i < M; ++i) series[i] += cur[i];
            std::vector<double> next(M, 0.0);
            for (int i = 0; i < M; ++i)
                for (auto [j, pij] : chain.rows[i]) next[i] += pij * cur[j];
            cur.swap(next);
            double sup = 0.0;
            for (double v : cur) sup = std::max(sup, std::abs(v));
            if (sup < 1e-13) break;
        }
        for (int i = 0; i < M; ++i) REQUIRE(f[i] == Catch::Approx(series[i]).margin(1e-8));
    }
}

TEST_CASE("exact wasserstein on count laws") {
    const int n = 10, q = 3;
    const auto states = enumerate_states(n, q);
    const int M = static_cast<int>(states.size());
    RngStream rng(55, 0);
    auto random_measure = [&] {
        std::vector<double> w(M);
        double s = 0.0;
        for (int i = 0; i < M; ++i) {
            w[i] = rng.next_double();
            s += w[i];
        }
        for (double& v : w) v /= s;
        return w;
    };
    SECTION("identical measures have distance zero") {
        const auto mu = random_measure();
        const auto r = exact_wasserstein_exchangeable(states, n, mu, mu);
        REQUIRE(r.value == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("point masses recover the hamming ground distance") {
        for (int trial = 0; trial < 20; ++trial) {
            const int a = static_cast<int>(rng.next_below(M));
            const int b = static_cast<int>(rng.next_below(M));
            std::vector<double> mu(M, 0.0), nu(M, 0.0);
            mu[a] = 1.0;
            nu[b] = 1.0;
            double l1 = 0.0;
            for (int k = 0; k < q; ++k) l1 += std::abs(double(states[a][k] - states[b][k]));
            const auto r = exact_wasserstein_exchangeable(states, n, mu, nu);
            REQUIRE(r.value == Catch::Approx(0.5 * l1).margin(1e-9));
        }
    }
    SECTION("symmetry and triangle inequality") {
        for (int trial = 0; trial < 5; ++trial) {
            const auto mu = random_measure();
            const auto nu = random_measure();
            const auto rho = random_measure();
            const double dmn = exact_wasserstein_exchangeable(states, n, mu, nu).value;
            const double dnm = exact_wasserstein_exchangeable(states, n, nu, mu).value;
            const double dmr = exact_wasserstein_exchangeable(states, n, mu, rho).value;
            const double drn = exact_wasserstein_exchangeable(states, n, rho, nu).value;
            REQUIRE(dmn == Catch::Approx(dnm).margin(1e-9));
            REQUIRE(dmn <= dmr + drn + 1e-9);
        }
    }
    SECTION("duality gap is tight") {
        const auto mu = random_measure();
        const auto nu = random_measure();
        const auto r = exact_wasserstein_exchangeable(states, n, mu, nu);
        REQUIRE(r.duality_gap < 1e-9 * (r.value + 1.0));
    }
}

TEST_CASE("count-level wasserstein agrees with the full configuration OT") {
    // N = 4, q = 3: all 81 configurations, gibbs at beta = 1 vs iid uniform
    const int n = 4, q = 3;
    const ModelParams p{q, 1.0, n};
    const auto gibbs = brute_force_gibbs(Graph::complete(n), p);
    const long long total = 81;
    std::vector<double> mu_full(total), nu_full(total, 1.0 / total);
    for (long long i = 0; i < total; ++i) mu_full[i] = gibbs.probs[i];
    // full bipartite OT with hamming costs
    std::vector<std::vector<long long>> cost(total, std::vector<long long>(total));
    for (long long a = 0; a < total; ++a) {
        const auto ca = decode_config(a, n, q);
        for (long long b = 0; b < total; ++b)
            cost[a][b] = static_cast<long long>(hamming(ca, decode_config(b, n, q)));
    }
    const double full = exact_wasserstein_bipartite(mu_full, nu_full, cost).value;
    // lumped versions of the same two laws
    const auto states = enumerate_states(n, q);
    const int M = static_cast<int>(states.size());
    std::vector<double> mu(M, 0.0), nu(M, 0.0);
    auto chain = lumped_transition_matrix(n, q, 1.0);
    for (long long a = 0; a < total; ++a) {
        const int i = chain.find(color_counts(decode_config(a, n, q), q));
        mu[i] += mu_full[a];
        nu[i] += nu_full[a];
    }
    // align: chain.states ordering equals enumerate_states ordering
    const double lumped = exact_wasserstein_exchangeable(chain.states, n, mu, nu).value;
    REQUIRE(lumped == Catch::Approx(full).margin(1e-9));
}

TEST_CASE("full gibbs law at infinite temperature is uniform") {
    const int n = 5, q = 3;
    const ModelParams p{q, 0.0, n};
    const auto gibbs = brute_force_gibbs(Graph::complete(n), p);
    for (double v : gibbs.probs) REQUIRE(v == Catch::Approx(1.0 / 243).margin(1e-15));
    SECTION("guard trips on oversized spaces") {
        REQUIRE_THROWS_AS(brute_force_gibbs(Graph::complete(30), ModelParams{3, 1.0, 30}),
                          ResourceError);
    }
}

TEST_CASE("configuration codec round trip") {
    const int n = 6, q = 3;
    for (long long i : {0LL, 1LL, 100LL, 728LL}) {
        const auto c = decode_config(i, n, q);
        REQUIRE(encode_config(c, q) == i);
    }
}
