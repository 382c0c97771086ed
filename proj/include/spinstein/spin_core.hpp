#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinstein {

// Thrown when a requested exact computation exceeds its size guard.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Colors are 0-based internally, 1-based in all file formats and CLI output.

using Configuration = std::vector<int>;
using CountVector = std::vector<long long>;
using ProbVector = std::vector<double>;

struct ModelParams {
    int q = 3;
    double beta = 0.0;
    int n_vertices = 1;

    void validate() const {
        if (q < 3) throw std::invalid_argument("q must be >= 3");
        if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
        if (n_vertices < 1) throw std::invalid_argument("n must be >= 1");
    }
};

struct Graph {
    int n_vertices = 0;
    std::vector<std::vector<int>> adjacency;
    int max_degree = 0;
    long long edge_count = 0;

    static Graph empty(int n) {
        Graph g;
        g.n_vertices = n;
        g.adjacency.assign(n, {});
        return g;
    }

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        Graph g = empty(n);
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw std::invalid_argument("edge endpoint out of range");
            if (u == v) throw std::invalid_argument("self-loop not allowed");
            g.adjacency[u].push_back(v);
            g.adjacency[v].push_back(u);
        }
        g.finish();
        return g;
    }

    static Graph complete(int n) {
        Graph g = empty(n);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (v != u) g.adjacency[u].push_back(v);
        g.finish();
        return g;
    }

    static Graph cycle(int n) {
        std::vector<std::pair<int, int>> e;
        for (int u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
        return from_edges(n, e);
    }

    static Graph path(int n) {
        std::vector<std::pair<int, int>> e;
        for (int u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
        return from_edges(n, e);
    }

    // Circulant graph with connections at the given offsets; degree 2*|offsets|.
    static Graph circulant(int n, const std::vector<int>& offsets) {
        std::vector<std::pair<int, int>> e;
        for (int u = 0; u < n; ++u)
            for (int d : offsets) e.emplace_back(u, (u + d) % n);
        return from_edges(n, e);
    }

    // File format: first line "N M", then M lines "u v" with 1-based vertices.
    static Graph from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open graph file: " + path);
        int n = 0;
        long long m = 0;
        if (!(in >> n >> m)) throw std::runtime_error("bad graph header in " + path);
        std::vector<std::pair<int, int>> e;
        e.reserve(static_cast<std::size_t>(m));
        for (long long i = 0; i < m; ++i) {
            int u = 0, v = 0;
            if (!(in >> u >> v)) throw std::runtime_error("truncated edge list in " + path);
            e.emplace_back(u - 1, v - 1);
        }
        return from_edges(n, e);
    }

    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }

private:
    void finish() {
        max_degree = 0;
        long long total = 0;
        for (auto& nb : adjacency) {
            std::sort(nb.begin(), nb.end());
            if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
                throw std::invalid_argument("duplicate edge");
            max_degree = std::max<int>(max_degree, static_cast<int>(nb.size()));
            total += static_cast<long long>(nb.size());
        }
        edge_count = total / 2;
    }
};

inline Configuration configuration_from_file(const std::string& path, int q) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open configuration file: " + path);
    Configuration c;
    int color;
    while (in >> color) {
        if (color < 1 || color > q) throw std::runtime_error("color out of range in " + path);
        c.push_back(color - 1);
    }
    return c;
}

inline long long hamming(const Configuration& a, const Configuration& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    long long d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

inline CountVector color_counts(const Configuration& c, int q) {
    CountVector counts(q, 0);
    for (int color : c) counts[color]++;
    return counts;
}

// Vector of proportions S(sigma): fraction of vertices of each color.
inline ProbVector proportions(const Configuration& c, int q) {
    ProbVector x(q, 0.0);
    const double inv_n = 1.0 / static_cast<double>(c.size());
    for (int color : c) x[color] += inv_n;
    return x;
}

// Scaled neighbour proportions S_v: entry k is (1/N) * #{u in N(v) : c(u)=k}.
// The vertex v itself is excluded.
inline std::vector<double> neighbor_proportions(const Graph& g, const Configuration& c, int v,
                                                int q) {
    std::vector<double> s(q, 0.0);
    const double inv_n = 1.0 / static_cast<double>(g.n_vertices);
    for (int u : g.adjacency[v]) s[c[u]] += inv_n;
    return s;
}

// softmax with inverse temperature doubling: entry k is
// exp(2*beta*s_k) / sum_j exp(2*beta*s_j), computed with max-subtraction.
inline ProbVector softmax_gbeta(const std::vector<double>& s, double beta) {
    const int q = static_cast<int>(s.size());
    double m = s[0];
    for (double x : s) m = std::max(m, x);
    ProbVector p(q);
    double z = 0.0;
    for (int k = 0; k < q; ++k) {
        p[k] = std::exp(2.0 * beta * (s[k] - m));
        z += p[k];
    }
    for (int k = 0; k < q; ++k) p[k] /= z;
    return p;
}

inline ProbVector conditional_spin_dist(const Graph& g, const Configuration& c, int v,
                                        const ModelParams& p) {
    return softmax_gbeta(neighbor_proportions(g, c, v, p.q), p.beta);
}

// Number of monochromatic edges; the Hamiltonian is -(2/N) times this value.
inline long long edge_energy(const Graph& g, const Configuration& c) {
    long long e = 0;
    for (int u = 0; u < g.n_vertices; ++u)
        for (int v : g.adjacency[u])
            if (v > u && c[u] == c[v]) ++e;
    return e;
}

inline double tv_distance(const ProbVector& p, const ProbVector& r) {
    if (p.size() != r.size()) throw std::invalid_argument("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - r[k]);
    return 0.5 * s;
}

inline double norm_l1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double norm_l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double norm_linf(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace spinstein
