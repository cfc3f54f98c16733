// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code paths it is used to check.
#ifndef SMMIMO_TESTS_ORACLES_HPP
#define SMMIMO_TESTS_ORACLES_HPP

#include "smmimo/bootstrap.hpp"
#include "smmimo/capacity.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

namespace oracle {

using Edge = std::tuple<int, int, double>;

/// Floyd-Warshall all-pairs shortest path costs; +inf when unreachable.
inline std::vector<std::vector<double>> all_pairs(int n, const std::vector<Edge>& edges,
                                                  const std::vector<bool>& alive = {}) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  auto up = [&](int v) { return alive.empty() || alive[v]; };
  for (int i = 0; i < n; ++i) {
    if (up(i)) d[i][i] = 0.0;
  }
  for (const auto& [u, v, c] : edges) {
    if (!up(u) || !up(v)) continue;
    d[u][v] = std::min(d[u][v], c);
    d[v][u] = std::min(d[v][u], c);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Exhaustive simple-path enumeration from s to t: (cost, path) of the
/// minimum under (cost, lexicographic node sequence). Small graphs only.
inline std::pair<double, std::vector<int>> best_path_brute(int n, const std::vector<Edge>& edges, int s,
                                                           int t) {
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& [u, v, c] : edges) {
    adj[u].push_back({v, c});
    adj[v].push_back({u, c});
  }
  std::pair<double, std::vector<int>> best{std::numeric_limits<double>::infinity(), {}};
  std::vector<int> path{s};
  std::vector<bool> used(n, false);
  used[s] = true;
  auto dfs = [&](auto&& self, int u, double cost) -> void {
    if (u == t) {
      if (cost < best.first || (cost == best.first && path < best.second)) best = {cost, path};
      return;
    }
    for (const auto& [v, c] : adj[u]) {
      if (used[v]) continue;
      used[v] = true;
      path.push_back(v);
      self(self, v, cost + c);
      path.pop_back();
      used[v] = false;
    }
  };
  dfs(dfs, s, 0.0);
  return best;
}

/// Random connected graph: a random spanning tree plus extra edges. Costs
/// are multiples of 1/16 in [1, 64], so path sums are exact in any order and
/// equal-cost ties are common.
inline std::vector<Edge> random_connected_graph(std::mt19937_64& rng, int n, double extra_density) {
  std::vector<Edge> edges;
  std::uniform_int_distribution<int> ticks(16, 1024);
  auto cost = [&] { return ticks(rng) / 16.0; };
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    edges.emplace_back(parent(rng), v, cost());
  }
  std::bernoulli_distribution extra(extra_density);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (extra(rng)) edges.emplace_back(u, v, cost());
  return edges;
}

/// sum_i log2(1 + rho_eff * lambda_i) over the eigenvalues of Hm^H Hm,
/// with Hm formed by an explicit loop.
inline double eigen_capacity(const smmimo::ComplexMatrix<double>& h, const smmimo::MaskMatrix& mask,
                             double rho, double alpha, double k_interferers) {
  smmimo::ComplexMatrix<double> hm = h;
  for (Eigen::Index m = 0; m < h.rows(); ++m)
    for (Eigen::Index k = 0; k < h.cols(); ++k)
      if (!mask(m, k)) hm(m, k) = 0.0;
  const smmimo::ComplexMatrix<double> g = hm.adjoint() * hm;
  Eigen::SelfAdjointEigenSolver<smmimo::ComplexMatrix<double>> eig(g, Eigen::EigenvaluesOnly);
  const double rho_eff = rho / (1.0 + alpha * rho * k_interferers);
  double c = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    c += std::log2(1.0 + rho_eff * std::max(0.0, eig.eigenvalues()(i)));
  }
  return c;
}

/// Random complex Gaussian matrix from std::mt19937_64 (independent of the
/// library's counter-based generator).
inline smmimo::ComplexMatrix<double> random_channel(std::mt19937_64& rng, int m, int k) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  smmimo::ComplexMatrix<double> h(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) h(i, j) = {n(rng), n(rng)};
  return h;
}

/// Large-array approximation K log2(1 + rho_eff M).
inline double large_array_capacity(int m, int k, double rho, double alpha, double k_interferers) {
  return k * std::log2(1.0 + rho / (1.0 + alpha * rho * k_interferers) * m);
}

}  // namespace oracle

#endif  // SMMIMO_TESTS_ORACLES_HPP
