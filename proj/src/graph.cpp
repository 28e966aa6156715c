#include "mkdual/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "mkdual/ext_real.hpp"

namespace mkdual::graph {

namespace {

constexpr auto kNoPred = std::numeric_limits<std::uint32_t>::max();

struct Edges {
  std::size_t k;
  std::span<const double> w;
  bool self_loops;
  [[nodiscard]] double operator()(std::size_t u, std::size_t v) const {
    if (u == v && !self_loops) return kInf;
    return w[u * k + v];
  }
};

double walk_weight(const Edges& e, const std::vector<std::size_t>& nodes) {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) total += e(nodes[i], nodes[(i + 1) % nodes.size()]);
  return total;
}

}  // namespace

std::optional<ClosedWalk> find_negative_cycle(std::size_t k, std::span<const double> w, double tol,
                                              bool allow_self_loops) {
  if (w.size() != k * k) throw std::invalid_argument("find_negative_cycle: weight matrix size");
  if (k == 0) return std::nullopt;
  const Edges e{k, w, allow_self_loops};

  bool has_neg_inf = false;
  for (std::size_t u = 0; u < k && !has_neg_inf; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (e(u, v) == -kInf) {
        has_neg_inf = true;
        break;
      }

  // Bellman-Ford prefilter. An improvement gate of tol/(2k) cannot hide a
  // cycle of length <= k with weight below -tol.
  if (!has_neg_inf) {
    const double gate = tol / (2.0 * static_cast<double>(k));
    std::vector<double> d(k, 0.0);
    bool updated = true;
    for (std::size_t round = 0; round <= k && updated; ++round) {
      updated = false;
      for (std::size_t u = 0; u < k; ++u) {
        for (std::size_t v = 0; v < k; ++v) {
          const double wt = e(u, v);
          if (wt == kInf) continue;
          const double cand = d[u] + wt;
          if (cand < d[v] - gate) {
            d[v] = cand;
            updated = true;
          }
        }
      }
    }
    if (!updated) return std::nullopt;
  }

  // Walk-length DP: dist[s*k+v] = lightest walk with exactly L edges s -> v.
  std::vector<double> prev(k * k, kInf), cur(k * k, kInf);
  for (std::size_t s = 0; s < k; ++s) prev[s * k + s] = 0.0;
  std::vector<std::vector<std::uint32_t>> pred;
  for (std::size_t len = 1; len <= k; ++len) {
    pred.emplace_back(k * k, kNoPred);
    auto& pl = pred.back();
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t u = 0; u < k; ++u) {
        const double du = prev[s * k + u];
        if (du == kInf) continue;
        for (std::size_t v = 0; v < k; ++v) {
          const double wt = e(u, v);
          if (wt == kInf) continue;
          const double cand = du + wt;
          if (cand < cur[s * k + v]) {
            cur[s * k + v] = cand;
            pl[s * k + v] = static_cast<std::uint32_t>(u);
          }
        }
      }
    }
    std::optional<std::size_t> best;
    for (std::size_t s = 0; s < k; ++s) {
      const double val = cur[s * k + s];
      if (val < -tol && (!best || val < cur[*best * k + *best])) best = s;
    }
    if (best) {
      const std::size_t s = *best;
      std::vector<std::size_t> nodes(len);
      std::size_t v = s;
      for (std::size_t l = len; l >= 1; --l) {
        const std::size_t u = pred[l - 1][s * k + v];
        nodes[l - 1] = u;
        v = u;
      }
      ClosedWalk out{std::move(nodes), 0.0};
      out.weight = walk_weight(e, out.nodes);
      return out;
    }
    std::swap(prev, cur);
  }
  return std::nullopt;
}

std::optional<ClosedWalk> min_mean_cycle(std::size_t k, std::span<const double> w, bool allow_self_loops) {
  if (w.size() != k * k) throw std::invalid_argument("min_mean_cycle: weight matrix size");
  if (k == 0) return std::nullopt;
  const Edges e{k, w, allow_self_loops};
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (e(u, v) == -kInf) throw std::invalid_argument("min_mean_cycle: -inf edge");

  // Karp: D[L][v] = lightest walk with exactly L edges ending at v, any start.
  std::vector<std::vector<double>> dist(k + 1, std::vector<double>(k, kInf));
  std::vector<std::vector<std::uint32_t>> pred(k + 1, std::vector<std::uint32_t>(k, kNoPred));
  std::fill(dist[0].begin(), dist[0].end(), 0.0);
  for (std::size_t len = 1; len <= k; ++len) {
    for (std::size_t u = 0; u < k; ++u) {
      const double du = dist[len - 1][u];
      if (du == kInf) continue;
      for (std::size_t v = 0; v < k; ++v) {
        const double wt = e(u, v);
        if (wt == kInf) continue;
        if (du + wt < dist[len][v]) {
          dist[len][v] = du + wt;
          pred[len][v] = static_cast<std::uint32_t>(u);
        }
      }
    }
  }

  std::optional<std::size_t> arg;
  double best = kInf;
  for (std::size_t v = 0; v < k; ++v) {
    if (dist[k][v] == kInf) continue;
    double worst = -kInf;
    for (std::size_t len = 0; len < k; ++len) {
      if (dist[len][v] == kInf) continue;
      worst = std::max(worst, (dist[k][v] - dist[len][v]) / static_cast<double>(k - len));
    }
    if (worst < best) {
      best = worst;
      arg = v;
    }
  }
  if (!arg) return std::nullopt;

  // The length-k walk into arg contains a cycle of minimum mean; split the
  // walk into simple cycles and keep the best one.
  std::vector<std::size_t> walk(k + 1);
  std::size_t v = *arg;
  for (std::size_t len = k;; --len) {
    walk[len] = v;
    if (len == 0) break;
    v = pred[len][v];
  }
  std::optional<ClosedWalk> out;
  double out_mean = kInf;
  std::vector<std::size_t> stack;
  std::vector<long> pos(k, -1);
  for (std::size_t node : walk) {
    if (pos[node] >= 0) {
      std::vector<std::size_t> cyc(stack.begin() + pos[node], stack.end());
      const double wt = walk_weight(e, cyc);
      const double mean = wt / static_cast<double>(cyc.size());
      if (mean < out_mean) {
        out_mean = mean;
        out = ClosedWalk{cyc, wt};
      }
      for (std::size_t i = static_cast<std::size_t>(pos[node]) + 1; i < stack.size(); ++i) pos[stack[i]] = -1;
      stack.resize(static_cast<std::size_t>(pos[node]) + 1);
    } else {
      pos[node] = static_cast<long>(stack.size());
      stack.push_back(node);
    }
  }
  return out;
}

std::vector<double> super_source_distances(std::size_t k, std::span<const double> w) {
  if (w.size() != k * k) throw std::invalid_argument("super_source_distances: weight matrix size");
  std::vector<double> d(k, 0.0);
  bool updated = true;
  for (std::size_t round = 0; round <= k && updated; ++round) {
    updated = false;
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t v = 0; v < k; ++v) {
        const double wt = w[u * k + v];
        if (wt == kInf) continue;
        const double cand = d[u] + wt;
        if (cand < d[v]) {
          d[v] = cand;
          updated = true;
        }
      }
    }
  }
  return d;
}

}  // namespace mkdual::graph
