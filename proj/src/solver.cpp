#include "mkdual/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

namespace mkdual {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Stalled:
      return "stalled";
  }
  return "?";
}

namespace {

// Mass left over from rounding once no augmenting path exists.
constexpr double kLeftoverTol = 1e-12;

void require_problem(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  if (c.rows() != mu.size() || c.cols() != nu.size())
    throw InputError("solver: cost is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                     " but measures have " + std::to_string(mu.size()) + " and " + std::to_string(nu.size()) +
                     " points");
  for (double v : c.data())
    if (v == -kInf) throw InputError("solver: -inf cost entry makes the problem unbounded");
}

// Successive shortest paths on the bipartite residual network
//   S -> source i (cap supply_i, cost 0), i -> j (uncapacitated, cost c_ij),
//   j -> i (cap flow_ij, cost -c_ij), sink j -> T (cap demand_j, cost 0).
// Dijkstra runs on reduced costs with dense O((n+m)^2) scans.
class SuccessiveShortestPaths {
 public:
  SuccessiveShortestPaths(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c)
      : n_(mu.size()),
        m_(nu.size()),
        c_(c),
        supply_(mu.weights().begin(), mu.weights().end()),
        demand_(nu.weights().begin(), nu.weights().end()),
        flow_(n_ * m_, 0.0),
        pot_(n_ + m_, 0.0),
        dist_(n_ + m_),
        prev_(n_ + m_),
        done_(n_ + m_) {
    // Sinks start at the cheapest incoming edge so every reduced cost is >= 0.
    for (std::size_t j = 0; j < m_; ++j) {
      double best = kInf;
      for (std::size_t i = 0; i < n_; ++i) best = std::min(best, c_(i, j));
      pot_[n_ + j] = std::isfinite(best) ? best : 0.0;
    }
  }

  SolveResult run() {
    SolveResult res;
    const std::size_t cap = 64 * (n_ + m_) * (n_ + m_) + 1024;
    while (true) {
      if (!any_positive(supply_) || !any_positive(demand_)) break;
      const auto sink = dijkstra();
      if (!sink) break;
      augment(*sink);
      if (++res.iterations > cap) throw InternalError("solve_min_cost: augmentation cap exceeded");
    }
    double leftover = 0.0;
    for (double s : supply_) leftover += s;
    if (leftover > kLeftoverTol) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    TransportPlan plan(n_, m_, std::move(flow_));
    res.value = plan_cost(plan, c_);
    res.plan = std::move(plan);
    res.status = SolveStatus::Optimal;
    return res;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  static bool any_positive(const std::vector<double>& xs) {
    return std::any_of(xs.begin(), xs.end(), [](double x) { return x > 0.0; });
  }

  // Node k < n_ is source k, node n_ + j is sink j. Returns the sink with
  // remaining demand at minimal true distance, or nullopt if none is reachable.
  std::optional<std::size_t> dijkstra() {
    const std::size_t total = n_ + m_;
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(prev_.begin(), prev_.end(), kNone);
    std::fill(done_.begin(), done_.end(), 0);
    for (std::size_t i = 0; i < n_; ++i)
      if (supply_[i] > 0.0) dist_[i] = std::max(0.0, -pot_[i]);

    while (true) {
      std::size_t u = kNone;
      for (std::size_t k = 0; k < total; ++k)
        if (!done_[k] && dist_[k] < kInf && (u == kNone || dist_[k] < dist_[u])) u = k;
      if (u == kNone) break;
      done_[u] = 1;
      if (u < n_) {
        for (std::size_t j = 0; j < m_; ++j) {
          const double cij = c_(u, j);
          if (cij == kInf || done_[n_ + j]) continue;
          relax(u, n_ + j, std::max(0.0, cij + pot_[u] - pot_[n_ + j]));
        }
      } else {
        const std::size_t j = u - n_;
        for (std::size_t i = 0; i < n_; ++i) {
          if (!(flow_[i * m_ + j] > 0.0) || done_[i]) continue;
          relax(u, i, std::max(0.0, -c_(i, j) + pot_[u] - pot_[i]));
        }
      }
    }

    std::optional<std::size_t> best;
    double best_true = kInf;
    double reached_max = 0.0;
    for (std::size_t k = 0; k < total; ++k)
      if (dist_[k] < kInf) reached_max = std::max(reached_max, dist_[k]);
    for (std::size_t j = 0; j < m_; ++j) {
      if (!(demand_[j] > 0.0) || dist_[n_ + j] == kInf) continue;
      const double t = dist_[n_ + j] + pot_[n_ + j];
      if (!best || t < best_true) {
        best = j;
        best_true = t;
      }
    }
    for (std::size_t k = 0; k < total; ++k) pot_[k] += dist_[k] < kInf ? dist_[k] : reached_max;
    return best;
  }

  void relax(std::size_t from, std::size_t to, double rc) {
    const double d = dist_[from] + rc;
    if (d < dist_[to]) {
      dist_[to] = d;
      prev_[to] = from;
    }
  }

  void augment(std::size_t sink) {
    double delta = demand_[sink];
    std::size_t v = n_ + sink;
    while (prev_[v] != kNone) {
      const std::size_t u = prev_[v];
      if (u >= n_) delta = std::min(delta, flow_[v * m_ + (u - n_)]);  // backward edge sink u -> source v
      v = u;
    }
    const std::size_t origin = v;  // source with remaining supply
    delta = std::min(delta, supply_[origin]);

    v = n_ + sink;
    while (prev_[v] != kNone) {
      const std::size_t u = prev_[v];
      if (u < n_) {
        flow_[u * m_ + (v - n_)] += delta;
      } else {
        double& f = flow_[v * m_ + (u - n_)];
        f = (f == delta) ? 0.0 : f - delta;
        if (f < 0.0) f = 0.0;
      }
      v = u;
    }
    supply_[origin] = (supply_[origin] == delta) ? 0.0 : std::max(0.0, supply_[origin] - delta);
    demand_[sink] = (demand_[sink] == delta) ? 0.0 : std::max(0.0, demand_[sink] - delta);
  }

  std::size_t n_;
  std::size_t m_;
  const CostMatrix& c_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  std::vector<double> flow_;
  std::vector<double> pot_;
  std::vector<double> dist_;
  std::vector<std::size_t> prev_;
  std::vector<char> done_;
};

}  // namespace

SolveResult solve_min_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  require_problem(mu, nu, c);
  return SuccessiveShortestPaths(mu, nu, c).run();
}

SweepResult truncation_sweep(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                             std::span<const double> cutoffs) {
  require_problem(mu, nu, c);
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    if (!(cutoffs[k] > 0.0) || !std::isfinite(cutoffs[k])) throw InputError("truncation_sweep: cutoffs must be positive");
    if (k > 0 && !(cutoffs[k] > cutoffs[k - 1]))
      throw InputError("truncation_sweep: cutoffs must be strictly increasing");
  }
  SweepResult out;
  out.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  out.values.assign(cutoffs.size(), 0.0);
  std::exception_ptr err;
  const auto count = static_cast<long>(cutoffs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    try {
      const auto idx = static_cast<std::size_t>(k);
      const auto r = solve_min_cost(mu, nu, c.capped(cutoffs[idx]));
      out.values[idx] = r.value.value();
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

ExtReal brute_force_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  const std::size_t n = mu.size();
  if (nu.size() != n || c.rows() != n || c.cols() != n || n == 0 || n > 8)
    throw InputError("brute_force_value: needs a square problem with n <= 8");
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(mu.weight(i) - w) > kNormTol || std::abs(nu.weight(i) - w) > kNormTol)
      throw InputError("brute_force_value: needs uniform measures");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total = ext_add(total, w * c(i, perm[i]));
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return ExtReal(best);
}

std::optional<TransportPlan> northwest_corner(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                              const CostMatrix& c) {
  require_problem(mu, nu, c);
  std::vector<double> a(mu.weights().begin(), mu.weights().end());
  std::vector<double> b(nu.weights().begin(), nu.weights().end());
  TransportPlan plan(mu.size(), nu.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    if (t > 0.0) {
      if (c(i, j) == kInf) return std::nullopt;
      plan(i, j) += t;
    }
    a[i] -= t;
    b[j] -= t;
    const bool row_done = a[i] <= kLeftoverTol;
    const bool col_done = b[j] <= kLeftoverTol;
    if (row_done) ++i;
    if (col_done) ++j;
    if (!row_done && !col_done) ++j;  // unreachable for exact arithmetic
  }
  return plan;
}

}  // namespace mkdual
