#include "mkdual/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mkdual/graph.hpp"

namespace mkdual {

namespace {

std::vector<double> support_weights(const SupportSet& s, const CostMatrix& upper, const CostMatrix& lower) {
  const std::size_t k = s.size();
  std::vector<double> w(k * k, kInf);
  for (std::size_t p = 0; p < k; ++p) {
    const auto [xp, yp] = s.pairs[p];
    for (std::size_t q = 0; q < k; ++q) {
      if (p == q) continue;
      w[p * k + q] = ext_sub(upper(s.pairs[q].first, yp), lower(xp, yp));
    }
  }
  return w;
}

CycleCertificate to_certificate(const SupportSet& s, const graph::ClosedWalk& walk, const CostMatrix& upper,
                                const CostMatrix& lower) {
  CycleCertificate cert;
  for (auto node : walk.nodes) cert.pairs.push_back(s.pairs[node]);
  cert.total_weight = chain_sum(cert.pairs, upper, lower);
  return cert;
}

void require_dims(const SupportSet& s, const CostMatrix& c) {
  for (const auto& [x, y] : s.pairs)
    if (x >= c.rows() || y >= c.cols()) throw InputError("support pair outside the cost matrix");
}

}  // namespace

double chain_sum(const std::vector<IndexPair>& pairs, const CostMatrix& upper, const CostMatrix& lower) {
  double total = 0.0;
  const std::size_t k = pairs.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto [xi, yi] = pairs[i];
    const std::size_t xnext = pairs[(i + 1) % k].first;
    const double term = ext_sub(upper(xnext, yi), lower(xi, yi));
    if (term == kInf || total == kInf)
      total = kInf;
    else
      total += term;
  }
  return total;
}

std::optional<CycleCertificate> check_support_cycles(const SupportSet& support, const CostMatrix& upper,
                                                     const CostMatrix& lower, double tol) {
  require_dims(support, upper);
  require_dims(support, lower);
  const auto w = support_weights(support, upper, lower);
  auto walk = graph::find_negative_cycle(support.size(), w, tol, false);
  if (!walk) return std::nullopt;
  return to_certificate(support, *walk, upper, lower);
}

std::optional<CycleCertificate> check_cyclical_monotonicity(const SupportSet& support, const CostMatrix& c,
                                                            double tol) {
  require_dims(support, c);
  for (const auto& [x, y] : support.pairs)
    if (!std::isfinite(c(x, y)))
      throw InputError("check_cyclical_monotonicity: infinite cost on support pair (" + std::to_string(x) + "," +
                       std::to_string(y) + ")");
  return check_support_cycles(support, c, c, tol);
}

namespace {

// Net change in units of delta for each touched cell.
std::map<IndexPair, long> net_changes(const CycleCertificate& cert) {
  std::map<IndexPair, long> net;
  const std::size_t k = cert.pairs.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto [xi, yi] = cert.pairs[i];
    net[{xi, yi}] -= 1;
    net[{cert.pairs[(i + 1) % k].first, yi}] += 1;
  }
  return net;
}

}  // namespace

double improvement_step(const TransportPlan& pi, const CycleCertificate& cert) {
  if (cert.pairs.empty()) throw InputError("improve_plan: empty certificate");
  for (const auto& [x, y] : cert.pairs) {
    if (x >= pi.rows() || y >= pi.cols()) throw InputError("improve_plan: certificate pair outside the plan");
    if (!(pi(x, y) > 0.0))
      throw InputError("improve_plan: certificate pair (" + std::to_string(x) + "," + std::to_string(y) +
                       ") carries no mass");
  }
  double delta = kInf;
  for (const auto& [cell, units] : net_changes(cert))
    if (units < 0) delta = std::min(delta, pi(cell.first, cell.second) / static_cast<double>(-units));
  return delta == kInf ? 0.0 : delta;
}

TransportPlan improve_plan(const TransportPlan& pi, const CycleCertificate& cert, const CostMatrix& c) {
  if (pi.rows() != c.rows() || pi.cols() != c.cols()) throw InputError("improve_plan: dimension mismatch");
  const double delta = improvement_step(pi, cert);
  const auto net = net_changes(cert);
  for (const auto& [cell, units] : net)
    if (units > 0 && c(cell.first, cell.second) == kInf)
      throw InputError("improve_plan: rerouting would move mass onto a +inf entry");

  TransportPlan out = pi;
  for (const auto& [cell, units] : net) {
    if (units == 0) continue;
    double& m = out(cell.first, cell.second);
    const double change = static_cast<double>(units) * delta;
    if (units < 0 && m == -change) {
      m = 0.0;
    } else {
      m += change;
      if (m < 0.0) m = 0.0;
    }
  }
  return out;
}

SolveResult solve_by_cycle_canceling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                                     std::size_t max_iterations) {
  SolveResult res;
  auto start = northwest_corner(mu, nu, c);
  if (!start) {
    // Any finite plan will do: route mass over the finite pattern at zero cost.
    CostMatrix pattern(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.rows(); ++i)
      for (std::size_t j = 0; j < c.cols(); ++j) pattern.set(i, j, c(i, j) == kInf ? kInf : 0.0);
    auto seed = solve_min_cost(mu, nu, pattern);
    if (seed.status != SolveStatus::Optimal) return res;  // Infeasible
    start = std::move(seed.plan);
  }

  TransportPlan plan = std::move(*start);
  res.status = SolveStatus::Stalled;
  while (true) {
    const auto support = SupportSet::of(plan);
    auto cert = check_cyclical_monotonicity(support, c);
    if (!cert) {
      res.status = SolveStatus::Optimal;
      break;
    }
    if (res.iterations >= max_iterations) break;
    const auto w = support_weights(support, c, c);
    if (auto mm = graph::min_mean_cycle(support.size(), w, false); mm && mm->weight < -kFeasTol)
      cert = to_certificate(support, *mm, c, c);
    plan = improve_plan(plan, *cert, c);
    ++res.iterations;
  }
  res.value = plan_cost(plan, c);
  res.plan = std::move(plan);
  return res;
}

}  // namespace mkdual
