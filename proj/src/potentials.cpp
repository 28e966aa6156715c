#include "mkdual/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "mkdual/graph.hpp"
#include "mkdual/kernels.hpp"

namespace mkdual {

namespace {

struct W3Graph {
  std::size_t k = 0;
  std::vector<double> weight;     // k x k
  std::vector<std::size_t> via;   // argmin y per edge
};

W3Graph build_w3_graph(const SandwichInput& s) {
  const auto& hi = s.upper;
  const auto& lo = s.lower;
  if (hi.rows() != lo.rows() || hi.cols() != lo.cols()) throw InputError("sandwich: upper and lower differ in shape");
  W3Graph g;
  g.k = hi.rows();
  g.weight.assign(g.k * g.k, kInf);
  g.via.assign(g.k * g.k, 0);
  for (std::size_t x = 0; x < g.k; ++x) {
    for (std::size_t x2 = 0; x2 < g.k; ++x2) {
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t y = 0; y < hi.cols(); ++y) {
        const double w = ext_sub(hi(x2, y), lo(x, y));
        if (w < best) {
          best = w;
          arg = y;
        }
      }
      g.weight[x * g.k + x2] = best;
      g.via[x * g.k + x2] = arg;
    }
  }
  return g;
}

}  // namespace

double rectangle_residual(const CostMatrix& d, std::size_t x, std::size_t y, std::size_t x2, std::size_t y2) {
  return d(x, y) + d(x2, y2) - d(x, y2) - d(x2, y);
}

std::optional<CycleCertificate> check_w3(const SandwichInput& s, double tol) {
  const auto g = build_w3_graph(s);
  auto walk = graph::find_negative_cycle(g.k, g.weight, tol, true);
  if (!walk) return std::nullopt;
  CycleCertificate cert;
  const auto& nodes = walk->nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t x = nodes[i];
    const std::size_t x_next = nodes[(i + 1) % nodes.size()];
    cert.pairs.emplace_back(x, g.via[x * g.k + x_next]);
  }
  cert.total_weight = chain_sum(cert.pairs, s.upper, s.lower);
  return cert;
}

PotentialPair sandwich_potentials(const SandwichInput& s, double tol) {
  for (double v : s.upper.data())
    if (v == -kInf) throw InputError("sandwich_potentials: upper cost has a -inf entry");
  for (double v : s.lower.data())
    if (v == kInf) throw InputError("sandwich_potentials: lower cost has a +inf entry");
  if (auto cert = check_w3(s, tol)) throw CycleViolation("sandwich_potentials: W3 chain condition fails", *cert);

  const auto g = build_w3_graph(s);
  std::vector<double> phi = graph::super_source_distances(g.k, g.weight);

  const auto& hi = s.upper;
  const auto& lo = s.lower;
  std::vector<double> psi(hi.cols());
  for (std::size_t y = 0; y < hi.cols(); ++y) {
    double best = kInf;
    for (std::size_t x = 0; x < hi.rows(); ++x) best = std::min(best, ext_sub(hi(x, y), phi[x]));
    if (best == kInf) {
      best = -kInf;
      for (std::size_t x = 0; x < hi.rows(); ++x)
        if (lo(x, y) != -kInf) best = std::max(best, lo(x, y) - phi[x]);
    }
    psi[y] = best;
  }

  PotentialPair out(std::move(phi), std::move(psi));
  for (std::size_t x = 0; x < hi.rows(); ++x) {
    for (std::size_t y = 0; y < hi.cols(); ++y) {
      const double sum = ext_add(out.phi(x), out.psi(y));
      const bool above = hi(x, y) != kInf && sum != -kInf && sum > hi(x, y) + tol;
      const bool below = lo(x, y) != -kInf && (sum == -kInf || sum < lo(x, y) - tol);
      if (above || below)
        throw InternalError("sandwich_potentials: bound check failed at (" + std::to_string(x) + "," +
                            std::to_string(y) + ")");
    }
  }
  return out;
}

PotentialPair potentials_from_support(const SupportSet& support, const CostMatrix& c) {
  if (auto cert = check_cyclical_monotonicity(support, c))
    throw CycleViolation("potentials_from_support: support is not c-cyclically monotone", *cert);
  CostMatrix lower(c.rows(), c.cols(), -kInf);
  for (const auto& [x, y] : support.pairs) lower.set(x, y, c(x, y));
  CostMatrix upper = c;
  for (double v : upper.data())
    if (v == -kInf) throw InputError("potentials_from_support: -inf cost entry");
  return sandwich_potentials({std::move(upper), std::move(lower)});
}

std::variant<PotentialPair, RectangleCertificate> decompose_exact(const CostMatrix& d, double tol) {
  if (!d.all_finite()) throw InputError("decompose_exact: entries must be finite");
  const std::size_t n = d.rows(), m = d.cols();
  if (n == 0 || m == 0) return PotentialPair({}, {});
  std::vector<double> phi(n), psi(m);
  for (std::size_t y = 0; y < m; ++y) psi[y] = d(0, y);
  for (std::size_t x = 0; x < n; ++x) phi[x] = d(x, 0) - psi[0];
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y)
      if (std::abs(phi[x] + psi[y] - d(x, y)) > tol) return RectangleCertificate{0, 0, x, y, rectangle_residual(d, 0, 0, x, y)};
  return PotentialPair(std::move(phi), std::move(psi));
}

double max_rectangle_residual(const CostMatrix& d) {
  return kernels::parallel::max_rectangle_residual(d.data(), d.rows(), d.cols());
}

FeasibilityVerdict verify_strong_monotonicity(const TransportPlan& pi, const CostMatrix& c, const PotentialPair& pp,
                                              double tol, double eq_tol) {
  FeasibilityVerdict v = check_feasible_potentials(pp, c, tol);
  for (const auto& [x, y] : pi.support()) {
    const double sum = ext_add(pp.phi(x), pp.psi(y));
    const double gap = ext_sub(sum, c(x, y));
    if (!std::isfinite(gap) || std::abs(gap) > eq_tol) v.add({x, y, std::isfinite(gap) ? -std::abs(gap) : -kInf});
  }
  return v;
}

}  // namespace mkdual
