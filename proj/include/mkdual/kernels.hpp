#pragma once

// Dense inner loops behind the evaluation functionals.
//
// Every kernel comes in two flavours: `serial::` is the straightforward
// reference kept for testing, `parallel::` splits the outer loop across
// OpenMP threads. Parallel reductions accumulate one partial per row and sum
// the partials in row order, so results are bit-identical for any thread
// count (they may differ from the serial reference in the last ulp).

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mkdual/core.hpp"

namespace mkdual::kernels {

// Positive and negative parts of an integral; negative may be -inf.
struct SplitSum {
  double positive = 0.0;
  double negative = 0.0;
  [[nodiscard]] double total() const { return negative == -kInf ? -kInf : positive + negative; }
};

namespace serial {
double plan_cost(std::span<const double> mass, std::span<const double> cost, std::size_t cols);
SplitSum pair_integral(std::span<const double> mass, std::span<const double> phi, std::span<const double> psi);
// Entries with phi(i) + psi(j) > cost(i,j) + tol, in row-major order. When
// `mask` is nonempty only entries with mask > 0 are checked.
std::vector<Violation> feasibility_scan(std::span<const double> phi, std::span<const double> psi,
                                        std::span<const double> cost, std::span<const double> mask, double tol);
// max |d(x,y) + d(x2,y2) - d(x,y2) - d(x2,y)| over minors with finite corners.
double max_rectangle_residual(std::span<const double> d, std::size_t rows, std::size_t cols);
// e over all n-tuples of support pairs (flat base-s index, z_1 most
// significant). Chain terms are summed in sorted order so that e is exactly
// invariant under cyclic shifts of the tuple.
std::vector<double> cyclic_gain(std::span<const double> cost, std::size_t cols,
                                std::span<const std::pair<std::size_t, std::size_t>> support, std::size_t n);
// max over tuples of e(z) - sum_i f_i(z_i).
double cover_excess(std::span<const double> e, std::size_t base, const std::vector<std::vector<double>>& fs);
}  // namespace serial

namespace parallel {
double plan_cost(std::span<const double> mass, std::span<const double> cost, std::size_t cols);
SplitSum pair_integral(std::span<const double> mass, std::span<const double> phi, std::span<const double> psi);
std::vector<Violation> feasibility_scan(std::span<const double> phi, std::span<const double> psi,
                                        std::span<const double> cost, std::span<const double> mask, double tol);
double max_rectangle_residual(std::span<const double> d, std::size_t rows, std::size_t cols);
std::vector<double> cyclic_gain(std::span<const double> cost, std::size_t cols,
                                std::span<const std::pair<std::size_t, std::size_t>> support, std::size_t n);
double cover_excess(std::span<const double> e, std::size_t base, const std::vector<std::vector<double>>& fs);

// Feasibility scan over a cost given as a callable, for grids too large to
// materialize. Returns the number of violating entries and the worst slack.
template <typename CostFn>
std::pair<std::size_t, double> feasibility_scan_fn(std::span<const double> phi, std::span<const double> psi,
                                                   CostFn&& cost, double tol) {
  const auto n = static_cast<long>(phi.size());
  const std::size_t m = psi.size();
  std::vector<std::size_t> bad(phi.size(), 0);
  std::vector<double> worst(phi.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double lhs = ext_add(phi[r], psi[j]);
      const double rhs = cost(r, j);
      if (lhs == -kInf || rhs == kInf) continue;
      const double slack = rhs - lhs;
      if (slack < -tol) ++bad[r];
      if (slack < worst[r]) worst[r] = slack;
    }
  }
  std::size_t count = 0;
  double w = 0.0;
  for (std::size_t r = 0; r < phi.size(); ++r) {
    count += bad[r];
    if (worst[r] < w) w = worst[r];
  }
  return {count, w};
}
}  // namespace parallel

// Number of OpenMP threads kernels will use; set_threads(k <= 0) restores the default.
int threads();
void set_threads(int k);

}  // namespace mkdual::kernels
