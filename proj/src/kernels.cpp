#include "mkdual/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace mkdual::kernels {

namespace {

inline void accumulate(SplitSum& s, double mass, double value) {
  if (mass == 0.0) return;
  if (value == -kInf) {
    s.negative = -kInf;
  } else if (value >= 0.0) {
    s.positive += mass * value;
  } else if (s.negative != -kInf) {
    s.negative += mass * value;
  }
}

// Neumaier summation under ext_add: +inf absorbs everything, then -inf.
struct Compensated {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    if (sum == kInf || v == kInf) {
      sum = kInf;
      return;
    }
    if (sum == -kInf || v == -kInf) {
      sum = -kInf;
      return;
    }
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  [[nodiscard]] double value() const { return std::isinf(sum) ? sum : sum + comp; }
};

inline bool violates(double lhs, double rhs, double tol, double& slack) {
  if (lhs == -kInf || rhs == kInf) return false;
  slack = rhs - lhs;  // rhs may be -inf for shifted costs
  return slack < -tol;
}

// Worst rectangle residual between rows x and x2.
double rectangle_rows(std::span<const double> d, std::size_t cols, std::size_t x, std::size_t x2) {
  double worst = 0.0;
  const double* a = d.data() + x * cols;
  const double* b = d.data() + x2 * cols;
  for (std::size_t y = 0; y < cols; ++y) {
    if (!std::isfinite(a[y]) || !std::isfinite(b[y])) continue;
    const double dy = a[y] - b[y];
    for (std::size_t y2 = y + 1; y2 < cols; ++y2) {
      if (!std::isfinite(a[y2]) || !std::isfinite(b[y2])) continue;
      worst = std::max(worst, std::abs(dy - (a[y2] - b[y2])));
    }
  }
  return worst;
}

void decode(std::size_t flat, std::size_t base, std::size_t n, std::size_t* digits) {
  for (std::size_t k = n; k-- > 0;) {
    digits[k] = flat % base;
    flat /= base;
  }
}

double gain_at(std::size_t flat, std::span<const double> cost, std::size_t cols,
               std::span<const std::pair<std::size_t, std::size_t>> support, std::size_t n, std::size_t* digits,
               double* terms) {
  decode(flat, support.size(), n, digits);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [xi, yi] = support[digits[i]];
    const std::size_t xnext = support[digits[(i + 1) % n]].first;
    terms[i] = ext_sub(cost[xnext * cols + yi], cost[xi * cols + yi]);
  }
  std::sort(terms, terms + n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum = ext_add(sum, terms[i]);
  return sum < 0.0 ? -sum : 0.0;
}

double excess_at(std::size_t flat, std::span<const double> e, std::size_t base,
                 const std::vector<std::vector<double>>& fs, std::size_t* digits) {
  const std::size_t n = fs.size();
  decode(flat, base, n, digits);
  double cover = 0.0;
  for (std::size_t i = 0; i < n; ++i) cover = ext_add(cover, fs[i][digits[i]]);
  return cover == kInf ? -kInf : e[flat] - cover;
}

}  // namespace

namespace serial {

double plan_cost(std::span<const double> mass, std::span<const double> cost, std::size_t /*cols*/) {
  Compensated total;
  for (std::size_t k = 0; k < mass.size(); ++k) total.add(mass_times(mass[k], cost[k]));
  return total.value();
}

SplitSum pair_integral(std::span<const double> mass, std::span<const double> phi, std::span<const double> psi) {
  SplitSum s;
  const std::size_t m = psi.size();
  for (std::size_t i = 0; i < phi.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) accumulate(s, mass[i * m + j], ext_add(phi[i], psi[j]));
  return s;
}

std::vector<Violation> feasibility_scan(std::span<const double> phi, std::span<const double> psi,
                                        std::span<const double> cost, std::span<const double> mask, double tol) {
  std::vector<Violation> out;
  const std::size_t m = psi.size();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!mask.empty() && !(mask[i * m + j] > 0.0)) continue;
      double slack = 0.0;
      if (violates(ext_add(phi[i], psi[j]), cost[i * m + j], tol, slack)) out.push_back({i, j, slack});
    }
  }
  return out;
}

double max_rectangle_residual(std::span<const double> d, std::size_t rows, std::size_t cols) {
  double worst = 0.0;
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t x2 = x + 1; x2 < rows; ++x2) worst = std::max(worst, rectangle_rows(d, cols, x, x2));
  return worst;
}

std::vector<double> cyclic_gain(std::span<const double> cost, std::size_t cols,
                                std::span<const std::pair<std::size_t, std::size_t>> support, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= support.size();
  std::vector<double> out(total);
  std::vector<std::size_t> digits(n);
  std::vector<double> terms(n);
  for (std::size_t t = 0; t < total; ++t) out[t] = gain_at(t, cost, cols, support, n, digits.data(), terms.data());
  return out;
}

double cover_excess(std::span<const double> e, std::size_t base, const std::vector<std::vector<double>>& fs) {
  double worst = -kInf;
  std::vector<std::size_t> digits(fs.size());
  for (std::size_t t = 0; t < e.size(); ++t) worst = std::max(worst, excess_at(t, e, base, fs, digits.data()));
  return worst;
}

}  // namespace serial

namespace parallel {

double plan_cost(std::span<const double> mass, std::span<const double> cost, std::size_t cols) {
  if (cols == 0) return 0.0;
  const auto n = static_cast<long>(mass.size() / cols);
  std::vector<Compensated> partial(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    auto& acc = partial[static_cast<std::size_t>(i)];
    const std::size_t base = static_cast<std::size_t>(i) * cols;
    for (std::size_t j = 0; j < cols; ++j) acc.add(mass_times(mass[base + j], cost[base + j]));
  }
  Compensated total;
  for (const auto& p : partial) {
    total.add(p.sum);
    total.add(p.comp);
  }
  return total.value();
}

SplitSum pair_integral(std::span<const double> mass, std::span<const double> phi, std::span<const double> psi) {
  const auto n = static_cast<long>(phi.size());
  const std::size_t m = psi.size();
  std::vector<SplitSum> partial(phi.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < m; ++j) accumulate(partial[r], mass[r * m + j], ext_add(phi[r], psi[j]));
  }
  SplitSum s;
  for (const auto& p : partial) {
    s.positive += p.positive;
    if (p.negative == -kInf || s.negative == -kInf)
      s.negative = -kInf;
    else
      s.negative += p.negative;
  }
  return s;
}

std::vector<Violation> feasibility_scan(std::span<const double> phi, std::span<const double> psi,
                                        std::span<const double> cost, std::span<const double> mask, double tol) {
  const auto n = static_cast<long>(phi.size());
  const std::size_t m = psi.size();
  std::vector<std::vector<Violation>> per_row(phi.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < m; ++j) {
      if (!mask.empty() && !(mask[r * m + j] > 0.0)) continue;
      double slack = 0.0;
      if (violates(ext_add(phi[r], psi[j]), cost[r * m + j], tol, slack)) per_row[r].push_back({r, j, slack});
    }
  }
  std::vector<Violation> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  return out;
}

double max_rectangle_residual(std::span<const double> d, std::size_t rows, std::size_t cols) {
  const auto n = static_cast<long>(rows);
  std::vector<double> partial(rows, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto x = static_cast<std::size_t>(i);
    double w = 0.0;
    for (std::size_t x2 = x + 1; x2 < rows; ++x2) w = std::max(w, rectangle_rows(d, cols, x, x2));
    partial[x] = w;
  }
  double worst = 0.0;
  for (double w : partial) worst = std::max(worst, w);
  return worst;
}

std::vector<double> cyclic_gain(std::span<const double> cost, std::size_t cols,
                                std::span<const std::pair<std::size_t, std::size_t>> support, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= support.size();
  std::vector<double> out(total);
  const auto count = static_cast<long>(total);
#pragma omp parallel
  {
    std::vector<std::size_t> digits(n);
    std::vector<double> terms(n);
#pragma omp for schedule(static)
    for (long t = 0; t < count; ++t) {
      const auto idx = static_cast<std::size_t>(t);
      out[idx] = gain_at(idx, cost, cols, support, n, digits.data(), terms.data());
    }
  }
  return out;
}

double cover_excess(std::span<const double> e, std::size_t base, const std::vector<std::vector<double>>& fs) {
  double worst = -kInf;
  const auto count = static_cast<long>(e.size());
#pragma omp parallel
  {
    std::vector<std::size_t> digits(fs.size());
    double local = -kInf;
#pragma omp for schedule(static)
    for (long t = 0; t < count; ++t)
      local = std::max(local, excess_at(static_cast<std::size_t>(t), e, base, fs, digits.data()));
#pragma omp critical
    worst = std::max(worst, local);
  }
  return worst;
}

}  // namespace parallel

int threads() { return omp_get_max_threads(); }

void set_threads(int k) {
  static const int initial = omp_get_max_threads();
  omp_set_num_threads(k > 0 ? k : initial);
}

}  // namespace mkdual::kernels
