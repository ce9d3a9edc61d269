#include "ymlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ymlab {

LatticeField FieldSeries::at(double p) const {
  const std::size_t n = param.size();
  if (n == 0) throw std::out_of_range("empty field series");
  if (n == 1) return fields[0];
  const double lo = std::min(param.front(), param.back());
  const double hi = std::max(param.front(), param.back());
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  if (p < lo - slack || p > hi + slack) throw std::out_of_range("field series does not cover the requested parameter");
  const bool increasing = param.back() > param.front();

  // Index of the first sample beyond p.
  std::size_t j = 0;
  while (j < n && (increasing ? param[j] <= p : param[j] >= p)) ++j;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(param[i] - p) <= 1e-14 * std::max(1.0, std::abs(p))) return fields[i];

  const std::size_t width = std::min<std::size_t>(4, n);
  std::size_t first = j >= 2 ? j - 2 : 0;
  if (first + width > n) first = n - width;

  LatticeField out(fields[first].grid(), fields[first].n(), fields[first].rank());
  for (std::size_t a = first; a < first + width; ++a) {
    double w = 1.0;
    for (std::size_t b = first; b < first + width; ++b)
      if (b != a) w *= (p - param[b]) / (param[a] - param[b]);
    out.axpy(w, fields[a]);
  }
  return out;
}

}  // namespace ymlab
