#include "ymlab/stencil.hpp"

#include <stdexcept>

namespace ymlab {

std::vector<double> fd_weights(const std::vector<double>& nodes, double x0, int order) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || n <= order) throw std::invalid_argument("fd_weights: need more nodes than the derivative order");
  // c[j][k]: weight of node j for the k-th derivative.
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      if (c3 == 0.0) throw std::invalid_argument("fd_weights: repeated node");
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

LatticeField combine(const std::vector<double>& w, const std::vector<const LatticeField*>& f) {
  if (w.size() != f.size() || f.empty()) throw std::invalid_argument("combine: size mismatch");
  LatticeField r(f[0]->grid(), f[0]->n(), f[0]->rank());
  for (std::size_t j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) r.axpy(w[j], *f[j]);
  return r;
}

LatticeField combine(const std::vector<double>& w, const std::vector<LatticeField>& f) {
  std::vector<const LatticeField*> p;
  for (const auto& x : f) p.push_back(&x);
  return combine(w, p);
}

std::vector<LatticeField> derivative_at_nodes(const std::vector<double>& nodes, const std::vector<LatticeField>& f) {
  std::vector<LatticeField> out;
  for (double x : nodes) out.push_back(combine(fd_weights(nodes, x, 1), f));
  return out;
}

}  // namespace ymlab
