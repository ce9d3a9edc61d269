#pragma once

#include "ymlab/lattice.hpp"

#include <vector>

namespace ymlab {

// Finite-difference weights for the derivative of order `order` at x0 from values at
// `nodes` (Fornberg's recursion).
std::vector<double> fd_weights(const std::vector<double>& nodes, double x0, int order);

// sum_j w_j f_j
LatticeField combine(const std::vector<double>& w, const std::vector<const LatticeField*>& f);
LatticeField combine(const std::vector<double>& w, const std::vector<LatticeField>& f);

// First derivative at every node from all nodes (one-sided near the ends).
std::vector<LatticeField> derivative_at_nodes(const std::vector<double>& nodes, const std::vector<LatticeField>& f);

}  // namespace ymlab
