#pragma once

#include "ymlab/gauge_geometry.hpp"

#include <vector>

namespace ymlab {

enum class Axis { s, t };

// Connections along one flow parameter.
struct Trajectory {
  Axis axis = Axis::s;
  std::vector<FlowState> states;
  std::vector<double> steps;  // step sizes actually taken, in order

  double param(std::size_t i) const { return axis == Axis::s ? states[i].s : states[i].t; }
  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  const FlowState& back() const { return states.back(); }
};

// A field sampled along a parameter, e.g. A_s(s) or A_0(t).
struct FieldSeries {
  std::vector<double> param;
  std::vector<LatticeField> fields;

  std::size_t size() const { return param.size(); }
  void push(double p, LatticeField f) {
    param.push_back(p);
    fields.push_back(std::move(f));
  }
  // Lagrange interpolation through up to four neighbouring samples.
  LatticeField at(double p) const;
};

}  // namespace ymlab
