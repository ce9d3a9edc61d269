#pragma once

// Runge-Kutta steppers shared by the parabolic, hyperbolic and family
// integrators.
//
// State must be copyable and provide axpy(double, const State&).
// Ops must provide
//   State rhs(double s, const State& u)      nonlinear part (full rhs if no integrating factor)
//   void propagate(State& u, double tau)     u <- exp(L tau) u, identity if L = 0
//   void finish(State& u)                    per-step projection (dealiasing, reunitarization)

namespace ymlab {

enum class StepScheme { rk4_explicit, if_rk2, if_rk4 };

template <class State, class Ops>
void rk_step(StepScheme scheme, Ops& ops, double s, double h, State& u) {
  switch (scheme) {
    case StepScheme::rk4_explicit: {
      const State a = ops.rhs(s, u);
      State y = u;
      y.axpy(0.5 * h, a);
      const State b = ops.rhs(s + 0.5 * h, y);
      y = u;
      y.axpy(0.5 * h, b);
      const State c = ops.rhs(s + 0.5 * h, y);
      y = u;
      y.axpy(h, c);
      const State d = ops.rhs(s + h, y);
      u.axpy(h / 6.0, a);
      u.axpy(h / 3.0, b);
      u.axpy(h / 3.0, c);
      u.axpy(h / 6.0, d);
      break;
    }
    case StepScheme::if_rk2: {
      // Heun's method in the integrating-factor variables.
      const State a = ops.rhs(s, u);
      State y = u;
      y.axpy(h, a);
      ops.propagate(y, h);
      const State b = ops.rhs(s + h, y);
      u.axpy(0.5 * h, a);
      ops.propagate(u, h);
      u.axpy(0.5 * h, b);
      break;
    }
    case StepScheme::if_rk4: {
      // Lawson's RK4; every propagation is forward in s.
      const State a = ops.rhs(s, u);
      State y = u;
      y.axpy(0.5 * h, a);
      ops.propagate(y, 0.5 * h);
      const State b = ops.rhs(s + 0.5 * h, y);
      State half = u;
      ops.propagate(half, 0.5 * h);
      y = half;
      y.axpy(0.5 * h, b);
      const State c = ops.rhs(s + 0.5 * h, y);
      y = half;
      y.axpy(h, c);
      ops.propagate(y, 0.5 * h);
      const State d = ops.rhs(s + h, y);
      u.axpy(h / 6.0, a);
      ops.propagate(u, 0.5 * h);
      u.axpy(h / 3.0, b);
      u.axpy(h / 3.0, c);
      ops.propagate(u, 0.5 * h);
      u.axpy(h / 6.0, d);
      break;
    }
  }
  ops.finish(u);
}

// Step sizes from `from` to `to` no longer than `max_step`, all equal.
inline int step_count(double from, double to, double max_step) {
  const double gap = to - from;
  if (gap <= 0.0) return 0;
  const double n = gap / max_step;
  const int k = static_cast<int>(n);
  return (n - k > 1e-9) ? k + 1 : (k == 0 ? 1 : k);
}

}  // namespace ymlab
