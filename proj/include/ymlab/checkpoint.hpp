#pragma once

#include "ymlab/lattice.hpp"

#include <cstdint>
#include <string>

namespace ymlab {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  LatticeField field;
  double t = 0.0;
  double s = 0.0;
};

// Layout: "YMHF", version, n, N (u32 LE), L, t, s (f64 LE), r (u32 LE), then
// per component, per site (x3 fastest), the n x n entries row-major as (re, im) f64 LE.
void write_checkpoint(const std::string& path, const LatticeField& f, double t, double s);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace ymlab
