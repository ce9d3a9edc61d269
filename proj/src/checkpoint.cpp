#include "ymlab/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace ymlab {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::vector<char>& buf, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.insert(buf.end(), b, b + sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return v;
}

// Entries of sum_a c_a T_a for the SuBasis generators, evaluated with fixed formulas so that
// decode() can invert them exactly: each off-diagonal real number carries one coefficient and
// the diagonal is triangular in the Cartan coefficients.
struct Codec {
  int n;
  double h;                // 1 / sqrt(2)
  std::vector<double> lw;  // l w_l, with w_l the diagonal generator l entry scaled by 1 / sqrt(2)

  explicit Codec(int n_) : n(n_), h(1.0 / std::sqrt(2.0)), lw(n_) {
    for (int l = 1; l < n; ++l) lw[l] = l * (std::sqrt(2.0 / (l * (l + 1.0))) * h);
  }

  int cartan(int l) const { return n * (n - 1) + l - 1; }

  // Diagonal entry j >= 1 is R_j - j w_j x_j with R_j = sum_{l>j} w_l x_l. R_j is rebuilt from the
  // already encoded entries, R_j = R_{j+1} + (R_{j+1} - d_{j+1}) / (j + 1), so decoding row j sees
  // exactly the value the encoder used.
  static double next_rest(double rest, double d_next, int j) { return rest + (rest - d_next) / (j + 1); }
  double diag(int j, double rest, double x) const { return rest - lw[j] * x; }

  void encode(const double* c, double* raw) const {
    std::fill(raw, raw + 2 * n * n, 0.0);
    auto re = [&](int i, int j) -> double& { return raw[2 * (i * n + j)]; };
    auto im = [&](int i, int j) -> double& { return raw[2 * (i * n + j) + 1]; };
    int a = 0;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k, a += 2) {
        const double sym = c[a] * h, anti = c[a + 1] * h;
        im(j, k) = sym;
        im(k, j) = sym;
        re(j, k) = anti;
        re(k, j) = -anti;
      }
    // Entry 0 follows from tracelessness and depends only on the other entries.
    double rest = 0.0, trace = 0.0;
    for (int j = n - 1; j >= 1; --j) {
      if (j < n - 1) rest = next_rest(rest, im(j + 1, j + 1), j);
      im(j, j) = diag(j, rest, c[cartan(j)]);
      trace += im(j, j);
    }
    im(0, 0) = -trace;
  }

  // Walks ulps from the estimate x toward g(x) == target; g is monotone with the sign of slope.
  template <class G>
  static double invert(G g, double x, double target, double slope) {
    double v = g(x);
    if (v == target) return x;
    const double inf = std::numeric_limits<double>::infinity();
    const double dir = ((target > v) == (slope > 0.0)) ? inf : -inf;
    const bool below = v < target;
    double best = x, best_err = std::abs(v - target);
    for (int it = 0; it < 1024; ++it) {
      x = std::nextafter(x, dir);
      v = g(x);
      if (std::abs(v - target) < best_err) {
        best = x;
        best_err = std::abs(v - target);
      }
      if (v == target || (v < target) != below) break;
    }
    return best;
  }

  void decode(const double* raw, double* c) const {
    auto re = [&](int i, int j) { return raw[2 * (i * n + j)]; };
    auto im = [&](int i, int j) { return raw[2 * (i * n + j) + 1]; };
    auto scaled = [this](double y) { return y * h; };
    int a = 0;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k, a += 2) {
        const double sym = im(j, k), anti = re(j, k);
        c[a] = invert(scaled, sym / h, sym, 1.0);
        c[a + 1] = invert(scaled, anti / h, anti, 1.0);
      }
    double rest = 0.0;
    for (int j = n - 1; j >= 1; --j) {
      if (j < n - 1) rest = next_rest(rest, im(j + 1, j + 1), j);
      const double target = im(j, j);
      auto g = [&](double y) { return diag(j, rest, y); };
      c[cartan(j)] = invert(g, (rest - target) / lw[j], target, -1.0);
    }
  }
};

}  // namespace

void write_checkpoint(const std::string& path, const LatticeField& f, double t, double s) {
  const int n = f.n();
  const std::size_t v = f.volume();
  std::vector<char> buf;
  buf.reserve(64 + f.rank() * v * n * n * 16);
  buf.insert(buf.end(), {'Y', 'M', 'H', 'F'});
  put<std::uint32_t>(buf, kCheckpointVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid().N));
  put<double>(buf, f.grid().L);
  put<double>(buf, t);
  put<double>(buf, s);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.rank()));
  const Codec codec(n);
  const int dim = f.dim();
  std::vector<double> coef(dim), raw(2 * static_cast<std::size_t>(n) * n);
  for (int c = 0; c < f.rank(); ++c)
    for (std::size_t site = 0; site < v; ++site) {
      for (int a = 0; a < dim; ++a) coef[a] = f.coeff(c, a)[site];
      codec.encode(coef.data(), raw.data());
      for (double x : raw) put<double>(buf, x);
    }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "YMHF", 4) != 0) throw std::runtime_error("not a checkpoint file: " + path);
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const int n = static_cast<int>(get<std::uint32_t>(in));
  const int N = static_cast<int>(get<std::uint32_t>(in));
  const double L = get<double>(in);
  Checkpoint cp;
  cp.t = get<double>(in);
  cp.s = get<double>(in);
  const int r = static_cast<int>(get<std::uint32_t>(in));
  cp.field = LatticeField(Grid(N, L), n, r);
  const std::size_t v = cp.field.volume();
  const Codec codec(n);
  const int dim = cp.field.dim();
  std::vector<double> raw(2 * static_cast<std::size_t>(n) * n), back(raw.size()), coef(dim);
  for (int c = 0; c < r; ++c)
    for (std::size_t site = 0; site < v; ++site) {
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
      if (!in) throw std::runtime_error("truncated checkpoint payload");
      codec.decode(raw.data(), coef.data());
      codec.encode(coef.data(), back.data());
      double err = 0.0, scale = 0.0;
      for (std::size_t q = 0; q < raw.size(); ++q) {
        err = std::max(err, std::abs(back[q] - raw[q]));
        scale = std::max(scale, std::abs(raw[q]));
      }
      if (err > 1e-9 * std::max(1.0, scale)) throw std::runtime_error("checkpoint entry is not in su(n): " + path);
      for (int a = 0; a < dim; ++a) cp.field.coeff(c, a)[site] = coef[a];
    }
  return cp;
}

}  // namespace ymlab
