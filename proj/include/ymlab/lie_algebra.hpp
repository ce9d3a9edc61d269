#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymlab {

using cplx = std::complex<double>;

// Largest supported n for SU(n). Matrices live on the stack.
inline constexpr int kMaxRank = 4;

using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxRank, kMaxRank>;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Anti-Hermitian traceless n x n matrix.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(int n);

  // Checked construction: throws InvariantViolation beyond `tol`.
  static AlgebraElement from_matrix(const Mat& m, double tol = 1e-12);
  // Nearest algebra element: anti-Hermitian part with the trace removed.
  static AlgebraElement project(const Mat& m);

  int n() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(double a);
  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
  AlgebraElement operator-() const;

  double max_abs() const;

 private:
  Mat m_;
};

// Special unitary n x n matrix.
class GroupElement {
 public:
  GroupElement() = default;
  static GroupElement identity(int n);
  static GroupElement from_matrix(const Mat& m, double tol = 1e-10);
  // No invariant check; for callers that project right after.
  static GroupElement unchecked(const Mat& m);

  int n() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  GroupElement inverse() const;
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b);

  double unitarity_defect() const;  // max |U^dag U - I|
  double det_defect() const;        // |det U - 1|

 private:
  Mat m_;
};

AlgebraElement commutator(const AlgebraElement& x, const AlgebraElement& y);
double inner(const AlgebraElement& x, const AlgebraElement& y);
GroupElement exponential(const AlgebraElement& x);
GroupElement project_unitary(const Mat& m);

// U X U^{-1}
AlgebraElement conjugate(const GroupElement& u, const AlgebraElement& x);

// Pauli helpers used by tests and data generators: i*sigma_k, k = 1..3.
AlgebraElement i_sigma(int k);

// Orthonormal basis T_a = i lambda_a / sqrt(2) of su(n) (generalized Gell-Mann),
// inner(T_a, T_b) = delta_ab, together with the structure constants
// [T_a, T_b] = f_abc T_c. f is totally antisymmetric.
class SuBasis {
 public:
  struct Entry {
    int a, b, c;
    double f;
  };

  static const SuBasis& get(int n);

  int n() const { return n_; }
  int dim() const { return dim_; }
  const Mat& generator(int a) const { return gens_[a]; }
  // Nonzero f_abc with a < b.
  const std::vector<Entry>& structure() const { return entries_; }

  void coefficients(const AlgebraElement& x, double* out) const;
  AlgebraElement element(const double* c) const;
  // Coefficients of Ad(U): Ad_ba = inner(U T_a U^{-1}, T_b), row-major [b][a].
  void adjoint_matrix(const Mat& u, double* out) const;

 private:
  explicit SuBasis(int n);
  int n_;
  int dim_;
  std::vector<Mat> gens_;
  std::vector<Entry> entries_;
};

}  // namespace ymlab
