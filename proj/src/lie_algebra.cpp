#include "ymlab/lie_algebra.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>

namespace ymlab {

namespace {

void require_same(int a, int b) {
  if (a != b) throw DimensionMismatch("su(n) rank mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

double max_abs(const Mat& m) {
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

double inf_norm(const Mat& m) {
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
    r = std::max(r, row);
  }
  return r;
}

}  // namespace

AlgebraElement::AlgebraElement(int n) : m_(Mat::Zero(n, n)) {
  if (n < 1 || n > kMaxRank) throw DimensionMismatch("unsupported rank n = " + std::to_string(n));
}

AlgebraElement AlgebraElement::from_matrix(const Mat& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("non-square matrix");
  const Mat herm = m + m.adjoint();
  if (herm.cwiseAbs().maxCoeff() > tol) throw InvariantViolation("matrix is not anti-Hermitian");
  if (std::abs(m.trace()) > tol) throw InvariantViolation("matrix is not traceless");
  return project(m);
}

AlgebraElement AlgebraElement::project(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("non-square matrix");
  AlgebraElement r(static_cast<int>(m.rows()));
  r.m_ = 0.5 * (m - m.adjoint());
  const cplx tr = r.m_.trace() / static_cast<double>(m.rows());
  for (int i = 0; i < m.rows(); ++i) r.m_(i, i) -= tr;
  return r;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  require_same(n(), o.n());
  m_ += o.m_;
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  require_same(n(), o.n());
  m_ -= o.m_;
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(double a) {
  m_ *= a;
  return *this;
}

AlgebraElement AlgebraElement::operator-() const {
  AlgebraElement r = *this;
  r.m_ = -r.m_;
  return r;
}

double AlgebraElement::max_abs() const { return ymlab::max_abs(m_); }

GroupElement GroupElement::identity(int n) {
  if (n < 1 || n > kMaxRank) throw DimensionMismatch("unsupported rank n = " + std::to_string(n));
  GroupElement g;
  g.m_ = Mat::Identity(n, n);
  return g;
}

GroupElement GroupElement::from_matrix(const Mat& m, double tol) {
  GroupElement g = unchecked(m);
  if (g.unitarity_defect() > tol) throw InvariantViolation("matrix is not unitary");
  if (g.det_defect() > tol) throw InvariantViolation("matrix does not have unit determinant");
  return g;
}

GroupElement GroupElement::unchecked(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("non-square matrix");
  GroupElement g;
  g.m_ = m;
  return g;
}

GroupElement GroupElement::inverse() const {
  GroupElement g;
  g.m_ = m_.adjoint();
  return g;
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  require_same(a.n(), b.n());
  GroupElement g;
  g.m_ = a.m_ * b.m_;
  return g;
}

double GroupElement::unitarity_defect() const {
  const int n = this->n();
  return max_abs(Mat(m_.adjoint() * m_ - Mat::Identity(n, n)));
}

double GroupElement::det_defect() const { return std::abs(m_.determinant() - 1.0); }

AlgebraElement commutator(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x.n(), y.n());
  const Mat& a = x.matrix();
  const Mat& b = y.matrix();
  return AlgebraElement::project(Mat(a * b - b * a));
}

double inner(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x.n(), y.n());
  // tr(X Y^dag) = sum_ij X_ij conj(Y_ij)
  const Mat& a = x.matrix();
  const Mat& b = y.matrix();
  double r = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r += (a(i, j) * std::conj(b(i, j))).real();
  return r;
}

GroupElement exponential(const AlgebraElement& x) {
  const int n = x.n();
  const double norm = inf_norm(x.matrix());
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat a = x.matrix() / std::ldexp(1.0, squarings);
  // Taylor to degree 16; remainder < 0.5^17 / 17! for |a| <= 0.5.
  Mat term = Mat::Identity(n, n);
  Mat sum = Mat::Identity(n, n);
  for (int k = 1; k <= 16; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return GroupElement::unchecked(sum);
}

GroupElement project_unitary(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("non-square matrix");
  const int n = static_cast<int>(m.rows());
  const double scale = max_abs(m);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw SingularMatrix("project_unitary: zero or non-finite input");
  // Scaled Newton iteration for the polar factor, X <- (g X + X^{-dag} / g) / 2.
  Mat x = m / scale;
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Mat> lu(x);
    const double det = std::abs(lu.determinant());
    if (!(det > 1e-13) || !std::isfinite(det)) throw SingularMatrix("project_unitary: singular input");
    const Mat xinv_h = lu.inverse().adjoint();
    const double g = (it < 6) ? std::pow(det, -1.0 / n) : 1.0;
    const Mat next = 0.5 * (g * x + xinv_h / g);
    const double change = max_abs(Mat(next - x));
    x = next;
    if (change < 1e-15) break;
  }
  // Fix the determinant phase.
  const cplx det = x.determinant();
  const cplx root = std::polar(1.0, -std::arg(det) / n);
  x *= root;
  return GroupElement::unchecked(x);
}

AlgebraElement conjugate(const GroupElement& u, const AlgebraElement& x) {
  require_same(u.n(), x.n());
  return AlgebraElement::project(Mat(u.matrix() * x.matrix() * u.matrix().adjoint()));
}

AlgebraElement i_sigma(int k) {
  Mat m = Mat::Zero(2, 2);
  const cplx i(0.0, 1.0);
  switch (k) {
    case 1:
      m(0, 1) = i;
      m(1, 0) = i;
      break;
    case 2:
      m(0, 1) = 1.0;
      m(1, 0) = -1.0;
      break;
    case 3:
      m(0, 0) = i;
      m(1, 1) = -i;
      break;
    default:
      throw DimensionMismatch("Pauli index must be 1..3");
  }
  return AlgebraElement::from_matrix(m);
}

SuBasis::SuBasis(int n) : n_(n), dim_(n * n - 1) {
  const cplx i(0.0, 1.0);
  const double r2 = std::sqrt(2.0);
  // Symmetric and antisymmetric off-diagonal generators, then diagonal ones.
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Mat s = Mat::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      gens_.push_back(i * s / r2);
      Mat a = Mat::Zero(n, n);
      a(j, k) = -i;
      a(k, j) = i;
      gens_.push_back(i * a / r2);
    }
  }
  for (int l = 1; l < n; ++l) {
    Mat d = Mat::Zero(n, n);
    const double c = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) d(j, j) = c;
    d(l, l) = -l * c;
    gens_.push_back(i * d / r2);
  }
  for (int a = 0; a < dim_; ++a) {
    for (int b = a + 1; b < dim_; ++b) {
      const Mat cm = gens_[a] * gens_[b] - gens_[b] * gens_[a];
      for (int c = 0; c < dim_; ++c) {
        const double f = (cm.cwiseProduct(gens_[c].conjugate())).sum().real();
        if (std::abs(f) > 1e-14) entries_.push_back({a, b, c, f});
      }
    }
  }
}

const SuBasis& SuBasis::get(int n) {
  if (n < 2 || n > kMaxRank) throw DimensionMismatch("unsupported su(n) rank n = " + std::to_string(n));
  static std::array<std::unique_ptr<SuBasis>, kMaxRank + 1> cache;
  static std::once_flag flags[kMaxRank + 1];
  std::call_once(flags[n], [n] { cache[n].reset(new SuBasis(n)); });
  return *cache[n];
}

void SuBasis::coefficients(const AlgebraElement& x, double* out) const {
  require_same(x.n(), n_);
  for (int a = 0; a < dim_; ++a) out[a] = (x.matrix().cwiseProduct(gens_[a].conjugate())).sum().real();
}

AlgebraElement SuBasis::element(const double* c) const {
  Mat m = Mat::Zero(n_, n_);
  for (int a = 0; a < dim_; ++a) m += c[a] * gens_[a];
  return AlgebraElement::project(m);
}

void SuBasis::adjoint_matrix(const Mat& u, double* out) const {
  const Mat uh = u.adjoint();
  for (int a = 0; a < dim_; ++a) {
    const Mat y = u * gens_[a] * uh;
    for (int b = 0; b < dim_; ++b) out[b * dim_ + a] = (y.cwiseProduct(gens_[b].conjugate())).sum().real();
  }
}

}  // namespace ymlab
