#include "reslab/model.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "reslab/errors.hpp"

namespace reslab {
namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
const cplx kI(0.0, 1.0);

void check_dim(int dim) {
  if (dim < 1 || dim > 3)
    throw DomainError("dimension must be 1, 2 or 3 (d >= 4 admits no point interaction), got " +
                      std::to_string(dim));
}

struct Roots {
  cplx minus;  // sqrt(z - beta)
  cplx plus;   // sqrt(z + beta)
};

Roots channel_roots(double beta, cplx z, SheetPair sheets) {
  return {sqrt_on_sheet(z - beta, sheets.minus), sqrt_on_sheet(z + beta, sheets.plus)};
}

void require_nonzero(cplx s, const char* what) {
  if (s == 0.0) throw DomainError(std::string(what) + ": z is a branch point (z = +-beta)");
}

GammaMatrix diagonal(cplx pp, cplx mm, cplx z, SheetPair sheets) {
  GammaMatrix g;
  g.entries << pp, 0.0, 0.0, mm;
  g.z = z;
  g.sheets = sheets;
  return g;
}

}  // namespace

ModelParams ModelParams::make(int dim, double alpha, double beta, double epsilon) {
  ModelParams p{dim, alpha, beta, epsilon};
  p.validate();
  return p;
}

double ModelParams::alpha_from_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be positive and finite");
  // mu = e^{2(gamma + 2 pi alpha)} / 4
  return (0.5 * std::log(4.0 * mu) - euler_gamma) / (2.0 * pi);
}

ModelParams ModelParams::from_mu(double mu, double beta, double epsilon) {
  return make(2, alpha_from_mu(mu), beta, epsilon);
}

void ModelParams::validate() const {
  check_dim(dim);
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be nonnegative and finite");
}

double ModelParams::half_log_mu() const { return euler_gamma + 2.0 * pi * alpha - kLn2; }

double ModelParams::mu() const { return std::exp(2.0 * half_log_mu()); }

bool ModelParams::embedding_condition() const {
  switch (dim) {
    case 1:
      return alpha < 0.0 && alpha > -2.0 * std::sqrt(2.0 * beta);
    case 2:
      return 2.0 * beta * mu() > 1.0;
    case 3:
      return alpha < 0.0 && alpha > -std::sqrt(2.0 * beta) / (4.0 * pi);
    default:
      return false;
  }
}

bool ModelParams::perturbative_regime(double ratio) const { return epsilon <= ratio * std::abs(alpha); }

cplx GammaMatrix::det() const { return entries(0, 0) * entries(1, 1) - entries(0, 1) * entries(1, 0); }

double GammaMatrix::det_scale() const {
  return std::max(std::abs(entries(0, 0) * entries(1, 1)), std::abs(entries(0, 1) * entries(1, 0)));
}

bool GammaMatrix::is_singular(double rel_tol) const {
  // |det| / ||G||_F^2 bounds sigma_min / sigma_max from above and below up to a factor 2
  return std::abs(det()) <= rel_tol * entries.squaredNorm();
}

Mat2 GammaMatrix::inverse(double rel_tol) const {
  if (is_singular(rel_tol)) {
    throw SingularityError("Gamma matrix singular at z = (" + std::to_string(z.real()) + ", " +
                           std::to_string(z.imag()) + "): z is an eigenvalue");
  }
  const cplx d = det();
  Mat2 inv;
  inv << entries(1, 1), -entries(0, 1), -entries(1, 0), entries(0, 0);
  return inv / d;
}

GammaMatrix gamma_free(int dim, double beta, cplx z, SheetPair sheets) {
  check_dim(dim);
  const Roots s = channel_roots(beta, z, sheets);
  switch (dim) {
    case 1:
      require_nonzero(s.minus, "gamma_free");
      require_nonzero(s.plus, "gamma_free");
      return diagonal(-kI / (2.0 * s.minus), -kI / (2.0 * s.plus), z, sheets);
    case 2: {
      require_nonzero(s.minus, "gamma_free");
      require_nonzero(s.plus, "gamma_free");
      const cplx shift(euler_gamma - kLn2, -0.5 * pi);  // ln(s/2) + gamma - i pi/2
      return diagonal((std::log(s.minus) + shift) / (2.0 * pi), (std::log(s.plus) + shift) / (2.0 * pi), z,
                      sheets);
    }
    default:
      return diagonal(s.minus / (4.0 * pi * kI), s.plus / (4.0 * pi * kI), z, sheets);
  }
}

GammaMatrix gamma0(const ModelParams& p, cplx z, SheetPair sheets) {
  p.validate();
  switch (p.dim) {
    case 1: {
      if (p.alpha == 0.0) throw DomainError("gamma0: d = 1 requires alpha != 0");
      GammaMatrix g = gamma_free(1, p.beta, z, sheets);
      g.entries(0, 0) -= 1.0 / p.alpha;
      g.entries(1, 1) -= 1.0 / p.alpha;
      return g;
    }
    case 2: {
      const Roots s = channel_roots(p.beta, z, sheets);
      require_nonzero(s.minus, "gamma0");
      require_nonzero(s.plus, "gamma0");
      // ln sqrt(mu (z -+ beta)) with the sheet-selected root
      const cplx shift(p.half_log_mu(), -0.5 * pi);
      return diagonal((std::log(s.minus) + shift) / (2.0 * pi), (std::log(s.plus) + shift) / (2.0 * pi), z,
                      sheets);
    }
    default: {
      GammaMatrix g = gamma_free(3, p.beta, z, sheets);
      g.entries(0, 0) += p.alpha;
      g.entries(1, 1) += p.alpha;
      return g;
    }
  }
}

GammaMatrix gamma_eps(const ModelParams& p, cplx z, SheetPair sheets) {
  p.validate();
  if (p.dim != 1) {
    GammaMatrix g = gamma0(p, z, sheets);
    g.entries(0, 1) = p.epsilon;
    g.entries(1, 0) = p.epsilon;
    return g;
  }
  const double e2 = p.epsilon * p.epsilon;
  if (p.alpha * p.alpha == e2) throw DomainError("gamma_eps: d = 1 requires alpha^2 != epsilon^2");
  // alpha/(alpha^2 - eps^2) written as 1/(alpha - eps^2/alpha): equals 1/alpha bit for bit at eps = 0
  const double diag_shift = 1.0 / (p.alpha - e2 / p.alpha);
  const double off = p.epsilon / (p.alpha * p.alpha - e2);
  GammaMatrix g = gamma_free(1, p.beta, z, sheets);
  g.entries(0, 0) -= diag_shift;
  g.entries(1, 1) -= diag_shift;
  g.entries(0, 1) = off;
  g.entries(1, 0) = off;
  return g;
}

GammaMatrix gamma_ab(const Mat2& a, const Mat2& b, const GammaMatrix& free_gamma) {
  const double scale = std::max(1.0, a.norm() * b.norm());
  const Mat2 herm = a * b.adjoint() - b * a.adjoint();
  if (herm.norm() > 1e-12 * scale) {
    throw AdmissibilityError("gamma_ab: A B* != B A* (residual " + std::to_string(herm.norm()) + ")");
  }
  Eigen::Matrix<cplx, 2, 4> ab;
  ab << a, b;
  const Eigen::JacobiSVD<Eigen::Matrix<cplx, 2, 4>> svd(ab);
  const auto sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) {
    throw AdmissibilityError("gamma_ab: (A|B) is not of maximal rank");
  }
  GammaMatrix g = free_gamma;
  g.entries = b * free_gamma.entries + a;
  return g;
}

cplx resolvent_kernel(const ModelParams& p, cplx z, const Point& x, const Point& xp, Channel sigma,
                      Channel sigmap) {
  p.validate();
  if (z.imag() == 0.0 && z.real() >= -p.beta) {
    throw DomainError("resolvent_kernel: real z >= -beta lies in the essential spectrum");
  }
  const GammaMatrix g = gamma_eps(p, z, SheetPair::physical());
  const Mat2 inv = g.inverse();

  const cplx w_s = z - sign(sigma) * p.beta;
  const cplx w_sp = z - sign(sigmap) * p.beta;
  cplx value = inv(index(sigma), index(sigmap)) * green_kernel(p.dim, w_s, x) * green_kernel(p.dim, w_sp, xp);
  if (sigma == sigmap) {
    Point diff{};
    for (int i = 0; i < 3; ++i) diff[i] = x[i] - xp[i];
    value += green_kernel(p.dim, w_s, diff);
  }
  return value;
}

}  // namespace reslab
