#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"

namespace reslab {
namespace {

constexpr double kFourPi = 4.0 * pi;

void require_d3(const ModelParams& p, const char* who) {
  p.validate();
  if (p.dim != 3) throw DomainError(std::string(who) + ": only defined for d = 3");
  if (!p.embedding_condition()) {
    throw DomainError(std::string(who) + ": requires -sqrt(2 beta)/(4 pi) < alpha < 0");
  }
}

template <class T>
T horner(const std::array<double, 4>& c, T z) {
  return (((z + c[3]) * z + c[2]) * z + c[1]) * z + c[0];
}

template <class T>
T horner_derivative(const std::array<double, 4>& c, T z) {
  return ((4.0 * z + 3.0 * c[3]) * z + 2.0 * c[2]) * z + c[1];
}

template <class T>
T polish(const std::array<double, 4>& c, T z) {
  using std::abs;
  for (int it = 0; it < 4; ++it) {
    const T d = horner_derivative(c, z);
    if (d == T(0)) break;
    const T next = z - horner(c, z) / d;
    if (!(abs(horner(c, next)) < abs(horner(c, z)))) break;
    z = next;
  }
  return z;
}

}  // namespace

std::array<double, 4> quartic_coefficients(const ModelParams& p) {
  const double a = std::abs(p.alpha);
  const double e2 = p.epsilon * p.epsilon;
  return {-e2 * e2, -2.0 * e2 * a, -2.0 * p.beta / (kFourPi * kFourPi), 2.0 * a};
}

QuarticRoots quartic_roots(const ModelParams& p) {
  require_d3(p, "quartic_roots");
  const double a = std::abs(p.alpha);
  const double s = 2.0 * p.beta / (kFourPi * kFourPi);
  QuarticRoots out;
  if (p.epsilon == 0.0) {
    const double disc = std::sqrt(a * a + s);
    out.xi1 = -a - disc;
    out.xi2 = s / (a + disc);  // -a + disc without cancellation
    return out;
  }

  const std::array<double, 4> c = quartic_coefficients(p);
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) companion(i, 3) = -c[i];
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
  if (solver.info() != Eigen::Success) throw ClassificationError("quartic_roots: eigenvalue solver failed");
  std::array<cplx, 4> roots;
  for (int i = 0; i < 4; ++i) roots[i] = solver.eigenvalues()(i);
  std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) { return std::abs(x.imag()) < std::abs(y.imag()); });

  double scale = 0.0;
  for (const cplx& r : roots) scale = std::max(scale, std::abs(r));
  const double real_tol = 1e-9 * scale;
  const bool pattern_ok = std::abs(roots[0].imag()) <= real_tol && std::abs(roots[1].imag()) <= real_tol &&
                          std::abs(roots[2].imag()) > real_tol &&
                          std::abs(roots[2] - std::conj(roots[3])) <= 1e-8 * scale;
  const double r0 = roots[0].real(), r1 = roots[1].real();
  if (!pattern_ok || (r0 < 0.0) == (r1 < 0.0)) {
    std::ostringstream os;
    os << "quartic_roots: expected one negative, one positive real root and a complex pair; got";
    for (const cplx& r : roots) os << ' ' << r;
    throw ClassificationError(os.str());
  }
  out.xi1 = polish(c, std::min(r0, r1));
  out.xi2 = polish(c, std::max(r0, r1));
  cplx z3 = roots[2].imag() > 0.0 ? roots[2] : roots[3];
  z3 = polish(c, z3);
  if (!(z3.imag() > 0.0)) throw ClassificationError("quartic_roots: complex pair collapsed onto the real axis");
  out.xi3 = z3;
  out.xi3_conj = std::conj(z3);
  return out;
}

cplx energy_from_xi(const ModelParams& p, cplx xi) {
  const cplx k = kFourPi * (xi + std::abs(p.alpha));
  return p.beta - k * k;
}

}  // namespace reslab
