#include <quadmath.h>

#include <cmath>

#include "reslab/errors.hpp"
#include "reslab/specfun.hpp"

namespace reslab {
namespace {

using quad = __float128;

struct qcplx {
  quad re = 0;
  quad im = 0;
};

qcplx operator+(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
qcplx operator-(qcplx a, qcplx b) { return {a.re - b.re, a.im - b.im}; }
qcplx operator*(qcplx a, qcplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
qcplx operator*(quad s, qcplx a) { return {s * a.re, s * a.im}; }
quad abs2(qcplx a) { return a.re * a.re + a.im * a.im; }

// pi and Euler's constant to binary128 precision
const quad kPi = M_PIq;
const quad kEuler = 0.5772156649015328606065120900824024310422Q;

}  // namespace

namespace detail {

cplx hankel0_series(cplx eta) {
  const qcplx z{eta.real(), eta.imag()};
  const qcplx q = quad(0.25) * (z * z);
  const qcplx mq{-q.re, -q.im};

  // J0 = sum (-q)^k / (k!)^2,  S = sum_{k>=1} (-q)^k H_k / (k!)^2
  qcplx term{1, 0};
  qcplx j0{1, 0};
  qcplx s{0, 0};
  quad harmonic = 0;
  const quad qabs = sqrtq(abs2(q));
  quad peak = 1;
  for (int k = 1; k < 400; ++k) {
    const quad kk = k;
    term = (1 / (kk * kk)) * (term * mq);
    harmonic += 1 / kk;
    j0 = j0 + term;
    s = s + harmonic * term;
    const quad mag = sqrtq(abs2(term));
    if (mag > peak) peak = mag;
    if (kk > qabs && mag * harmonic < 1e-36Q * peak) break;
  }

  // ln(eta / 2) with arg in [0, pi] (upper half-plane, negative axis from above)
  const quad log_abs = logq(sqrtq(abs2(z)) / 2);
  const quad arg = atan2q(z.im, z.re);
  const qcplx log_half{log_abs + kEuler, arg};

  // Y0 = (2/pi) [(ln(eta/2) + gamma) J0 - S]
  const qcplx y0 = (2 / kPi) * (log_half * j0 - s);
  const qcplx h{j0.re - y0.im, j0.im + y0.re};
  return {static_cast<double>(h.re), static_cast<double>(h.im)};
}

cplx hankel0_asymptotic(cplx eta) {
  const cplx i(0.0, 1.0);
  // H ~ sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k i^k a_k / z^k,
  // a_k = a_{k-1} * (-(2k-1)^2) / (8k)
  cplx term(1.0, 0.0);
  cplx sum(1.0, 0.0);
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const cplx next = term * i * (-(odd * odd) / (8.0 * k)) / eta;
    const double mag = std::abs(next);
    if (mag >= prev) break;  // optimal truncation
    term = next;
    sum += term;
    prev = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  // sqrt(eta) first: keeps arg(eta) = pi on the negative real axis
  return std::sqrt(2.0 / pi) / std::sqrt(eta) * std::exp(i * (eta - 0.25 * pi)) * sum;
}

}  // namespace detail

cplx hankel0_first_kind(cplx eta) {
  if (eta == 0.0) throw DomainError("hankel0_first_kind: logarithmic singularity at eta = 0");
  if (eta.imag() < 0.0) throw DomainError("hankel0_first_kind: requires Im(eta) >= 0");
  if (eta.imag() == 0.0) eta = cplx(eta.real(), 0.0);  // normalize -0.0
  if (std::abs(eta) <= detail::hankel_crossover) return detail::hankel0_series(eta);
  return detail::hankel0_asymptotic(eta);
}

}  // namespace reslab
