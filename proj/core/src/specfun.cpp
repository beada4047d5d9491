#include "reslab/specfun.hpp"

#include <cmath>

#include "reslab/errors.hpp"

namespace reslab {

double norm(const Point& x, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

const char* to_string(Sheet s) { return s == Sheet::First ? "first" : "second"; }

cplx sqrt_on_sheet(cplx w, Sheet sheet) {
  cplx s;
  if (w.imag() == 0.0 && w.real() >= 0.0) {
    s = cplx(std::sqrt(w.real()), 0.0);  // limit from the upper half-plane
  } else {
    s = std::sqrt(w);
    if (s.imag() < 0.0) s = -s;
  }
  return sheet == Sheet::First ? s : -s;
}

cplx green_kernel_radial(int dim, cplx w, double r, Sheet sheet) {
  const cplx k = sqrt_on_sheet(w, sheet);
  const cplx i(0.0, 1.0);
  switch (dim) {
    case 1:
      if (k == 0.0) throw DomainError("green_kernel: w = 0 is singular in d = 1");
      return i * std::exp(i * k * r) / (2.0 * k);
    case 2: {
      if (r <= 0.0) throw DomainError("green_kernel: |x| = 0 is singular in d = 2");
      cplx eta = k * r;
      // upper half-plane limit for arguments on the negative real axis
      if (eta.imag() == 0.0) eta = cplx(eta.real(), 0.0);
      if (eta.imag() < 0.0) throw DomainError("green_kernel: d = 2 needs Im(sqrt(w)) >= 0");
      return 0.25 * i * hankel0_first_kind(eta);
    }
    case 3:
      if (r <= 0.0) throw DomainError("green_kernel: |x| = 0 is singular in d = 3");
      return std::exp(i * k * r) / (4.0 * pi * r);
    default:
      throw DomainError("green_kernel: dimension must be 1, 2 or 3");
  }
}

cplx green_kernel(int dim, cplx w, const Point& x, Sheet sheet) {
  if (dim < 1 || dim > 3) throw DomainError("green_kernel: dimension must be 1, 2 or 3");
  return green_kernel_radial(dim, w, norm(x, dim), sheet);
}

}  // namespace reslab
