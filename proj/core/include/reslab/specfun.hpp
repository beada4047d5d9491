#pragma once

#include <array>
#include <complex>

namespace reslab {

using cplx = std::complex<double>;

// Spatial point; components beyond the model dimension are ignored.
using Point = std::array<double, 3>;

double norm(const Point& x, int dim);

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr long double euler_gamma_ld = 0.577215664901532860606512090082L;
inline constexpr double euler_gamma = static_cast<double>(euler_gamma_ld);

/// Branch of the complex square root.
///
/// First is the branch with Im sqrt(w) >= 0 (cut along [0, inf), values on the
/// cut are limits from the upper half-plane).  Second is its continuation across
/// that cut, i.e. -sqrt_First(w).
enum class Sheet { First, Second };

/// Branch selectors for sqrt(z - beta) (minus) and sqrt(z + beta) (plus).
struct SheetPair {
  Sheet minus = Sheet::First;
  Sheet plus = Sheet::First;

  static constexpr SheetPair physical() { return {Sheet::First, Sheet::First}; }
  static constexpr SheetPair resonance() { return {Sheet::First, Sheet::Second}; }

  friend constexpr bool operator==(SheetPair, SheetPair) = default;
};

const char* to_string(Sheet s);

cplx sqrt_on_sheet(cplx w, Sheet sheet);

/// H_0^{(1)}(eta) for Im eta >= 0, eta != 0.  Throws DomainError otherwise.
cplx hankel0_first_kind(cplx eta);

/// Integral kernel of (-Laplacian - w)^{-1} in dimension d at separation x.
///
/// d=1: i e^{ik|x|} / (2k); d=2: (i/4) H_0^{(1)}(k|x|); d=3: e^{ik|x|} / (4 pi |x|),
/// with k = sqrt_on_sheet(w, sheet).
cplx green_kernel(int dim, cplx w, const Point& x, Sheet sheet = Sheet::First);
cplx green_kernel_radial(int dim, cplx w, double r, Sheet sheet = Sheet::First);

namespace detail {

// |eta| at and below which the ascending series is used.
inline constexpr double hankel_crossover = 20.0;

// Ascending series for J0 + i Y0, summed in binary128.
cplx hankel0_series(cplx eta);
// Large-argument Hankel expansion, optimally truncated.
cplx hankel0_asymptotic(cplx eta);

}  // namespace detail

}  // namespace reslab
