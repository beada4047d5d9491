#pragma once

#include <span>
#include <vector>

#include "reslab/specfun.hpp"

namespace reslab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(int n);

/// Discrete rule for a contour integral: int g(z) dz ~ sum_k w_k g(z_k).
struct ContourRule {
  std::vector<cplx> z;
  std::vector<cplx> w;

  std::size_t size() const { return z.size(); }
};

/// Composite rule on the real segments [breaks[i], breaks[i+1]], n nodes each.
ContourRule segment_rule(std::span<const double> breaks, int n);

/// Composite rule on the arc center + radius e^{i theta}, theta running through
/// the sorted angle breakpoints.
ContourRule arc_rule(cplx center, double radius, std::span<const double> theta_breaks, int n);

/// Sorted, de-duplicated copy of the breakpoints restricted to [lo, hi].
std::vector<double> normalize_breaks(std::vector<double> breaks, double lo, double hi);

/// Breakpoints clustering geometrically around `at` with smallest spacing `h`.
void add_graded_breaks(std::vector<double>& breaks, double at, double h, double lo, double hi);

}  // namespace reslab
