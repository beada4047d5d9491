#include "reslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "reslab/errors.hpp"

namespace reslab {
namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(n));
  return *slot;
}

ContourRule segment_rule(std::span<const double> breaks, int n) {
  const GaussLegendreRule& gl = gauss_legendre(n);
  ContourRule out;
  if (breaks.size() < 2) return out;
  out.z.reserve((breaks.size() - 1) * n);
  out.w.reserve((breaks.size() - 1) * n);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    const double half = 0.5 * (breaks[i + 1] - breaks[i]);
    for (int k = 0; k < n; ++k) {
      out.z.emplace_back(mid + half * gl.nodes[k], 0.0);
      out.w.emplace_back(half * gl.weights[k], 0.0);
    }
  }
  return out;
}

ContourRule arc_rule(cplx center, double radius, std::span<const double> theta_breaks, int n) {
  const GaussLegendreRule& gl = gauss_legendre(n);
  ContourRule out;
  if (theta_breaks.size() < 2) return out;
  out.z.reserve((theta_breaks.size() - 1) * n);
  out.w.reserve((theta_breaks.size() - 1) * n);
  for (std::size_t i = 0; i + 1 < theta_breaks.size(); ++i) {
    const double mid = 0.5 * (theta_breaks[i] + theta_breaks[i + 1]);
    const double half = 0.5 * (theta_breaks[i + 1] - theta_breaks[i]);
    for (int k = 0; k < n; ++k) {
      const cplx e = std::polar(1.0, mid + half * gl.nodes[k]);
      out.z.push_back(center + radius * e);
      out.w.push_back(cplx(0.0, radius) * e * (half * gl.weights[k]));  // dz = i R e^{i theta} d theta
    }
  }
  return out;
}

std::vector<double> normalize_breaks(std::vector<double> breaks, double lo, double hi) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::erase_if(breaks, [&](double b) { return !(b >= lo && b <= hi); });
  std::sort(breaks.begin(), breaks.end());
  const double min_gap = 1e-14 * (hi - lo);
  std::vector<double> out;
  out.reserve(breaks.size());
  for (double b : breaks) {
    if (out.empty() || b - out.back() > min_gap) out.push_back(b);
  }
  out.back() = hi;
  return out;
}

void add_graded_breaks(std::vector<double>& breaks, double at, double h, double lo, double hi) {
  if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(at)) return;
  if (at >= lo && at <= hi) breaks.push_back(at);
  for (double d = h; d < hi - lo; d *= 2.0) {
    if (at + d > lo && at + d < hi) breaks.push_back(at + d);
    if (at - d > lo && at - d < hi) breaks.push_back(at - d);
  }
}

}  // namespace reslab
