#include <cmath>
#include <sstream>
#include <vector>

#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"

namespace reslab {

double hs_norm(const RadialKernel& k, double cutoff, const HsSpec& spec) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw DomainError("hs_norm: cutoff must be positive");
  if (spec.panels < 1 || spec.nodes < 1) throw DomainError("hs_norm: panels and nodes must be positive");
  const GaussLegendreRule& gl = gauss_legendre(spec.nodes);
  const double h = cutoff / spec.panels;
  const int m = spec.panels * spec.nodes;
  std::vector<double> r(m), w(m);
  for (int i = 0; i < spec.panels; ++i) {
    for (int j = 0; j < spec.nodes; ++j) {
      const int idx = i * spec.nodes + j;
      r[idx] = h * (i + 0.5 * (1.0 + gl.nodes[j]));
      w[idx] = 0.5 * h * gl.weights[j] * r[idx] * r[idx];
    }
  }
  const int outer = (spec.panels - 1) * spec.nodes;
  double total = 0.0, tail = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double v = w[i] * w[j] * std::norm(k(r[i], r[j]));
      total += v;
      if (i >= outer || j >= outer) tail += v;
    }
  }
  if (!std::isfinite(total)) throw DomainError("hs_norm: kernel is not square integrable on the grid");
  if (spec.panels > 1 && tail > spec.tail_tol * total) {
    std::ostringstream os;
    os << "hs_norm: cutoff " << cutoff << " too small; outer ring carries " << tail / total << " of the integral";
    throw DomainError(os.str());
  }
  return 4.0 * pi * std::sqrt(total);
}

double default_hs_cutoff(const ModelParams& p) {
  if (p.alpha == 0.0) throw DomainError("default_hs_cutoff: alpha must be nonzero");
  return 40.0 / (16.0 * pi * pi * std::abs(p.alpha));
}

double remainder_hs_norm(const ProjectorModel& m, double t, const HsSpec& spec, const QuadratureSpec& q) {
  const double cutoff = default_hs_cutoff(m.params());
  if (m.params().epsilon == 0.0) return 0.0;
  const ProjectorModel::ArcEvaluator arc = m.prepare_arc(t, 2.0 * cutoff, q);
  // Only the time factors depend on t; the radial shape is recomputed per point.
  return hs_norm(
      [&](double r, double rp) { return m.residue_term(t, r, rp) - m.lorentzian_term(t, r, rp) - arc(r, rp); },
      cutoff, spec);
}

}  // namespace reslab
