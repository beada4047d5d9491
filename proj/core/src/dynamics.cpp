#include "reslab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reslab/errors.hpp"

namespace reslab {
namespace {

const cplx kI(0.0, 1.0);
constexpr double kFourPi = 4.0 * pi;
constexpr double kKappa = kFourPi * kFourPi;  // spatial rate in the xi form

void require_d3(const ModelParams& p, const char* who) {
  p.validate();
  if (p.dim != 3) throw DomainError(std::string(who) + ": only defined for d = 3");
  if (!p.embedding_condition()) {
    throw DomainError(std::string(who) + ": requires -sqrt(2 beta)/(4 pi) < alpha < 0");
  }
}

double checked_norm(const Point& x, const char* who) {
  const double r = norm(x, 3);
  if (!(r > 0.0)) throw DomainError(std::string(who) + ": point must be nonzero");
  return r;
}

// (k_+ /(4 pi i) - |a|)(k_- /(4 pi i) - |a|) - eps^2
cplx resonant_denominator(double abs_alpha, double eps, cplx k_plus, cplx k_minus) {
  return (k_plus / (kFourPi * kI) - abs_alpha) * (k_minus / (kFourPi * kI) - abs_alpha) - eps * eps;
}

// Boundary value from above of sqrt(w) for real w.
cplx sqrt_from_above(double w) { return w >= 0.0 ? cplx(std::sqrt(w), 0.0) : cplx(0.0, std::sqrt(-w)); }

}  // namespace

// ---------------------------------------------------------------------------
// EnergyWindow

double EnergyWindow::default_half_width(const ModelParams& p) {
  return p.epsilon * kFourPi * std::abs(p.alpha);
}

EnergyWindow EnergyWindow::make(const ModelParams& p, std::optional<double> half_width) {
  require_d3(p, "EnergyWindow");
  const double delta = half_width.value_or(default_half_width(p));
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("EnergyWindow: half-width must be positive (epsilon = 0 needs an explicit width)");
  }
  const double s = kFourPi * std::abs(p.alpha);
  EnergyWindow w;
  w.center = p.beta - s * s;
  w.half_width = delta;
  if (!(w.lambda_lo() > -p.beta && w.lambda_hi() < p.beta)) {
    std::ostringstream os;
    os << "EnergyWindow: [" << w.lambda_lo() << ", " << w.lambda_hi() << "] must lie inside (-beta, beta)";
    throw DomainError(os.str());
  }
  w.xi_lo = std::sqrt(s * s - delta) / kFourPi - std::abs(p.alpha);
  w.xi_hi = std::sqrt(s * s + delta) / kFourPi - std::abs(p.alpha);
  return w;
}

// ---------------------------------------------------------------------------
// Generalized eigenfunctions and the spectral density

ChannelAmplitudes generalized_eigenfunction(const ModelParams& p, Channel sigma, double lambda,
                                            const Point& omega, const Point& x) {
  require_d3(p, "generalized_eigenfunction");
  const double r = checked_norm(x, "generalized_eigenfunction");
  const double threshold = sign(sigma) * p.beta;
  if (lambda < threshold) {
    std::ostringstream os;
    os << "generalized_eigenfunction: lambda = " << lambda << " below channel threshold " << threshold;
    throw DomainError(os.str());
  }
  const double a = std::abs(p.alpha);
  const cplx k_plus = sqrt_from_above(lambda - p.beta);
  const cplx k_minus = sqrt_from_above(lambda + p.beta);
  const cplx den = resonant_denominator(a, p.epsilon, k_plus, k_minus);
  const double omega_x = omega[0] * x[0] + omega[1] * x[1] + omega[2] * x[2];
  auto spherical = [&](cplx k) { return std::exp(kI * k * r) / (kFourPi * r); };

  const cplx k_in = sigma == Channel::Plus ? k_plus : k_minus;
  const cplx k_out = sigma == Channel::Plus ? k_minus : k_plus;
  const double pref = std::pow(lambda - threshold, 0.25) / (4.0 * std::pow(pi, 1.5));
  const cplx same = std::exp(kI * k_in * omega_x) + (k_out / (kFourPi * kI) - a) / den * spherical(k_in);
  const cplx cross = -p.epsilon / den * spherical(k_out);

  ChannelAmplitudes out;
  if (sigma == Channel::Plus) {
    out.plus = pref * same;
    out.minus = pref * cross;
  } else {
    out.minus = pref * same;
    out.plus = pref * cross;
  }
  return out;
}

cplx projector_density(const ModelParams& p, double lambda, const Point& x, const Point& xp, double t) {
  require_d3(p, "projector_density");
  const double r = checked_norm(x, "projector_density");
  const double rp = checked_norm(xp, "projector_density");
  if (!(lambda > -p.beta && lambda < p.beta)) throw DomainError("projector_density: lambda must lie in (-beta, beta)");
  const double e2 = p.epsilon * p.epsilon;
  if (e2 == 0.0) return 0.0;
  const double w = std::sqrt(lambda + p.beta);
  const cplx den = resonant_denominator(std::abs(p.alpha), p.epsilon, sqrt_from_above(lambda - p.beta), w);
  const double value = e2 * w * std::exp(-std::sqrt(p.beta - lambda) * (r + rp)) / std::norm(den) /
                       (64.0 * std::pow(pi, 4) * r * rp);
  return value * std::exp(-kI * lambda * t);
}

// ---------------------------------------------------------------------------
// ProjectorModel

ProjectorModel::ProjectorModel(const ModelParams& p, const EnergyWindow& window)
    : params_(p), window_(window), roots_(quartic_roots(p)), abs_alpha_(std::abs(p.alpha)) {
  resonance_ = energy_from_xi(p, roots_.xi3);
  const double s = kFourPi * abs_alpha_;
  if (!(window.half_width > 0.0) || std::abs(window.center - (p.beta - s * s)) > 1e-12 * std::max(1.0, p.beta)) {
    throw DomainError("ProjectorModel: window is not centred on E_{0,+} of these parameters");
  }
}

double ProjectorModel::rho() const {
  const double a = abs_alpha_;
  return a * std::sqrt(2.0 * params_.beta - kKappa * a * a) / (roots_.xi1 * roots_.xi2);
}

double ProjectorModel::spatial_factor(double r, double rp) const {
  return std::exp(-kKappa * abs_alpha_ * (r + rp)) / (r * rp);
}

cplx ProjectorModel::xi_prefactor() const { return -params_.epsilon * params_.epsilon / (2.0 * pi * pi); }

cplx ProjectorModel::quartic_factored(cplx z) const {
  return (z - roots_.xi1) * (z - roots_.xi2) * (z - roots_.xi3) * (z - roots_.xi3_conj);
}

cplx ProjectorModel::quartic_monic(cplx z) const {
  const std::array<double, 4> c = quartic_coefficients(params_);
  return (((z + c[3]) * z + c[2]) * z + c[1]) * z + c[0];
}

cplx ProjectorModel::integrand_core(cplx z, double t, bool factored) const {
  const cplx u = z + abs_alpha_;
  const cplx f = std::sqrt(2.0 * params_.beta - kKappa * u * u) * u;
  // lambda(z) = center - shift; the constant phase is factored out so node
  // rounding does not scale with t.
  const cplx shift = kKappa * z * (z + 2.0 * abs_alpha_);
  const double c0 = params_.beta - kKappa * abs_alpha_ * abs_alpha_;
  return f * std::polar(1.0, -c0 * t) * std::exp(kI * shift * t) / (factored ? quartic_factored(z) : quartic_monic(z));
}

std::vector<double> ProjectorModel::line_breaks(double t) const {
  const double lo = window_.xi_lo, hi = window_.xi_hi;
  std::vector<double> b;
  add_graded_breaks(b, roots_.xi3.real(), roots_.xi3.imag(), lo, hi);
  const int osc = static_cast<int>(std::ceil(2.0 * window_.half_width * t / pi));
  for (int k = 1; k < osc; ++k) b.push_back(lo + (hi - lo) * k / osc);
  return normalize_breaks(std::move(b), lo, hi);
}

std::vector<double> ProjectorModel::arc_breaks(double t) const {
  const cplx m = window_.arc_center();
  const double ra = window_.arc_radius();
  std::vector<double> b;
  const cplx rel = roots_.xi3 - m;
  const double gap = ra - std::abs(rel);
  if (gap > 0.0) add_graded_breaks(b, std::arg(rel), gap / ra, 0.0, pi);
  if (t > 0.0) {
    // Near the endpoints e^{-i lambda t} decays along the arc on this angular scale.
    const double theta_s = 1.0 / (2.0 * kKappa * (abs_alpha_ + m.real()) * ra * t);
    if (theta_s < 0.25) {
      add_graded_breaks(b, 0.0, theta_s, 0.0, pi);
      add_graded_breaks(b, pi, theta_s, 0.0, pi);
    }
    const int osc = std::min(256, static_cast<int>(std::ceil(2.0 * window_.half_width * t / pi)));
    for (int k = 1; k < osc; ++k) b.push_back(pi * k / osc);
  }
  return normalize_breaks(std::move(b), 0.0, pi);
}

cplx ProjectorModel::apply(const ContourRule& weighted, double kappa, double radius_sum) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < weighted.size(); ++k) s += weighted.w[k] * std::exp(-kappa * weighted.z[k] * radius_sum);
  return s;
}

ContourRule ProjectorModel::converge(bool arc, double t, Weighting weighting, std::span<const double> probes,
                                     const QuadratureSpec& q, QuadratureReport* report) const {
  const std::vector<double> breaks = arc ? arc_breaks(t) : line_breaks(t);
  auto build = [&](int n) {
    ContourRule rule = arc ? arc_rule(window_.arc_center(), window_.arc_radius(), breaks, n) : segment_rule(breaks, n);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      cplx v = integrand_core(rule.z[k], t, arc);
      if (weighting == Weighting::EnergyMoment) {
        const cplx u = rule.z[k] + abs_alpha_;
        v *= -kI * (params_.beta - kKappa * u * u);
      }
      rule.w[k] *= v;
    }
    return rule;
  };
  auto evaluate = [&](const ContourRule& rule, std::vector<cplx>& sums, std::vector<double>& l1) {
    sums.assign(probes.size(), 0.0);
    l1.assign(probes.size(), 0.0);
    for (std::size_t j = 0; j < probes.size(); ++j) {
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const cplx term = rule.w[k] * std::exp(-kKappa * rule.z[k] * probes[j]);
        sums[j] += term;
        l1[j] += std::abs(term);
      }
    }
  };

  int n = std::max(2, q.initial_nodes);
  ContourRule prev = build(n);
  std::vector<cplx> prev_sums, sums;
  std::vector<double> l1;
  evaluate(prev, prev_sums, l1);
  double delta = 0.0;
  while (true) {
    const int next_n = 2 * n;
    if (next_n > q.max_nodes) {
      std::ostringstream os;
      os.precision(17);
      os << "quadrature did not converge on the " << (arc ? "arc" : "interval") << " at t = " << t
         << " with " << n << " nodes per panel; last two estimates differ by " << delta;
      if (!sums.empty()) os << " (" << prev_sums.front() << " vs " << sums.front() << ")";
      throw ConvergenceError(os.str());
    }
    ContourRule cur = build(next_n);
    evaluate(cur, sums, l1);
    bool ok = true;
    delta = 0.0;
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const double d = std::abs(sums[j] - prev_sums[j]);
      delta = std::max(delta, d);
      if (d > q.rel_tol * std::abs(sums[j]) + 1e-15 * l1[j]) ok = false;
    }
    n = next_n;
    if (ok) {
      if (report) {
        report->nodes_per_panel = n;
        report->total_nodes = static_cast<int>(cur.size());
        report->last_delta = delta;
      }
      return cur;
    }
    prev = std::move(cur);
    prev_sums = sums;
  }
}

namespace {

void require_pole_inside(const EnergyWindow& w, const QuarticRoots& roots) {
  if (!(std::abs(roots.xi3 - w.arc_center()) < w.arc_radius())) {
    std::ostringstream os;
    os << "resonance root xi3 = " << roots.xi3 << " is not inside the contour over I' = [" << w.xi_lo << ", "
       << w.xi_hi << "]; widen the energy window";
    throw DomainError(os.str());
  }
}

}  // namespace

cplx ProjectorModel::direct(double t, double r, double rp, const QuadratureSpec& q, QuadratureReport* report) const {
  if (params_.epsilon == 0.0) return 0.0;
  const double probe[] = {r + rp};
  const ContourRule rule = converge(false, t, Weighting::Propagator, probe, q, report);
  return xi_prefactor() * spatial_factor(r, rp) * apply(rule, kKappa, r + rp);
}

cplx ProjectorModel::residue_term(double t, double r, double rp) const {
  if (params_.epsilon == 0.0) return 0.0;
  require_pole_inside(window_, roots_);
  const cplx z = roots_.xi3;
  const cplx u = z + abs_alpha_;
  const cplx f = std::sqrt(2.0 * params_.beta - kKappa * u * u) * u;
  const double e2 = params_.epsilon * params_.epsilon;
  return -kI * e2 * std::exp(-kI * resonance_ * t) / (pi * (z - roots_.xi3_conj)) * spatial_factor(r, rp) * f *
         std::exp(-kKappa * z * (r + rp)) / ((z - roots_.xi1) * (z - roots_.xi2));
}

cplx ProjectorModel::lorentzian_term(double t, double r, double rp) const {
  if (params_.epsilon == 0.0) return 0.0;
  require_pole_inside(window_, roots_);
  const double e2 = params_.epsilon * params_.epsilon;
  return -kI * rho() * e2 / (pi * (roots_.xi3 - roots_.xi3_conj)) * spatial_factor(r, rp) *
         std::exp(-kI * resonance_ * t);
}

cplx ProjectorModel::arc_term(double t, double r, double rp, const QuadratureSpec& q,
                              QuadratureReport* report) const {
  if (params_.epsilon == 0.0) return 0.0;
  require_pole_inside(window_, roots_);
  const double probe[] = {r + rp};
  const ContourRule rule = converge(true, t, Weighting::Propagator, probe, q, report);
  return xi_prefactor() * spatial_factor(r, rp) * apply(rule, kKappa, r + rp);
}

cplx ProjectorModel::arc_slope(double r, double rp, const QuadratureSpec& q) const {
  if (params_.epsilon == 0.0) return 0.0;
  require_pole_inside(window_, roots_);
  const double probe[] = {r + rp};
  const ContourRule rule = converge(true, 0.0, Weighting::EnergyMoment, probe, q, nullptr);
  return spatial_factor(r, rp) * apply(rule, kKappa, r + rp) / (2.0 * pi * pi);
}

ProjectorModel::ArcEvaluator ProjectorModel::prepare_arc(double t, double max_radius_sum,
                                                         const QuadratureSpec& q) const {
  ArcEvaluator ev;
  ev.model_ = this;
  if (params_.epsilon == 0.0) return ev;
  require_pole_inside(window_, roots_);
  const double probes[] = {0.0, 0.5 * max_radius_sum, max_radius_sum};
  ContourRule rule = converge(true, t, Weighting::Propagator, probes, q, nullptr);
  // Drop nodes whose weight cannot matter at any radius sum up to max_radius_sum;
  // at late times this removes the exponentially suppressed interior of the arc.
  double l1 = 0.0;
  for (const cplx& w : rule.w) l1 += std::abs(w);
  const double spread = std::exp(kKappa * 2.0 * window_.arc_radius() * max_radius_sum);
  const double floor = 1e-20 * l1 / spread;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    if (std::abs(rule.w[k]) >= floor) {
      ev.rule_.z.push_back(rule.z[k]);
      ev.rule_.w.push_back(rule.w[k]);
    }
  }
  return ev;
}

const std::vector<cplx>& ProjectorModel::ArcEvaluator::factors(double r) const {
  auto [it, inserted] = cache_.try_emplace(r);
  if (inserted) {
    it->second.resize(rule_.size());
    for (std::size_t k = 0; k < rule_.size(); ++k) it->second[k] = std::exp(-kKappa * rule_.z[k] * r);
  }
  return it->second;
}

cplx ProjectorModel::ArcEvaluator::operator()(double r, double rp) const {
  if (rule_.size() == 0) return 0.0;
  const std::vector<cplx>& a = factors(r);
  const std::vector<cplx>& b = factors(rp);
  cplx s = 0.0;
  for (std::size_t k = 0; k < rule_.size(); ++k) s += rule_.w[k] * a[k] * b[k];
  return model_->xi_prefactor() * model_->spatial_factor(r, rp) * s;
}

// ---------------------------------------------------------------------------
// Free functions

cplx projector_kernel(const ModelParams& p, const EnergyWindow& w, double t, const Point& x, const Point& xp,
                      const QuadratureSpec& q, QuadratureReport* report) {
  const double r = checked_norm(x, "projector_kernel");
  const double rp = checked_norm(xp, "projector_kernel");
  return ProjectorModel(p, w).direct(t, r, rp, q, report);
}

ResidueDecomposition residue_decomposition(const ModelParams& p, const EnergyWindow& w, double t, const Point& x,
                                           const Point& xp, const QuadratureSpec& q) {
  const double r = checked_norm(x, "residue_decomposition");
  const double rp = checked_norm(xp, "residue_decomposition");
  const ProjectorModel m(p, w);
  return {m.residue_term(t, r, rp), m.arc_term(t, r, rp, q), m.lorentzian_term(t, r, rp)};
}

ShortTimeTerms short_time_terms(const ModelParams& p, const EnergyWindow& w, const Point& x, const Point& xp,
                                const QuadratureSpec& q) {
  const double r = checked_norm(x, "short_time_terms");
  const double rp = checked_norm(xp, "short_time_terms");
  const ProjectorModel m(p, w);
  return {m.direct(0.0, r, rp, q), m.residue_term(0.0, r, rp), m.arc_slope(r, rp, q)};
}

DecayDecomposition decay_decomposition(const ModelParams& p, const EnergyWindow& w,
                                       std::span<const double> probe_times, const HsSpec& hs,
                                       const QuadratureSpec& q) {
  const ProjectorModel m(p, w);
  DecayDecomposition out;
  out.b_eps = m.resonance().real();
  out.gamma_eps = -m.resonance().imag();
  out.rho = m.rho();
  out.quartic = m.roots();
  if (probe_times.empty()) {
    if (out.gamma_eps > 0.0) {
      out.probe_times = {0.0, 1.0 / out.gamma_eps, 5.0 / out.gamma_eps};
    } else {
      out.probe_times = {0.0};
    }
  } else {
    out.probe_times.assign(probe_times.begin(), probe_times.end());
  }
  for (double t : out.probe_times) out.remainder_hs = std::max(out.remainder_hs, remainder_hs_norm(m, t, hs, q));
  return out;
}

std::vector<SurvivalRow> survival_curve(const ModelParams& p, const EnergyWindow& w, std::span<const double> times,
                                        const Point& x, const Point& xp, const QuadratureSpec& q) {
  std::vector<SurvivalRow> rows;
  if (times.empty()) return rows;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw DomainError("survival_curve: times must be nonnegative");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("survival_curve: times must be increasing");
  }
  const double r = checked_norm(x, "survival_curve");
  const double rp = checked_norm(xp, "survival_curve");
  const ProjectorModel m(p, w);
  const double p0 = std::abs(m.direct(0.0, r, rp, q));
  rows.reserve(times.size());
  for (double t : times) {
    const cplx pt = m.direct(t, r, rp, q);
    const cplx p1 = m.residue_term(t, r, rp);
    const cplx l = m.lorentzian_term(t, r, rp);
    const cplx p2 = m.arc_term(t, r, rp, q);
    SurvivalRow row;
    row.t = t;
    row.abs_p = std::abs(pt);
    row.arg_p = std::arg(pt);
    row.normalized = p0 > 0.0 ? row.abs_p / p0 : 0.0;
    row.abs_p1 = std::abs(p1);
    row.abs_l = std::abs(l);
    row.abs_b = std::abs(p1 - l - p2);
    rows.push_back(row);
  }
  return rows;
}

double fit_decay_rate(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw DomainError("fit_decay_rate: size mismatch");
  if (times.size() < 2) throw DomainError("fit_decay_rate: need at least two samples");
  const double n = static_cast<double>(times.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > 0.0)) throw DomainError("fit_decay_rate: values must be positive");
    st += times[i];
    sy += std::log(values[i]);
  }
  const double tm = st / n, ym = sy / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    num += (times[i] - tm) * (std::log(values[i]) - ym);
    den += (times[i] - tm) * (times[i] - tm);
  }
  if (den == 0.0) throw DomainError("fit_decay_rate: times must not all coincide");
  return -num / den;
}

}  // namespace reslab
