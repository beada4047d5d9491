#include "reslab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reslab/errors.hpp"

namespace reslab {
namespace {

const cplx kI(0.0, 1.0);
constexpr double kFourPi = 4.0 * pi;

// Energy scale of the printed eigenvalues in each dimension.
double dimensional_scale(const ModelParams& p) {
  switch (p.dim) {
    case 1:
      return p.alpha * p.alpha;
    case 2:
      return 1.0 / p.mu();
    default:
      return (kFourPi * p.alpha) * (kFourPi * p.alpha);
  }
}

double real_det(const ModelParams& p, double lambda) {
  return gamma_eps(p, cplx(lambda, 0.0), SheetPair::physical()).det().real();
}

void require_embedding(const ModelParams& p, const char* who) {
  if (!p.embedding_condition()) {
    throw DomainError(std::string(who) +
                      ": parameters violate the embedding condition (no resonance emerges from E_{0,+})");
  }
}

}  // namespace

double unperturbed_lower(const ModelParams& p) { return -p.beta - dimensional_scale(p) / (p.dim == 1 ? 4.0 : 1.0); }

double unperturbed_upper(const ModelParams& p) { return p.beta - dimensional_scale(p) / (p.dim == 1 ? 4.0 : 1.0); }

bool has_point_spectrum(const ModelParams& p) { return p.dim == 2 || p.alpha < 0.0; }

SpectralResult classify_unperturbed(const ModelParams& p) {
  p.validate();
  if (p.epsilon != 0.0) throw DomainError("classify_unperturbed: requires epsilon = 0");
  SpectralResult r;
  r.essential_spectrum_threshold = -p.beta;
  if (!has_point_spectrum(p)) return r;

  const double lower = unperturbed_lower(p);
  const double upper = unperturbed_upper(p);
  r.bound_states.push_back(lower);

  bool upper_embedded = false;
  switch (p.dim) {
    case 1:
      upper_embedded = p.alpha >= -2.0 * std::sqrt(2.0 * p.beta);
      break;
    case 2:
      upper_embedded = 2.0 * p.beta * p.mu() >= 1.0;
      break;
    default:
      upper_embedded = p.alpha >= -std::sqrt(2.0 * p.beta) / kFourPi;
      break;
  }
  if (upper_embedded) {
    r.embedded = upper;
  } else {
    r.bound_states.push_back(upper);
  }
  std::sort(r.bound_states.begin(), r.bound_states.end());
  return r;
}

std::vector<double> bound_states(const ModelParams& p, double tol) {
  p.validate();
  if (!(tol > 0.0)) throw DomainError("bound_states: tol must be positive");

  // Scan in u = sqrt(-beta - lambda) so roots near the threshold stay resolved.
  // Grid density grows with sqrt(scale / beta) so the two levels, which are
  // at least beta / sqrt(scale) apart in u, never share a cell.
  const double scale = dimensional_scale(p);
  const double width = 10.0 * std::max(scale, p.beta);
  const double umax = std::sqrt(width);
  const int n = static_cast<int>(std::clamp(4096.0 * std::ceil(std::sqrt(scale / p.beta)), 4096.0, 262144.0));
  std::vector<double> grid;
  for (int k = 48; k >= 1; --k) {  // levels hugging the threshold
    const double u = std::ldexp(umax / n, -k);
    if (u * u > 64.0 * std::numeric_limits<double>::epsilon() * p.beta) grid.push_back(u);
  }
  for (int i = 1; i <= n; ++i) grid.push_back(umax * i / n);
  auto lambda_of = [&](double u) { return -p.beta - u * u; };

  std::vector<double> roots;
  double u_prev = grid.front();
  double f_prev = real_det(p, lambda_of(u_prev));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double u = grid[i];
    const double f = real_det(p, lambda_of(u));
    if (f == 0.0) {
      roots.push_back(lambda_of(u));
    } else if (f_prev != 0.0 && std::signbit(f) != std::signbit(f_prev)) {
      double lo = lambda_of(u);  // more negative end
      double hi = lambda_of(u_prev);
      double f_lo = f;
      for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = real_det(p, mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(f_lo)) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      // A pole of det also flips the sign; there |det| grows instead of vanishing.
      const double f_root = std::abs(real_det(p, root));
      if (f_root > std::max(std::abs(f), std::abs(f_prev))) {
        std::ostringstream os;
        os << "bound_states: sign change in [" << lo << ", " << hi << "] is not a root (|det| = " << f_root
           << " exceeds the bracket values " << std::abs(f) << ", " << std::abs(f_prev) << ")";
        throw ConvergenceError(os.str());
      }
      roots.push_back(root);
    }
    u_prev = u;
    f_prev = f;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

FixedPointResult resonance_fixed_point(const ModelParams& p, double tol, int max_iter) {
  p.validate();
  if (p.dim != 3) throw DomainError("resonance_fixed_point: only defined for d = 3");
  require_embedding(p, "resonance_fixed_point");

  const double a = std::abs(p.alpha);
  const double e2 = p.epsilon * p.epsilon;
  auto eta_of = [&](cplx xi) {
    const cplx arg = 2.0 * p.beta - (kFourPi * (xi + a)) * (kFourPi * (xi + a));
    return a + kI * std::sqrt(arg) / kFourPi;  // principal root: Re >= 0
  };

  FixedPointResult out;
  cplx xi = -e2 / eta_of(0.0);
  double prev_diff = -1.0;
  for (int k = 1; k <= max_iter; ++k) {
    const cplx next = -e2 / eta_of(xi);
    const double diff = std::abs(next - xi);
    if (prev_diff > 0.0 && diff > 0.0) {
      const double ratio = diff / prev_diff;
      out.contraction_ratio = std::max(out.contraction_ratio, ratio);
      if (ratio >= 1.0) {
        std::ostringstream os;
        os << "resonance_fixed_point: recurrence not contracting (ratio " << ratio << " at step " << k
           << "); epsilon too large for alpha";
        throw ConvergenceError(os.str());
      }
    }
    xi = next;
    if (diff <= tol) {
      out.iterations = k;
      const cplx root = kFourPi * (xi + a);
      out.energy = p.beta - root * root;
      return out;
    }
    prev_diff = diff;
  }
  throw ConvergenceError("resonance_fixed_point: iteration limit reached");
}

NewtonResult resonance_newton(const ModelParams& p, cplx seed, SheetPair sheets, double tol, int max_iter) {
  p.validate();
  auto det_at = [&](cplx z) { return gamma_eps(p, z, sheets).det(); };
  const double escape_margin = 1e-12 * std::max(1.0, std::abs(seed));

  NewtonResult out;
  cplx z = seed;
  double prev_step = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int k = 1; k <= max_iter; ++k) {
    const double h = std::max(1e-7 * std::abs(z), 1e-9);
    const cplx f = det_at(z);
    const cplx df = (det_at(z + h) - det_at(z - h)) / (2.0 * h);
    if (df == 0.0) throw ConvergenceError("resonance_newton: vanishing derivative");
    const cplx step = f / df;
    z -= step;
    if (sheets == SheetPair::resonance() && z.imag() > escape_margin) {
      std::ostringstream os;
      os << "resonance_newton: iterate " << z << " left the (first, second) sheet half-plane";
      throw ConvergenceError(os.str());
    }
    const double s = std::abs(step);
    growth = s > prev_step ? growth + 1 : 0;
    if (growth >= 3) throw ConvergenceError("resonance_newton: diverging steps");
    prev_step = s;
    if (s <= tol * std::max(1.0, std::abs(z))) {
      const GammaMatrix g = gamma_eps(p, z, sheets);
      out.energy = z;
      out.iterations = k;
      out.residual = std::abs(g.det()) / std::max(g.det_scale(), 1e-300);
      if (out.residual > std::max(tol, 1e-10)) {
        std::ostringstream os;
        os << "resonance_newton: step converged but residual " << out.residual << " exceeds tolerance";
        throw ConvergenceError(os.str());
      }
      return out;
    }
  }
  throw ConvergenceError("resonance_newton: iteration limit reached");
}

NewtonResult resonance_newton(const ModelParams& p, double tol) {
  return resonance_newton(p, perturbative_prediction(p).resonance_first_order, SheetPair::resonance(), tol);
}

PerturbativePrediction perturbative_prediction(const ModelParams& p) {
  p.validate();
  require_embedding(p, "perturbative_prediction");
  const double b = p.beta;
  const double e2 = p.epsilon * p.epsilon;
  const double lower = unperturbed_lower(p);
  const double upper = unperturbed_upper(p);

  PerturbativePrediction out;
  switch (p.dim) {
    case 1: {
      const double r = 8.0 * b / (p.alpha * p.alpha);
      out.bound_first_order = lower - e2 / (2.0 * (std::sqrt(r + 1.0) - 1.0));
      out.resonance_first_order =
          upper + cplx(e2 * p.alpha * p.alpha / (16.0 * b), -0.5 * e2 * std::sqrt(r - 1.0) / r);
      break;
    }
    case 2: {
      const double mu = p.mu();
      const double shift = 8.0 * pi * pi * e2 / mu;
      const double a = std::log(std::sqrt(2.0 * b * mu - 1.0));
      out.bound_first_order = lower - shift / std::log(std::sqrt(2.0 * b * mu + 1.0));
      out.resonance_first_order = upper - shift * cplx(a, 0.5 * pi) / (a * a + 0.25 * pi * pi);
      break;
    }
    default: {
      const double s = (kFourPi * p.alpha) * (kFourPi * p.alpha);
      const double r = 2.0 * b / s;
      out.bound_first_order = lower - 2.0 * kFourPi * kFourPi * e2 / (std::sqrt(r + 1.0) - 1.0);
      const double shift = s * kFourPi * kFourPi * e2 / b;  // (4 pi)^4 alpha^2 eps^2 / beta
      out.resonance_first_order = upper + cplx(shift, -shift * std::sqrt(r - 1.0));
      break;
    }
  }
  out.in_regime = p.perturbative_regime(0.3);
  out.validity = out.in_regime ? "first order in epsilon^2; epsilon <= 0.3 |alpha|"
                               : "warning: epsilon > 0.3 |alpha|, first-order expansion unreliable";
  return out;
}

SpectralResult solve_spectrum(const ModelParams& p, double tol) {
  p.validate();
  SpectralResult r;
  r.essential_spectrum_threshold = -p.beta;
  r.bound_states = bound_states(p, tol);
  if (p.epsilon == 0.0) {
    r.embedded = classify_unperturbed(p).embedded;
  } else if (p.embedding_condition()) {
    const NewtonResult n = resonance_newton(p, tol);
    r.resonance = Resonance{n.energy, SheetPair::resonance(), n.iterations, n.residual};
  }
  return r;
}

}  // namespace reslab
