#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "reslab/model.hpp"
#include "reslab/quadrature.hpp"

namespace reslab {

/// Energy interval I = [E_{0,+} - Delta, E_{0,+} + Delta] and its image I' in the
/// xi = sqrt(beta - lambda)/(4 pi) - |alpha| variable.
struct EnergyWindow {
  double center = 0.0;
  double half_width = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;

  /// Default half-width is epsilon * 4 pi |alpha|.  Throws DomainError when the
  /// interval leaves (-beta, beta) or the half-width is not positive.
  static EnergyWindow make(const ModelParams& p, std::optional<double> half_width = std::nullopt);

  static double default_half_width(const ModelParams& p);

  double lambda_lo() const { return center - half_width; }
  double lambda_hi() const { return center + half_width; }
  // Semicircle over I' closing the contour in the upper half-plane.
  double arc_center() const { return 0.5 * (xi_lo + xi_hi); }
  double arc_radius() const { return 0.5 * (xi_hi - xi_lo); }
};

/// Roots of xi^4 + 2|a| xi^3 - (2 beta/(4 pi)^2) xi^2 - 2 eps^2 |a| xi - eps^4.
struct QuarticRoots {
  double xi1 = 0.0;  // negative real root
  double xi2 = 0.0;  // positive real root
  cplx xi3{};        // Im > 0 for eps > 0; the resonance root
  cplx xi3_conj{};

  std::array<cplx, 4> all() const { return {cplx(xi1), cplx(xi2), xi3, xi3_conj}; }
};

/// Monic coefficients c0..c3 (c4 = 1) of the decay quartic.
std::array<double, 4> quartic_coefficients(const ModelParams& p);

/// Companion-matrix eigenvalues polished by Newton; throws ClassificationError
/// if the pattern is not two real roots plus a conjugate pair.
QuarticRoots quartic_roots(const ModelParams& p);

/// E = beta - [4 pi (xi + |alpha|)]^2.
cplx energy_from_xi(const ModelParams& p, cplx xi);

struct ChannelAmplitudes {
  cplx plus{};
  cplx minus{};
};

/// Generalized eigenfunction of the coupled d = 3 model incoming in channel
/// sigma with energy lambda and direction omega, evaluated at x.
ChannelAmplitudes generalized_eigenfunction(const ModelParams& p, Channel sigma, double lambda,
                                            const Point& omega, const Point& x);

/// Spin-up spectral density at energy lambda in (-beta, beta), times e^{-i lambda t}.
cplx projector_density(const ModelParams& p, double lambda, const Point& x, const Point& xp,
                       double t = 0.0);

struct QuadratureSpec {
  double rel_tol = 1e-12;
  int initial_nodes = 16;
  int max_nodes = 512;  // per panel
};

struct QuadratureReport {
  int nodes_per_panel = 0;
  int total_nodes = 0;
  double last_delta = 0.0;
};

/// d = 3 spin-up projector machinery on a fixed window.  Holds the quartic
/// roots and contour geometry; all evaluations are const and thread-safe.
///
/// Kernels depend on x, x' only through r = |x|, r' = |x'| and carry the
/// spatial factor K(r, r') = e^{-(4 pi)^2 |alpha| (r + r')} / (r r').
class ProjectorModel {
 public:
  ProjectorModel(const ModelParams& p, const EnergyWindow& window);

  const ModelParams& params() const { return params_; }
  const EnergyWindow& window() const { return window_; }
  const QuarticRoots& roots() const { return roots_; }

  /// b_eps - i gamma_eps from the resonance root xi3.
  cplx resonance() const { return resonance_; }
  double rho() const;
  double spatial_factor(double r, double rp) const;

  /// Direct quadrature over I'.
  cplx direct(double t, double r, double rp, const QuadratureSpec& q = {},
              QuadratureReport* report = nullptr) const;
  /// Residue of the xi3 pole (P1).
  cplx residue_term(double t, double r, double rp) const;
  /// Semicircular-arc contribution (P2); direct = P1 - P2.
  cplx arc_term(double t, double r, double rp, const QuadratureSpec& q = {},
                QuadratureReport* report = nullptr) const;
  /// Pure Lorentzian part L.
  cplx lorentzian_term(double t, double r, double rp) const;
  /// -(d/dt) arc_term at t = 0, divided by eps^2 (short-time linear coefficient).
  cplx arc_slope(double r, double rp, const QuadratureSpec& q = {}) const;

  /// Prepared arc integral (P2) at time t for many radii up to max_radius_sum.
  /// Caches e^{-(4 pi)^2 z r} per radius; one instance per thread.
  class ArcEvaluator {
   public:
    cplx operator()(double r, double rp) const;
    int nodes() const { return static_cast<int>(rule_.size()); }

   private:
    friend class ProjectorModel;
    const std::vector<cplx>& factors(double r) const;

    const ProjectorModel* model_ = nullptr;
    ContourRule rule_;  // weights include the integrand at time t
    mutable std::unordered_map<double, std::vector<cplx>> cache_;
  };
  ArcEvaluator prepare_arc(double t, double max_radius_sum, const QuadratureSpec& q = {}) const;

 private:
  enum class Weighting { Propagator, EnergyMoment };

  // f(z) e^{-i lambda(z) t} / Q(z); Q from the monic coefficients or the factored roots.
  cplx integrand_core(cplx z, double t, bool factored) const;
  cplx quartic_monic(cplx z) const;
  cplx quartic_factored(cplx z) const;
  cplx xi_prefactor() const;  // -eps^2 / (2 pi^2)
  std::vector<double> line_breaks(double t) const;
  std::vector<double> arc_breaks(double t) const;
  ContourRule converge(bool arc, double t, Weighting weighting, std::span<const double> probes,
                       const QuadratureSpec& q, QuadratureReport* report) const;
  static cplx apply(const ContourRule& weighted, double kappa, double radius_sum);

  ModelParams params_;
  EnergyWindow window_;
  QuarticRoots roots_;
  cplx resonance_{};
  double abs_alpha_ = 0.0;
};

cplx projector_kernel(const ModelParams& p, const EnergyWindow& w, double t, const Point& x,
                      const Point& xp, const QuadratureSpec& q = {}, QuadratureReport* report = nullptr);

struct ResidueDecomposition {
  cplx p1{};
  cplx p2{};
  cplx lorentzian{};

  cplx projector() const { return p1 - p2; }
  cplx remainder() const { return p1 - lorentzian - p2; }  // B
};

ResidueDecomposition residue_decomposition(const ModelParams& p, const EnergyWindow& w, double t,
                                           const Point& x, const Point& xp, const QuadratureSpec& q = {});

/// Radial kernel sampler: value of k(x, x') at |x| = r, |x'| = r'.
using RadialKernel = std::function<cplx(double r, double rp)>;

struct HsSpec {
  int panels = 16;
  int nodes = 16;
  double tail_tol = 1e-12;  // allowed share of the outermost panel ring
};

/// Hilbert-Schmidt norm over R^3 x R^3 of a kernel radial in each argument,
/// truncated at |x|, |x'| <= cutoff.  Throws DomainError if the outer ring
/// carries more than tail_tol of the integral.
double hs_norm(const RadialKernel& k, double cutoff, const HsSpec& spec = {});

/// 40 / ((4 pi)^2 |alpha|).
double default_hs_cutoff(const ModelParams& p);

/// ||B(t, eps)||_HS with B = P1 - L - P2.
double remainder_hs_norm(const ProjectorModel& m, double t, const HsSpec& spec = {},
                         const QuadratureSpec& q = {});

struct ShortTimeTerms {
  cplx a{};  // P(0)
  cplx b{};  // resonance-pole weight: P(t) ~ a - b (1 - e^{-i E t}) + c eps^2 t
  cplx c{};
};

ShortTimeTerms short_time_terms(const ModelParams& p, const EnergyWindow& w, const Point& x,
                                const Point& xp, const QuadratureSpec& q = {});

struct DecayDecomposition {
  double b_eps = 0.0;
  double gamma_eps = 0.0;
  double rho = 0.0;
  QuarticRoots quartic;
  double remainder_hs = 0.0;  // max ||B(t)||_HS over the probe times
  std::vector<double> probe_times;
};

/// Probe times default to {0, 1/gamma, 5/gamma}.
DecayDecomposition decay_decomposition(const ModelParams& p, const EnergyWindow& w,
                                       std::span<const double> probe_times = {},
                                       const HsSpec& hs = {}, const QuadratureSpec& q = {});

struct SurvivalRow {
  double t = 0.0;
  double abs_p = 0.0;
  double arg_p = 0.0;
  double normalized = 0.0;  // |P(t)| / |P(0)|
  double abs_p1 = 0.0;
  double abs_l = 0.0;
  double abs_b = 0.0;  // pointwise |B(t; x, x')|
};

std::vector<SurvivalRow> survival_curve(const ModelParams& p, const EnergyWindow& w,
                                        std::span<const double> times, const Point& x, const Point& xp,
                                        const QuadratureSpec& q = {});

/// Least-squares decay rate: -slope of log(values) against times.
double fit_decay_rate(std::span<const double> times, std::span<const double> values);

}  // namespace reslab
