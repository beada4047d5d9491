#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reslab/model.hpp"

namespace reslab {

struct Resonance {
  cplx energy{};
  SheetPair sheets = SheetPair::resonance();
  int iterations = 0;
  double residual = 0.0;
};

struct SpectralResult {
  std::vector<double> bound_states;  // ascending, all < -beta
  std::optional<double> embedded;    // in [-beta, beta)
  std::optional<Resonance> resonance;
  double essential_spectrum_threshold = 0.0;  // -beta
};

struct PerturbativePrediction {
  double bound_first_order = 0.0;
  cplx resonance_first_order{};
  bool in_regime = true;  // epsilon <= 0.3 |alpha|
  std::string validity;
};

/// Closed-form eigenvalues of the decoupled model.
double unperturbed_lower(const ModelParams& p);  // E_{0,-}
double unperturbed_upper(const ModelParams& p);  // E_{0,+}
/// d=1,3 require alpha < 0 for any point spectrum; d=2 always has both levels.
bool has_point_spectrum(const ModelParams& p);

SpectralResult classify_unperturbed(const ModelParams& p);

/// Real roots of det Gamma_eps(lambda) = 0 below -beta on the physical sheet.
std::vector<double> bound_states(const ModelParams& p, double tol = 1e-13);

struct FixedPointResult {
  cplx energy{};
  int iterations = 0;
  double contraction_ratio = 0.0;  // largest measured |dxi_{k+1}| / |dxi_k|
};

/// d = 3 resonance from the (xi, eta) recurrence.
FixedPointResult resonance_fixed_point(const ModelParams& p, double tol = 1e-15, int max_iter = 200);

struct NewtonResult {
  cplx energy{};
  int iterations = 0;
  double residual = 0.0;  // |det| / det_scale at the returned point
};

/// Newton iteration on det Gamma_eps(z) = 0 with a central-difference derivative.
NewtonResult resonance_newton(const ModelParams& p, cplx seed, SheetPair sheets = SheetPair::resonance(),
                              double tol = 1e-13, int max_iter = 100);
/// Seeded from the first-order prediction.
NewtonResult resonance_newton(const ModelParams& p, double tol = 1e-13);

PerturbativePrediction perturbative_prediction(const ModelParams& p);

/// Full classification at any epsilon: bound states, embedded level (epsilon = 0)
/// or resonance (epsilon > 0, via Newton), essential threshold.
SpectralResult solve_spectrum(const ModelParams& p, double tol = 1e-13);

}  // namespace reslab
