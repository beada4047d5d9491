#pragma once

#include <Eigen/Core>

#include "reslab/specfun.hpp"

namespace reslab {

using Mat2 = Eigen::Matrix2cd;

/// Two-channel point-interaction model.
///
/// Natural units hbar = 2m = 1.  `alpha` is the coupling of the diagonal
/// interaction, `beta` half the gap between the internal levels and `epsilon`
/// the channel-mixing strength.  In d = 2 the model is often quoted through
/// mu = e^{2(gamma + 2 pi alpha)} / 4, which is always derived from alpha.
struct ModelParams {
  int dim = 3;
  double alpha = 0.0;
  double beta = 1.0;
  double epsilon = 0.0;

  /// Validates and returns the record; throws DomainError.
  static ModelParams make(int dim, double alpha, double beta, double epsilon);
  /// d = 2 parameterization through mu > 0.
  static ModelParams from_mu(double mu, double beta, double epsilon);

  static double alpha_from_mu(double mu);

  void validate() const;

  double mu() const;
  double half_log_mu() const;  // ln sqrt(mu), finite even when mu over/underflows

  /// Condition under which E_{0,+} is embedded strictly inside (-beta, beta)
  /// and a resonance emerges for small epsilon > 0.
  bool embedding_condition() const;

  /// Advisory: epsilon small compared to |alpha|.
  bool perturbative_regime(double ratio = 0.3) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class Channel { Plus, Minus };

constexpr int index(Channel c) { return c == Channel::Plus ? 0 : 1; }
constexpr double sign(Channel c) { return c == Channel::Plus ? 1.0 : -1.0; }

/// 2x2 matrix Gamma(z) indexed (+,+), (+,-), (-,+), (-,-) on a sheet pair.
struct GammaMatrix {
  Mat2 entries = Mat2::Zero();
  cplx z{};
  SheetPair sheets{};

  cplx operator()(Channel s, Channel sp) const { return entries(index(s), index(sp)); }

  cplx det() const;
  /// max(|g++ g--|, |g+- g-+|): the magnitude scale against which det is judged.
  double det_scale() const;
  /// |det| <= rel_tol ||G||_F^2, i.e. numerically rank deficient.
  bool is_singular(double rel_tol = 1e-13) const;
  /// Closed-form 2x2 inverse; throws SingularityError when is_singular().
  Mat2 inverse(double rel_tol = 1e-13) const;
};

/// Unperturbed free table Gamma(z) (no coupling constants).
GammaMatrix gamma_free(int dim, double beta, cplx z, SheetPair sheets = SheetPair::physical());

GammaMatrix gamma0(const ModelParams& p, cplx z, SheetPair sheets = SheetPair::physical());
GammaMatrix gamma_eps(const ModelParams& p, cplx z, SheetPair sheets = SheetPair::physical());

/// B Gamma(z) + A for an admissible boundary pair (A, B).
/// Throws AdmissibilityError naming the violated condition.
GammaMatrix gamma_ab(const Mat2& a, const Mat2& b, const GammaMatrix& free_gamma);

/// Resolvent kernel R_eps(z; x, x')_{sigma sigma'} on the physical sheet.
cplx resolvent_kernel(const ModelParams& p, cplx z, const Point& x, const Point& xp, Channel sigma,
                      Channel sigmap);

}  // namespace reslab
