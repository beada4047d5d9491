#include <doctest.h>

#include <cmath>
#include <oracles.hpp>
#include <limits>
#include <random>
#include <reslab/errors.hpp>
#include <reslab/spectra.hpp>

using namespace reslab;

namespace {

const double kAlpha3 = -1.0 / (8.0 * pi);
const double kFourPi = 4.0 * pi;

ModelParams d3(double eps_over_alpha) { return ModelParams::make(3, kAlpha3, 1, eps_over_alpha * -kAlpha3); }

// Minimum of |det Gamma_eps| on the resonance sheet over a grid of spacing h around `center`.
cplx grid_minimum(const ModelParams& p, cplx center, double half, int n) {
  cplx best = center;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const cplx z = center + cplx(-half + 2 * half * i / n, -half + 2 * half * j / n);
      const double v = std::abs(gamma_eps(p, z, SheetPair::resonance()).det());
      if (v < best_val) best_val = v, best = z;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("classify_unperturbed examples") {
  {
    const SpectralResult r = classify_unperturbed(ModelParams::make(3, kAlpha3, 1, 0));
    REQUIRE(r.bound_states.size() == 1);
    CHECK(r.bound_states[0] == doctest::Approx(-1.25).epsilon(1e-15));
    REQUIRE(r.embedded);
    CHECK(*r.embedded == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.essential_spectrum_threshold == -1.0);
  }
  {
    const SpectralResult r = classify_unperturbed(ModelParams::make(1, -1, 1, 0));
    REQUIRE(r.bound_states.size() == 1);
    CHECK(r.bound_states[0] == -1.25);
    CHECK(*r.embedded == 0.75);
  }
  {
    const SpectralResult r = classify_unperturbed(ModelParams::from_mu(1, 1, 0));
    REQUIRE(r.bound_states.size() == 1);
    CHECK(r.bound_states[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(std::abs(*r.embedded) < 1e-14);
  }
  {
    const SpectralResult r = classify_unperturbed(ModelParams::make(3, 1.0, 1, 0));
    CHECK(r.bound_states.empty());
    CHECK_FALSE(r.embedded);
  }
  {
    // Both levels below -beta once alpha passes the embedding threshold.
    const SpectralResult r = classify_unperturbed(ModelParams::make(3, -0.2, 1, 0));
    CHECK(r.bound_states.size() == 2);
    CHECK_FALSE(r.embedded);
  }
  CHECK_THROWS_AS(classify_unperturbed(ModelParams::make(3, kAlpha3, 1, 0.01)), DomainError);
}

TEST_CASE("bound_states at eps = 0 reproduce the closed forms") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int d = 1; d <= 3; ++d) {
    for (int k = 0; k < 10; ++k) {
      const double beta = 0.2 + 3 * u(rng);
      ModelParams p;
      if (d == 2) {
        p = ModelParams::from_mu(0.1 + 5 * u(rng), beta, 0);
      } else {
        const double edge = d == 1 ? 2 * std::sqrt(2 * beta) : std::sqrt(2 * beta) / kFourPi;
        p = ModelParams::make(d, -1.5 * edge * u(rng), beta, 0);
      }
      const SpectralResult exact = classify_unperturbed(p);
      const std::vector<double> found = bound_states(p);
      CAPTURE(d);
      CAPTURE(p.alpha);
      REQUIRE(found.size() == exact.bound_states.size());
      for (std::size_t i = 0; i < found.size(); ++i)
        CHECK(std::abs(found[i] - exact.bound_states[i]) <= 1e-12 * std::abs(exact.bound_states[i]));
    }
  }
}

TEST_CASE("bound_states examples at eps > 0") {
  const std::vector<double> b0 = bound_states(ModelParams::make(3, kAlpha3, 1, 0));
  REQUIRE(b0.size() == 1);
  CHECK(std::abs(b0[0] + 1.25) < 1e-12);

  const ModelParams p = d3(0.1);
  const std::vector<double> b = bound_states(p);
  REQUIRE(b.size() == 1);
  const double e = p.epsilon;
  const double first = -1.25 - kFourPi * kFourPi * e * e;
  CHECK(first == doctest::Approx(-1.2525).epsilon(1e-12));
  CHECK(std::abs(b[0] - first) <= 5 * std::pow(e * kFourPi, 4));

  const ModelParams q = ModelParams::make(1, -1, 1, 1e-2);
  const std::vector<double> c = bound_states(q);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0] - (-1.25 - 1e-4 / 4)) < 1e-7);
  CHECK_THROWS_AS(bound_states(q, 0.0), DomainError);
}

TEST_CASE("d = 3 real det changes sign exactly once below -beta") {
  for (double r : {0.0, 0.05, 0.1, 0.3}) {
    const ModelParams p = d3(r);
    int changes = 0;
    double prev = gamma_eps(p, -1.0 - 1e-9).det().real();
    for (int k = 1; k <= 20000; ++k) {
      const double lambda = -1.0 - 1e-9 - 10.0 * k / 20000.0;
      const double v = gamma_eps(p, lambda).det().real();
      if ((v < 0) != (prev < 0)) ++changes;
      prev = v;
    }
    CAPTURE(r);
    CHECK(changes == 1);
    CHECK(bound_states(p).size() == 1);
  }
}

TEST_CASE("fixed point examples") {
  const FixedPointResult z = resonance_fixed_point(ModelParams::make(3, kAlpha3, 1, 0));
  CHECK(std::abs(z.energy - 0.75) < 1e-15);
  CHECK(z.energy.imag() == 0.0);
  CHECK(z.iterations == 1);

  const ModelParams p = d3(0.1);
  const FixedPointResult f = resonance_fixed_point(p);
  const cplx first(0.75 + 4 * pi * pi * p.epsilon * p.epsilon, -4 * pi * pi * p.epsilon * p.epsilon * std::sqrt(7.0));
  CHECK(first.real() == doctest::Approx(0.750625).epsilon(1e-12));
  CHECK(first.imag() == doctest::Approx(-1.6536e-3).epsilon(1e-4));
  CHECK(f.energy.imag() < 0);
  CHECK(std::abs(f.energy - first) <= 5 * std::pow(p.epsilon * kFourPi, 4) * kFourPi * kFourPi);
  CHECK(f.contraction_ratio < 0.1);

  CHECK_THROWS_AS(resonance_fixed_point(ModelParams::make(1, -1, 1, 0.01)), DomainError);
  CHECK_THROWS_AS(resonance_fixed_point(ModelParams::make(3, 0.1, 1, 0.01)), DomainError);
  CHECK_THROWS_AS(resonance_fixed_point(p, 1e-15, 2), ConvergenceError);
}

TEST_CASE("Newton agrees with the fixed point and with a grid-scan oracle") {
  for (double r : {0.2, 0.1, 0.05}) {
    const ModelParams p = d3(r);
    const cplx fp = resonance_fixed_point(p).energy;
    const NewtonResult nw = resonance_newton(p);
    CAPTURE(r);
    CHECK(std::abs(nw.energy - fp) <= 1e-10 * std::abs(fp));
    CHECK(nw.energy.imag() < 0);

    const double spread = std::abs(nw.energy - 0.75);
    const cplx g = grid_minimum(p, perturbative_prediction(p).resonance_first_order, 0.5 * spread, 200);
    CHECK(std::abs(g - nw.energy) <= 2 * 0.5 * spread / 200 * std::sqrt(2.0));
  }
}

TEST_CASE("Newton examples in d = 1 and d = 2") {
  {
    const ModelParams p = ModelParams::make(1, -1, 1, 1e-2);
    const cplx first(0.75 + 6.25e-6, -1.65359e-5);
    CHECK(std::abs(perturbative_prediction(p).resonance_first_order - first) < 1e-10);
    const NewtonResult n = resonance_newton(p);
    CHECK(std::abs(n.energy - first) < 1e-7);
    CHECK(n.energy.imag() < 0);
  }
  {
    const double eps = 1e-3, mu = 2.0;
    const ModelParams p = ModelParams::from_mu(mu, 1, eps);
    const double a = std::log(std::sqrt(3.0));
    const cplx first = 1.0 - 1.0 / mu - (8 * pi * pi * eps * eps / mu) * cplx(a, pi / 2) / (a * a + pi * pi / 4);
    CHECK(std::abs(perturbative_prediction(p).resonance_first_order - first) < 1e-14);
    const NewtonResult n = resonance_newton(p);
    CHECK(std::abs(n.energy - first) < 1e-8);
    CHECK(n.energy.imag() < 0);
  }
}

TEST_CASE("Newton reports sheet escape and non-convergence") {
  const ModelParams p = d3(0.1);
  CHECK_THROWS_AS(resonance_newton(p, cplx(0.75, 0.01), SheetPair::resonance(), 1e-13, 100), ConvergenceError);
  CHECK_THROWS_AS(resonance_newton(p, cplx(0.7, -0.01), SheetPair::resonance(), 1e-13, 1), ConvergenceError);
}

TEST_CASE("perturbative prediction examples") {
  const PerturbativePrediction z = perturbative_prediction(ModelParams::make(3, kAlpha3, 1, 0));
  CHECK(z.bound_first_order == doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(z.resonance_first_order == cplx(unperturbed_upper(ModelParams::make(3, kAlpha3, 1, 0)), 0.0));

  const PerturbativePrediction p = perturbative_prediction(d3(0.1));
  CHECK(p.bound_first_order == doctest::Approx(-1.2525).epsilon(1e-12));
  CHECK(p.resonance_first_order.real() == doctest::Approx(0.750625).epsilon(1e-12));
  CHECK(p.resonance_first_order.imag() == doctest::Approx(-1.6536e-3).epsilon(1e-4));
  CHECK(p.in_regime);
  CHECK_FALSE(perturbative_prediction(d3(0.5)).in_regime);

  const double eps = 1e-3;
  const PerturbativePrediction q = perturbative_prediction(ModelParams::from_mu(1, 1, eps));
  CHECK(q.bound_first_order == doctest::Approx(-2.0 - 8 * pi * pi * eps * eps / std::log(std::sqrt(3.0))).epsilon(1e-14));

  CHECK_THROWS_AS(perturbative_prediction(ModelParams::make(3, 0.2, 1, 0.01)), DomainError);
}

TEST_CASE("first-order deviations scale as eps^4") {
  const ModelParams bases[] = {ModelParams::make(1, -1, 1, 0), ModelParams::from_mu(2, 1, 0),
                               ModelParams::make(3, kAlpha3, 1, 0)};
  for (const ModelParams& base : bases) {
    std::vector<double> eps, dev_b, dev_re, dev_im;
    for (int j = 0; j <= 4; ++j) {
      ModelParams p = base;
      p.epsilon = 0.1 * std::abs(base.alpha) * std::ldexp(1.0, -j);
      if (base.dim == 2) p.epsilon = 0.02 * std::ldexp(1.0, -j);
      const PerturbativePrediction pr = perturbative_prediction(p);
      const double b = bound_states(p).front();
      const cplx r = resonance_newton(p).energy;
      eps.push_back(p.epsilon);
      dev_b.push_back(std::abs(b - pr.bound_first_order));
      dev_re.push_back(std::abs(r.real() - pr.resonance_first_order.real()));
      dev_im.push_back(std::abs(r.imag() - pr.resonance_first_order.imag()));
    }
    CAPTURE(base.dim);
    CHECK(oracle::loglog_slope(eps, dev_b) == doctest::Approx(4.0).epsilon(0.3 / 4));
    CHECK(oracle::loglog_slope(eps, dev_re) == doctest::Approx(4.0).epsilon(0.3 / 4));
    CHECK(oracle::loglog_slope(eps, dev_im) == doctest::Approx(4.0).epsilon(0.3 / 4));
  }
}

TEST_CASE("resonances sit below the real axis across random admissible parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int d = 1; d <= 3; ++d) {
    for (int k = 0; k < 8; ++k) {
      const double beta = 0.5 + u(rng);
      ModelParams p;
      if (d == 2) {
        p = ModelParams::from_mu((1 + 3 * u(rng)) / (2 * beta), beta, 0);
        p.epsilon = 0.02 * u(rng);
      } else {
        const double edge = d == 1 ? 2 * std::sqrt(2 * beta) : std::sqrt(2 * beta) / kFourPi;
        p = ModelParams::make(d, -edge * (0.2 + 0.6 * u(rng)), beta, 0);
        p.epsilon = 0.1 * std::abs(p.alpha) * u(rng);
      }
      CAPTURE(d);
      CAPTURE(p.alpha);
      CHECK(perturbative_prediction(p).resonance_first_order.imag() < 0);
      CHECK(resonance_newton(p).energy.imag() < 0);
    }
  }
}

TEST_CASE("no spurious embedded roots on the physical sheet") {
  const ModelParams ps[] = {ModelParams::make(1, -1, 1, 0.05), ModelParams::from_mu(2, 1, 0.01), d3(0.1)};
  for (const ModelParams& p : ps) {
    const double e0 = unperturbed_upper(p);
    const double gap = 0.05;
    double smallest = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 4000; ++k) {
      const double lambda = -1.0 + 2.0 * k / 4000.0;
      if (std::abs(lambda - e0) < gap) continue;
      const GammaMatrix g = gamma_eps(p, cplx(lambda, 0.0));
      smallest = std::min(smallest, std::abs(g.det()) / g.entries.squaredNorm());
    }
    CAPTURE(p.dim);
    CHECK(smallest > 1e-6);
  }
}

TEST_CASE("solve_spectrum assembles the pieces") {
  const SpectralResult a = solve_spectrum(ModelParams::make(3, kAlpha3, 1, 0));
  CHECK(a.bound_states.size() == 1);
  CHECK(a.embedded);
  CHECK_FALSE(a.resonance);

  const SpectralResult b = solve_spectrum(d3(0.1));
  CHECK(b.bound_states.size() == 1);
  CHECK_FALSE(b.embedded);
  REQUIRE(b.resonance);
  CHECK(b.resonance->energy.imag() < 0);
  CHECK(b.resonance->sheets == SheetPair::resonance());

  const SpectralResult c = solve_spectrum(ModelParams::make(3, 0.5, 1, 0.1));
  CHECK(c.bound_states.empty());
  CHECK_FALSE(c.resonance);
}
