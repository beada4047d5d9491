#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <reslab/reslab.hpp>

namespace reslab::cli {

inline constexpr const char* kSchema = "resonance-lab/1";

enum class Command { Spectrum, Resonance, Decay, Kernel, Sweep };
enum class Method { FixedPoint, Newton, Both };
enum class Format { Json, Csv };

std::string to_string(Command c);
std::string to_string(Method m);
std::string to_string(Format f);

struct RunConfig {
  Command command = Command::Spectrum;

  int dim = 3;
  double alpha = -0.039788735772973836;  // -1/(8 pi)
  std::optional<double> mu;              // d = 2 alternative to alpha
  double beta = 1.0;
  double epsilon = 0.0;

  double tol = 1e-13;
  int max_iter = 100;
  Method method = Method::Both;

  std::optional<double> delta;  // energy window half-width
  double quad_tol = 1e-12;
  int quad_max_nodes = 512;

  std::vector<double> eps_list;  // sweep; empty: eps * 2^-j, j < sweep_count
  int sweep_count = 5;
  std::vector<double> times;     // decay; empty: t_count points on [0, t_span / gamma]
  int t_count = 11;
  double t_span = 5.0;
  std::vector<Point> x{{0.3, 0.0, 0.0}};
  std::vector<Point> xp{{0.0, 0.5, 0.0}};
  std::vector<cplx> z{{-2.5, 0.3}};  // kernel energies

  Format format = Format::Json;
  std::string output;  // empty: standard output

  /// Model record implied by the flags; throws DomainError on inconsistency.
  ModelParams model() const;
  /// Rejects unsupported combinations with an actionable message (DomainError).
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the command line (args excludes the program name).  Returns the exit
/// status: 0 success, 2 validation error, 3 solver non-convergence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes an already parsed configuration, writing the report to `out`.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace reslab::cli
