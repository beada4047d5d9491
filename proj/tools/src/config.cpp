#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reslab_cli/cli.hpp"

namespace reslab::cli {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::Spectrum:
      return "spectrum";
    case Command::Resonance:
      return "resonance";
    case Command::Decay:
      return "decay";
    case Command::Kernel:
      return "kernel";
    case Command::Sweep:
      return "sweep";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::FixedPoint:
      return "fixed-point";
    case Method::Newton:
      return "newton";
    case Method::Both:
      return "both";
  }
  return "?";
}

std::string to_string(Format f) { return f == Format::Json ? "json" : "csv"; }

namespace {

template <class E>
E parse_enum(const std::string& s, std::initializer_list<E> values) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw DomainError("unknown value '" + s + "'");
}

}  // namespace

ModelParams RunConfig::model() const {
  if (dim < 1 || dim > 3) {
    throw DomainError("--dim must be 1, 2 or 3: for d >= 4 the Laplacian restricted off a point is "
                      "essentially self-adjoint (deficiency indices (0,0)), so no point interaction exists");
  }
  if (mu) {
    if (dim != 2) throw DomainError("--mu is only meaningful for --dim 2");
    ModelParams p = ModelParams::from_mu(*mu, beta, epsilon);
    if (std::abs(p.alpha - alpha) > 1e-12 * std::max(1.0, std::abs(alpha))) {
      throw DomainError("--alpha and --mu are inconsistent: mu = " + std::to_string(*mu) + " implies alpha = " +
                        std::to_string(p.alpha));
    }
    return p;
  }
  return ModelParams::make(dim, alpha, beta, epsilon);
}

void RunConfig::validate() const {
  const ModelParams p = model();
  if (!(tol > 0.0)) throw DomainError("--tol must be positive");
  if (max_iter < 1) throw DomainError("--max-iter must be at least 1");
  if (!(quad_tol > 0.0)) throw DomainError("--quad-tol must be positive");
  if (quad_max_nodes < 32) throw DomainError("--quad-max-nodes must be at least 32");
  if (method == Method::FixedPoint && p.dim != 3) {
    throw DomainError("--method fixed-point is only available for --dim 3 (use newton)");
  }
  if (command == Command::Resonance) {
    if (!(p.epsilon > 0.0)) throw DomainError("resonance requires --eps > 0");
    if (!p.embedding_condition()) throw DomainError("resonance requires E_{0,+} embedded in (-beta, beta)");
  }
  if (command == Command::Decay) {
    if (p.dim != 3) throw DomainError("decay is only available for --dim 3");
    if (!(p.epsilon > 0.0)) throw DomainError("decay requires --eps > 0");
    if (t_count < 1) throw DomainError("--t-count must be at least 1");
    if (!(t_span > 0.0)) throw DomainError("--t-span must be positive");
  }
  if (command == Command::Sweep) {
    if (eps_list.empty() && !(p.epsilon > 0.0)) throw DomainError("sweep needs --eps-list or --eps > 0");
    if (eps_list.empty() && sweep_count < 2) throw DomainError("--sweep-count must be at least 2");
    for (double e : eps_list) {
      if (!(e > 0.0)) throw DomainError("--eps-list entries must be positive");
    }
    if (!p.embedding_condition()) throw DomainError("sweep requires E_{0,+} embedded in (-beta, beta)");
  }
  if ((command == Command::Decay || command == Command::Kernel) && (x.empty() || xp.empty())) {
    throw DomainError("--x and --xp need at least one point");
  }
  if (command == Command::Kernel && z.empty()) throw DomainError("--z needs at least one energy");
}

namespace {

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }
Point point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["dim"] = c.dim;
  j["alpha"] = c.alpha;
  j["mu"] = c.mu ? json(*c.mu) : json(nullptr);
  j["beta"] = c.beta;
  j["epsilon"] = c.epsilon;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["method"] = to_string(c.method);
  j["delta"] = c.delta ? json(*c.delta) : json(nullptr);
  j["quad_tol"] = c.quad_tol;
  j["quad_max_nodes"] = c.quad_max_nodes;
  j["eps_list"] = c.eps_list;
  j["sweep_count"] = c.sweep_count;
  j["times"] = c.times;
  j["t_count"] = c.t_count;
  j["t_span"] = c.t_span;
  j["x"] = json::array();
  for (const Point& p : c.x) j["x"].push_back(point_json(p));
  j["xp"] = json::array();
  for (const Point& p : c.xp) j["xp"].push_back(point_json(p));
  j["z"] = json::array();
  for (const cplx& z : c.z) j["z"].push_back(json::array({z.real(), z.imag()}));
  j["format"] = to_string(c.format);
  j["output"] = c.output;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.command = parse_enum(j.at("command").get<std::string>(),
                         {Command::Spectrum, Command::Resonance, Command::Decay, Command::Kernel, Command::Sweep});
  c.dim = j.at("dim").get<int>();
  c.alpha = j.at("alpha").get<double>();
  if (!j.at("mu").is_null()) c.mu = j.at("mu").get<double>();
  c.beta = j.at("beta").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.tol = j.at("tol").get<double>();
  c.max_iter = j.at("max_iter").get<int>();
  c.method = parse_enum(j.at("method").get<std::string>(), {Method::FixedPoint, Method::Newton, Method::Both});
  if (!j.at("delta").is_null()) c.delta = j.at("delta").get<double>();
  c.quad_tol = j.at("quad_tol").get<double>();
  c.quad_max_nodes = j.at("quad_max_nodes").get<int>();
  c.eps_list = j.at("eps_list").get<std::vector<double>>();
  c.sweep_count = j.at("sweep_count").get<int>();
  c.times = j.at("times").get<std::vector<double>>();
  c.t_count = j.at("t_count").get<int>();
  c.t_span = j.at("t_span").get<double>();
  c.x.clear();
  for (const json& p : j.at("x")) c.x.push_back(point_from(p));
  c.xp.clear();
  for (const json& p : j.at("xp")) c.xp.push_back(point_from(p));
  c.z.clear();
  for (const json& z : j.at("z")) c.z.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  c.format = parse_enum(j.at("format").get<std::string>(), {Format::Json, Format::Csv});
  c.output = j.at("output").get<std::string>();
  return c;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need two or more paired samples");
  double sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: samples must be positive");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - sx / n;
    num += dx * (std::log(y[i]) - sy / n);
    den += dx * dx;
  }
  return num / den;
}

}  // namespace reslab::cli
