#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "reslab_cli/cli.hpp"

namespace reslab::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json optional_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Tabular view shared by the CSV writer and the JSON "rows" field.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;  // optional leading text column
  std::string label_column;
  std::string footer;
};

struct Report {
  json result;
  json metadata = json::object();
  Table table;
};

json table_rows(const Table& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    json row;
    if (!t.label_column.empty()) row[t.label_column] = t.labels[i];
    for (std::size_t k = 0; k < t.columns.size(); ++k) row[t.columns[k]] = optional_json(t.rows[i][k]);
    rows.push_back(row);
  }
  return rows;
}

void write_csv(const Table& t, std::ostream& os) {
  os << "# columns: ";
  if (!t.label_column.empty()) os << t.label_column << ',';
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (!t.label_column.empty()) os << t.labels[i] << ',';
    for (std::size_t k = 0; k < t.rows[i].size(); ++k) {
      if (k) os << ',';
      if (std::isfinite(t.rows[i][k])) os << num(t.rows[i][k]);
    }
    os << '\n';
  }
  if (!t.footer.empty()) os << "# " << t.footer << '\n';
}

json params_json(const ModelParams& p) {
  json j{{"dim", p.dim}, {"alpha", p.alpha}, {"beta", p.beta}, {"epsilon", p.epsilon}};
  if (p.dim == 2) j["mu"] = p.mu();
  return j;
}

const double kNaN = std::nan("");

QuadratureSpec quad_spec(const RunConfig& c) { return {c.quad_tol, 16, c.quad_max_nodes}; }

json quad_metadata(const RunConfig& c) {
  const QuadratureSpec q = quad_spec(c);
  const HsSpec hs;
  return {{"rel_tol", q.rel_tol},     {"initial_nodes", q.initial_nodes}, {"max_nodes", q.max_nodes},
          {"hs_panels", hs.panels},   {"hs_nodes", hs.nodes},             {"hs_tail_tol", hs.tail_tol}};
}

// ---------------------------------------------------------------------------

Report run_spectrum(const RunConfig& c) {
  const ModelParams p = c.model();
  const SpectralResult s = solve_spectrum(p, c.tol);
  std::optional<PerturbativePrediction> fo;
  if (p.embedding_condition()) fo = perturbative_prediction(p);

  Report r;
  r.result["params"] = params_json(p);
  r.result["bound_states"] = s.bound_states;
  r.result["embedded"] = s.embedded ? json(*s.embedded) : json(nullptr);
  r.result["essential_spectrum_threshold"] = s.essential_spectrum_threshold;
  if (s.resonance) {
    r.result["resonance"] = {{"energy", cjson(s.resonance->energy)},
                             {"sheets", {to_string(s.resonance->sheets.minus), to_string(s.resonance->sheets.plus)}},
                             {"iterations", s.resonance->iterations},
                             {"residual", s.resonance->residual}};
  } else {
    r.result["resonance"] = nullptr;
  }
  if (has_point_spectrum(p)) {
    r.result["unperturbed"] = {{"lower", unperturbed_lower(p)}, {"upper", unperturbed_upper(p)}};
  } else {
    r.result["unperturbed"] = nullptr;
  }
  if (fo) {
    r.result["first_order"] = {{"bound", fo->bound_first_order},
                               {"resonance", cjson(fo->resonance_first_order)},
                               {"in_regime", fo->in_regime},
                               {"validity", fo->validity}};
  } else {
    r.result["first_order"] = nullptr;
  }

  Table& t = r.table;
  t.label_column = "kind";
  t.columns = {"re", "im", "first_order_re", "first_order_im"};
  for (std::size_t i = 0; i < s.bound_states.size(); ++i) {
    const bool lowest = i == 0 && fo && p.epsilon > 0.0;
    t.labels.push_back("bound");
    t.rows.push_back({s.bound_states[i], 0.0, lowest ? fo->bound_first_order : kNaN, lowest ? 0.0 : kNaN});
  }
  if (s.embedded) {
    t.labels.push_back("embedded");
    t.rows.push_back({*s.embedded, 0.0, kNaN, kNaN});
  }
  if (s.resonance) {
    t.labels.push_back("resonance");
    t.rows.push_back({s.resonance->energy.real(), s.resonance->energy.imag(), fo->resonance_first_order.real(),
                      fo->resonance_first_order.imag()});
  }
  t.labels.push_back("threshold");
  t.rows.push_back({s.essential_spectrum_threshold, 0.0, kNaN, kNaN});
  return r;
}

Report run_resonance(const RunConfig& c) {
  const ModelParams p = c.model();
  const PerturbativePrediction fo = perturbative_prediction(p);
  Report r;
  r.result["params"] = params_json(p);
  r.result["first_order"] = cjson(fo.resonance_first_order);
  r.result["sheets"] = {to_string(Sheet::First), to_string(Sheet::Second)};
  r.table.label_column = "method";
  r.table.columns = {"re", "im", "iterations", "residual"};

  std::optional<cplx> e_newton, e_fp;
  if (c.method != Method::FixedPoint) {
    const NewtonResult n = resonance_newton(p, fo.resonance_first_order, SheetPair::resonance(), c.tol, c.max_iter);
    e_newton = n.energy;
    r.result["newton"] = {{"energy", cjson(n.energy)}, {"iterations", n.iterations}, {"residual", n.residual}};
    r.table.labels.push_back("newton");
    r.table.rows.push_back({n.energy.real(), n.energy.imag(), double(n.iterations), n.residual});
  } else {
    r.result["newton"] = nullptr;
  }
  if (c.method != Method::Newton && p.dim == 3) {
    const FixedPointResult f = resonance_fixed_point(p, c.tol * std::abs(p.alpha), c.max_iter);
    e_fp = f.energy;
    r.result["fixed_point"] = {
        {"energy", cjson(f.energy)}, {"iterations", f.iterations}, {"contraction_ratio", f.contraction_ratio}};
    r.table.labels.push_back("fixed-point");
    r.table.rows.push_back({f.energy.real(), f.energy.imag(), double(f.iterations), kNaN});
  } else {
    r.result["fixed_point"] = nullptr;
  }
  if (e_newton && e_fp) {
    const double d = std::abs(*e_newton - *e_fp);
    r.result["agreement"] = {{"abs", d}, {"rel", d / std::abs(*e_newton)}};
  } else {
    r.result["agreement"] = nullptr;
  }
  return r;
}

Report run_decay(const RunConfig& c) {
  const ModelParams p = c.model();
  const EnergyWindow w = EnergyWindow::make(p, c.delta);
  const QuadratureSpec q = quad_spec(c);
  const ProjectorModel m(p, w);
  const cplx e_res = m.resonance();
  const double gamma = -e_res.imag();

  std::vector<double> times = c.times;
  if (times.empty()) {
    const double span = c.t_span / gamma;
    for (int k = 0; k < c.t_count; ++k) times.push_back(c.t_count == 1 ? 0.0 : span * k / (c.t_count - 1));
  }
  const Point& x = c.x.front();
  const Point& xp = c.xp.front();
  const std::vector<SurvivalRow> rows = survival_curve(p, w, times, x, xp, q);
  const DecayDecomposition dd = decay_decomposition(p, w, {}, {}, q);
  const ShortTimeTerms st = short_time_terms(p, w, x, xp, q);

  // Numeric bound on the short-time remainder coefficient.
  const double r0 = norm(x, 3), r1 = norm(xp, 3);
  const double e2 = p.epsilon * p.epsilon;
  double d_bound = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double t = std::ldexp(0.1 / std::abs(e_res), -k);
    const cplx rem = m.direct(t, r0, r1, q) - st.a + st.b * (1.0 - std::exp(-cplx(0, 1) * e_res * t)) - st.c * e2 * t;
    d_bound = std::max(d_bound, std::abs(rem) / (e2 * t * t));
  }

  Report r;
  r.result["params"] = params_json(p);
  r.result["window"] = {{"center", w.center},
                        {"half_width", w.half_width},
                        {"lambda", {w.lambda_lo(), w.lambda_hi()}},
                        {"xi", {w.xi_lo, w.xi_hi}}};
  r.result["decomposition"] = {{"b_eps", dd.b_eps},
                               {"gamma_eps", dd.gamma_eps},
                               {"rho", dd.rho},
                               {"quartic", {{"xi1", dd.quartic.xi1},
                                            {"xi2", dd.quartic.xi2},
                                            {"xi3", cjson(dd.quartic.xi3)},
                                            {"xi3_conj", cjson(dd.quartic.xi3_conj)}}},
                               {"remainder_hs", dd.remainder_hs},
                               {"probe_times", dd.probe_times}};
  r.result["short_time"] = {
      {"a", cjson(st.a)}, {"b", cjson(st.b)}, {"c", cjson(st.c)}, {"d_bound", d_bound}};
  r.result["points"] = {{"x", {x[0], x[1], x[2]}}, {"xp", {xp[0], xp[1], xp[2]}}};

  std::vector<double> ts, p1;
  for (const SurvivalRow& row : rows) {
    if (row.abs_p1 > 0.0) {
      ts.push_back(row.t);
      p1.push_back(row.abs_p1);
    }
  }
  r.result["fitted_gamma"] = ts.size() >= 2 ? json(fit_decay_rate(ts, p1)) : json(nullptr);

  json nodes = json::array();
  for (double t : times) {
    QuadratureReport rep;
    m.direct(t, r0, r1, q, &rep);
    nodes.push_back(rep.total_nodes);
  }
  r.metadata["direct_nodes"] = nodes;

  Table& t = r.table;
  t.columns = {"t", "abs_p", "arg_p", "normalized", "abs_p1", "abs_l", "abs_b"};
  for (const SurvivalRow& row : rows) {
    t.rows.push_back({row.t, row.abs_p, row.arg_p, row.normalized, row.abs_p1, row.abs_l, row.abs_b});
  }
  return r;
}

Report run_kernel(const RunConfig& c) {
  const ModelParams p = c.model();
  Report r;
  r.result["params"] = params_json(p);
  Table& t = r.table;
  t.columns = {"z_re", "z_im", "x0", "x1", "x2", "xp0", "xp1", "xp2", "sigma", "sigmap", "re", "im"};
  for (const cplx& z : c.z) {
    for (const Point& x : c.x) {
      for (const Point& xp : c.xp) {
        for (Channel s : {Channel::Plus, Channel::Minus}) {
          for (Channel sp : {Channel::Plus, Channel::Minus}) {
            const cplx v = resolvent_kernel(p, z, x, xp, s, sp);
            t.rows.push_back({z.real(), z.imag(), x[0], x[1], x[2], xp[0], xp[1], xp[2], sign(s), sign(sp),
                              v.real(), v.imag()});
          }
        }
      }
    }
  }
  return r;
}

struct SweepRow {
  double eps, bound, bound_fo, re, im, fo_re, fo_im;
};

Report run_sweep(const RunConfig& c) {
  const ModelParams base = c.model();
  std::vector<double> eps = c.eps_list;
  if (eps.empty()) {
    for (int j = 0; j < c.sweep_count; ++j) eps.push_back(std::ldexp(base.epsilon, -j));
  }
  std::vector<std::future<SweepRow>> jobs;
  for (double e : eps) {
    jobs.push_back(std::async(std::launch::async, [&c, base, e] {
      ModelParams p = base;
      p.epsilon = e;
      p.validate();
      const PerturbativePrediction fo = perturbative_prediction(p);
      const std::vector<double> bs = bound_states(p, c.tol);
      if (bs.empty()) throw ConvergenceError("sweep: no bound state found at epsilon = " + num(e));
      const NewtonResult n = resonance_newton(p, fo.resonance_first_order, SheetPair::resonance(), c.tol, c.max_iter);
      return SweepRow{e, bs.front(), fo.bound_first_order, n.energy.real(), n.energy.imag(),
                      fo.resonance_first_order.real(), fo.resonance_first_order.imag()};
    }));
  }
  Report r;
  r.result["params"] = params_json(base);
  Table& t = r.table;
  t.columns = {"eps", "bound", "bound_first_order", "res_re", "res_im", "first_order_re", "first_order_im",
               "dev_bound", "dev_re", "dev_im"};
  std::vector<double> dev_b, dev_re, dev_im;
  for (auto& job : jobs) {
    const SweepRow s = job.get();  // input order regardless of completion order
    dev_b.push_back(std::abs(s.bound - s.bound_fo));
    dev_re.push_back(std::abs(s.re - s.fo_re));
    dev_im.push_back(std::abs(s.im - s.fo_im));
    t.rows.push_back({s.eps, s.bound, s.bound_fo, s.re, s.im, s.fo_re, s.fo_im, dev_b.back(), dev_re.back(),
                      dev_im.back()});
  }
  auto slope = [&](const std::vector<double>& y) {
    try {
      return loglog_slope(eps, y);
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  const double sb = slope(dev_b), sr = slope(dev_re), si = slope(dev_im);
  r.result["footer"] = {{"slope_dev_bound", optional_json(sb)},
                        {"slope_dev_re", optional_json(sr)},
                        {"slope_dev_im", optional_json(si)}};
  t.footer = "slopes: dev_bound=" + num(sb) + " dev_re=" + num(sr) + " dev_im=" + num(si);
  return r;
}

// ---------------------------------------------------------------------------

void add_model_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--dim", c.dim, "Spatial dimension d in {1,2,3}")->capture_default_str();
  sub->add_option("--alpha", c.alpha, "Diagonal coupling alpha")->capture_default_str();
  sub->add_option("--mu", "d = 2 only: mu = e^{2(gamma + 2 pi alpha)}/4 > 0 (derives alpha)")->type_name("FLOAT");
  sub->add_option("--beta", c.beta, "Half level splitting beta > 0")->capture_default_str();
  sub->add_option("--eps", c.epsilon, "Channel coupling epsilon >= 0")->capture_default_str();
  sub->add_option("--tol", c.tol, "Root-finding tolerance (fixed point uses tol*|alpha| on xi)")
      ->capture_default_str();
  sub->add_option("--max-iter", c.max_iter, "Iteration limit")->capture_default_str();
  sub->add_option("--format", "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->type_name("TEXT")
      ->default_str("json");
  sub->add_option("--output,-o", c.output, "Output file (default: standard output)");
}

void add_window_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--delta", "Energy window half-width (default eps * 4 pi |alpha|)")->type_name("FLOAT");
  sub->add_option("--quad-tol", c.quad_tol, "Relative quadrature tolerance")->capture_default_str();
  sub->add_option("--quad-max-nodes", c.quad_max_nodes, "Node limit per panel")->capture_default_str();
}

Point parse_point(const std::string& s) {
  Point p{0.0, 0.0, 0.0};
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) throw DomainError("point '" + s + "' has more than 3 coordinates");
    try {
      std::size_t used = 0;
      p[i++] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("cannot parse point '" + s + "'");
    }
  }
  if (i == 0) throw DomainError("empty point");
  return p;
}

cplx parse_complex(const std::string& s) {
  if (std::count(s.begin(), s.end(), ',') > 1) throw DomainError("energy '" + s + "' must be 're,im'");
  const Point v = parse_point(s);
  return {v[0], v[1]};
}

}  // namespace

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    Report r;
    switch (config.command) {
      case Command::Spectrum:
        r = run_spectrum(config);
        break;
      case Command::Resonance:
        r = run_resonance(config);
        break;
      case Command::Decay:
        r = run_decay(config);
        break;
      case Command::Kernel:
        r = run_kernel(config);
        break;
      case Command::Sweep:
        r = run_sweep(config);
        break;
    }

    std::ofstream file;
    if (!config.output.empty()) {
      file.open(config.output);
      if (!file) {
        err << "error: cannot open output file '" << config.output << "'\n";
        return 2;
      }
    }
    std::ostream& os = config.output.empty() ? out : file;
    if (config.format == Format::Json) {
      json doc;
      doc["schema"] = kSchema;
      doc["command"] = to_string(config.command);
      doc["config"] = to_json(config);
      r.metadata["quadrature"] = quad_metadata(config);
      r.metadata["version"] = "1.0.0";
      doc["metadata"] = r.metadata;
      doc["result"] = r.result;
      doc["result"]["rows"] = table_rows(r.table);
      os << doc.dump(2) << '\n';
    } else {
      write_csv(r.table, os);
    }
    return 0;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    // Classification and singularity failures are caused by the chosen parameters.
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"reslab: spectra, resonances and decay of a two-channel point interaction"};
  app.name("reslab");
  app.require_subcommand(1);

  struct Sub {
    Command command;
    CLI::App* app;
  };
  std::vector<Sub> subs;
  auto add = [&](Command cmd, const std::string& help) {
    CLI::App* s = app.add_subcommand(to_string(cmd), help);
    add_model_options(s, c);
    subs.push_back({cmd, s});
    return s;
  };

  add(Command::Spectrum, "Bound states, embedded level or resonance, with first-order predictions");
  CLI::App* res = add(Command::Resonance, "Resonance from Newton and (d = 3) the fixed-point recurrence");
  res->add_option("--method", "Solver: fixed-point, newton or both")
      ->check(CLI::IsMember({"fixed-point", "newton", "both"}))
      ->type_name("TEXT")
      ->default_str("both");
  CLI::App* dec = add(Command::Decay, "Survival table and Lorentzian decomposition (d = 3)");
  add_window_options(dec, c);
  dec->add_option("--times", c.times, "Explicit time grid (comma separated)")->delimiter(',');
  dec->add_option("--t-count", c.t_count, "Number of times on [0, t-span/gamma] without --times")
      ->capture_default_str();
  dec->add_option("--t-span", c.t_span, "Time span in units of 1/gamma")->capture_default_str();
  std::vector<std::string> xs, xps, zs;
  dec->add_option("--x", xs, "Point x as 'x0,x1,x2' (default 0.3,0,0)");
  dec->add_option("--xp", xps, "Point x' as 'x0,x1,x2' (default 0,0.5,0)");
  CLI::App* ker = add(Command::Kernel, "Resolvent kernel R_eps(z; x, x') for all channel pairs");
  ker->add_option("--x", xs, "Points x as 'x0,x1,x2' (default 0.3,0,0)");
  ker->add_option("--xp", xps, "Points x' as 'x0,x1,x2' (default 0,0.5,0)");
  ker->add_option("--z", zs, "Energies as 're,im' (default -2.5,0.3)");
  CLI::App* sw = add(Command::Sweep, "First-order deviations over an epsilon ladder, with fitted slopes");
  sw->add_option("--eps-list", c.eps_list, "Explicit epsilon values (comma separated)")->delimiter(',');
  sw->add_option("--sweep-count", c.sweep_count, "Without --eps-list: eps * 2^-j for j < count")
      ->capture_default_str();

  std::vector<const char*> argv{"reslab"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    for (const Sub& s : subs) {
      if (!s.app->parsed()) continue;
      c.command = s.command;
      const bool has_alpha = s.app->count("--alpha") > 0;
      if (s.app->count("--mu") > 0) {
        c.mu = s.app->get_option("--mu")->as<double>();
        if (!has_alpha) c.alpha = ModelParams::alpha_from_mu(*c.mu);
      }
      if (auto* opt = s.app->get_option_no_throw("--delta"); opt && opt->count() > 0) c.delta = opt->as<double>();
      if (s.app->count("--format") > 0) c.format = s.app->get_option("--format")->as<std::string>() == "csv" ? Format::Csv : Format::Json;
      if (auto* opt = s.app->get_option_no_throw("--method"); opt && opt->count() > 0) {
        const std::string m = opt->as<std::string>();
        c.method = m == "fixed-point" ? Method::FixedPoint : m == "newton" ? Method::Newton : Method::Both;
      }
    }
    if (!xs.empty()) {
      c.x.clear();
      for (const auto& s : xs) c.x.push_back(parse_point(s));
    }
    if (!xps.empty()) {
      c.xp.clear();
      for (const auto& s : xps) c.xp.push_back(parse_point(s));
    }
    if (!zs.empty()) {
      c.z.clear();
      for (const auto& s : zs) c.z.push_back(parse_complex(s));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return execute(c, out, err);
}

}  // namespace reslab::cli
