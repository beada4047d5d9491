#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <reslab_cli/cli.hpp>
#include <sstream>
#include <string>
#include <vector>

using namespace reslab;
using namespace reslab::cli;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

json invoke_json(std::vector<std::string> args) {
  const Outcome o = invoke(std::move(args));
  REQUIRE_MESSAGE(o.code == 0, o.err);
  return json::parse(o.out);
}

std::size_t count_fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("spectrum example") {
  const json j = invoke_json({"spectrum", "--dim", "3", "--alpha", "-0.039789", "--beta", "1", "--eps", "0"});
  CHECK(j["schema"] == kSchema);
  CHECK(j["command"] == "spectrum");
  const double s = 4 * pi * 0.039789;
  REQUIRE(j["result"]["bound_states"].size() == 1);
  CHECK(j["result"]["bound_states"][0].get<double>() == doctest::Approx(-1.0 - s * s).epsilon(1e-12));
  CHECK(j["result"]["bound_states"][0].get<double>() == doctest::Approx(-1.25).epsilon(1e-5));
  CHECK(j["result"]["embedded"].get<double>() == doctest::Approx(0.75).epsilon(1e-5));
  CHECK(j["result"]["resonance"].is_null());
  CHECK(j["metadata"].contains("quadrature"));
}

TEST_CASE("resonance example runs both solvers and reports their agreement") {
  const json j = invoke_json(
      {"resonance", "--dim", "3", "--alpha", "-0.039789", "--beta", "1", "--eps", "0.0039789", "--method", "both"});
  const json& r = j["result"];
  CHECK(r.contains("newton"));
  CHECK(r.contains("fixed_point"));
  CHECK(r["agreement"]["abs"].get<double>() < 1e-10);
  CHECK(r["newton"]["energy"][1].get<double>() < 0.0);
  CHECK(r["rows"].size() == 2);

  const json n = invoke_json({"resonance", "--eps", "0.004", "--method", "newton"});
  CHECK(n["result"]["rows"].size() == 1);
  CHECK((!n["result"].contains("fixed_point") || n["result"]["fixed_point"].is_null()));
}

TEST_CASE("validation errors exit with 2 and write only to the error stream") {
  const std::vector<std::vector<std::string>> cases = {
      {"spectrum", "--dim", "4"},
      {"spectrum", "--dim", "0"},
      {"spectrum", "--beta", "0"},
      {"spectrum", "--beta", "-1"},
      {"spectrum", "--eps", "-0.1"},
      {"resonance", "--dim", "1", "--alpha", "-1", "--eps", "0.01", "--method", "fixed-point"},
      {"resonance", "--eps", "0"},
      {"resonance", "--alpha", "0.5", "--eps", "0.01"},
      {"decay", "--dim", "1", "--alpha", "-1", "--eps", "0.01"},
      {"decay", "--eps", "0"},
      {"decay", "--eps", "0.004", "--delta", "5"},
      {"decay", "--eps", "0.004", "--times", "1,0.5"},
      {"kernel", "--z", "0.5,0"},
      {"kernel", "--x", "1,2,3,4"},
      {"kernel", "--z", "-2,0.1,0"},
      {"kernel", "--x", "0.3,abc"},
      {"spectrum", "--format", "xml"},
      {"spectrum", "--no-such-flag"},
      {"frobnicate"},
      {},
  };
  for (const auto& args : cases) {
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    CAPTURE(joined);
    const Outcome o = invoke(args);
    CHECK(o.code == 2);
    CHECK(o.out.empty());
    CHECK_FALSE(o.err.empty());
  }
  const Outcome d4 = invoke({"spectrum", "--dim", "4"});
  CHECK(d4.err.find("1, 2 or 3") != std::string::npos);
  CHECK(d4.err.find("essentially self-adjoint") != std::string::npos);
}

TEST_CASE("solver non-convergence exits with 3") {
  const Outcome o = invoke({"resonance", "--eps", "0.004", "--max-iter", "1", "--method", "newton"});
  CHECK(o.code == 3);
  CHECK(o.out.empty());
  CHECK(o.err.find("iteration") != std::string::npos);
}

TEST_CASE("help exits with 0") {
  const Outcome o = invoke({"--help"});
  CHECK(o.code == 0);
  const Outcome s = invoke({"decay", "--help"});
  CHECK(s.code == 0);
  CHECK(s.out.find("--t-count") != std::string::npos);
  CHECK(s.out.find("[11]") != std::string::npos);
}

TEST_CASE("d = 2 accepts alpha or mu") {
  const json a = invoke_json({"spectrum", "--dim", "2", "--mu", "1"});
  CHECK(a["result"]["bound_states"][0].get<double>() == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(a["result"]["params"]["alpha"].get<double>() == doctest::Approx(ModelParams::alpha_from_mu(1.0)));

  std::ostringstream alpha;
  alpha.precision(17);
  alpha << ModelParams::alpha_from_mu(1.0);
  const json b = invoke_json({"spectrum", "--dim", "2", "--alpha", alpha.str()});
  CHECK(b["result"]["bound_states"][0].get<double>() == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(invoke({"spectrum", "--dim", "2", "--mu", "1", "--alpha", alpha.str()}).code == 0);
  CHECK(invoke({"spectrum", "--dim", "2", "--mu", "1", "--alpha", "0.3"}).code == 2);
  CHECK(invoke({"spectrum", "--dim", "3", "--mu", "1"}).code == 2);
  CHECK(invoke({"spectrum", "--dim", "2", "--mu", "-1"}).code == 2);
}

TEST_CASE("config echo round-trips through JSON") {
  const std::vector<std::vector<std::string>> cases = {
      {"spectrum", "--dim", "2", "--mu", "2", "--eps", "0.001"},
      {"resonance", "--eps", "0.004", "--tol", "1e-12", "--max-iter", "50"},
      {"decay", "--eps", "0.004", "--times", "0,10,20", "--delta", "0.01", "--x", "0.1,0.2,0.3"},
      {"kernel", "--eps", "0.01", "--z", "-2.5,0.3", "--z", "-3,1", "--xp", "0,0,1"},
      {"sweep", "--dim", "1", "--alpha", "-1", "--eps-list", "0.1,0.05"},
  };
  for (const auto& args : cases) {
    const json j = invoke_json(args);
    const RunConfig c = config_from_json(j["config"]);
    CHECK(to_json(c) == j["config"]);
    CHECK(config_from_json(to_json(c)) == c);
    CHECK(to_string(c.command) == j["command"].get<std::string>());
  }
}

TEST_CASE("output is reproducible and can go to a file") {
  const std::vector<std::string> args = {"decay", "--eps", "0.004", "--t-count", "4"};
  const Outcome a = invoke(args), b = invoke(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["result"]["rows"].size() == 4);
  CHECK(j["metadata"].contains("direct_nodes"));

  const std::string path = "reslab_cli_test_output.json";
  std::vector<std::string> to_file = args;
  to_file.insert(to_file.end(), {"-o", path});
  const Outcome f = invoke(to_file);
  CHECK(f.code == 0);
  CHECK(f.out.empty());
  std::ifstream in(path);
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json from_file = json::parse(content);
  CHECK(from_file["config"]["output"] == path);
  from_file["config"]["output"] = "";
  CHECK(from_file == j);
  std::remove(path.c_str());
}

TEST_CASE("CSV header documents the columns and the column count is constant") {
  const std::vector<std::vector<std::string>> cases = {
      {"spectrum", "--eps", "0.004"},
      {"spectrum", "--eps", "0"},
      {"resonance", "--eps", "0.004"},
      {"decay", "--eps", "0.004", "--t-count", "3"},
      {"kernel", "--eps", "0.004", "--x", "0.3,0,0", "--x", "1,1,1"},
      {"sweep", "--eps", "0.004", "--sweep-count", "3"},
  };
  for (const auto& args : cases) {
    std::vector<std::string> a = args;
    a.insert(a.end(), {"--format", "csv"});
    const Outcome o = invoke(a);
    REQUIRE(o.code == 0);
    std::istringstream in(o.out);
    std::string line;
    std::getline(in, line);
    REQUIRE(line.rfind("# columns: ", 0) == 0);
    const std::size_t n = count_fields(line.substr(11));
    int data = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      CHECK(count_fields(line) == n);
      ++data;
    }
    CHECK(data > 0);
  }
}

TEST_CASE("kernel command covers every z, x, x' and channel pair") {
  const json j = invoke_json({"kernel", "--eps", "0.004", "--z", "-2.5,0.3", "--z", "-1.5,-0.2", "--x", "0.3,0,0",
                              "--x", "0,0.2,0.1", "--xp", "0,0.5,0"});
  const json& rows = j["result"]["rows"];
  REQUIRE(rows.size() == 2 * 2 * 1 * 4);
  const ModelParams p = ModelParams::make(3, -0.039788735772973836, 1, 0.004);
  const cplx v = resolvent_kernel(p, cplx(-2.5, 0.3), {0.3, 0, 0}, {0, 0.5, 0}, Channel::Plus, Channel::Minus);
  CHECK(rows[1]["re"].get<double>() == v.real());
  CHECK(rows[1]["im"].get<double>() == v.imag());
}

TEST_CASE("sweep keeps input order and reports slopes near 4") {
  const json j = invoke_json({"sweep", "--eps-list", "0.001,0.004,0.002,0.0005"});
  const json& rows = j["result"]["rows"];
  REQUIRE(rows.size() == 4);
  CHECK(rows[0]["eps"] == 0.001);
  CHECK(rows[1]["eps"] == 0.004);
  CHECK(rows[2]["eps"] == 0.002);
  CHECK(rows[3]["eps"] == 0.0005);
  for (const char* k : {"dev_bound", "dev_re", "dev_im"})
    CHECK(j["result"]["footer"][std::string("slope_") + k].get<double>() == doctest::Approx(4.0).epsilon(0.3 / 4));
}

TEST_CASE("loglog_slope") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * v * v * v);
  CHECK(loglog_slope(x, y) == doctest::Approx(3.0).epsilon(1e-14));
}
