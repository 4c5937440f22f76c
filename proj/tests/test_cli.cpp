#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gaudin/cli.hpp"

using namespace gaudin;
using namespace gaudin::cli;
using Args = std::vector<std::string>;

namespace {
struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured call(const Args& args) {
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string usage_message(const Args& args, const std::optional<std::string>& file = std::nullopt) {
  try {
    parse_config(args, file);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("flags map onto the run config") {
  const RunConfig cfg = parse_config({"solve", "--N", "3", "--L", "1", "--c", "1", "--n", "1,2,3"});
  CHECK(cfg.command == Command::solve);
  CHECK(cfg.spec.n_particles == 3);
  CHECK(cfg.spec.length == 1.0);
  CHECK(cfg.spec.coupling == 1.0);
  CHECK(cfg.n == QuantumNumbers{1, 2, 3});
  CHECK(cfg.solver.grad_tol == SolverConfig{}.grad_tol);
  CHECK(cfg.solver.max_iters == SolverConfig{}.max_iters);
  CHECK(cfg.output_format == OutputFormat::json);

  const RunConfig neg = parse_config({"solve", "--N", "2", "--L", "1", "--c", "1", "--n=-1,0"});
  CHECK(neg.n == QuantumNumbers{-1, 0});

  const RunConfig tuned = parse_config({"multistart", "--N=1", "--L=2", "--c=0.5", "--n=4", "--starts=7",
                                        "--seed=11", "--box=3", "--grad-tol=1e-10", "--max-iters=50",
                                        "--format=csv"});
  CHECK(tuned.starts == 7);
  CHECK(tuned.seed == 11);
  CHECK(tuned.box == 3.0);
  CHECK(tuned.solver.grad_tol == 1e-10);
  CHECK(tuned.solver.max_iters == 50);
  CHECK(tuned.output_format == OutputFormat::csv);
}

TEST_CASE("usage errors name the offending flag") {
  CHECK(usage_message({"solve", "--N", "2", "--n", "1,2,3"}).find("--L") != std::string::npos);
  CHECK(usage_message({"solve", "--N", "2", "--L", "1", "--c", "1", "--n", "1,2,3"}).find("--n") !=
        std::string::npos);
  CHECK(usage_message({"solve", "--N", "2", "--L", "1", "--c", "-1", "--n", "1,2"}).find("--c") !=
        std::string::npos);
  CHECK(usage_message({"solve", "--N", "1", "--L", "1", "--c", "1", "--n", "x"}).find("--n") !=
        std::string::npos);
  CHECK_FALSE(usage_message({"solve", "--N", "1", "--L", "1", "--c", "1", "--n", "1", "--bogus", "2"}).empty());
  CHECK_FALSE(usage_message({"frobnicate", "--N", "1"}).empty());
  CHECK_FALSE(usage_message({"--N", "1"}).empty());
  CHECK(usage_message({"solve", "--N", "1", "--L", "1", "--c", "1", "--n", "1", "--format", "xml"})
            .find("--format") != std::string::npos);
  CHECK(usage_message({"multistart", "--N", "1", "--L", "1", "--c", "1", "--n", "1", "--starts", "1"})
            .find("--starts") != std::string::npos);
}

TEST_CASE("config file layering") {
  const std::string file = R"({"command": "solve", "N": 2, "L": 1, "c": 1.5, "n": [1, 2]})";
  CHECK(parse_config({}, file).spec.coupling == 1.5);
  CHECK(parse_config({"--c", "2.0"}, file).spec.coupling == 2.0);
  CHECK(parse_config({"verify"}, file).command == Command::verify);

  const std::string nested =
      R"({"command": "solve", "spec": {"n_particles": 1, "length": 2, "coupling": 3}, "n": "5",
          "solver": {"max_iters": 17}})";
  const RunConfig cfg = parse_config({}, nested);
  CHECK(cfg.spec.length == 2.0);
  CHECK(cfg.n == QuantumNumbers{5});
  CHECK(cfg.solver.max_iters == 17);

  CHECK(usage_message({}, R"({"command": "solve", "N": 1, "L": 1, "c": 1, "n": [1], "colour": 1})")
            .find("colour") != std::string::npos);
  CHECK(usage_message({}, R"({"command": "solve", "N": "one"})").find("'N'") != std::string::npos);
  CHECK_FALSE(usage_message({}, "{not json").empty());
  CHECK_FALSE(usage_message({}, "[1, 2]").empty());
}

TEST_CASE("canonical config form round-trips") {
  const Args cases[] = {
      {"solve", "--N", "3", "--L", "1", "--c", "1", "--n", "1,2,3"},
      {"verify", "--N", "2", "--L", "0.5", "--c", "1e-3", "--n=-2,0", "--grad-tol", "1e-11"},
      {"multistart", "--N", "2", "--L", "1", "--c", "1", "--n", "1,2", "--starts", "5", "--seed", "3",
       "--out", "x.json"},
      {"scan-minors", "--N", "10", "--samples", "7", "--sampler", "homogeneous", "--format", "csv"},
  };
  for (const Args& args : cases) {
    const auto once = to_json(parse_config(args));
    const auto twice = to_json(parse_config({}, once.dump()));
    CHECK(once.dump() == twice.dump());
  }
}

TEST_CASE("solve output re-parses to the reported residual") {
  const Captured c = call({"solve", "--N", "4", "--L", "1", "--c", "0.7", "--n=3,-1,2,2"});
  REQUIRE(c.code == kExitOk);
  CHECK(c.err.empty());
  const auto doc = nlohmann::json::parse(c.out);
  Eigen::VectorXd k(4);
  for (int i = 0; i < 4; ++i) k[i] = doc["signed_roots"][i].get<double>();
  const QuantumNumbers n{3, -1, 2, 2};
  const double raw = residual_raw(k, n, {4, 1.0, 0.7}).cwiseAbs().maxCoeff();
  CHECK(std::abs(raw - doc["residual_norms"]["raw"].get<double>()) <= 1e-12);
  CHECK(doc["canonical"]["sign_map"][1] == -1);
  CHECK(doc["canonical"]["equivalence_class_size"] == 2);
}

TEST_CASE("output is deterministic") {
  const Args args{"multistart", "--N", "3", "--L", "1", "--c", "1", "--n", "1,2,3", "--starts", "6", "--seed", "5"};
  const Captured a = call(args);
  const Captured b = call(args);
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["clusters"] == 1);
}

TEST_CASE("commands and exit codes") {
  SUBCASE("verify") {
    const Captured c = call({"verify", "--N", "3", "--L", "1", "--c", "10", "--n", "1,3,7"});
    CHECK(c.code == kExitOk);
    const auto doc = nlohmann::json::parse(c.out);
    CHECK(doc["verified"] == true);
    CHECK(doc["oracle"]["agrees"] == true);
    CHECK(doc["minor_chain"]["strictly_increasing"] == true);
  }
  SUBCASE("scan-minors needs only N") {
    const Captured c = call({"scan-minors", "--N", "10", "--samples", "100", "--seed", "1"});
    CHECK(c.code == kExitOk);
    CHECK(nlohmann::json::parse(c.out)["chain_ok_fraction"] == 1.0);
    CHECK(c.err.find("scan-minors:") != std::string::npos);
  }
  SUBCASE("limits") {
    const Captured c = call({"limits", "--N", "3", "--L", "1", "--c", "1e8", "--n", "1,2,3"});
    CHECK(c.code == kExitOk);
    const auto doc = nlohmann::json::parse(c.out);
    CHECK(doc["tonks"]["deviation"].get<double>() <= 1e-5);
    CHECK(doc["tonks"]["in_regime"] == true);
    CHECK(doc["free"]["in_regime"] == false);
    CHECK(c.err.find("warning") != std::string::npos);
  }
  SUBCASE("compare-bc") {
    const Captured c = call({"compare-bc", "--N", "2", "--L", "1", "--c", "1", "--n", "1,2"});
    CHECK(c.code == kExitOk);
    const auto doc = nlohmann::json::parse(c.out);
    CHECK(doc["mirror_deviation"].get<double>() <= 1e-9);
    CHECK(doc["zero_bc_residual_norm"].get<double>() >= 0.9 * doc["min_obstruction"].get<double>());
  }
  SUBCASE("csv") {
    const Captured c = call({"solve", "--N", "2", "--L", "1", "--c", "1", "--n", "1,2", "--format", "csv"});
    CHECK(c.code == kExitOk);
    CHECK(c.out.rfind("slot,canonical_n,root\n", 0) == 0);
    CHECK(c.out.find("2.9792451146938") != std::string::npos);
  }
  SUBCASE("solver failure exits 1") {
    const Captured c = call({"solve", "--N", "10", "--L", "1", "--c", "1", "--n", "1,2,3,4,5,6,7,8,9,10",
                             "--max-iters", "1", "--init", "random_box"});
    CHECK(c.code == kExitFailure);
    CHECK(c.out.empty());
    CHECK(c.err.find("no convergence") != std::string::npos);
  }
  SUBCASE("usage error exits 2") {
    const Captured c = call({"solve", "--N", "2", "--n", "1,2,3"});
    CHECK(c.code == kExitUsage);
    CHECK(c.out.empty());
  }
  SUBCASE("help") {
    const Captured c = call({"--help"});
    CHECK(c.code == kExitOk);
    CHECK(c.out.find("--grad-tol") != std::string::npos);
    CHECK(call({}).code == kExitUsage);
  }
}

TEST_CASE("config and output files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto config = dir / "gaudin_test_config.json";
  const auto output = dir / "gaudin_test_output.json";
  {
    std::ofstream f(config);
    f << R"({"command": "solve", "N": 1, "L": 3.141592653589793, "c": 1.5, "n": [2]})";
  }
  const Captured c = call({"--config", config.string(), "--out", output.string()});
  CHECK(c.code == kExitOk);
  CHECK(c.out.empty());
  std::ifstream in(output);
  const auto doc = nlohmann::json::parse(in);
  CHECK(std::abs(doc["roots"][0].get<double>() - 2.0) <= 1e-12);
  CHECK(doc["input"]["coupling"] == 1.5);
  std::filesystem::remove(config);
  std::filesystem::remove(output);

  CHECK(call({"--config", (dir / "gaudin_missing.json").string()}).code == kExitUsage);
}
