#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gaudin/cli.hpp"

namespace gaudin::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kOracleTol = 1e-8;
constexpr double kRawTol = 1e-9;

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Json input_json(const SystemSpec& spec, const QuantumNumbers& n) {
  return {{"n_particles", spec.n_particles},
          {"length", spec.length},
          {"coupling", spec.coupling},
          {"n", n}};
}

Json canonical_json(const CanonicalForm& form) {
  return {{"canonical_n", form.canonical_n},
          {"sign_map", form.sign_map},
          {"zero_reduced", form.zero_reduced},
          {"permutation", form.permutation},
          {"excluded_by_physics", form.excluded_by_physics},
          {"equivalence_class_size", form.equivalence_class_size}};
}

QuantumNumbers full_canonical_n(const CanonicalForm& form) {
  QuantumNumbers n;
  if (form.zero_reduced) n.push_back(0);
  n.insert(n.end(), form.canonical_n.begin(), form.canonical_n.end());
  return n;
}

Json ordering_json(const OrderingReport& r) {
  return {{"roots_strictly_increasing_positive", r.roots_strictly_increasing_positive},
          {"n_nondecreasing", r.n_nondecreasing},
          {"max_difference_residual", r.max_difference_residual},
          {"all_four_sums_nonpositive", r.all_four_sums_nonpositive},
          {"difference_residuals", r.difference_residuals}};
}

Json minor_json(const MinorChain& chain) {
  return {{"log_minors", chain.log_minors},
          {"all_positive", chain.all_positive},
          {"strictly_increasing", chain.strictly_increasing},
          {"min_log_increment", chain.min_log_increment}};
}

Json solve_json(const RunConfig& cfg, const SolveReport& r) {
  Json j;
  j["command"] = command_name(cfg.command);
  j["input"] = input_json(cfg.spec, cfg.n);
  j["canonical"] = canonical_json(r.canonical);
  j["roots"] = vector_json(r.roots);
  j["signed_roots"] = vector_json(r.signed_roots);
  j["b_value"] = r.b_value;
  j["iterations"] = r.iterations;
  j["residual_norms"] = {{"transformed", r.final_grad_norm},
                         {"raw", r.raw_residual_norm ? Json(*r.raw_residual_norm) : Json()}};
  j["grad_threshold"] = r.grad_threshold;
  j["hessian_pd"] = r.hessian_pd;
  j["ordering_ok"] = r.ordering_ok;
  j["coincident_magnitudes"] = r.coincident_magnitudes;
  const QuantumNumbers paired = full_canonical_n(r.canonical);
  j["ordering"] = ordering_json(check_ordering(r.roots, paired, cfg.spec));
  j["energy"] = energy(r.roots);
  return j;
}

// CSV cells keep full precision so a table round-trips like the JSON does.
std::string cell(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void roots_csv(std::ostream& out, const SolveReport& r) {
  out << "slot,canonical_n,root\n";
  const QuantumNumbers n = full_canonical_n(r.canonical);
  for (Eigen::Index i = 0; i < r.roots.size(); ++i)
    out << i << ',' << n[static_cast<std::size_t>(i)] << ',' << cell(r.roots[i]) << '\n';
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SolveReport r = solve(cfg.spec, cfg.n, cfg.solver);
  if (r.canonical.excluded_by_physics)
    err << "note: a zero quantum number pins k = 0; the state has no physical wave function\n";
  if (cfg.output_format == OutputFormat::csv) {
    roots_csv(out, r);
  } else {
    out << solve_json(cfg, r).dump(2) << '\n';
  }
  return kExitOk;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SolveReport r = solve(cfg.spec, cfg.n, cfg.solver);
  const MinorChain chain = certify(r, cfg.spec);

  Json oracle;
  bool oracle_ok = true;
  if (cfg.spec.n_particles <= 6) {
    try {
      const RootSet reference = oracle_solve(cfg.spec, cfg.n);
      const double deviation = inf_norm(reference - r.roots);
      oracle_ok = deviation <= kOracleTol;
      oracle = {{"max_deviation", deviation}, {"agrees", oracle_ok}};
    } catch (const OracleStall& e) {
      oracle_ok = false;
      oracle = {{"max_deviation", nullptr}, {"agrees", false}, {"error", e.what()}};
    }
  }
  const bool raw_ok = !r.raw_residual_norm || *r.raw_residual_norm <= kRawTol;
  const bool verified = r.hessian_pd && chain.all_positive && raw_ok && oracle_ok;

  if (cfg.output_format == OutputFormat::csv) {
    out << "slot,canonical_n,root,log_minor\n";
    const QuantumNumbers n = full_canonical_n(r.canonical);
    const std::size_t offset = r.canonical.zero_reduced ? 1 : 0;
    for (Eigen::Index i = 0; i < r.roots.size(); ++i) {
      const auto slot = static_cast<std::size_t>(i);
      out << i << ',' << n[slot] << ',' << cell(r.roots[i]) << ',';
      if (slot >= offset && slot - offset < chain.log_minors.size()) out << cell(chain.log_minors[slot - offset]);
      out << '\n';
    }
  } else {
    Json j = solve_json(cfg, r);
    j["minor_chain"] = minor_json(chain);
    j["oracle"] = oracle;
    j["verified"] = verified;
    out << j.dump(2) << '\n';
  }
  if (!verified) err << "verification failed\n";
  return verified ? kExitOk : kExitFailure;
}

int run_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MinorScanSummary s = scan_minor_chains(cfg.spec, cfg.sampler, cfg.spec.n_particles, cfg.samples,
                                               cfg.step_scale, cfg.seed);
  err << "scan-minors: " << s.samples << " samples at N = " << s.n << " in " << s.seconds << " s\n";
  if (cfg.output_format == OutputFormat::csv) {
    out << "sample,positive,chain_ok,min_log_increment,log_det\n";
    for (std::size_t i = 0; i < s.per_sample.size(); ++i) {
      const MinorSample& m = s.per_sample[i];
      out << i << ',' << m.positive << ',' << m.chain_ok << ',' << cell(m.min_log_increment) << ','
          << cell(m.log_det) << '\n';
    }
    return kExitOk;
  }
  Json j;
  j["command"] = "scan-minors";
  j["n_particles"] = s.n;
  j["length"] = cfg.spec.length;
  j["coupling"] = cfg.spec.coupling;
  j["sampler"] = cfg.sampler == Sampler::homogeneous ? "homogeneous" : "perturbed";
  j["step_scale"] = cfg.step_scale;
  j["seed"] = cfg.seed;
  j["samples"] = s.samples;
  j["positive_ok"] = s.positive_ok;
  j["chain_ok"] = s.chain_ok;
  j["chain_ok_fraction"] = s.chain_ok_fraction;
  j["min_log_increment"] = s.min_log_increment;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_limits(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LimitReport free = limit_deviation(cfg.spec, cfg.n, LimitRegime::free, cfg.solver);
  const LimitReport tonks = limit_deviation(cfg.spec, cfg.n, LimitRegime::tonks, cfg.solver);
  for (const LimitReport* r : {&free, &tonks})
    if (!r->in_regime) err << "warning: " << r->warning << '\n';

  if (cfg.output_format == OutputFormat::csv) {
    out << "slot,root,free_limit,tonks_limit\n";
    for (Eigen::Index i = 0; i < free.roots.size(); ++i)
      out << i << ',' << cell(free.roots[i]) << ',' << cell(free.limit[i]) << ',' << cell(tonks.limit[i])
          << '\n';
    return kExitOk;
  }
  auto regime = [](const LimitReport& r) {
    return Json{{"deviation", r.deviation},
                {"in_regime", r.in_regime},
                {"limit", vector_json(r.limit)}};
  };
  Json j;
  j["command"] = "limits";
  j["input"] = input_json(cfg.spec, cfg.n);
  j["roots"] = vector_json(free.roots);
  j["free"] = regime(free);
  j["tonks"] = regime(tonks);
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_compare_bc(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const HalvingReport h = periodic_halving_check(cfg.spec, cfg.n, cfg.solver);
  if (cfg.output_format == OutputFormat::csv) {
    out << "slot,half_root,half_residual,zero_bc_residual\n";
    for (Eigen::Index i = 0; i < h.half_roots.size(); ++i)
      out << i << ',' << cell(h.half_roots[i]) << ',' << cell(h.half_residual[i]) << ','
          << cell(h.zero_bc_residual[i]) << '\n';
    return kExitOk;
  }
  Json j;
  j["command"] = "compare-bc";
  j["input"] = input_json(cfg.spec, cfg.n);
  j["periodic"] = {{"n_particles", h.full_spec.n_particles},
                   {"length", h.full_spec.length},
                   {"n", h.full_n},
                   {"roots", vector_json(h.full_roots)}};
  j["mirror_deviation"] = h.mirror_deviation;
  j["half_roots"] = vector_json(h.half_roots);
  j["half_residual_norm"] = h.half_residual_norm;
  j["zero_bc_residual"] = vector_json(h.zero_bc_residual);
  j["zero_bc_residual_norm"] = h.zero_bc_residual_norm;
  j["min_obstruction"] = h.min_obstruction;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_multistart(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const UniquenessReport u = multistart_probe(cfg.spec, cfg.n, cfg.starts, cfg.box, cfg.seed, cfg.solver);
  for (const auto& [start, message] : u.failures) err << "start " << start << ": " << message << '\n';

  if (cfg.output_format == OutputFormat::csv) {
    out << "start,cluster\n";
    for (std::size_t i = 0; i < u.assignment.size(); ++i) out << i << ',' << u.assignment[i] << '\n';
    return u.failures.empty() ? kExitOk : kExitFailure;
  }
  const QuantumNumbers paired = full_canonical_n(canonicalize(cfg.n));
  Json reps = Json::array();
  for (const RootSet& rep : u.representatives) {
    Json entry;
    entry["roots"] = vector_json(rep);
    try {
      entry["raw_residual_norm"] = inf_norm(residual_raw(rep, paired, cfg.spec));
    } catch (const DegenerateConfiguration&) {
      entry["raw_residual_norm"] = nullptr;
    }
    reps.push_back(entry);
  }
  Json failures = Json::array();
  for (const auto& [start, message] : u.failures) failures.push_back({{"start", start}, {"message", message}});

  Json j;
  j["command"] = "multistart";
  j["input"] = input_json(cfg.spec, cfg.n);
  j["starts"] = u.starts;
  j["box"] = cfg.box;
  j["seed"] = cfg.seed;
  j["converged"] = u.converged;
  j["clusters"] = u.clusters;
  j["max_spread"] = u.max_spread;
  j["representatives"] = reps;
  j["assignment"] = u.assignment;
  j["failures"] = failures;
  out << j.dump(2) << '\n';
  return u.failures.empty() ? kExitOk : kExitFailure;
}

// Value of --config in either "--config path" or "--config=path" form.
std::optional<std::string> config_path(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::solve: return run_solve(cfg, out, err);
      case Command::verify: return run_verify(cfg, out, err);
      case Command::scan_minors: return run_scan(cfg, out, err);
      case Command::limits: return run_limits(cfg, out, err);
      case Command::compare_bc: return run_compare_bc(cfg, out, err);
      case Command::multistart: return run_multistart(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidSpec& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NoConvergence& e) {
    err << "no convergence after " << e.iterations() << " iterations: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage_text();
    return kExitUsage;
  }
  for (const std::string& a : args) {
    if (a == "-h" || a == "--help") {
      out << usage_text();
      return kExitOk;
    }
  }

  RunConfig cfg;
  try {
    std::optional<std::string> file_text;
    if (const auto path = config_path(args)) {
      std::ifstream in(*path);
      if (!in) throw UsageError("--config: cannot read '" + *path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      file_text = text.str();
    }
    cfg = parse_config(args, file_text);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (!cfg.output_path) return run(cfg, out, err);
  std::ofstream file(*cfg.output_path);
  if (!file) {
    err << "usage error: --out: cannot open '" << *cfg.output_path << "'\n";
    return kExitUsage;
  }
  return run(cfg, file, err);
}

}  // namespace gaudin::cli
