#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "gaudin/cli.hpp"

namespace gaudin::cli {

namespace {

using nlohmann::json;

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"solve", Command::solve},           {"verify", Command::verify},
      {"scan-minors", Command::scan_minors}, {"limits", Command::limits},
      {"compare-bc", Command::compare_bc}, {"multistart", Command::multistart},
  };
  return table;
}

// Every field optional until the file and the flags have both been applied.
struct Partial {
  std::optional<std::string> command;
  std::optional<int> n_particles;
  std::optional<double> length;
  std::optional<double> coupling;
  std::optional<QuantumNumbers> n;
  std::optional<double> grad_tol;
  std::optional<int> max_iters;
  std::optional<double> armijo_c;
  std::optional<double> backtrack;
  std::optional<std::string> init_mode;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<double> box;
  std::optional<int> samples;
  std::optional<std::string> sampler;
  std::optional<double> step_scale;
};

QuantumNumbers parse_int_list(const std::string& text, const std::string& flag) {
  QuantumNumbers out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item = text.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty() && item.front() == '+') item.erase(0, 1);
    std::int64_t value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size())
      throw UsageError(flag + ": '" + item + "' is not an integer");
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

template <class T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: key '" + key + "' has the wrong type");
  }
}

QuantumNumbers get_numbers(const json& value) {
  if (value.is_string()) return parse_int_list(value.get<std::string>(), "config: n");
  return get_as<QuantumNumbers>(value, "n");
}

void apply_spec_object(Partial& p, const json& obj) {
  if (!obj.is_object()) throw UsageError("config: 'spec' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "n_particles") p.n_particles = get_as<int>(value, key);
    else if (key == "length") p.length = get_as<double>(value, key);
    else if (key == "coupling") p.coupling = get_as<double>(value, key);
    else throw UsageError("config: unknown key 'spec." + key + "'");
  }
}

void apply_solver_object(Partial& p, const json& obj) {
  if (!obj.is_object()) throw UsageError("config: 'solver' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "grad_tol") p.grad_tol = get_as<double>(value, key);
    else if (key == "max_iters") p.max_iters = get_as<int>(value, key);
    else if (key == "armijo_c") p.armijo_c = get_as<double>(value, key);
    else if (key == "backtrack") p.backtrack = get_as<double>(value, key);
    else if (key == "init_mode") p.init_mode = get_as<std::string>(value, key);
    else throw UsageError("config: unknown key 'solver." + key + "'");
  }
}

void apply_file(Partial& p, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config: top level must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    if (key == "command") p.command = get_as<std::string>(value, key);
    else if (key == "spec") apply_spec_object(p, value);
    else if (key == "N" || key == "n_particles") p.n_particles = get_as<int>(value, key);
    else if (key == "L" || key == "length") p.length = get_as<double>(value, key);
    else if (key == "c" || key == "coupling") p.coupling = get_as<double>(value, key);
    else if (key == "n") p.n = get_numbers(value);
    else if (key == "solver") apply_solver_object(p, value);
    else if (key == "grad_tol") p.grad_tol = get_as<double>(value, key);
    else if (key == "max_iters") p.max_iters = get_as<int>(value, key);
    else if (key == "output_format" || key == "format") p.format = get_as<std::string>(value, key);
    else if (key == "output_path" || key == "out") p.out = get_as<std::string>(value, key);
    else if (key == "seed") p.seed = get_as<std::uint64_t>(value, key);
    else if (key == "starts") p.starts = get_as<int>(value, key);
    else if (key == "box") p.box = get_as<double>(value, key);
    else if (key == "samples") p.samples = get_as<int>(value, key);
    else if (key == "sampler") p.sampler = get_as<std::string>(value, key);
    else if (key == "step_scale") p.step_scale = get_as<double>(value, key);
    else throw UsageError("config: unknown key '" + key + "'");
  }
}

template <class T>
void override_with(std::optional<T>& target, const std::optional<T>& flag) {
  if (flag) target = flag;
}

struct FlagValues {
  std::string command;
  std::optional<int> n_particles;
  std::optional<double> length;
  std::optional<double> coupling;
  std::optional<std::string> n;
  std::optional<int> starts;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<double> grad_tol;
  std::optional<int> max_iters;
  std::optional<double> box;
  std::optional<std::string> sampler;
  std::optional<double> step_scale;
  std::optional<std::string> init_mode;
  std::optional<std::string> config;
};

void define_flags(CLI::App& app, FlagValues& v) {
  std::vector<std::string> names;
  for (const auto& [name, _] : command_table()) names.push_back(name);
  app.add_option("command", v.command, "solve | verify | scan-minors | limits | compare-bc | multistart");
  app.add_option("--N", v.n_particles, "number of particles");
  app.add_option("--L", v.length, "box length");
  app.add_option("--c", v.coupling, "coupling constant (> 0)");
  app.add_option("--n", v.n, "quantum numbers as a comma list, e.g. 1,2,3 or -1,0,2");
  app.add_option("--starts", v.starts, "multistart: number of random starts");
  app.add_option("--samples", v.samples, "scan-minors: number of configurations");
  app.add_option("--seed", v.seed, "seed for every random stream");
  app.add_option("--format", v.format, "json | csv");
  app.add_option("--out", v.out, "write the data document to this path");
  app.add_option("--grad-tol", v.grad_tol, "gradient tolerance (relative to L max|k|)");
  app.add_option("--max-iters", v.max_iters, "Newton iteration budget");
  app.add_option("--box", v.box, "multistart: start box half-width");
  app.add_option("--sampler", v.sampler, "scan-minors: homogeneous | perturbed");
  app.add_option("--step-scale", v.step_scale, "scan-minors: step size in units of pi/L");
  app.add_option("--init", v.init_mode, "tonks_limit | random_box");
  app.add_option("--config", v.config, "JSON config file; flags take precedence");
}

InitMode parse_init_mode(const std::string& s) {
  if (s == "tonks_limit") return InitMode::tonks_limit;
  if (s == "random_box") return InitMode::random_box;
  throw UsageError("init_mode: expected tonks_limit or random_box, got '" + s + "'");
}

std::string init_mode_name(InitMode m) {
  switch (m) {
    case InitMode::tonks_limit: return "tonks_limit";
    case InitMode::user_supplied: return "user_supplied";
    case InitMode::random_box: return "random_box";
  }
  return "tonks_limit";
}

RunConfig finalize(const Partial& p) {
  RunConfig cfg;
  if (!p.command) throw UsageError("missing command (solve, verify, scan-minors, limits, compare-bc, multistart)");
  const auto it = command_table().find(*p.command);
  if (it == command_table().end()) throw UsageError("unknown command '" + *p.command + "'");
  cfg.command = it->second;
  const bool scan = cfg.command == Command::scan_minors;

  if (!p.n_particles) throw UsageError("--N is required");
  cfg.spec.n_particles = *p.n_particles;
  if (scan) {
    cfg.spec.length = p.length.value_or(1.0);
    cfg.spec.coupling = p.coupling.value_or(1.0);
  } else {
    if (!p.length) throw UsageError("--L is required");
    if (!p.coupling) throw UsageError("--c is required");
    if (!p.n) throw UsageError("--n is required");
    cfg.spec.length = *p.length;
    cfg.spec.coupling = *p.coupling;
  }
  if (p.n) cfg.n = *p.n;

  if (p.grad_tol) cfg.solver.grad_tol = *p.grad_tol;
  if (p.max_iters) cfg.solver.max_iters = *p.max_iters;
  if (p.armijo_c) cfg.solver.armijo_c = *p.armijo_c;
  if (p.backtrack) cfg.solver.backtrack = *p.backtrack;
  if (p.init_mode) cfg.solver.init_mode = parse_init_mode(*p.init_mode);
  if (p.seed) cfg.seed = *p.seed;
  cfg.solver.seed = cfg.seed;
  if (p.starts) cfg.starts = *p.starts;
  if (p.box) cfg.box = *p.box;
  cfg.solver.box = cfg.box;
  if (p.samples) cfg.samples = *p.samples;
  if (p.step_scale) cfg.step_scale = *p.step_scale;
  if (p.out) cfg.output_path = *p.out;

  if (p.format) {
    if (*p.format == "json") cfg.output_format = OutputFormat::json;
    else if (*p.format == "csv") cfg.output_format = OutputFormat::csv;
    else throw UsageError("--format: expected json or csv, got '" + *p.format + "'");
  }
  if (p.sampler) {
    if (*p.sampler == "homogeneous") cfg.sampler = Sampler::homogeneous;
    else if (*p.sampler == "perturbed") cfg.sampler = Sampler::perturbed;
    else throw UsageError("--sampler: expected homogeneous or perturbed, got '" + *p.sampler + "'");
  }

  try {
    if (scan) {
      if (cfg.spec.n_particles < 1) throw InvalidSpec("n_particles must be >= 1");
      if (!(cfg.spec.length > 0.0) || !(cfg.spec.coupling > 0.0))
        throw InvalidSpec("length and coupling must be > 0");
    } else {
      validate_spec(cfg.spec, cfg.n);
    }
    validate_config(cfg.solver);
  } catch (const InvalidSpec& e) {
    std::string flag = "--n";
    const std::string what = e.what();
    if (what.rfind("coupling", 0) == 0) flag = "--c";
    else if (what.rfind("length", 0) == 0) flag = "--L";
    else if (what.rfind("n_particles", 0) == 0) flag = "--N";
    else if (what.find("grad_tol") != std::string::npos) flag = "--grad-tol";
    else if (what.find("max_iters") != std::string::npos) flag = "--max-iters";
    throw UsageError(flag + ": " + what);
  }
  if (cfg.command == Command::multistart) {
    if (cfg.starts < 2) throw UsageError("--starts: must be >= 2");
    if (!(cfg.box > 0.0)) throw UsageError("--box: must be > 0");
  }
  if (scan) {
    if (cfg.samples < 1) throw UsageError("--samples: must be >= 1");
    if (!(cfg.step_scale >= 0.0)) throw UsageError("--step-scale: must be >= 0");
  }
  return cfg;
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& [name, cmd] : command_table())
    if (cmd == c) return name;
  return "solve";
}

RunConfig parse_config(const std::vector<std::string>& args, const std::optional<std::string>& file_text) {
  Partial partial;
  if (file_text) apply_file(partial, *file_text);

  CLI::App app{"gaudin"};
  app.set_help_flag();
  FlagValues flags;
  define_flags(app, flags);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!flags.command.empty()) partial.command = flags.command;
  override_with(partial.n_particles, flags.n_particles);
  override_with(partial.length, flags.length);
  override_with(partial.coupling, flags.coupling);
  if (flags.n) partial.n = parse_int_list(*flags.n, "--n");
  override_with(partial.starts, flags.starts);
  override_with(partial.samples, flags.samples);
  override_with(partial.seed, flags.seed);
  override_with(partial.format, flags.format);
  override_with(partial.out, flags.out);
  override_with(partial.grad_tol, flags.grad_tol);
  override_with(partial.max_iters, flags.max_iters);
  override_with(partial.box, flags.box);
  override_with(partial.sampler, flags.sampler);
  override_with(partial.step_scale, flags.step_scale);
  override_with(partial.init_mode, flags.init_mode);
  return finalize(partial);
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = command_name(cfg.command);
  j["spec"] = {{"n_particles", cfg.spec.n_particles},
               {"length", cfg.spec.length},
               {"coupling", cfg.spec.coupling}};
  j["n"] = cfg.n;
  j["solver"] = {{"grad_tol", cfg.solver.grad_tol},
                 {"max_iters", cfg.solver.max_iters},
                 {"armijo_c", cfg.solver.armijo_c},
                 {"backtrack", cfg.solver.backtrack},
                 {"init_mode", init_mode_name(cfg.solver.init_mode)}};
  j["output_format"] = cfg.output_format == OutputFormat::json ? "json" : "csv";
  if (cfg.output_path) j["output_path"] = *cfg.output_path;
  j["seed"] = cfg.seed;
  j["starts"] = cfg.starts;
  j["box"] = cfg.box;
  j["samples"] = cfg.samples;
  j["sampler"] = cfg.sampler == Sampler::homogeneous ? "homogeneous" : "perturbed";
  j["step_scale"] = cfg.step_scale;
  return j;
}

std::string usage_text() {
  CLI::App app{"Quasimomenta of N point bosons with zero boundary conditions", "gaudin"};
  FlagValues flags;
  define_flags(app, flags);
  return app.help();
}

}  // namespace gaudin::cli
