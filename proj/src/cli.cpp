#include "localgraph/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "localgraph/config.hpp"
#include "localgraph/error.hpp"
#include "localgraph/eval.hpp"
#include "localgraph/ingest.hpp"
#include "localgraph/manifest.hpp"
#include "localgraph/serialize.hpp"
#include "localgraph/simgen.hpp"

namespace localgraph {

namespace {

using Json = nlohmann::ordered_json;

// Output files of a command: name -> contents. Single-file commands use the
// key "output".
using Outputs = std::map<std::string, std::string>;

struct Run {
  Outputs outputs;
  std::map<std::string, std::string> inputs;  // path -> fingerprint
  std::uint64_t seed = 0;
};

using Command = std::function<Run(const Json& options, std::ostream& out)>;

constexpr const char* kSingle = "output";

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string config_text(const Json& o) { return o.contains("config_text") ? o["config_text"].get<std::string>() : ""; }

std::string options_hash(const Json& options, const std::map<std::string, std::string>& inputs) {
  std::string material = options.dump();
  for (const auto& [path, fp] : inputs) material += "\n" + fp;
  return fingerprint(material);
}

Run run_simulate(const Json& o, std::ostream& out) {
  const Design design = parse_design(o.at("design").get<std::string>());
  StudyConfig shape;
  shape.design = design;
  shape.n = o.value("n", std::size_t{0});
  shape.p = o.value("p", std::size_t{0});
  const DesignPreset preset = shape.preset();
  const auto seed = o.at("seed").get<std::uint64_t>();
  const SimulatedInstance inst = simulate(preset, design, seed);
  Run run;
  run.seed = seed;
  run.outputs["data.csv"] = dataset_csv(inst.samples);
  run.outputs["truth.json"] = truth_json(inst.truth, inst.samples.names());
  run.outputs["instance.json"] = instance_json(inst, preset);
  run.outputs["theta.csv"] = matrix_csv(inst.theta);
  out << "simulated " << to_string(design) << " instance: n=" << inst.samples.n() << " p=" << inst.samples.p()
      << " true edges=" << inst.truth.edges().size() << "\n";
  return run;
}

struct LoadedData {
  DataMatrix data;
  std::vector<std::string> targets;
  std::string summary;
};

LoadedData load_data(const std::string& path, const RunConfig& cfg, const std::vector<std::string>& cli_targets) {
  IngestSpec spec = cfg.ingest.value_or(IngestSpec{});
  spec.source = path;
  if (!cli_targets.empty()) {
    spec.targets = cli_targets;
  } else if (!cfg.targets.empty()) {
    spec.targets = cfg.targets;
  }
  IngestResult res = ingest(spec);
  return LoadedData{std::move(res.data), std::move(res.targets), summary_text(res.summary)};
}

Run run_pfs_command(const Json& o, std::ostream& out) {
  const std::string path = o.at("data").get<std::string>();
  const RunConfig cfg = parse_config(config_text(o), "config");
  const auto cli_targets = o.value("targets", std::vector<std::string>{});
  Run run;
  const std::string raw = read_text(path);
  run.inputs[path] = fingerprint(raw);
  LoadedData loaded = load_data(path, cfg, cli_targets);
  if (loaded.targets.empty()) throw ArgumentError("pfs: no targets given (use --targets or [pfs] targets)");
  NodeSet targets;
  for (const auto& name : loaded.targets) targets.insert(loaded.data.index_of(name));

  PfsConfig pfs = resolve_pfs(cfg, loaded.data);
  if (o.contains("seed")) pfs.estimator.seed = o["seed"].get<std::uint64_t>();
  const int threads = o.value("threads", 1);
  pfs.threads = threads;
  pfs.estimator.threads = threads;
  run.seed = pfs.estimator.seed;

  LocalGraphEstimate est = run_pfs(loaded.data, targets, pfs);
  Json hashed = o;
  hashed.erase("threads");
  est.config_hash = options_hash(hashed, run.inputs);
  run.outputs["estimate.json"] = export_json(est);
  out << "estimated " << est.estimated.size() << " neighborhoods; " << est.edges().size() << " edges recorded\n";
  return run;
}

Run run_prune_command(const Json& o, std::ostream& out) {
  const std::string path = o.at("estimate").get<std::string>();
  const std::string raw = read_text(path);
  Run run;
  run.inputs[path] = fingerprint(raw);
  const LocalGraphEstimate pruned = prune(parse_estimate_json(raw), o.at("threshold").get<double>());
  run.outputs[kSingle] = export_json(pruned);
  out << "kept " << pruned.edges().size() << " edges\n";
  return run;
}

Run run_study_command(const Json& o, std::ostream& out) {
  const RunConfig cfg = parse_config(config_text(o), "config");
  std::optional<Design> design;
  if (o.contains("design")) design = parse_design(o["design"].get<std::string>());
  StudyConfig study = resolve_study(cfg, design);
  if (o.contains("trials")) study.trials = o["trials"].get<int>();
  if (o.contains("seed")) study.seed = o["seed"].get<std::uint64_t>();
  if (o.contains("baseline")) study.baseline_enabled = o["baseline"].get<bool>();
  study.threads = o.value("threads", study.threads);
  const EvalReport report = run_study(study);
  Run run;
  run.seed = study.seed;
  run.outputs["report.csv"] = report_csv(report);
  run.outputs["report.json"] = report_json(report);
  out << run.outputs["report.csv"];
  out << "path audit (t=" << report.audit.threshold << "): " << report.audit.paths << " paths, false fraction "
      << report.audit.false_fraction() << "\n";
  return run;
}

Run run_ingest_command(const Json& o, std::ostream& out) {
  const std::string path = o.at("data").get<std::string>();
  const RunConfig cfg = parse_config(config_text(o), "config");
  IngestSpec spec = cfg.ingest.value_or(IngestSpec{});
  spec.source = path;
  if (o.contains("targets")) spec.targets = o["targets"].get<std::vector<std::string>>();
  if (o.contains("standardize")) spec.standardize = o["standardize"].get<bool>();
  if (o.contains("dedup_correlation")) spec.dedup_correlation = o["dedup_correlation"].get<double>();
  if (o.contains("max_missing_fraction")) spec.max_missing_fraction = o["max_missing_fraction"].get<double>();
  if (o.contains("one_vs_rest")) spec.one_vs_rest = o["one_vs_rest"].get<std::vector<std::string>>();
  Run run;
  run.inputs[path] = fingerprint(read_text(path));
  const IngestResult res = ingest(spec);
  run.outputs[kSingle] = dataset_csv(res.data);
  out << summary_text(res.summary);
  return run;
}

Run run_export_command(const Json& o, std::ostream&) {
  const std::string path = o.at("estimate").get<std::string>();
  const std::string raw = read_text(path);
  Run run;
  run.inputs[path] = fingerprint(raw);
  run.outputs[kSingle] = export_graph(parse_estimate_json(raw), parse_format(o.at("format").get<std::string>()));
  return run;
}

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"simulate", run_simulate},   {"pfs", run_pfs_command},       {"prune", run_prune_command},
      {"study", run_study_command}, {"ingest", run_ingest_command}, {"export", run_export_command},
  };
  return table;
}

bool single_file(const Outputs& outputs) { return outputs.size() == 1 && outputs.count(kSingle); }

std::string output_path(const std::string& dest, const std::string& name, bool single) {
  return single ? dest : (std::filesystem::path(dest) / name).string();
}

std::string default_manifest_path(const std::string& dest, bool single) {
  return single ? dest + ".manifest.json" : (std::filesystem::path(dest) / "manifest.json").string();
}

// Runs a command, writes outputs and (when dest is set) its manifest.
int execute(const std::string& name, const Json& options, const std::string& dest, std::ostream& out) {
  const std::string started = utc_timestamp();
  Run run = commands().at(name)(options, out);
  if (dest.empty()) {
    for (const auto& [file, contents] : run.outputs) out << contents;
    return 0;
  }
  const bool single = single_file(run.outputs);
  RunManifest m;
  m.command = name;
  m.options_json = options.dump();
  Json hashed = options;
  hashed.erase("threads");
  m.config_hash = options_hash(hashed, run.inputs);
  m.seed = run.seed;
  m.version = software_version();
  m.inputs = run.inputs;
  for (const auto& [file, contents] : run.outputs) {
    write_atomic(output_path(dest, file, single), contents);
    m.outputs[file] = fingerprint(contents);
  }
  m.started = started;
  m.finished = utc_timestamp();
  write_atomic(default_manifest_path(dest, single), m.to_json());
  return 0;
}

int replay(const std::string& manifest_path, const std::string& dest, std::ostream& out, std::ostream& err) {
  const RunManifest m = RunManifest::from_json(read_text(manifest_path));
  if (!commands().count(m.command)) throw ArgumentError("manifest: unknown command '" + m.command + "'");
  for (const auto& [path, fp] : m.inputs) {
    if (fingerprint(read_text(path)) != fp) throw ArgumentError("replay: input '" + path + "' changed since the run");
  }
  const Json options = Json::parse(m.options_json);
  std::ostringstream sink;
  const Run run = commands().at(m.command)(options, sink);
  const bool single = single_file(run.outputs);
  bool identical = run.outputs.size() == m.outputs.size();
  for (const auto& [file, contents] : run.outputs) {
    write_atomic(output_path(dest, file, single), contents);
    auto it = m.outputs.find(file);
    const bool same = it != m.outputs.end() && it->second == fingerprint(contents);
    out << (same ? "identical " : "differs   ") << file << "\n";
    identical = identical && same;
  }
  if (!identical) {
    err << "replay: outputs differ from the manifest\n";
    return 2;
  }
  return 0;
}

std::string read_config_option(const std::string& path) { return path.empty() ? std::string() : read_text(path); }

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local graph estimation by pathwise feature selection", "localgraph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(software_version()));

  std::string design, out_path, data_path, config_path, targets, estimate_path, format, manifest_path;
  std::uint64_t seed = 0;
  std::size_t n = 0, p = 0;
  int trials = 0, threads = 1;
  double threshold = 0.0, dedup = 0.0, max_missing = 0.0;
  bool no_baseline = false, standardize = false;
  std::string one_vs_rest;

  auto* sim = app.add_subcommand("simulate", "Generate a simulated instance");
  sim->add_option("--design", design, "linear, nonlinear or fig1")->required();
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--n", n, "Sample size (default: design value)");
  sim->add_option("--p", p, "Dimension (default: design value)");
  sim->add_option("--out", out_path, "Output directory")->required();

  auto* pfs = app.add_subcommand("pfs", "Estimate a local graph");
  pfs->add_option("--data", data_path, "Dataset CSV")->required();
  pfs->add_option("--config", config_path, "TOML configuration");
  pfs->add_option("--targets", targets, "Comma-separated target names");
  pfs->add_option("--seed", seed, "Overrides the estimator seed");
  pfs->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  pfs->add_option("--out", out_path, "Output directory")->required();

  auto* prn = app.add_subcommand("prune", "Re-threshold an estimate by lightest-path q-sum");
  prn->add_option("--estimate", estimate_path, "Estimate JSON")->required();
  prn->add_option("--threshold", threshold, "Path threshold in [0,1]")->required();
  prn->add_option("--out", out_path, "Output estimate JSON")->required();

  auto* study = app.add_subcommand("study", "Run a simulation study");
  study->add_option("--design", design, "linear, nonlinear or fig1");
  study->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  study->add_option("--seed", seed, "Study seed");
  study->add_option("--config", config_path, "TOML configuration");
  study->add_option("--threads", threads, "Trials run concurrently")->check(CLI::PositiveNumber);
  study->add_flag("--no-baseline", no_baseline, "Skip the nodewise lasso baseline");
  study->add_option("--out", out_path, "Output directory")->required();

  auto* ing = app.add_subcommand("ingest", "Clean a CSV dataset");
  ing->add_option("--data", data_path, "Input CSV")->required();
  ing->add_option("--config", config_path, "TOML configuration ([ingest] section)");
  ing->add_option("--targets", targets, "Comma-separated target names");
  ing->add_flag("--standardize", standardize, "Standardize continuous columns");
  ing->add_option("--dedup-correlation", dedup, "Drop later columns above this absolute correlation");
  ing->add_option("--max-missing", max_missing, "Drop columns with a larger missing fraction");
  ing->add_option("--one-vs-rest", one_vs_rest, "Comma-separated categorical columns to encode");
  ing->add_option("--out", out_path, "Output CSV")->required();

  auto* exp = app.add_subcommand("export", "Render an estimate as DOT or JSON");
  exp->add_option("--estimate", estimate_path, "Estimate JSON")->required();
  exp->add_option("--format", format, "dot or json")->required()->check(CLI::IsMember({"dot", "json"}));
  exp->add_option("--out", out_path, "Output file (default: standard output)");

  auto* rep = app.add_subcommand("replay", "Rerun a command from its manifest and compare outputs");
  rep->add_option("--manifest", manifest_path, "Manifest JSON")->required();
  rep->add_option("--out", out_path, "Output directory or file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << software_version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'localgraph --help' for usage\n";
    return 1;
  }

  try {
    Json o = Json::object();
    if (sim->parsed()) {
      o["design"] = design;
      parse_design(design);
      o["seed"] = seed;
      if (n) o["n"] = n;
      if (p) o["p"] = p;
      return execute("simulate", o, out_path, out);
    }
    if (pfs->parsed()) {
      o["data"] = data_path;
      o["config_text"] = read_config_option(config_path);
      if (!targets.empty()) o["targets"] = split_list(targets);
      if (pfs->count("--seed")) o["seed"] = seed;
      o["threads"] = threads;
      return execute("pfs", o, out_path, out);
    }
    if (prn->parsed()) {
      o["estimate"] = estimate_path;
      o["threshold"] = threshold;
      return execute("prune", o, out_path, out);
    }
    if (study->parsed()) {
      if (!design.empty()) {
        parse_design(design);
        o["design"] = design;
      }
      o["config_text"] = read_config_option(config_path);
      if (study->count("--trials")) o["trials"] = trials;
      if (study->count("--seed")) o["seed"] = seed;
      if (no_baseline) o["baseline"] = false;
      o["threads"] = threads;
      return execute("study", o, out_path, out);
    }
    if (ing->parsed()) {
      o["data"] = data_path;
      o["config_text"] = read_config_option(config_path);
      if (!targets.empty()) o["targets"] = split_list(targets);
      if (standardize) o["standardize"] = true;
      if (ing->count("--dedup-correlation")) o["dedup_correlation"] = dedup;
      if (ing->count("--max-missing")) o["max_missing_fraction"] = max_missing;
      if (!one_vs_rest.empty()) o["one_vs_rest"] = split_list(one_vs_rest);
      return execute("ingest", o, out_path, out);
    }
    if (exp->parsed()) {
      o["estimate"] = estimate_path;
      o["format"] = format;
      return execute("export", o, out_path, out);
    }
    if (rep->parsed()) return replay(manifest_path, out_path, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace localgraph
