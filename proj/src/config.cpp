#include "localgraph/config.hpp"

#include <set>
#include <sstream>

#include "localgraph/error.hpp"
#include "localgraph/serialize.hpp"
#include "toml.hpp"

namespace localgraph {

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  void check_keys(const std::set<std::string>& allowed) const {
    if (!table_) return;
    for (const auto& [key, node] : *table_) {
      (void)node;
      if (!allowed.count(std::string(key.str()))) {
        throw ArgumentError("config: unknown key '" + std::string(key.str()) + "' in [" + name_ + "]");
      }
    }
  }

  const toml::node* get(const std::string& key) const { return table_ ? table_->get(key) : nullptr; }

  std::optional<double> number(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
    throw type_error(key, "a number");
  }

  std::optional<std::int64_t> integer(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<std::int64_t>()) return *v;
    throw type_error(key, "an integer");
  }

  std::optional<int> small_int(const std::string& key) const {
    auto v = integer(key);
    if (!v) return std::nullopt;
    if (*v < -1000000000 || *v > 1000000000) throw ArgumentError("config: " + where(key) + " is out of range");
    return static_cast<int>(*v);
  }

  std::optional<std::size_t> count(const std::string& key) const {
    auto v = integer(key);
    if (!v) return std::nullopt;
    if (*v < 0) throw ArgumentError("config: " + where(key) + " must be nonnegative");
    return static_cast<std::size_t>(*v);
  }

  std::optional<std::uint64_t> seed(const std::string& key) const {
    auto v = integer(key);
    if (!v) return std::nullopt;
    if (*v < 0) throw ArgumentError("config: " + where(key) + " must be nonnegative");
    return static_cast<std::uint64_t>(*v);
  }

  std::optional<bool> boolean(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<bool>()) return *v;
    throw type_error(key, "a boolean");
  }

  std::optional<std::string> string(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<std::string>()) return *v;
    throw type_error(key, "a string");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    const toml::array* arr = n->as_array();
    if (!arr) throw type_error(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) {
      if (auto v = item.value_exact<double>()) {
        out.push_back(*v);
      } else if (auto i = item.value_exact<std::int64_t>()) {
        out.push_back(static_cast<double>(*i));
      } else {
        throw type_error(key, "an array of numbers");
      }
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return std::nullopt;
    const toml::array* arr = n->as_array();
    if (!arr) throw type_error(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& item : *arr) {
      auto v = item.value_exact<std::string>();
      if (!v) throw type_error(key, "an array of strings");
      out.push_back(*v);
    }
    return out;
  }

  const toml::table* table(const std::string& key) const {
    const toml::node* n = get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw type_error(key, "a table");
    return n->as_table();
  }

  template <typename T, typename Parse>
  std::optional<T> parsed(const std::string& key, Parse parse) const {
    auto s = string(key);
    if (!s) return std::nullopt;
    try {
      return parse(*s);
    } catch (const ArgumentError& e) {
      throw ArgumentError("config: " + where(key) + ": " + e.what());
    }
  }

 private:
  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }
  ArgumentError type_error(const std::string& key, const std::string& expected) const {
    return ArgumentError("config: " + where(key) + " must be " + expected);
  }

  const toml::table* table_;
  std::string name_;
};

ColumnKind parse_kind(const std::string& text) {
  if (text == "continuous") return ColumnKind::kContinuous;
  if (text == "binary") return ColumnKind::kBinary;
  throw ArgumentError("unknown column kind '" + text + "' (expected continuous or binary)");
}

MissingTargetPolicy parse_policy(const std::string& text) {
  if (text == "drop") return MissingTargetPolicy::kDrop;
  if (text == "error") return MissingTargetPolicy::kError;
  throw ArgumentError("unknown missing_targets policy '" + text + "' (expected drop or error)");
}

Node lookup(const DataMatrix& data, const std::string& name, const std::string& what) {
  try {
    return data.index_of(name);
  } catch (const ArgumentError&) {
    throw ArgumentError("config: " + what + " refers to unknown variable '" + name + "'");
  }
}

}  // namespace

void PfsOverrides::apply(PfsConfig& c) const {
  if (r_max) c.r_max = *r_max;
  if (q_thresholds) c.q_thresholds = *q_thresholds;
  if (q_path) c.q_path = *q_path;
  if (rule) c.rule = *rule;
  if (threads) c.threads = *threads;
  if (intermodal_threshold) c.intermodal_threshold = *intermodal_threshold;
  if (intramodal_thresholds) c.intramodal_thresholds = *intramodal_thresholds;
  EstimatorConfig& e = c.estimator;
  if (selector) e.selector = *selector;
  if (B) e.B = *B;
  if (grid_size) e.grid_size = *grid_size;
  if (grid_ratio) e.grid_ratio = *grid_ratio;
  if (tau_grid) e.tau_grid = *tau_grid;
  if (seed) e.seed = *seed;
  if (boost_rounds) e.boost_rounds = *boost_rounds;
  if (max_depth) e.max_depth = *max_depth;
  if (learning_rate) e.learning_rate = *learning_rate;
  if (lasso_tol) e.lasso_tol = *lasso_tol;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ArgumentError(msg.str());
  }
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (k != "pfs" && k != "estimator" && k != "ingest" && k != "study") {
      throw ArgumentError("config: unknown section or key '" + k + "'");
    }
    if (!node.is_table()) throw ArgumentError("config: '" + k + "' must be a section");
  }

  RunConfig cfg;
  const Section pfs(root["pfs"].as_table(), "pfs");
  pfs.check_keys({"targets", "r_max", "q_thresholds", "q_path", "rule", "threads", "node_thresholds", "groups",
                  "intermodal_threshold", "intramodal_thresholds"});
  if (auto v = pfs.strings("targets")) cfg.targets = *v;
  cfg.pfs.r_max = pfs.small_int("r_max");
  cfg.pfs.q_thresholds = pfs.numbers("q_thresholds");
  cfg.pfs.q_path = pfs.number("q_path");
  cfg.pfs.rule = pfs.parsed<RecordRule>("rule", parse_rule);
  cfg.pfs.threads = pfs.small_int("threads");
  cfg.pfs.intermodal_threshold = pfs.number("intermodal_threshold");
  cfg.pfs.intramodal_thresholds = pfs.numbers("intramodal_thresholds");
  if (const toml::table* t = pfs.table("node_thresholds")) {
    const Section s(t, "pfs.node_thresholds");
    for (const auto& [key, node] : *t) {
      (void)node;
      cfg.node_thresholds[std::string(key.str())] = *s.number(std::string(key.str()));
    }
  }
  if (const toml::table* t = pfs.table("groups")) {
    const Section s(t, "pfs.groups");
    for (const auto& [key, node] : *t) {
      (void)node;
      cfg.groups[std::string(key.str())] = *s.string(std::string(key.str()));
    }
  }

  const Section est(root["estimator"].as_table(), "estimator");
  est.check_keys({"selector", "B", "grid_size", "grid_ratio", "tau_grid", "seed", "boost_rounds", "max_depth",
                  "learning_rate", "lasso_tol"});
  cfg.pfs.selector = est.parsed<Selector>("selector", parse_selector);
  cfg.pfs.B = est.small_int("B");
  cfg.pfs.grid_size = est.small_int("grid_size");
  cfg.pfs.grid_ratio = est.number("grid_ratio");
  cfg.pfs.tau_grid = est.numbers("tau_grid");
  cfg.pfs.seed = est.seed("seed");
  cfg.pfs.boost_rounds = est.small_int("boost_rounds");
  cfg.pfs.max_depth = est.small_int("max_depth");
  cfg.pfs.learning_rate = est.number("learning_rate");
  cfg.pfs.lasso_tol = est.number("lasso_tol");

  if (const toml::table* t = root["ingest"].as_table()) {
    const Section ing(t, "ingest");
    ing.check_keys({"targets", "kinds", "max_missing_fraction", "missing_targets", "dedup_correlation", "standardize",
                    "one_vs_rest"});
    IngestSpec spec;
    if (auto v = ing.strings("targets")) spec.targets = *v;
    if (const toml::table* kinds = ing.table("kinds")) {
      const Section s(kinds, "ingest.kinds");
      for (const auto& [key, node] : *kinds) {
        (void)node;
        spec.kinds[std::string(key.str())] = *s.parsed<ColumnKind>(std::string(key.str()), parse_kind);
      }
    }
    if (auto v = ing.number("max_missing_fraction")) spec.max_missing_fraction = *v;
    if (auto v = ing.parsed<MissingTargetPolicy>("missing_targets", parse_policy)) spec.missing_targets = *v;
    spec.dedup_correlation = ing.number("dedup_correlation");
    if (auto v = ing.boolean("standardize")) spec.standardize = *v;
    if (auto v = ing.strings("one_vs_rest")) spec.one_vs_rest = *v;
    spec.validate();
    cfg.ingest = spec;
  }

  const Section study(root["study"].as_table(), "study");
  study.check_keys({"design", "trials", "n", "p", "baseline", "baseline_c", "baseline_lambda", "baseline_combine",
                    "audit_threshold", "seed", "threads"});
  cfg.study.design = study.parsed<Design>("design", parse_design);
  cfg.study.trials = study.small_int("trials");
  cfg.study.n = study.count("n");
  cfg.study.p = study.count("p");
  cfg.study.baseline = study.boolean("baseline");
  cfg.study.baseline_c = study.number("baseline_c");
  cfg.study.baseline_lambda = study.number("baseline_lambda");
  if (cfg.study.baseline_c && cfg.study.baseline_lambda) {
    throw ArgumentError("config: [study] baseline_c and baseline_lambda are mutually exclusive");
  }
  cfg.study.baseline_combine = study.parsed<CombineRule>("baseline_combine", parse_combine);
  cfg.study.audit_threshold = study.number("audit_threshold");
  cfg.study.seed = study.seed("seed");
  cfg.study.threads = study.small_int("threads");
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path), path); }

PfsConfig resolve_pfs(const RunConfig& config, const DataMatrix& data) {
  PfsConfig out;
  config.pfs.apply(out);
  for (const auto& [name, q] : config.node_thresholds) out.node_thresholds[lookup(data, name, "node_thresholds")] = q;
  for (const auto& [name, g] : config.groups) out.groups[lookup(data, name, "groups")] = g;
  out.validate(data.p());
  return out;
}

StudyConfig resolve_study(const RunConfig& config, std::optional<Design> design) {
  const Design d = design ? *design : config.study.design.value_or(Design::kLinear);
  StudyConfig out = default_study(d);
  config.pfs.apply(out.pfs);
  if (!config.node_thresholds.empty() || !config.groups.empty()) {
    throw ArgumentError("config: node_thresholds and groups are not supported in studies");
  }
  const StudyOverrides& s = config.study;
  if (config.pfs.q_path) out.audit_threshold = *config.pfs.q_path;
  if (s.trials) out.trials = *s.trials;
  if (s.n) out.n = *s.n;
  if (s.p) out.p = *s.p;
  if (s.baseline) out.baseline_enabled = *s.baseline;
  if (s.baseline_c) out.baseline_lambda = LambdaRule{LambdaRule::Kind::kScaled, *s.baseline_c};
  if (s.baseline_lambda) out.baseline_lambda = LambdaRule{LambdaRule::Kind::kFixed, *s.baseline_lambda};
  if (s.baseline_combine) out.baseline_combine = *s.baseline_combine;
  if (s.audit_threshold) out.audit_threshold = *s.audit_threshold;
  if (s.seed) out.seed = *s.seed;
  if (s.threads) out.threads = *s.threads;
  return out;
}

}  // namespace localgraph
