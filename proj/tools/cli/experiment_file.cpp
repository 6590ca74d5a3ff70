#include "experiment_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pgpe::cli {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

// Reads keys out of one JSON object and remembers which ones were consumed so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ConfigError(path_.empty() ? "<document>" : path_, "expected a JSON object");
    }
  }

  [[nodiscard]] bool has(std::string_view key) const { return node_.contains(key); }

  const json& get(std::string_view key) {
    seen_.insert(std::string(key));
    if (!node_.contains(key)) throw ConfigError(join(path_, key), "required key is missing");
    return node_.at(std::string(key));
  }

  double number(std::string_view key) {
    const json& v = get(key);
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }

  double number_or(std::string_view key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t count(std::string_view key) {
    const json& v = get(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(join(path_, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::uint64_t count_or(std::string_view key, std::uint64_t fallback) {
    return has(key) ? count(key) : fallback;
  }

  std::string text(std::string_view key) {
    const json& v = get(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(join(path_, key), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto checked(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

std::vector<double> read_candidates(const json& node, const std::string& key) {
  if (node.is_array()) {
    std::vector<double> out;
    for (const auto& v : node) {
      if (!v.is_number()) throw ConfigError(key, "candidates must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  ObjectReader r(node, key);
  const double from = r.number("from");
  const double to = r.number("to");
  const std::uint64_t per_decade = r.count("per_decade");
  r.finish();
  return checked(key, [&] { return geometric_grid(from, to, static_cast<int>(per_decade)); });
}

GridSpec read_grid(const json& node) {
  ObjectReader r(node, "grid");
  GridSpec g;
  g.alpha_mu = read_candidates(r.get("alpha_mu"), "grid.alpha_mu");
  g.alpha_sigma = read_candidates(r.get("alpha_sigma"), "grid.alpha_sigma");
  if (r.has("metric")) {
    const std::string m = r.text("metric");
    g.metric = checked("grid.metric", [&] { return parse_selection_metric(m); });
  }
  g.runs_per_cell = r.count_or("runs_per_cell", g.runs_per_cell);
  r.finish();
  if (g.alpha_mu.empty()) throw ConfigError("grid.alpha_mu", "candidates are empty");
  if (g.alpha_sigma.empty()) throw ConfigError("grid.alpha_sigma", "candidates are empty");
  checked("grid", [&] {
    g.validate();
    return 0;
  });
  return g;
}

}  // namespace

ExperimentFile parse_experiment(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  ObjectReader top(doc, "");

  const std::string variant_name = top.text("variant");
  const auto variant = parse_variant(variant_name);
  if (!variant) {
    throw ConfigError("variant", "unknown variant '" + variant_name +
                                     "' (expected PGPE, SyS, SupSyS, PGPE4smp or SupIf)");
  }

  ObjectReader obj(top.get("objective"), "objective");
  const std::string obj_name = obj.text("name");
  const ObjectiveKind kind =
      checked("objective.name", [&] { return parse_objective_kind(obj_name); });
  const std::uint64_t dim = obj.count("dim");
  obj.finish();
  if (dim == 0) throw ConfigError("objective.dim", "must be at least 1");

  ExperimentFile file;
  RunConfig& c = file.run;
  c = RunConfig::defaults_for(kind, dim);
  c.meta.variant = *variant;

  ObjectReader meta(top.get("meta"), "meta");
  c.meta.alpha_mu = meta.number("alpha_mu");
  c.meta.alpha_sigma = meta.number("alpha_sigma");
  c.meta.sigma_floor = meta.number_or("sigma_floor", c.meta.sigma_floor);
  if (meta.has("supsys_sigma")) {
    const std::string form = meta.text("supsys_sigma");
    const auto parsed = parse_supsys_sigma_form(form);
    if (!parsed) throw ConfigError("meta.supsys_sigma", "expected 'original' or 'symmetrized'");
    c.meta.supsys_sigma = *parsed;
  }
  meta.finish();
  if (!(c.meta.alpha_mu > 0.0)) throw ConfigError("meta.alpha_mu", "must be positive");
  if (!(c.meta.alpha_sigma > 0.0)) throw ConfigError("meta.alpha_sigma", "must be positive");
  if (!(c.meta.sigma_floor > 0.0)) throw ConfigError("meta.sigma_floor", "must be positive");

  if (top.has("baseline")) {
    ObjectReader b(top.get("baseline"), "baseline");
    const std::string k = b.text("kind");
    c.baseline.kind = checked("baseline.kind", [&] { return parse_baseline_kind(k); });
    c.baseline.gamma = b.number_or("gamma", c.baseline.gamma);
    c.baseline.window = b.count_or("window", c.baseline.window);
    b.finish();
    checked("baseline", [&] {
      c.baseline.validate();
      return 0;
    });
  }

  c.label = top.has("label") ? top.text("label") : std::string(to_string(c.meta.variant));
  c.mu0_range = top.number_or("mu0_range", c.mu0_range);
  c.sigma0 = top.number_or("sigma0", c.sigma0);
  c.max_evaluations = top.count("max_evaluations");
  c.target_reward = top.number("target_reward");
  c.base_seed = top.count("base_seed");
  c.run_count = top.count("run_count");
  c.grid_points = top.count_or("grid_points", c.grid_points);

  if (!(c.mu0_range >= 0.0)) throw ConfigError("mu0_range", "must be non-negative");
  if (!(c.sigma0 > 0.0)) throw ConfigError("sigma0", "must be positive");
  if (c.max_evaluations < 4) throw ConfigError("max_evaluations", "must be at least 4");
  if (c.run_count == 0) throw ConfigError("run_count", "must be at least 1");
  if (c.grid_points == 0) throw ConfigError("grid_points", "must be at least 1");

  if (top.has("grid")) file.grid = read_grid(top.get("grid"));
  top.finish();

  checked("<document>", [&] {
    c.validate();
    return 0;
  });
  return file;
}

ExperimentFile load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

std::string emit_experiment(const ExperimentFile& file) {
  const RunConfig& c = file.run;
  ordered_json doc;
  doc["label"] = c.label;
  doc["variant"] = std::string(to_string(c.meta.variant));
  doc["objective"] = {{"name", std::string(to_string(c.objective))}, {"dim", c.dim}};
  doc["meta"] = {{"alpha_mu", c.meta.alpha_mu},
                 {"alpha_sigma", c.meta.alpha_sigma},
                 {"sigma_floor", c.meta.sigma_floor},
                 {"supsys_sigma", std::string(to_string(c.meta.supsys_sigma))}};
  doc["baseline"] = {{"kind", std::string(to_string(c.baseline.kind))},
                     {"gamma", c.baseline.gamma},
                     {"window", c.baseline.window}};
  doc["mu0_range"] = c.mu0_range;
  doc["sigma0"] = c.sigma0;
  doc["max_evaluations"] = c.max_evaluations;
  doc["target_reward"] = c.target_reward;
  doc["base_seed"] = c.base_seed;
  doc["run_count"] = c.run_count;
  doc["grid_points"] = c.grid_points;
  if (file.grid) {
    doc["grid"] = {{"alpha_mu", file.grid->alpha_mu},
                   {"alpha_sigma", file.grid->alpha_sigma},
                   {"metric", std::string(to_string(file.grid->metric))},
                   {"runs_per_cell", file.grid->runs_per_cell}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace pgpe::cli
