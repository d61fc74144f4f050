#include "openres/config.hpp"

#include <set>

#include <json.hpp>

#include "openres/io.hpp"

namespace openres {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw InvalidParameter("unknown config key '" + where + item.key() + "'");
    }
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidParameter("config key '" + where + "' must be a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) {
    throw InvalidParameter("config key '" + where + "' must be an integer");
  }
  return j.get<long>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidParameter(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidParameter("config root must be a JSON object");

  reject_unknown_keys(root, "", {"n_modes", "n_channels", "coupling_x", "mean_spacing",
                                 "carrier", "medium", "dynamics", "ensemble", "outputs",
                                 "analysis"});

  RunConfig cfg;
  if (root.contains("n_modes")) cfg.n_modes = static_cast<int>(as_integer(root["n_modes"], "n_modes"));
  if (root.contains("n_channels")) {
    cfg.n_channels = static_cast<int>(as_integer(root["n_channels"], "n_channels"));
  }
  if (root.contains("coupling_x")) {
    const json& x = root["coupling_x"];
    if (x.is_array()) {
      for (const auto& v : x) cfg.coupling_x.push_back(as_number(v, "coupling_x[]"));
    } else {
      cfg.coupling_x.push_back(as_number(x, "coupling_x"));
    }
  }
  if (root.contains("mean_spacing")) cfg.mean_spacing = as_number(root["mean_spacing"], "mean_spacing");
  if (root.contains("carrier")) cfg.carrier = as_number(root["carrier"], "carrier");

  if (root.contains("medium")) {
    const json& m = root["medium"];
    if (!m.is_object()) throw InvalidParameter("config key 'medium' must be an object");
    reject_unknown_keys(m, "medium.", {"pump_strength", "atom_number", "coupling",
                                       "gamma_perp", "gamma_par"});
    if (m.contains("pump_strength")) cfg.medium.pump_strength = as_number(m["pump_strength"], "medium.pump_strength");
    if (m.contains("atom_number")) cfg.medium.atom_number = as_number(m["atom_number"], "medium.atom_number");
    if (m.contains("coupling")) cfg.medium.coupling = as_number(m["coupling"], "medium.coupling");
    if (m.contains("gamma_perp")) cfg.medium.gamma_perp = as_number(m["gamma_perp"], "medium.gamma_perp");
    if (m.contains("gamma_par")) cfg.medium.gamma_par = as_number(m["gamma_par"], "medium.gamma_par");
  }

  if (root.contains("dynamics")) {
    const json& d = root["dynamics"];
    if (!d.is_object()) throw InvalidParameter("config key 'dynamics' must be an object");
    reject_unknown_keys(d, "dynamics.", {"dt", "n_steps", "burn_in", "ordering",
                                         "export_trajectory"});
    if (d.contains("dt")) cfg.dynamics.dt = as_number(d["dt"], "dynamics.dt");
    if (d.contains("n_steps")) cfg.dynamics.n_steps = as_integer(d["n_steps"], "dynamics.n_steps");
    if (d.contains("burn_in")) cfg.dynamics.burn_in = as_integer(d["burn_in"], "dynamics.burn_in");
    if (d.contains("ordering")) {
      const std::string o = d["ordering"].is_string() ? d["ordering"].get<std::string>() : "";
      if (o == "symmetric") {
        cfg.dynamics.ordering = NoiseOrdering::symmetric;
      } else if (o == "normal") {
        cfg.dynamics.ordering = NoiseOrdering::normal;
      } else {
        throw InvalidParameter("dynamics.ordering must be 'symmetric' or 'normal'");
      }
    }
    if (d.contains("export_trajectory")) {
      if (!d["export_trajectory"].is_boolean()) {
        throw InvalidParameter("dynamics.export_trajectory must be a boolean");
      }
      cfg.dynamics.export_trajectory = d["export_trajectory"].get<bool>();
    }
  }

  if (root.contains("ensemble")) {
    const json& e = root["ensemble"];
    if (!e.is_object()) throw InvalidParameter("config key 'ensemble' must be an object");
    reject_unknown_keys(e, "ensemble.", {"n_realizations", "master_seed", "n_workers"});
    if (e.contains("n_realizations")) {
      cfg.ensemble.n_realizations = static_cast<int>(as_integer(e["n_realizations"], "ensemble.n_realizations"));
    }
    if (e.contains("master_seed")) {
      if (!e["master_seed"].is_number_integer()) {
        throw InvalidParameter("ensemble.master_seed must be an integer");
      }
      cfg.ensemble.master_seed = e["master_seed"].get<std::uint64_t>();
    }
    if (e.contains("n_workers")) {
      cfg.ensemble.n_workers = static_cast<int>(as_integer(e["n_workers"], "ensemble.n_workers"));
    }
  }

  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    if (!o.is_object()) throw InvalidParameter("config key 'outputs' must be an object");
    reject_unknown_keys(o, "outputs.", {"directory", "formats"});
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) throw InvalidParameter("outputs.directory must be a string");
      cfg.outputs.directory = o["directory"].get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) throw InvalidParameter("outputs.formats must be an array");
      cfg.outputs.write_csv = false;
      cfg.outputs.write_json = false;
      for (const auto& f : o["formats"]) {
        const std::string name = f.is_string() ? f.get<std::string>() : "";
        if (name == "csv") {
          cfg.outputs.write_csv = true;
        } else if (name == "json") {
          cfg.outputs.write_json = true;
        } else {
          throw InvalidParameter("outputs.formats entries must be 'csv' or 'json'");
        }
      }
    }
  }

  if (root.contains("analysis")) {
    const json& a = root["analysis"];
    if (!a.is_object()) throw InvalidParameter("config key 'analysis' must be an object");
    reject_unknown_keys(a, "analysis.",
                        {"spacing_window", "rwa_threshold", "degeneracy_tol", "max_condition",
                         "adiabaticity_factor", "degenerate_width_tol",
                         "spectrum_span_linewidths", "spectrum_points", "linewidth_baseline",
                         "linewidth_baseline_value"});
    if (a.contains("spacing_window")) cfg.analysis.spacing_window = as_number(a["spacing_window"], "analysis.spacing_window");
    if (a.contains("rwa_threshold")) cfg.analysis.rwa_threshold = as_number(a["rwa_threshold"], "analysis.rwa_threshold");
    if (a.contains("degeneracy_tol")) cfg.analysis.resonance.degeneracy_tol = as_number(a["degeneracy_tol"], "analysis.degeneracy_tol");
    if (a.contains("max_condition")) cfg.analysis.resonance.max_condition = as_number(a["max_condition"], "analysis.max_condition");
    if (a.contains("adiabaticity_factor")) {
      cfg.analysis.steady_state.adiabaticity_factor = as_number(a["adiabaticity_factor"], "analysis.adiabaticity_factor");
    }
    if (a.contains("degenerate_width_tol")) {
      cfg.analysis.steady_state.degenerate_width_tol = as_number(a["degenerate_width_tol"], "analysis.degenerate_width_tol");
    }
    if (a.contains("spectrum_span_linewidths")) {
      cfg.analysis.spectrum_span_linewidths = as_number(a["spectrum_span_linewidths"], "analysis.spectrum_span_linewidths");
    }
    if (a.contains("spectrum_points")) {
      cfg.analysis.spectrum_points = static_cast<int>(as_integer(a["spectrum_points"], "analysis.spectrum_points"));
    }
    if (a.contains("linewidth_baseline")) {
      const std::string b = a["linewidth_baseline"].is_string() ? a["linewidth_baseline"].get<std::string>() : "";
      if (b == "half_width_over_intensity") {
        cfg.analysis.linewidth_baseline = LinewidthBaseline::half_width_over_intensity;
      } else if (b == "user_value") {
        cfg.analysis.linewidth_baseline = LinewidthBaseline::user_value;
      } else {
        throw InvalidParameter(
            "analysis.linewidth_baseline must be 'half_width_over_intensity' or 'user_value'");
      }
    }
    if (a.contains("linewidth_baseline_value")) {
      cfg.analysis.linewidth_baseline_value = as_number(a["linewidth_baseline_value"], "analysis.linewidth_baseline_value");
    }
  }

  if (cfg.coupling_x.empty()) cfg.coupling_x.push_back(1.0);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string config_to_json(const RunConfig& cfg) {
  json root;
  root["n_modes"] = cfg.n_modes;
  root["n_channels"] = cfg.n_channels;
  root["coupling_x"] = cfg.coupling_x;
  root["mean_spacing"] = cfg.mean_spacing;
  root["carrier"] = cfg.carrier;
  root["medium"] = {{"pump_strength", cfg.medium.pump_strength},
                    {"atom_number", cfg.medium.atom_number},
                    {"coupling", cfg.medium.coupling},
                    {"gamma_perp", cfg.medium.gamma_perp},
                    {"gamma_par", cfg.medium.gamma_par}};
  root["dynamics"] = {{"dt", cfg.dynamics.dt},
                      {"n_steps", cfg.dynamics.n_steps},
                      {"burn_in", cfg.dynamics.burn_in},
                      {"ordering", cfg.dynamics.ordering == NoiseOrdering::symmetric
                                       ? "symmetric"
                                       : "normal"},
                      {"export_trajectory", cfg.dynamics.export_trajectory}};
  root["ensemble"] = {{"n_realizations", cfg.ensemble.n_realizations},
                      {"master_seed", cfg.ensemble.master_seed},
                      {"n_workers", cfg.ensemble.n_workers}};
  json formats = json::array();
  if (cfg.outputs.write_csv) formats.push_back("csv");
  if (cfg.outputs.write_json) formats.push_back("json");
  root["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", formats}};
  root["analysis"] = {
      {"spacing_window", cfg.analysis.spacing_window},
      {"rwa_threshold", cfg.analysis.rwa_threshold},
      {"degeneracy_tol", cfg.analysis.resonance.degeneracy_tol},
      {"max_condition", cfg.analysis.resonance.max_condition},
      {"adiabaticity_factor", cfg.analysis.steady_state.adiabaticity_factor},
      {"degenerate_width_tol", cfg.analysis.steady_state.degenerate_width_tol},
      {"spectrum_span_linewidths", cfg.analysis.spectrum_span_linewidths},
      {"spectrum_points", cfg.analysis.spectrum_points},
      {"linewidth_baseline",
       cfg.analysis.linewidth_baseline == LinewidthBaseline::half_width_over_intensity
           ? "half_width_over_intensity"
           : "user_value"},
      {"linewidth_baseline_value", cfg.analysis.linewidth_baseline_value}};
  return root.dump(2) + "\n";
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.n_modes < 1) problems.push_back("n_modes must be at least 1");
  if (cfg.n_channels < 1) problems.push_back("n_channels must be at least 1");
  if (cfg.coupling_x.empty()) {
    problems.push_back("coupling_x must not be empty");
  } else if (cfg.coupling_x.size() != 1 &&
             cfg.coupling_x.size() != static_cast<std::size_t>(std::max(cfg.n_channels, 0))) {
    problems.push_back("coupling_x must hold one value or one per channel");
  }
  for (double x : cfg.coupling_x) {
    if (!(x > 0.0) || !(x <= 1.0)) {
      problems.push_back("coupling_x values must lie in (0, 1]");
      break;
    }
  }
  if (!(cfg.mean_spacing > 0.0)) problems.push_back("mean_spacing must be positive");
  if (!(cfg.carrier > 0.0)) problems.push_back("carrier must be positive");
  if (!(cfg.dynamics.dt > 0.0)) problems.push_back("dynamics.dt must be positive");
  if (cfg.dynamics.n_steps < 1) problems.push_back("dynamics.n_steps must be at least 1");
  if (cfg.dynamics.burn_in < 0) problems.push_back("dynamics.burn_in must be nonnegative");
  if (cfg.ensemble.n_realizations < 1) {
    problems.push_back("ensemble.n_realizations must be at least 1");
  }
  if (cfg.ensemble.n_workers < 0) problems.push_back("ensemble.n_workers must be nonnegative");
  if (cfg.outputs.directory.empty()) problems.push_back("outputs.directory must not be empty");
  if (!cfg.outputs.write_csv && !cfg.outputs.write_json) {
    problems.push_back("outputs.formats must include csv or json");
  }
  if (!(cfg.analysis.spacing_window > 0.0) || cfg.analysis.spacing_window > 1.0) {
    problems.push_back("analysis.spacing_window must lie in (0, 1]");
  }
  if (!(cfg.analysis.rwa_threshold > 0.0)) {
    problems.push_back("analysis.rwa_threshold must be positive");
  }
  if (!(cfg.analysis.resonance.degeneracy_tol > 0.0)) {
    problems.push_back("analysis.degeneracy_tol must be positive");
  }
  if (!(cfg.analysis.resonance.max_condition > 1.0)) {
    problems.push_back("analysis.max_condition must exceed 1");
  }
  if (!(cfg.analysis.steady_state.adiabaticity_factor > 0.0)) {
    problems.push_back("analysis.adiabaticity_factor must be positive");
  }
  if (!(cfg.analysis.steady_state.degenerate_width_tol > 0.0)) {
    problems.push_back("analysis.degenerate_width_tol must be positive");
  }
  if (!(cfg.analysis.spectrum_span_linewidths > 0.0)) {
    problems.push_back("analysis.spectrum_span_linewidths must be positive");
  }
  if (cfg.analysis.spectrum_points < 3) {
    problems.push_back("analysis.spectrum_points must be at least 3");
  }
  if (cfg.analysis.linewidth_baseline == LinewidthBaseline::user_value &&
      !(cfg.analysis.linewidth_baseline_value > 0.0)) {
    problems.push_back("analysis.linewidth_baseline_value must be positive for user_value");
  }
  return problems;
}

void require_valid(const RunConfig& cfg) {
  const auto problems = validate_config(cfg);
  if (problems.empty()) return;
  std::string message = "invalid config:";
  for (const auto& p : problems) message += "\n  - " + p;
  throw InvalidParameter(message);
}

}  // namespace openres
