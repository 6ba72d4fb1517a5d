#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qfound/analysis.hpp"
#include "qfound/device.hpp"
#include "qfound/mitigation.hpp"
#include "qfound/noise.hpp"
#include "qfound/qasm.hpp"
#include "qfound/rng.hpp"
#include "qfound/transpiler.hpp"

namespace qfound::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------- config documents ----------

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

Format format_from_name(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

std::vector<double> scaled(const std::vector<double>& over_pi) {
  std::vector<double> out;
  for (double v : over_pi) out.push_back(v * kPi);
  return out;
}

ExperimentSpec experiment_from_json(const json& e) {
  if (!e.is_object()) throw ConfigError("config key 'experiment' must be an object");
  ExperimentSpec spec;
  try {
    spec.kind = experiment_kind_from_name(get_or<std::string>(e, "kind", ""));
  } catch (const ExperimentError& ex) {
    throw ConfigError(ex.what());
  }
  switch (spec.kind) {
    case ExperimentKind::kEraser:
      spec.flag = get_or<bool>(e, "erase", true);
      break;
    case ExperimentKind::kBomb:
      spec.flag = get_or<bool>(e, "bomb_present", true);
      break;
    case ExperimentKind::kGeneralBomb:
      if (e.contains("angles_over_pi")) {
        spec.angles.thetas = scaled(get_or<std::vector<double>>(e, "angles_over_pi", {}));
      } else if (e.contains("n")) {
        const int n = get_or<int>(e, "n", 0);
        if (n < 2) throw ConfigError("general_bomb needs n >= 2");
        spec.angles = e.contains("theta_over_pi") ? AngleVector::sweep_point(n, get_or<double>(e, "theta_over_pi", 0.0) * kPi)
                                                   : AngleVector::equal(n);
      }
      break;
    case ExperimentKind::kHardy:
      spec.theta0 = get_or<double>(e, "theta0_over_pi", 0.575) * kPi;
      spec.theta1 = get_or<double>(e, "theta1_over_pi", spec.theta0 / kPi) * kPi;
      break;
  }
  return spec;
}

ordered_json experiment_to_json(const ExperimentSpec& spec) {
  ordered_json e;
  e["kind"] = std::string(kind_name(spec.kind));
  switch (spec.kind) {
    case ExperimentKind::kEraser:
      e["erase"] = spec.flag;
      break;
    case ExperimentKind::kBomb:
      e["bomb_present"] = spec.flag;
      break;
    case ExperimentKind::kGeneralBomb: {
      std::vector<double> over_pi;
      for (double t : spec.angles.thetas) over_pi.push_back(t / kPi);
      e["n"] = spec.angles.size();
      e["angles_over_pi"] = over_pi;
      break;
    }
    case ExperimentKind::kHardy:
      e["theta0_over_pi"] = spec.theta0 / kPi;
      e["theta1_over_pi"] = spec.theta1 / kPi;
      break;
  }
  return e;
}

// ---------- simulation ----------

struct Observable {
  std::string name;  // empty when the experiment has none
  std::optional<EtaLabeling> labeling;
};

Observable observable_of(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::kEraser: return {};
    case ExperimentKind::kBomb:
      if (!spec.flag) return {};
      return {"eta", EtaLabeling::kSingleStage};
    case ExperimentKind::kGeneralBomb: return {"eta", EtaLabeling::kMultiStage};
    case ExperimentKind::kHardy: return {"gamma", std::nullopt};
  }
  return {};
}

std::optional<double> evaluate(const Observable& obs, const Distribution& dist) {
  if (obs.name.empty()) return std::nullopt;
  try {
    if (obs.labeling) return eta_from_distribution(dist, *obs.labeling);
    return gamma_from_distribution(dist);
  } catch (const AnalysisError&) {
    return std::nullopt;
  }
}

std::optional<double> theory_value(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::kEraser: return std::nullopt;
    case ExperimentKind::kBomb:
      if (!spec.flag) return std::nullopt;
      return 1.0 / 3.0;
    case ExperimentKind::kGeneralBomb: return eta_general(spec.angles);
    case ExperimentKind::kHardy: return gamma_closed(spec.theta0, spec.theta1);
  }
  return std::nullopt;
}

Distribution theory_distribution(const ExperimentSpec& spec, const Circuit& circuit) {
  switch (spec.kind) {
    case ExperimentKind::kEraser: return eraser_theory(spec.flag);
    case ExperimentKind::kBomb: return bomb_theory(spec.flag);
    case ExperimentKind::kHardy: {
      Distribution d{3, std::vector<double>(8)};
      const auto a = hardy_amplitudes(spec.theta0, spec.theta1);
      for (std::size_t i = 0; i < 8; ++i) d.p[i] = a[i] * a[i];
      return d;
    }
    case ExperimentKind::kGeneralBomb: break;
  }
  return probabilities(simulate_ideal(circuit));
}

struct Execution {
  Distribution measured;
  std::optional<CountsHistogram> counts;
  std::optional<Distribution> mitigated;
  std::optional<TranspiledCircuit> transpiled;
  FidelityEstimate fidelity;
  double discarded_mass = 0.0;
};

Execution execute(const Circuit& circuit, const DeviceModel& device, const RunConfig& cfg, std::uint64_t seed) {
  Execution ex;
  std::vector<ReadoutError> readout;
  const int n = circuit.num_qubits();
  if (device.is_noiseless()) {
    const StateVector state = simulate_ideal(circuit);
    if (cfg.exact) {
      ex.measured = probabilities(state);
    } else {
      ex.counts = sample_counts(state, cfg.shots, seed);
      ex.measured = ex.counts->to_distribution();
    }
    readout.assign(device.readout.begin(), device.readout.begin() + n);
  } else {
    ex.transpiled = transpile(circuit, device);
    ex.fidelity = estimate_fidelity(*ex.transpiled, device);
    if (cfg.exact) {
      const NoisyDistribution nd = noisy_distribution(ex.transpiled->circuit, device);
      ex.discarded_mass = nd.discarded_mass;
      ex.measured = to_logical_distribution(nd.distribution, *ex.transpiled);
    } else {
      ex.counts = to_logical_counts(simulate_noisy(ex.transpiled->circuit, device, cfg.shots, seed), *ex.transpiled);
      ex.measured = ex.counts->to_distribution();
    }
    readout = logical_readout(*ex.transpiled, device);
  }
  if (cfg.mitigation) {
    ConfusionMatrix cm = [&] {
      if (cfg.exact) return exact_confusion_matrix(readout);
      DeviceModel sub = DeviceModel::ideal(n);
      sub.name = device.name;
      sub.readout = readout;
      return build_confusion_matrix(sub, n, cfg.shots, splitmix64_mix(seed ^ 0xC0FFEEull));
    }();
    ex.mitigated = mitigate(ex.measured, cm);
  }
  return ex;
}

ordered_json distribution_json(const Distribution& d) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < d.p.size(); ++i) j[bitstring(i, d.num_bits)] = d.p[i];
  return j;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

// Resolves the device and maps resolution failures to config errors.
DeviceModel device_for(const std::string& spec, int qubits) {
  try {
    return resolve_device(spec, qubits);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load_config(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

std::string render_rows(const std::vector<Row>& rows, Format format) {
  if (format == Format::kCsv) return to_csv(rows);
  return to_json(rows).dump(2) + "\n";
}

Row base_row(const ExperimentSpec& spec) {
  Row r;
  r.experiment = std::string(kind_name(spec.kind));
  if (spec.kind == ExperimentKind::kGeneralBomb) {
    r.n = spec.angles.size();
    r.theta_over_pi = spec.angles.thetas.back() / kPi;
  }
  if (spec.kind == ExperimentKind::kHardy) {
    r.theta0_over_pi = spec.theta0 / kPi;
    r.theta1_over_pi = spec.theta1 / kPi;
  }
  return r;
}

}  // namespace

// ---------- rows ----------

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"experiment", "N",     "theta_over_pi", "theta0_over_pi", "theta1_over_pi",
                                             "shots",      "seed",  "observable",    "value",          "theory",
                                             "std_dev",    "device", "mitigated"};
  return cols;
}

std::string to_csv(const std::vector<Row>& rows) {
  std::ostringstream os;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  auto angle = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", *v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.experiment << "," << (r.n ? std::to_string(*r.n) : "") << "," << angle(r.theta_over_pi) << ","
       << angle(r.theta0_over_pi) << "," << angle(r.theta1_over_pi) << "," << (r.shots ? std::to_string(*r.shots) : "")
       << "," << r.seed << "," << r.observable << "," << opt(r.value) << "," << opt(r.theory) << "," << opt(r.std_dev)
       << "," << r.device << "," << (r.mitigated ? "true" : "false") << "\n";
  }
  return os.str();
}

ordered_json to_json(const std::vector<Row>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["experiment"] = r.experiment;
    j["N"] = r.n ? ordered_json(*r.n) : ordered_json(nullptr);
    j["theta_over_pi"] = optional_json(r.theta_over_pi);
    j["theta0_over_pi"] = optional_json(r.theta0_over_pi);
    j["theta1_over_pi"] = optional_json(r.theta1_over_pi);
    j["shots"] = r.shots ? ordered_json(*r.shots) : ordered_json(nullptr);
    j["seed"] = r.seed;
    j["observable"] = r.observable;
    j["value"] = optional_json(r.value);
    j["theory"] = optional_json(r.theory);
    j["std_dev"] = optional_json(r.std_dev);
    j["device"] = r.device;
    j["mitigated"] = r.mitigated;
    arr.push_back(std::move(j));
  }
  return arr;
}

// ---------- configs ----------

RunConfig run_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  if (doc.contains("experiment")) cfg.experiment = experiment_from_json(doc["experiment"]);
  cfg.device = get_or<std::string>(doc, "device", cfg.device);
  cfg.shots = get_or<std::int64_t>(doc, "shots", cfg.shots);
  cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.mitigation = get_or<bool>(doc, "mitigation", cfg.mitigation);
  cfg.exact = get_or<bool>(doc, "exact", cfg.exact);
  cfg.output = get_or<std::string>(doc, "output", cfg.output);
  cfg.format = format_from_name(get_or<std::string>(doc, "format", "json"));
  return cfg;
}

SweepConfig sweep_config_from_json(const json& doc) {
  SweepConfig cfg;
  cfg.run = run_config_from_json(doc);
  if (!doc.contains("format")) cfg.run.format = Format::kCsv;
  const json grid = doc.contains("grid") ? doc["grid"] : json::object();
  auto axis = [&](const char* key) -> std::vector<double> {
    if (!grid.contains(key)) return {};
    const json& v = grid[key];
    if (v.is_string()) return parse_grid(v.get<std::string>());
    if (v.is_object()) {
      const double start = get_or<double>(v, "start", 0.0), stop = get_or<double>(v, "stop", 0.0),
                   step = get_or<double>(v, "step", 0.0);
      return parse_grid(format_double(start) + ":" + format_double(stop) + ":" + format_double(step));
    }
    return get_or<std::vector<double>>(grid, key, {});
  };
  cfg.theta_over_pi = axis("theta_over_pi");
  cfg.theta0_over_pi = axis("theta0_over_pi");
  cfg.theta1_over_pi = axis("theta1_over_pi");
  cfg.n_values = get_or<std::vector<int>>(grid, "n", {});
  cfg.repeats = get_or<int>(doc, "repeats", 1);
  cfg.threads = get_or<int>(doc, "threads", 1);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.shots < 1) throw ConfigError("shots must be >= 1");
  try {
    cfg.experiment.validate();
  } catch (const ExperimentError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.experiment.kind == ExperimentKind::kGeneralBomb && cfg.experiment.angles.size() == 0)
    throw ConfigError("general_bomb needs angles or n");
}

void validate(const SweepConfig& cfg) {
  if (cfg.run.shots < 1) throw ConfigError("shots must be >= 1");
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  switch (cfg.run.experiment.kind) {
    case ExperimentKind::kGeneralBomb:
      if (cfg.n_values.empty() || cfg.theta_over_pi.empty()) throw ConfigError("empty grid: general_bomb sweeps need n and theta values");
      for (int n : cfg.n_values) {
        if (n < 2 || n > kMaxQubits) throw ConfigError("n values must lie in [2, " + std::to_string(kMaxQubits) + "]");
      }
      break;
    case ExperimentKind::kHardy: {
      const bool grid2d = !cfg.theta0_over_pi.empty() || !cfg.theta1_over_pi.empty();
      if (grid2d ? (cfg.theta0_over_pi.empty() || cfg.theta1_over_pi.empty()) : cfg.theta_over_pi.empty())
        throw ConfigError("empty grid: hardy sweeps need theta, or both theta0 and theta1 values");
      break;
    }
    default:
      throw ConfigError("sweeps support general_bomb and hardy only");
  }
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("invalid grid value '" + s + "'");
    }
  };
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("grid range must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0)) throw ConfigError("grid step must be positive");
    if (stop < start) throw ConfigError("grid range stop is below start");
    for (long k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
      if (k > 1'000'000) throw ConfigError("grid too large");
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  return out;
}

// ---------- run ----------

ordered_json run_document(const RunConfig& cfg) {
  validate(cfg);
  const ExperimentSpec& spec = cfg.experiment;
  const Circuit circuit = build(spec);
  const DeviceModel device = device_for(cfg.device, circuit.num_qubits());
  const Observable obs = observable_of(spec);
  const Execution ex = execute(circuit, device, cfg, cfg.seed);
  const Distribution ideal = probabilities(simulate_ideal(circuit));

  ordered_json doc;
  doc["experiment"] = experiment_to_json(spec);
  doc["device"] = device.name;
  doc["mode"] = cfg.exact ? "exact" : "sampled";
  doc["shots"] = cfg.exact ? ordered_json(nullptr) : ordered_json(cfg.shots);
  doc["seed"] = cfg.seed;
  if (ex.counts) {
    ordered_json counts = ordered_json::object();
    for (const auto& [k, n] : ex.counts->counts) counts[k] = n;
    doc["counts"] = counts;
  }
  doc["probabilities"] = distribution_json(ex.measured);
  doc["theory"] = distribution_json(theory_distribution(spec, circuit));
  doc["observable"] = obs.name.empty() ? ordered_json(nullptr) : ordered_json(obs.name);
  const auto value = evaluate(obs, ex.measured);
  doc["value"] = optional_json(value);
  doc["ideal_value"] = optional_json(evaluate(obs, ideal));
  doc["theory_value"] = optional_json(theory_value(spec));
  doc["std_error"] = (value && !cfg.exact) ? ordered_json(binomial_standard_error(std::clamp(*value, 0.0, 1.0), cfg.shots))
                                           : ordered_json(nullptr);
  if (ex.mitigated) {
    ordered_json m;
    m["probabilities"] = distribution_json(*ex.mitigated);
    m["value"] = optional_json(evaluate(obs, *ex.mitigated));
    doc["mitigated"] = m;
  } else {
    doc["mitigated"] = nullptr;
  }
  ordered_json fid;
  fid["fidelity"] = ex.fidelity.fidelity;
  fid["error"] = ex.fidelity.error;
  doc["fidelity"] = fid;
  if (ex.transpiled) {
    ordered_json t;
    t["swaps"] = ex.transpiled->swap_count;
    t["initial_layout"] = ex.transpiled->initial_layout;
    t["final_layout"] = ex.transpiled->final_layout;
    ordered_json counts = ordered_json::object();
    for (const auto& [k, n] : gate_counts(ex.transpiled->circuit)) counts[k] = n;
    t["gate_counts"] = counts;
    doc["transpile"] = t;
  }
  if (cfg.exact && !device.is_noiseless()) doc["discarded_mass"] = ex.discarded_mass;
  return doc;
}

std::vector<Row> run_rows(const ordered_json& doc, const RunConfig& cfg) {
  std::vector<Row> rows;
  Row base = base_row(cfg.experiment);
  base.shots = cfg.exact ? std::nullopt : std::optional<std::int64_t>(cfg.shots);
  base.seed = cfg.seed;
  base.device = doc["device"].get<std::string>();
  auto add = [&](const ordered_json& probs, const ordered_json& value, bool mitigated) {
    for (const auto& [key, p] : probs.items()) {
      Row r = base;
      r.observable = "P(" + key + ")";
      r.value = p.get<double>();
      r.theory = doc["theory"][key].get<double>();
      r.mitigated = mitigated;
      rows.push_back(r);
    }
    if (!doc["observable"].is_null()) {
      Row r = base;
      r.observable = doc["observable"].get<std::string>();
      if (!value.is_null()) r.value = value.get<double>();
      if (!doc["theory_value"].is_null()) r.theory = doc["theory_value"].get<double>();
      if (!mitigated && !doc["std_error"].is_null()) r.std_dev = doc["std_error"].get<double>();
      r.mitigated = mitigated;
      rows.push_back(r);
    }
  };
  add(doc["probabilities"], doc["value"], false);
  if (!doc["mitigated"].is_null()) add(doc["mitigated"]["probabilities"], doc["mitigated"]["value"], true);
  return rows;
}

// ---------- sweep ----------

std::vector<Row> sweep_rows(const SweepConfig& cfg) {
  validate(cfg);
  std::vector<ExperimentSpec> points;
  const ExperimentSpec& proto = cfg.run.experiment;
  if (proto.kind == ExperimentKind::kGeneralBomb) {
    for (int n : cfg.n_values) {
      for (double t : cfg.theta_over_pi) {
        ExperimentSpec s = proto;
        s.angles = AngleVector::sweep_point(n, t * kPi);
        points.push_back(s);
      }
    }
  } else if (!cfg.theta0_over_pi.empty()) {
    for (double t0 : cfg.theta0_over_pi) {
      for (double t1 : cfg.theta1_over_pi) {
        ExperimentSpec s = proto;
        s.theta0 = t0 * kPi;
        s.theta1 = t1 * kPi;
        points.push_back(s);
      }
    }
  } else {
    for (double t : cfg.theta_over_pi) {
      ExperimentSpec s = proto;
      s.theta0 = s.theta1 = t * kPi;
      points.push_back(s);
    }
  }
  for (const auto& s : points) {
    try {
      s.validate();
    } catch (const ExperimentError& e) {
      throw ConfigError(e.what());
    }
  }

  int max_qubits = 0;
  for (const auto& s : points) max_qubits = std::max(max_qubits, s.num_qubits());
  const DeviceModel device = device_for(cfg.run.device, max_qubits);

  auto point_rows = [&](std::size_t index) {
    const ExperimentSpec& spec = points[index];
    const Circuit circuit = build(spec);
    const Observable obs = observable_of(spec);
    const auto theory = theory_value(spec);
    std::vector<Row> rows;
    Row base = base_row(spec);
    base.observable = obs.name;
    base.theory = theory;
    base.seed = cfg.run.seed;

    Row ideal = base;
    ideal.device = "ideal";
    ideal.value = evaluate(obs, probabilities(simulate_ideal(circuit)));
    rows.push_back(ideal);

    const bool sampled_or_noisy = !cfg.run.exact || !device.is_noiseless();
    if (!sampled_or_noisy) return rows;
    const int repeats = cfg.run.exact ? 1 : cfg.repeats;
    std::vector<Row> raw, mitigated;
    for (int r = 0; r < repeats; ++r) {
      const std::uint64_t seed = splitmix64_mix(cfg.run.seed + 0x9E3779B97F4A7C15ull * (index + 1) + static_cast<std::uint64_t>(r));
      const Execution ex = execute(circuit, device, cfg.run, seed);
      Row row = base;
      row.device = device.name;
      row.seed = seed;
      row.shots = cfg.run.exact ? std::nullopt : std::optional<std::int64_t>(cfg.run.shots);
      row.value = evaluate(obs, ex.measured);
      raw.push_back(row);
      if (ex.mitigated) {
        row.value = evaluate(obs, *ex.mitigated);
        row.mitigated = true;
        mitigated.push_back(row);
      }
    }
    auto fill_std = [](std::vector<Row>& group) {
      std::vector<double> vals;
      for (const auto& r : group) {
        if (r.value) vals.push_back(*r.value);
      }
      if (vals.size() != group.size() || vals.empty()) return;
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(vals.size()));
      for (auto& r : group) r.std_dev = sd;
    };
    fill_std(raw);
    fill_std(mitigated);
    rows.insert(rows.end(), raw.begin(), raw.end());
    rows.insert(rows.end(), mitigated.begin(), mitigated.end());
    return rows;
  };

  std::vector<std::vector<Row>> results(points.size());
  const int workers = std::min<int>(cfg.threads, static_cast<int>(points.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) results[i] = point_rows(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
          try {
            results[i] = point_rows(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<Row> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

// ---------- command line ----------

namespace {

struct ExperimentFlags {
  std::string kind;
  bool erase = true;
  bool bomb_absent = false;
  std::string angles;
  int n = 0;
  double theta = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  CLI::Option* kind_opt = nullptr;
  CLI::Option* erase_opt = nullptr;
  CLI::Option* absent_opt = nullptr;
  CLI::Option* angles_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* theta_opt = nullptr;
  CLI::Option* theta0_opt = nullptr;
  CLI::Option* theta1_opt = nullptr;
};

struct CommonFlags {
  std::string config;
  std::string device;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  bool mitigate = false;
  bool exact = false;
  std::string output;
  std::string format;
  CLI::Option* device_opt = nullptr;
  CLI::Option* shots_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mitigate_opt = nullptr;
  CLI::Option* exact_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* format_opt = nullptr;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f, bool grid) {
  f.kind_opt = app->add_option("-e,--experiment", f.kind, "eraser | bomb | general_bomb | hardy");
  f.erase_opt = app->add_flag("--erase,!--no-erase", f.erase, "eraser: add the erasing Hadamard (default on)");
  f.absent_opt = app->add_flag("--bomb-absent", f.bomb_absent, "bomb: remove the bomb CNOT");
  if (!grid) {
    f.angles_opt = app->add_option("--angles", f.angles, "general_bomb: comma-separated angles in units of pi");
    f.n_opt = app->add_option("-n,--n", f.n, "general_bomb: number of beamsplitters");
    f.theta_opt = app->add_option("--theta", f.theta, "general_bomb: last angle, or hardy: both angles (units of pi)");
    f.theta0_opt = app->add_option("--theta0", f.theta0, "hardy: angle of q0 (units of pi)");
    f.theta1_opt = app->add_option("--theta1", f.theta1, "hardy: angle of q1 (units of pi)");
  }
}

void add_common_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("-c,--config", f.config, "JSON config file; flags override its values");
  f.device_opt = app->add_option("-d,--device", f.device, "preset name, calibration JSON path, or ideal");
  f.shots_opt = app->add_option("-s,--shots", f.shots, "shots per execution");
  f.seed_opt = app->add_option("--seed", f.seed, "RNG seed");
  f.mitigate_opt = app->add_flag("-m,--mitigate", f.mitigate, "apply readout-error mitigation");
  f.exact_opt = app->add_flag("--exact", f.exact, "exact probabilities instead of sampling");
  f.output_opt = app->add_option("-o,--output", f.output, "output path (- for stdout)");
  f.format_opt = app->add_option("-f,--format", f.format, "csv | json");
}

void apply_common(RunConfig& cfg, const CommonFlags& f) {
  if (f.device_opt->count()) cfg.device = f.device;
  if (f.shots_opt->count()) cfg.shots = f.shots;
  if (f.seed_opt->count()) cfg.seed = f.seed;
  if (f.mitigate_opt->count()) cfg.mitigation = f.mitigate;
  if (f.exact_opt->count()) cfg.exact = f.exact;
  if (f.output_opt->count()) cfg.output = f.output;
  if (f.format_opt->count()) cfg.format = format_from_name(f.format);
}

void apply_experiment(ExperimentSpec& spec, const ExperimentFlags& f, bool have_file_experiment) {
  if (f.kind_opt->count()) {
    const ExperimentKind kind = [&] {
      try {
        return experiment_kind_from_name(f.kind);
      } catch (const ExperimentError& e) {
        throw ConfigError(e.what());
      }
    }();
    if (kind != spec.kind || !have_file_experiment) {
      spec = ExperimentSpec{};
      spec.kind = kind;
      if (kind == ExperimentKind::kHardy) spec.theta0 = spec.theta1 = 0.575 * kPi;
    }
  } else if (!have_file_experiment) {
    throw ConfigError("no experiment given (use --experiment or a config file)");
  }
  if (spec.kind == ExperimentKind::kEraser && f.erase_opt->count()) spec.flag = f.erase;
  if (spec.kind == ExperimentKind::kBomb && f.absent_opt->count()) spec.flag = !f.bomb_absent;
  if (spec.kind == ExperimentKind::kGeneralBomb && f.angles_opt) {
    if (f.angles_opt->count()) {
      spec.angles.thetas = scaled(parse_grid(f.angles));
    } else if (f.n_opt->count()) {
      if (f.n < 2) throw ConfigError("--n must be >= 2");
      spec.angles = f.theta_opt->count() ? AngleVector::sweep_point(f.n, f.theta * kPi) : AngleVector::equal(f.n);
    }
  }
  if (spec.kind == ExperimentKind::kHardy && f.theta0_opt) {
    if (f.theta_opt->count()) spec.theta0 = spec.theta1 = f.theta * kPi;
    if (f.theta0_opt->count()) spec.theta0 = f.theta0 * kPi;
    if (f.theta1_opt->count()) spec.theta1 = f.theta1 * kPi;
  }
}

std::string devices_table() {
  std::ostringstream os;
  os << "name,calibration_date,t1_us,t2_us,cnot_error,readout_error,qubits\n";
  for (const auto& d : device_presets()) {
    os << d.name << "," << d.calibration_date << "," << d.t1_us << "," << d.t2_us << "," << d.cnot_error << ","
       << d.readout.at(0).p01 << "," << d.num_qubits << "\n";
  }
  return os.str();
}

std::string transpile_report(const Circuit& input, const TranspiledCircuit& t, const DeviceModel& device) {
  std::ostringstream os;
  const auto fid = estimate_fidelity(t, device);
  auto counts_line = [](const std::map<std::string, int>& counts) {
    std::string s;
    for (const auto& [k, n] : counts) s += (s.empty() ? "" : " ") + k + "=" + std::to_string(n);
    return s;
  };
  auto layout_line = [](const std::vector<int>& l) {
    std::string s;
    for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
    return s;
  };
  os << "// device: " << device.name << "\n";
  os << "// logical qubits: " << input.num_qubits() << "\n";
  os << "// decomposed gates: " << counts_line(gate_counts(decompose_to_basis(input))) << "\n";
  os << "// routed gates: " << counts_line(gate_counts(t.circuit)) << "\n";
  os << "// swaps: " << t.swap_count << "\n";
  os << "// initial layout: " << layout_line(t.initial_layout) << "\n";
  os << "// final layout: " << layout_line(t.final_layout) << "\n";
  os << "// estimated fidelity: " << format_double(fid.fidelity) << "\n";
  os << "// estimated error: " << format_double(fid.error) << "\n";
  return os.str();
}

Circuit load_qasm(const std::string& path) {
  try {
    return qasm::load(path);
  } catch (const qasm::ParseError& e) {
    throw ConfigError(path + ":" + e.what());
  } catch (const qasm::SemanticError& e) {
    throw ConfigError(path + ":" + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Circuit simulator for interferometer experiments", "qfound"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  ExperimentFlags run_exp;
  CommonFlags run_common;
  add_experiment_flags(run, run_exp, false);
  add_common_flags(run, run_common);

  CLI::App* sweep = app.add_subcommand("sweep", "sweep an experiment over an angle grid");
  ExperimentFlags sweep_exp;
  CommonFlags sweep_common;
  std::string grid_n, grid_theta, grid_theta0, grid_theta1;
  int repeats = 1, threads = 1;
  add_experiment_flags(sweep, sweep_exp, true);
  add_common_flags(sweep, sweep_common);
  auto* n_opt = sweep->add_option("--n", grid_n, "general_bomb: comma-separated N values");
  auto* theta_opt = sweep->add_option("--theta", grid_theta, "theta grid in units of pi: a:b:step or a,b,c");
  auto* theta0_opt = sweep->add_option("--theta0", grid_theta0, "hardy theta0 grid (units of pi)");
  auto* theta1_opt = sweep->add_option("--theta1", grid_theta1, "hardy theta1 grid (units of pi)");
  auto* repeats_opt = sweep->add_option("-r,--repeats", repeats, "executions per grid point");
  auto* threads_opt = sweep->add_option("-j,--threads", threads, "worker threads");

  CLI::App* tr = app.add_subcommand("transpile", "decompose and route a QASM program for a device");
  std::string tr_input, tr_device = "vigo", tr_output = "-";
  bool tr_fuse = false;
  tr->add_option("input", tr_input, "QASM file")->required();
  tr->add_option("-d,--device", tr_device, "preset name or calibration JSON path");
  tr->add_option("-o,--output", tr_output, "output path (- for stdout)");
  tr->add_flag("--fuse", tr_fuse, "merge runs of single-qubit gates");

  CLI::App* conv = app.add_subcommand("convert", "parse a QASM program and emit it in normal form");
  std::string conv_input, conv_output = "-";
  conv->add_option("input", conv_input, "QASM file")->required();
  conv->add_option("-o,--output", conv_output, "output path (- for stdout)");

  CLI::App* emit = app.add_subcommand("emit", "write an experiment circuit as QASM");
  ExperimentFlags emit_exp;
  std::string emit_output = "-";
  add_experiment_flags(emit, emit_exp, false);
  emit->add_option("-o,--output", emit_output, "output path (- for stdout)");

  CLI::App* dev = app.add_subcommand("devices", "list device presets");
  std::string dev_show;
  dev->add_option("--show", dev_show, "print one preset as calibration JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run) {
      RunConfig cfg;
      bool have_file_experiment = false;
      if (!run_common.config.empty()) {
        const json doc = load_config(run_common.config);
        cfg = run_config_from_json(doc);
        have_file_experiment = doc.contains("experiment");
      }
      apply_common(cfg, run_common);
      apply_experiment(cfg.experiment, run_exp, have_file_experiment);
      const ordered_json doc = run_document(cfg);
      const std::string text = cfg.format == Format::kJson ? doc.dump(2) + "\n" : to_csv(run_rows(doc, cfg));
      write_output(cfg.output, text, out);
    } else if (*sweep) {
      SweepConfig cfg;
      cfg.run.format = Format::kCsv;
      bool have_file_experiment = false;
      if (!sweep_common.config.empty()) {
        const json doc = load_config(sweep_common.config);
        cfg = sweep_config_from_json(doc);
        have_file_experiment = doc.contains("experiment");
      }
      apply_common(cfg.run, sweep_common);
      apply_experiment(cfg.run.experiment, sweep_exp, have_file_experiment);
      if (n_opt->count()) {
        cfg.n_values.clear();
        for (double v : parse_grid(grid_n)) {
          if (v != std::floor(v)) throw ConfigError("--n values must be integers");
          cfg.n_values.push_back(static_cast<int>(v));
        }
      }
      if (theta_opt->count()) cfg.theta_over_pi = parse_grid(grid_theta);
      if (theta0_opt->count()) cfg.theta0_over_pi = parse_grid(grid_theta0);
      if (theta1_opt->count()) cfg.theta1_over_pi = parse_grid(grid_theta1);
      if (repeats_opt->count()) cfg.repeats = repeats;
      if (threads_opt->count()) cfg.threads = threads;
      write_output(cfg.run.output, render_rows(sweep_rows(cfg), cfg.run.format), out);
    } else if (*tr) {
      const Circuit input = load_qasm(tr_input);
      const DeviceModel device = device_for(tr_device, input.num_qubits());
      TranspileOptions opts;
      opts.fuse_single_qubit = tr_fuse;
      const TranspiledCircuit t = transpile(input, device, opts);
      write_output(tr_output, qasm::emit(t.circuit) + transpile_report(input, t, device), out);
    } else if (*conv) {
      write_output(conv_output, qasm::emit(load_qasm(conv_input)), out);
    } else if (*emit) {
      ExperimentSpec spec;
      apply_experiment(spec, emit_exp, false);
      try {
        spec.validate();
      } catch (const ExperimentError& e) {
        throw ConfigError(e.what());
      }
      if (spec.kind == ExperimentKind::kGeneralBomb && spec.angles.size() == 0)
        throw ConfigError("general_bomb needs --angles or --n");
      write_output(emit_output, qasm::emit(build(spec)), out);
    } else if (*dev) {
      if (dev_show.empty()) {
        out << devices_table();
      } else {
        try {
          out << to_json(preset(dev_show)) << "\n";
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace qfound::cli
