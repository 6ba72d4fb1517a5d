#include "qfound/device.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qfound {

namespace {

using nlohmann::json;

bool valid_rate(double r) { return std::isfinite(r) && r >= 0.0 && r < 1.0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

DeviceModel make_preset(std::string name, std::string date, double t1, double t2, double cnot_pct,
                        double readout_pct, std::vector<std::pair<int, int>> coupling) {
  DeviceModel d;
  d.name = std::move(name);
  d.calibration_date = std::move(date);
  d.t1_us = t1;
  d.t2_us = t2;
  d.cnot_error = cnot_pct / 100.0;
  d.single_qubit_error = d.cnot_error / 10.0;
  d.num_qubits = 5;
  const double r = readout_pct / 100.0;
  d.readout.assign(5, ReadoutError{r, r});
  d.coupling = std::move(coupling);
  return d;
}

}  // namespace

void DeviceModel::validate() const {
  if (name.empty()) throw DeviceError("device name is empty");
  if (num_qubits < 1 || num_qubits > 24) throw DeviceError("device num_qubits must be in [1, 24]");
  if (!(std::isfinite(t1_us) && t1_us > 0.0)) throw DeviceError("t1_us must be positive");
  if (!(std::isfinite(t2_us) && t2_us > 0.0)) throw DeviceError("t2_us must be positive");
  if (!valid_rate(single_qubit_error)) throw DeviceError("single_qubit_error must be in [0, 1)");
  if (!valid_rate(cnot_error)) throw DeviceError("cnot_error must be in [0, 1)");
  if (static_cast<int>(readout.size()) != num_qubits)
    throw DeviceError("readout_error must have one entry per qubit");
  for (const auto& r : readout) {
    if (!valid_rate(r.p01) || !valid_rate(r.p10)) throw DeviceError("readout_error must be in [0, 1)");
  }
  for (const auto& [a, b] : coupling) {
    if (a < 0 || a >= num_qubits || b < 0 || b >= num_qubits)
      throw DeviceError("coupling references unknown qubit index");
    if (a == b) throw DeviceError("coupling edge connects a qubit to itself");
  }
}

bool DeviceModel::is_noiseless() const {
  if (single_qubit_error != 0.0 || cnot_error != 0.0) return false;
  return std::all_of(readout.begin(), readout.end(),
                     [](const ReadoutError& r) { return r.p01 == 0.0 && r.p10 == 0.0; });
}

DeviceModel DeviceModel::ideal(int num_qubits) {
  DeviceModel d;
  d.name = "ideal";
  d.calibration_date = "";
  d.t1_us = 1e9;
  d.t2_us = 1e9;
  d.num_qubits = num_qubits;
  d.readout.assign(static_cast<std::size_t>(num_qubits), ReadoutError{});
  for (int a = 0; a < num_qubits; ++a) {
    for (int b = a + 1; b < num_qubits; ++b) d.coupling.emplace_back(a, b);
  }
  d.validate();
  return d;
}

std::vector<std::pair<int, int>> t_shape_coupling() { return {{0, 1}, {1, 2}, {1, 3}, {3, 4}}; }

std::vector<std::pair<int, int>> bowtie_coupling() { return {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}}; }

const std::vector<DeviceModel>& device_presets() {
  static const std::vector<DeviceModel> presets = [] {
    const auto t = t_shape_coupling();
    std::vector<DeviceModel> v;
    v.push_back(make_preset("burlington", "08/20", 84.88, 67.36, 1.50, 4.64, t));
    v.push_back(make_preset("essex", "08/20", 104.31, 123.7, 1.76, 3.59, t));
    v.push_back(make_preset("london", "08/20", 61.45, 62.74, 1.75, 4.40, t));
    v.push_back(make_preset("ourense", "08/20", 93.15, 66.43, 0.92, 2.96, t));
    v.push_back(make_preset("valencia-08-20", "08/20", 84.18, 62.78, 1.11, 2.32, t));
    v.push_back(make_preset("valencia-09-20", "09/20", 100.00, 80.49, 1.10, 2.52, t));
    v.push_back(make_preset("vigo-08-20", "08/20", 73.28, 50.73, 1.07, 1.66, t));
    v.push_back(make_preset("vigo-09-20", "09/20", 107.64, 74.04, 0.94, 1.96, t));
    v.push_back(make_preset("x2", "08/20", 57.08, 45.40, 1.82, 3.18, bowtie_coupling()));
    for (const auto& d : v) d.validate();
    return v;
  }();
  return presets;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& d : device_presets()) names.push_back(d.name);
  return names;
}

DeviceModel preset(std::string_view name) {
  std::string key = lower(name);
  if (key == "vigo") key = "vigo-08-20";
  if (key == "valencia") key = "valencia-08-20";
  for (const auto& d : device_presets()) {
    if (d.name == key) return d;
  }
  throw DeviceError("unknown device preset '" + std::string(name) + "'");
}

DeviceModel parse_device(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DeviceError(std::string("malformed calibration document: ") + e.what());
  }
  if (!doc.is_object()) throw DeviceError("calibration document must be a JSON object");

  DeviceModel d;
  try {
    d.name = doc.at("name").get<std::string>();
    d.calibration_date = doc.value("calibration_date", std::string{});
    d.t1_us = doc.at("t1_us").get<double>();
    d.t2_us = doc.at("t2_us").get<double>();
    d.cnot_error = doc.at("cnot_error").get<double>();
    d.single_qubit_error = doc.contains("single_qubit_error") ? doc.at("single_qubit_error").get<double>()
                                                              : d.cnot_error / 10.0;
    d.num_qubits = doc.at("num_qubits").get<int>();
    if (d.num_qubits < 1 || d.num_qubits > 24) throw DeviceError("device num_qubits must be in [1, 24]");

    const json& ro = doc.at("readout_error");
    if (ro.is_number()) {
      const double r = ro.get<double>();
      d.readout.assign(static_cast<std::size_t>(d.num_qubits), ReadoutError{r, r});
    } else if (ro.is_array()) {
      for (const auto& e : ro) {
        if (e.is_array() && e.size() == 2) {
          d.readout.push_back({e[0].get<double>(), e[1].get<double>()});
        } else if (e.is_object()) {
          d.readout.push_back({e.at("p01").get<double>(), e.at("p10").get<double>()});
        } else {
          throw DeviceError("readout_error entries must be [p01, p10] pairs or {p01, p10} objects");
        }
      }
    } else {
      throw DeviceError("readout_error must be a number or a per-qubit list");
    }

    for (const auto& e : doc.at("coupling")) {
      if (!e.is_array() || e.size() != 2) throw DeviceError("coupling entries must be [i, j] pairs");
      d.coupling.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  } catch (const json::exception& e) {
    throw DeviceError(std::string("malformed calibration document: ") + e.what());
  }
  d.validate();
  return d;
}

DeviceModel load_device(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DeviceError("cannot open calibration file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_device(ss.str());
}

std::string to_json(const DeviceModel& device) {
  nlohmann::ordered_json doc;
  doc["name"] = device.name;
  doc["calibration_date"] = device.calibration_date;
  doc["t1_us"] = device.t1_us;
  doc["t2_us"] = device.t2_us;
  doc["single_qubit_error"] = device.single_qubit_error;
  doc["cnot_error"] = device.cnot_error;
  auto ro = nlohmann::ordered_json::array();
  for (const auto& r : device.readout) ro.push_back({r.p01, r.p10});
  doc["readout_error"] = ro;
  auto cp = nlohmann::ordered_json::array();
  for (const auto& [a, b] : device.coupling) cp.push_back({a, b});
  doc["coupling"] = cp;
  doc["num_qubits"] = device.num_qubits;
  return doc.dump(2) + "\n";
}

DeviceModel resolve_device(std::string_view spec, int min_qubits) {
  DeviceModel d;
  if (lower(spec) == "ideal") {
    d = DeviceModel::ideal(std::max(min_qubits, 1));
  } else if (std::filesystem::exists(std::filesystem::path(std::string(spec)))) {
    d = load_device(std::filesystem::path(std::string(spec)));
  } else {
    d = preset(spec);
  }
  if (d.num_qubits < min_qubits)
    throw DeviceError("device '" + d.name + "' has " + std::to_string(d.num_qubits) + " qubits; circuit needs " +
                      std::to_string(min_qubits));
  return d;
}

}  // namespace qfound
