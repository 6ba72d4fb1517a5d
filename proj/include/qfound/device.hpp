#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qfound {

struct ReadoutError {
  double p01 = 0.0;  // P(read 1 | prepared 0)
  double p10 = 0.0;  // P(read 0 | prepared 1)

  bool operator==(const ReadoutError&) const = default;
};

/// Calibration record for one device snapshot. T1/T2 are carried as
/// metadata; the noise model does not evolve them in time.
struct DeviceModel {
  std::string name;
  std::string calibration_date;  // mm/yy
  double t1_us = 0.0;
  double t2_us = 0.0;
  double single_qubit_error = 0.0;
  double cnot_error = 0.0;
  std::vector<ReadoutError> readout;  // one entry per qubit
  std::vector<std::pair<int, int>> coupling;
  int num_qubits = 0;

  // Throws DeviceError on any violated invariant.
  void validate() const;
  bool is_noiseless() const;

  // Noise-free device with all-to-all coupling.
  static DeviceModel ideal(int num_qubits);

  bool operator==(const DeviceModel&) const = default;
};

class DeviceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Canonical 5-qubit T layout: center qubit 1 linked to 0, 2 and 3; 3 linked to 4.
std::vector<std::pair<int, int>> t_shape_coupling();
// 5-qubit bow-tie layout: two triangles sharing qubit 2.
std::vector<std::pair<int, int>> bowtie_coupling();

// Table of averaged calibration rows. Readout error is applied symmetrically
// to every qubit; single_qubit_error defaults to cnot_error / 10.
const std::vector<DeviceModel>& device_presets();
std::vector<std::string> preset_names();
// Case-insensitive; "vigo" and "valencia" resolve to their 08/20 rows.
DeviceModel preset(std::string_view name);

// Calibration document (JSON). readout_error may be a single number, a list
// of [p01, p10] pairs, or a list of {"p01", "p10"} objects.
DeviceModel parse_device(std::string_view json_text);
DeviceModel load_device(const std::filesystem::path& path);
std::string to_json(const DeviceModel& device);

// Preset name, "ideal", or a calibration file path.
DeviceModel resolve_device(std::string_view spec, int min_qubits);

}  // namespace qfound
