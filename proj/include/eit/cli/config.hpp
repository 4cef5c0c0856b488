#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eit/materials.hpp"
#include "eit/optics.hpp"

namespace eit::cli {

/// Whether a Rabi frequency given in Hz means the angular value itself
/// (kAngular: 1.5 MHz -> 1.5e6 rad/s) or a cyclic one (kCyclic: 2 pi 1.5e6).
enum class RabiConvention { kAngular, kCyclic };

std::string to_string(RabiConvention c);
RabiConvention rabi_convention_from_string(const std::string& s);

struct FieldConfig {
  /// Magnitude as configured; `rabi_in_hz` marks a value read from a Hz key,
  /// which the Rabi convention resolves once all keys are in.
  double rabi_value = 0.0;
  bool rabi_in_hz = false;
  double phase = 0.0;     // rad
  double detuning = 0.0;  // rad/s

  double rabi(RabiConvention c) const;
};

/// Fully resolved run configuration. Numbers are in SI / rad/s.
struct RunConfig {
  Backend backend = Backend::kAnalytic;

  // material
  double density_per_m3 = 4.7e24;
  double dipole_c_m = 1e-33;
  double probe_wavelength_m = 605.7e-9;
  RateConvention rate_convention = RateConvention::kCyclic;
  std::array<double, 6> lifetimes_s{400.0, 400.0, 400.0, 164e-6, 164e-6, 164e-6};
  /// branching_frac[m][k]: share of level m+1's decay going to level k+1.
  std::array<std::array<double, 6>, 6> branching_frac{};
  std::array<std::array<double, 6>, 6> dephasing_hz{};

  // drives
  RabiConvention rabi_convention = RabiConvention::kAngular;
  FieldConfig probe{5e2};
  FieldConfig coupling{1.5e6};
  FieldConfig auxiliary{1.5e6};

  // grid
  double delta_min = -5e6;
  double delta_max = 5e6;
  std::size_t points = 2001;

  // solver
  double tol = 1e-9;
  double t_end_s = 10e-3;
  std::size_t samples = 101;
  std::string initial = "uniform";
  std::optional<double> fd_step;  // rad/s; default gamma32 / 100

  double analytic_gamma52_factor = 1.0;

  std::string output_dir = "eit_out";

  RunConfig();

  MaterialParams material() const;
  DriveSet drive_set() const;
  DetuningGrid grid() const;
  BackendOptions backend_options(std::size_t jobs) const;
  double fd_step_or_default() const;

  /// Every parameter, post-convention, as a document the loader accepts.
  nlohmann::ordered_json resolved() const;
};

/// Applies a config document on top of `cfg`. A document carrying a
/// top-level "resolved" object (a run summary) is read through that key.
/// Throws ConfigError naming the offending key.
void apply_document(RunConfig& cfg, const nlohmann::json& doc);

/// Applies one `path=value` override. The value is parsed as JSON when it
/// parses, otherwise taken as a string.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Merges all overrides into one fragment (later ones win per key) and
/// applies it, so several branching keys for one level combine.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments);

/// Defaults, then the file (if any), then each override in order.
RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides);

}  // namespace eit::cli
