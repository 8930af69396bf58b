#pragma once

// Run configuration for the wqc command-line tool. Files are YAML; JSON is
// accepted as the same schema since YAML parses it directly.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "wqc/measures.hpp"
#include "wqc/scales.hpp"

namespace wqc::cli {

/// Raised with every schema or range violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  [[nodiscard]] const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct WindowConfig {
  std::optional<double> center;  ///< defaults to billiard.energy
  double levels = 100;
  double buffer_fraction = 0.15;
  bool recenter = true;
};

struct ClassicalConfig {
  std::size_t piston_hits = 100000;
  std::size_t segments = 16;
  double omega_max = 12.0;  ///< upper end of the spectrum grid, in units of DeltaL
  std::size_t grid_points = 1501;
  std::vector<double> count_windows{1.0, 3.0, 10.0};  ///< number-variance windows, in tR
};

/// How the band-matching cutoff is chosen when b_c is not given explicitly.
enum class BcRule {
  Detect,   ///< first minimum of the mean bandprofile
  DeltaR,   ///< max(1, DeltaR / Delta0)
  Driving,  ///< omega_c / Delta0 of the driving
};

struct MeasuresConfig {
  measures::BandWeight::Kind weight = measures::BandWeight::Kind::Exponential;
  std::optional<double> b_c;  ///< overrides bc_rule
  BcRule bc_rule = BcRule::Detect;
  double alpha = 1.25;
  double probe_fraction = 0.25;
};

struct StatsConfig {
  std::size_t histogram_bins = 40;
  double min_spacing = 1e-6;
};

struct DrivingConfig {
  double fdot_rms = 1.0;
  std::optional<double> omega_c;  ///< defaults to DeltaR of the billiard
  double amplitude = 0.01;
  double temperature = 0.0;       ///< <= 0 selects T = E
  std::optional<double> g_c;
  std::optional<double> g_s;
};

struct SweepConfig {
  std::vector<double> u;
  std::vector<double> hbar;  ///< empty means the hbar of billiard.energy
};

struct RunConfig {
  BilliardParams billiard;
  WindowConfig window;
  ClassicalConfig classical;
  MeasuresConfig measures;
  StatsConfig stats;
  DrivingConfig driving;
  SweepConfig sweep;
  std::uint64_t seed = 1;
  std::string out_dir = "wqc-out";
  unsigned jobs = 1;
};

[[nodiscard]] std::string_view to_string(BcRule r);

/// Parses and validates a configuration file.
[[nodiscard]] RunConfig parse_config(const std::string& path);
/// Same for configuration text already in memory.
[[nodiscard]] RunConfig parse_config_text(const std::string& text);

/// Every cross-field violation of an assembled config.
[[nodiscard]] std::vector<std::string> validate(const RunConfig& c);

/// Resolved configuration, every default filled in.
[[nodiscard]] nlohmann::json to_json(const RunConfig& c);

/// FNV-1a 64 of the compact resolved JSON, as 16 hex digits.
[[nodiscard]] std::string config_hash(const RunConfig& c);

}  // namespace wqc::cli
