#pragma once

// Band structure of intensity matrices X = |F|^2: bandprofiles, sparsity,
// algebraic and resistor-network band averages, and the corrections applied
// to the resulting absorption factors.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wqc::measures {

/// Weight F(r) over level offsets r != 0, normalized so that sum_{r != 0} F(r) = 1.
class BandWeight {
 public:
  enum class Kind { Exponential, Rectangular, Tabulated };

  /// Exponential: F(r) ~ exp(-|r| / b_c), truncated at |r| <= 10 b_c.
  /// Rectangular: F(r) constant on 1 <= |r| <= b_c.
  BandWeight(Kind kind, double b_c);

  /// Explicit weights values[r - 1] for r = 1 .. size, used as given (no
  /// normalization). Sums of driving sources are built this way.
  static BandWeight tabulated(std::vector<double> values);
  /// Pointwise sum of two weights, unnormalized.
  [[nodiscard]] BandWeight operator+(const BandWeight& other) const;

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double b_c() const noexcept { return b_c_; }
  /// Largest offset with nonzero weight.
  [[nodiscard]] int max_offset() const noexcept { return static_cast<int>(w_.size()) - 1; }
  [[nodiscard]] double operator()(int r) const noexcept;

 private:
  Kind kind_ = Kind::Tabulated;
  double b_c_ = 0;
  std::vector<double> w_;  // w_[r] for r = 0 .. max_offset, w_[0] = 0

  BandWeight() = default;
};

[[nodiscard]] std::string_view to_string(BandWeight::Kind k);
[[nodiscard]] BandWeight::Kind weight_kind_from_string(std::string_view s);

struct BandProfile {
  std::vector<int> r;
  std::vector<double> mean_values;
  std::vector<double> median_values;
};

/// Mean and median of X along each diagonal n - m = r, r = 1 .. max_offset
/// (max_offset <= 0 means all diagonals).
[[nodiscard]] BandProfile band_profiles(const Eigen::MatrixXd& X, int max_offset = 0);

/// Mean and median of X_nm grouped by |E_n - E_m| into the bins [edges_k, edges_{k+1}).
struct BinnedProfile {
  std::vector<double> omega;  ///< bin centres
  std::vector<double> mean_values;
  std::vector<double> median_values;
  std::vector<std::size_t> counts;
};

[[nodiscard]] BinnedProfile energy_binned_profile(const Eigen::MatrixXd& X,
                                                  const Eigen::VectorXd& energies,
                                                  const std::vector<double>& edges);

/// Each diagonal replaced by its average.
[[nodiscard]] Eigen::MatrixXd uniformize(const Eigen::MatrixXd& X);

/// Elements of each diagonal randomly permuted (kept symmetric).
[[nodiscard]] Eigen::MatrixXd untexture(const Eigen::MatrixXd& X, std::uint64_t seed);

/// s = PN[X] / PN[X_unf] over the upper triangle, offsets 1 .. max_offset.
[[nodiscard]] double sparsity_s(const Eigen::MatrixXd& X, int max_offset = 0);

/// Rows whose weighted neighbourhoods enter the bulk averages, [first, last].
struct ProbeNodes {
  int first;
  int last;
};

/// Probe nodes floor(N f) and N - 1 - floor(N f); f = 0 gives the terminals.
[[nodiscard]] ProbeNodes probe_nodes(int n, double probe_fraction);

/// Weighted algebraic average sum F X / sum F over rows between the probes.
[[nodiscard]] double band_average(const Eigen::MatrixXd& X, const BandWeight& w,
                                  double probe_fraction = 0.25);

struct NetworkOptions {
  /// Voltage probes sit this fraction of N in from each terminal.
  double probe_fraction = 0.25;
  int refinement_steps = 3;
};

struct NetworkResult {
  double conductance = 0;  ///< (b - a) / (V_a - V_b) for unit current
  bool connected = true;
  double residual = 0;     ///< max |L V - I| / |I| after refinement
  ProbeNodes probes{0, 0};  ///< nodes the voltage drop was read between
  std::optional<std::string> diagnostic;
};

/// Inverse resistivity of the network G_nm = 2 F(n - m) X_nm / (n - m)^2 with
/// unit current entering node 0 and leaving node N - 1.
[[nodiscard]] NetworkResult network_conductance(const Eigen::MatrixXd& X, const BandWeight& w,
                                                const NetworkOptions& opt = {});

/// network_conductance(X) / network_conductance(ones), so a uniform X returns its value.
[[nodiscard]] double network_average(const Eigen::MatrixXd& X, const BandWeight& w,
                                     const NetworkOptions& opt = {});

struct LowerBounds {
  double harmonic = 0;
  double geometric = 0;
  double median = 0;
};

/// Weighted harmonic and geometric means and weighted median over the same
/// elements as band_average.
[[nodiscard]] LowerBounds lower_bounds(const Eigen::MatrixXd& X, const BandWeight& w,
                                       double probe_fraction = 0.25);

struct GReport {
  double algebraic = 0;
  double network = 0;
  double g_c = 0;
  double g_s = 0;
  double g = 0;
};

[[nodiscard]] GReport g_report(const Eigen::MatrixXd& X, const BandWeight& w, double x_avg_inf,
                               const NetworkOptions& opt = {});

struct Corrected {
  double value = 0;
  double raw = 0;
  std::optional<std::string> warning;
};

/// min{1, g exp[sqrt(ln b ln(1/g))]}; raw is the uncapped value.
[[nodiscard]] Corrected vrh_correct(double g, double b);

/// [1 - r ln(2 / r)] g_c with r = Delta0 / DeltaR, clamped at 0.
[[nodiscard]] Corrected gc_weak_localization(double gc_classical, double delta0_over_deltaR);

/// (1/hbar)^{6 - 4 alpha} u^2.
[[nodiscard]] double gs_theory(double u, double hbar_eff, double alpha);

/// First local minimum of the 3-point smoothed mean profile, as an offset.
/// Falls back to the last offset when the profile has no interior minimum.
[[nodiscard]] double detect_bc(const BandProfile& profile);

struct MeasureOptions {
  BandWeight::Kind weight = BandWeight::Kind::Exponential;
  std::optional<double> b_c;  ///< empty means detect from the bandprofile
  double probe_fraction = 0.25;
  /// Bandwidth b used by the VRH correction; defaults to b_c.
  std::optional<double> vrh_b;
};

struct MeasureReport {
  double b_c = 0;
  double s = 0;
  GReport g;
  double g_vrh = 0;
  double g_vrh_raw = 0;
  LowerBounds bounds;
  BandProfile profile;
  std::vector<std::string> warnings;
};

[[nodiscard]] MeasureReport measure_report(const Eigen::MatrixXd& X, double x_avg_inf,
                                           const MeasureOptions& opt = {});

}  // namespace wqc::measures
