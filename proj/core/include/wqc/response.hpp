#pragma once

// Energy absorption under a vibrating piston: driving spectrum, Kubo
// diffusion, the wall formula and the LRT / SLRT absorption coefficients.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wqc/measures.hpp"
#include "wqc/scales.hpp"

namespace wqc::response {

struct DrivingSpec {
  double fdot_rms = 1.0;   ///< RMS wall velocity
  double omega_c = 1.0;    ///< spectral support of the driving
  double amplitude = 0.01; ///< wall amplitude A

  void validate() const;
  /// Set when fdot_rms and omega_c A differ by more than a factor 3.
  [[nodiscard]] std::optional<std::string> consistency_warning() const;
};

/// S(w) = fdot^2 exp(-|w| / omega_c) / (2 omega_c).
[[nodiscard]] double driving_spectrum(double omega, const DrivingSpec& d);

using SpectrumFunction = std::function<double(double)>;

/// C(w) sampled on an ascending grid; linear in between, flat outside.
class TabulatedSpectrum {
 public:
  TabulatedSpectrum(std::vector<double> omega, std::vector<double> values);
  [[nodiscard]] double operator()(double omega) const;
  [[nodiscard]] const std::vector<double>& omega() const noexcept { return w_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return v_; }

 private:
  std::vector<double> w_;
  std::vector<double> v_;
};

/// D = int_0^inf C(w) S(w) dw, relative tolerance 1e-8.
[[nodiscard]] double diffusion_coefficient(const SpectrumFunction& C, const DrivingSpec& d);
/// Panels split at the table nodes; the tail beyond the last node is exact.
[[nodiscard]] double diffusion_coefficient(const TabulatedSpectrum& C, const DrivingSpec& d);

/// G0 = (1 / 2T) (8 / 3pi) m^2 vE^3 / Lx.
[[nodiscard]] double wall_formula_G0(const BilliardParams& p, double T);

struct FgrCheck {
  bool ok = false;
  double margin = 0;  ///< (omega_c / Delta0)^power / (D / Delta0^3)
};

/// D / Delta0^3 < (omega_c / Delta0)^power with power 2 or 3.
[[nodiscard]] FgrCheck fgr_check(double D, double delta0, double omega_c, int power);

struct EarReport {
  double T = 0;
  double G0 = 0;
  double G_lrt = 0;
  double G_slrt = 0;
  double D = 0;               ///< T G_lrt fdot^2
  double Edot_lrt = 0;
  double Edot_slrt = 0;
  double dimensionless_ear = 0;
  double D_over_delta0_cubed = 0;
  FgrCheck fgr2;
  FgrCheck fgr3;
  AmplitudeWindow amplitude_window{};
  std::vector<std::string> warnings;
};

/// T <= 0 selects T = E.
[[nodiscard]] EarReport ear_report(const BilliardParams& p, double T, const DrivingSpec& d,
                                   double g_c, double g_s);

/// Exponential band weight matched to the driving, b_c = omega_c / Delta0.
[[nodiscard]] measures::BandWeight weight_from_driving(const DrivingSpec& d, double delta0);

}  // namespace wqc::response
