#pragma once

// Billiard parameters, derived time/frequency scales and regime borders.
//
// Internal units fix hbar = 1, so wavenumber and momentum coincide (k = m v).
// Only experimental_scales() works in SI units.

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace wqc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Geometry and constants of one deformed-rectangle billiard.
///
/// The piston is the right wall x = Lx. The left wall is a circular arc of
/// radius R whose centre sits at height eps; R = infinity gives the flat box.
struct BilliardParams {
  double Lx = 1.5;
  double Ly = 1.0;
  double R = 8.0;
  double eps = 0.1;
  double mass = 0.5;
  double energy = 13618.0;
  double gamma0 = 0.0;

  /// Every violated invariant, one message per field. Empty when valid.
  [[nodiscard]] std::vector<std::string> violations() const;
  /// Throws DomainError listing all violations.
  void validate() const;
  [[nodiscard]] bool integrable() const noexcept { return R == kInfinity; }
};

/// Which box side plays the role of the generic length L in hbar_eff = lambda_E / L.
enum class PlanckLength { Lx, Ly, GeometricMean };

struct ScaleSet {
  double vE = 0;       ///< particle speed (2E/m)^{1/2}
  double kE = 0;       ///< wavenumber m vE
  double lambdaE = 0;  ///< de Broglie wavelength 2 pi / kE
  double u = 0;        ///< deformation Ly / R
  double hbar_eff = 0; ///< scaled Planck constant 2 pi / (kE L)
  double tL = 0;       ///< ballistic time Lx / vE
  double tR = 0;       ///< Lyapunov time R / vE (infinite for the flat box)
  double DeltaL = 0;   ///< 2 pi / tL
  double DeltaR = 0;   ///< 2 pi / tR = u DeltaL
  double Delta0 = 0;   ///< mean level spacing 2 pi / (m Lx Ly)
  double b = 0;        ///< bandwidth in level units, DeltaR / Delta0
  bool integrable = false;
};

[[nodiscard]] ScaleSet derive_scales(const BilliardParams& p,
                                     PlanckLength length = PlanckLength::Lx);

/// Unperturbed level E(nx, ny) = [(pi nx / Lx)^2 + (pi ny / Ly)^2] / 2m.
[[nodiscard]] double box_level(int nx, int ny, const BilliardParams& p);

/// Mean level spacing of the box from the Weyl density, 2 pi / (m Lx Ly).
[[nodiscard]] double mean_level_spacing(const BilliardParams& p);

enum class Regime { FOPT, Wigner, WQC, HQC };

[[nodiscard]] std::string_view to_string(Regime r);

/// Border values of the (u, hbar) regime map: u_c = hbar^2, u_b = hbar, u_s = hbar^{1/2}.
struct RegimeBorders {
  double u_c;
  double u_b;
  double u_s;
};

[[nodiscard]] RegimeBorders regime_borders(double hbar_eff);

/// Each border belongs to the regime above it.
[[nodiscard]] Regime classify_regime(double u, double hbar_eff);

/// Cold-atom experiment description in SI units.
struct AtomParams {
  double atom_mass = 1.4e-25;    ///< kg
  double temperature = 1.0e-7;   ///< K
  double box_size = 1.0e-5;      ///< m
};

struct ExperimentalScales {
  double vE;        ///< m/s, from E = k_B T
  double omegaL;    ///< Hz, vE / 2L
  double omega0;    ///< Hz, hbar / (m L^2)
  double hbar_eff;  ///< lambda_dB / L
  double lambda_dB; ///< m
};

[[nodiscard]] ExperimentalScales experimental_scales(const AtomParams& a);

/// Interval of scaled amplitudes a^2 = (A/L)^2 satisfying a^2 > 1e-3 (measurable
/// heating within ~1000 bounces) and b^5 a^2 < b^3 (FGR). Empty when lower >= upper.
struct AmplitudeWindow {
  double a2_min;
  double a2_max;
  [[nodiscard]] bool empty() const noexcept { return !(a2_min < a2_max); }
};

[[nodiscard]] AmplitudeWindow slrt_amplitude_window(double b, double min_heating_a2 = 1.0e-3);

}  // namespace wqc
