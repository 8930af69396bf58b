#include "wqc/scales.hpp"

#include <cmath>
#include <sstream>

#include "wqc/error.hpp"

namespace wqc {

std::vector<std::string> BilliardParams::violations() const {
  std::vector<std::string> out;
  auto bad = [&out](const char* field, const std::string& why) {
    out.push_back(std::string(field) + ": " + why);
  };
  if (!(Lx > 0) || !std::isfinite(Lx)) bad("Lx", "must be a positive finite length");
  if (!(Ly > 0) || !std::isfinite(Ly)) bad("Ly", "must be a positive finite length");
  if (!(eps >= 0) || !(eps < Ly)) bad("eps", "must satisfy 0 <= eps < Ly");
  // The arc must reach both the top corner (y = Ly) and the bottom wall (y = 0).
  if (!(R > Ly - eps) || !(R > eps)) bad("R", "must exceed max(Ly - eps, eps) so the arc spans the wall");
  if (!(mass > 0) || !std::isfinite(mass)) bad("mass", "must be positive");
  if (!(energy > 0) || !std::isfinite(energy)) bad("energy", "must be positive");
  if (!(gamma0 >= 0) || !std::isfinite(gamma0)) bad("gamma0", "must be non-negative");
  return out;
}

void BilliardParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid billiard parameters:";
  for (const auto& s : v) os << "\n  " << s;
  throw DomainError(os.str());
}

ScaleSet derive_scales(const BilliardParams& p, PlanckLength length) {
  p.validate();
  ScaleSet s;
  s.vE = std::sqrt(2.0 * p.energy / p.mass);
  s.kE = p.mass * s.vE;
  s.lambdaE = 2.0 * kPi / s.kE;
  s.integrable = p.integrable();
  s.u = s.integrable ? 0.0 : p.Ly / p.R;

  double L = p.Lx;
  switch (length) {
    case PlanckLength::Lx: L = p.Lx; break;
    case PlanckLength::Ly: L = p.Ly; break;
    case PlanckLength::GeometricMean: L = std::sqrt(p.Lx * p.Ly); break;
  }
  s.hbar_eff = 2.0 * kPi / (s.kE * L);

  s.tL = p.Lx / s.vE;
  s.tR = s.integrable ? kInfinity : p.R / s.vE;
  s.DeltaL = 2.0 * kPi / s.tL;
  s.DeltaR = s.u * s.DeltaL;
  s.Delta0 = mean_level_spacing(p);
  s.b = s.DeltaR / s.Delta0;
  return s;
}

double box_level(int nx, int ny, const BilliardParams& p) {
  if (nx < 1 || ny < 1) throw DomainError("box_level: quantum numbers must be >= 1");
  const double kx = kPi * nx / p.Lx;
  const double ky = kPi * ny / p.Ly;
  return (kx * kx + ky * ky) / (2.0 * p.mass);
}

double mean_level_spacing(const BilliardParams& p) {
  return 2.0 * kPi / (p.mass * p.Lx * p.Ly);
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::FOPT: return "FOPT";
    case Regime::Wigner: return "WIGNER";
    case Regime::WQC: return "WQC";
    case Regime::HQC: return "HQC";
  }
  return "?";
}

RegimeBorders regime_borders(double hbar_eff) {
  return {hbar_eff * hbar_eff, hbar_eff, std::sqrt(hbar_eff)};
}

Regime classify_regime(double u, double hbar_eff) {
  if (!(u >= 0)) throw DomainError("classify_regime: u must be >= 0");
  if (!(hbar_eff > 0) || !(hbar_eff < 1)) throw DomainError("classify_regime: need 0 < hbar_eff < 1");
  const auto b = regime_borders(hbar_eff);
  if (u >= b.u_s) return Regime::HQC;
  if (u >= b.u_b) return Regime::WQC;
  if (u >= b.u_c) return Regime::Wigner;
  return Regime::FOPT;
}

namespace {
constexpr double kBoltzmann = 1.380649e-23;     // J/K
constexpr double kPlanck = 6.62607015e-34;      // J s
constexpr double kHbar = kPlanck / (2.0 * kPi);
}  // namespace

ExperimentalScales experimental_scales(const AtomParams& a) {
  if (!(a.atom_mass > 0) || !(a.temperature > 0) || !(a.box_size > 0))
    throw DomainError("experimental_scales: all inputs must be positive");
  ExperimentalScales e;
  e.vE = std::sqrt(2.0 * kBoltzmann * a.temperature / a.atom_mass);
  e.omegaL = e.vE / (2.0 * a.box_size);
  e.omega0 = kHbar / (a.atom_mass * a.box_size * a.box_size);
  e.lambda_dB = kPlanck / (a.atom_mass * e.vE);
  e.hbar_eff = e.lambda_dB / a.box_size;
  return e;
}

AmplitudeWindow slrt_amplitude_window(double b, double min_heating_a2) {
  if (!(b > 0)) throw DomainError("slrt_amplitude_window: b must be positive");
  // b^5 a^2 < b^3  <=>  a^2 < b^-2
  return {min_heating_a2, 1.0 / (b * b)};
}

}  // namespace wqc
