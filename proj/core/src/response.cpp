#include "wqc/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wqc/classical.hpp"
#include "wqc/error.hpp"

namespace wqc::response {

namespace {

using boost::math::quadrature::gauss_kronrod;

struct Panel {
  double value = 0;
  double error = 0;
};

// Gauss-Kronrod first; tanh-sinh copes with endpoint singularities, where it
// converges on integrable ones and reports a large error on divergent ones.
Panel panel(const std::function<double(double)>& f, double a, double b) {
  Panel gk;
  gk.value = gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-10, &gk.error);
  if (std::isfinite(gk.value) && gk.error <= 1e-8 * std::abs(gk.value)) return gk;
  Panel ts;
  try {
    ts.value = boost::math::quadrature::tanh_sinh<double>().integrate(f, a, b, 1e-10, &ts.error);
  } catch (const std::exception&) {
    ts.error = std::numeric_limits<double>::infinity();
  }
  const bool gk_ok = std::isfinite(gk.value) && std::isfinite(gk.error);
  const bool ts_ok = std::isfinite(ts.value) && std::isfinite(ts.error);
  if (ts_ok && (!gk_ok || ts.error < gk.error)) return ts;
  if (gk_ok) return gk;
  throw NumericError("diffusion_coefficient: integrand is not integrable");
}

double checked(const Panel& total) {
  if (!std::isfinite(total.value) || total.error > 1e-6 * std::abs(total.value))
    throw NumericError("diffusion_coefficient: integral does not converge");
  return total.value;
}

void add(Panel& total, const Panel& p) {
  total.value += p.value;
  total.error += p.error;
}

}  // namespace

void DrivingSpec::validate() const {
  if (!(fdot_rms > 0) || !(omega_c > 0) || !(amplitude > 0))
    throw DomainError("DrivingSpec: fdot_rms, omega_c and amplitude must be positive");
}

std::optional<std::string> DrivingSpec::consistency_warning() const {
  const double ratio = fdot_rms / (omega_c * amplitude);
  if (ratio > 3.0 || ratio < 1.0 / 3.0) {
    std::ostringstream os;
    os << "fdot_rms / (omega_c A) = " << ratio << " is outside [1/3, 3]";
    return os.str();
  }
  return std::nullopt;
}

double driving_spectrum(double omega, const DrivingSpec& d) {
  d.validate();
  return d.fdot_rms * d.fdot_rms / (2.0 * d.omega_c) * std::exp(-std::abs(omega) / d.omega_c);
}

TabulatedSpectrum::TabulatedSpectrum(std::vector<double> omega, std::vector<double> values)
    : w_(std::move(omega)), v_(std::move(values)) {
  if (w_.empty() || w_.size() != v_.size()) throw DomainError("TabulatedSpectrum: bad table sizes");
  for (std::size_t i = 1; i < w_.size(); ++i)
    if (!(w_[i] > w_[i - 1])) throw DomainError("TabulatedSpectrum: grid must increase");
}

double TabulatedSpectrum::operator()(double omega) const {
  if (omega <= w_.front()) return v_.front();
  if (omega >= w_.back()) return v_.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(w_.begin(), w_.end(), omega) - w_.begin());
  const double t = (omega - w_[k - 1]) / (w_[k] - w_[k - 1]);
  return v_[k - 1] + t * (v_[k] - v_[k - 1]);
}

double diffusion_coefficient(const SpectrumFunction& C, const DrivingSpec& d) {
  d.validate();
  auto f = [&](double w) { return C(w) * driving_spectrum(w, d); };
  // Unit panels in omega_c up to 60 omega_c; the remaining weight is below e^-60.
  Panel sum;
  for (int k = 0; k < 60; ++k) add(sum, panel(f, k * d.omega_c, (k + 1) * d.omega_c));
  return checked(sum);
}

double diffusion_coefficient(const TabulatedSpectrum& C, const DrivingSpec& d) {
  d.validate();
  auto f = [&](double w) { return C(w) * driving_spectrum(w, d); };
  std::vector<double> cuts{0.0};
  for (double w : C.omega())
    if (w > 0) cuts.push_back(w);
  const double end = std::max(cuts.back(), 0.0);
  Panel sum;
  for (std::size_t i = 1; i < cuts.size(); ++i) add(sum, panel(f, cuts[i - 1], cuts[i]));
  // Flat extrapolation: C(w) = C_last beyond the table.
  const double fd2 = d.fdot_rms * d.fdot_rms;
  sum.value += C.values().back() * 0.5 * fd2 * std::exp(-end / d.omega_c);
  return checked(sum);
}

double wall_formula_G0(const BilliardParams& p, double T) {
  if (!(T > 0)) throw DomainError("wall_formula_G0: T must be positive");
  return classical::analytic_moments(p).C_inf / (2.0 * T);
}

FgrCheck fgr_check(double D, double delta0, double omega_c, int power) {
  if (power != 2 && power != 3) throw DomainError("fgr_check: power must be 2 or 3");
  if (!(delta0 > 0) || !(omega_c > 0) || !(D >= 0))
    throw DomainError("fgr_check: need D >= 0 and positive Delta0, omega_c");
  const double lhs = D / (delta0 * delta0 * delta0);
  const double rhs = std::pow(omega_c / delta0, power);
  return {lhs < rhs, lhs > 0 ? rhs / lhs : kInfinity};
}

EarReport ear_report(const BilliardParams& p, double T, const DrivingSpec& d, double g_c, double g_s) {
  d.validate();
  if (!(g_c >= 0) || !(g_s >= 0)) throw DomainError("ear_report: g_c and g_s must be >= 0");
  const auto s = derive_scales(p);
  EarReport r;
  r.T = T > 0 ? T : p.energy;
  r.G0 = wall_formula_G0(p, r.T);
  r.G_lrt = g_c * r.G0;
  r.G_slrt = g_s * g_c * r.G0;
  const double fd2 = d.fdot_rms * d.fdot_rms;
  r.D = r.T * r.G_lrt * fd2;
  r.Edot_lrt = r.G_lrt * fd2;
  r.Edot_slrt = r.G_slrt * fd2;

  const double a = d.amplitude / p.Lx;
  const double wl = d.omega_c / s.DeltaL;
  r.dimensionless_ear = 8.0 / (3.0 * kPi * kPi) * wl * wl * a * a;
  const double l0 = s.DeltaL / s.Delta0;
  const double c0 = d.omega_c / s.Delta0;
  r.D_over_delta0_cubed = 8.0 / (3.0 * kPi * kPi) * l0 * l0 * l0 * c0 * c0 * a * a;
  const double d_closed = r.D_over_delta0_cubed * s.Delta0 * s.Delta0 * s.Delta0;
  r.fgr2 = fgr_check(d_closed, s.Delta0, d.omega_c, 2);
  r.fgr3 = fgr_check(d_closed, s.Delta0, d.omega_c, 3);
  r.amplitude_window = slrt_amplitude_window(std::max(c0, 1e-300));
  if (auto w = d.consistency_warning()) r.warnings.push_back(*w);
  if (g_s > 1) r.warnings.emplace_back("g_s > 1: SLRT coefficient exceeds the LRT value");
  return r;
}

measures::BandWeight weight_from_driving(const DrivingSpec& d, double delta0) {
  d.validate();
  if (!(delta0 > 0)) throw DomainError("weight_from_driving: Delta0 must be positive");
  return measures::BandWeight(measures::BandWeight::Kind::Exponential, d.omega_c / delta0);
}

}  // namespace wqc::response
