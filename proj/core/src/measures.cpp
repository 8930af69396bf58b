#include <algorithm>
#include <cmath>
#include <sstream>

#include "wqc/error.hpp"
#include "wqc/measures.hpp"

namespace wqc::measures {

GReport g_report(const Eigen::MatrixXd& X, const BandWeight& w, double x_avg_inf,
                 const NetworkOptions& opt) {
  if (!(x_avg_inf > 0)) throw DomainError("g_report: x_avg_inf must be positive");
  GReport g;
  g.algebraic = band_average(X, w, opt.probe_fraction);
  g.network = network_average(X, w, opt);
  if (!(g.algebraic > 0)) throw DomainError("g_report: algebraic band average is zero");
  g.g_c = g.algebraic / x_avg_inf;
  g.g_s = g.network / g.algebraic;
  g.g = g.g_s * g.g_c;
  return g;
}

Corrected vrh_correct(double g, double b) {
  if (!(g > 0)) throw DomainError("vrh_correct: g must be positive");
  if (!(b >= 1)) throw DomainError("vrh_correct: b must be >= 1");
  if (g > 1) return {g, g, "g > 1 passed through without correction"};
  const double raw = g * std::exp(std::sqrt(std::log(b) * std::log(1.0 / g)));
  return {std::min(1.0, raw), raw, std::nullopt};
}

Corrected gc_weak_localization(double gc_classical, double delta0_over_deltaR) {
  const double r = delta0_over_deltaR;
  if (!(r > 0) || !(r < 1)) throw DomainError("gc_weak_localization: need 0 < Delta0/DeltaR < 1");
  const double raw = (1.0 - r * std::log(2.0 / r)) * gc_classical;
  if (raw < 0) {
    std::ostringstream os;
    os << "correction factor negative at Delta0/DeltaR = " << r << "; clamped to 0";
    return {0.0, raw, os.str()};
  }
  return {raw, raw, std::nullopt};
}

double gs_theory(double u, double hbar_eff, double alpha) {
  if (!(u >= 0) || !(hbar_eff > 0) || !(alpha > 0))
    throw DomainError("gs_theory: need u >= 0, hbar_eff > 0, alpha > 0");
  return std::pow(1.0 / hbar_eff, 6.0 - 4.0 * alpha) * u * u;
}

MeasureReport measure_report(const Eigen::MatrixXd& X, double x_avg_inf, const MeasureOptions& opt) {
  MeasureReport rep;
  rep.profile = band_profiles(X);
  rep.b_c = opt.b_c ? *opt.b_c : detect_bc(rep.profile);
  if (opt.weight == BandWeight::Kind::Rectangular) rep.b_c = std::max(rep.b_c, 1.0);
  const BandWeight w(opt.weight, rep.b_c);

  rep.s = sparsity_s(X, std::max(1, static_cast<int>(std::lround(rep.b_c))));
  NetworkOptions nopt;
  nopt.probe_fraction = opt.probe_fraction;
  rep.g = g_report(X, w, x_avg_inf, nopt);
  rep.bounds = lower_bounds(X, w, opt.probe_fraction);

  const double b = std::max(1.0, opt.vrh_b ? *opt.vrh_b : rep.b_c);
  const auto v = vrh_correct(rep.g.g, b);
  rep.g_vrh = v.value;
  rep.g_vrh_raw = v.raw;
  if (v.warning) rep.warnings.push_back(*v.warning);
  return rep;
}

}  // namespace wqc::measures
