#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wqc/classical.hpp"
#include "wqc/error.hpp"

namespace wqc::classical {

namespace {

double speed_of(const BilliardParams& p) { return std::sqrt(2.0 * p.energy / p.mass); }

}  // namespace

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> w(count);
  for (std::size_t k = 0; k < count; ++k) w[k] = at(k);
  return w;
}

FrequencyGrid FrequencyGrid::linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw DomainError("FrequencyGrid: count must be positive");
  if (count == 1) return {lo, 0.0, 1};
  if (!(hi > lo)) throw DomainError("FrequencyGrid: need hi > lo");
  return {lo, (hi - lo) / static_cast<double>(count - 1), count};
}

double impulse(const PistonCollision& r, const BilliardParams& p, const PistonProfile& profile) {
  const double shape = profile ? profile(r.y) : 1.0;
  return 2.0 * p.mass * speed_of(p) * std::cos(r.theta) * shape;
}

SpectrumEstimate spike_spectrum(const CollisionSequence& c, const FrequencyGrid& grid,
                                const SpectrumOptions& opt) {
  const auto& rec = c.records;
  if (rec.size() < 2) throw DomainError("spike_spectrum: need at least two collision records");
  if (grid.count == 0) throw DomainError("spike_spectrum: empty frequency grid");
  if (grid.count > 1 && !(grid.step > 0)) throw DomainError("spike_spectrum: grid must increase");
  if (grid.start < 0) throw DomainError("spike_spectrum: negative frequency");
  const std::size_t K = std::max<std::size_t>(opt.segments, 1);

  const double t0 = rec.front().t;
  const double t1 = std::max(c.t_total, rec.back().t);
  if (!(t1 > t0)) throw DomainError("spike_spectrum: sequence has zero duration");
  const double T = (t1 - t0) / static_cast<double>(K);

  std::vector<double> q(rec.size());
  double q_sum = 0;
  for (std::size_t j = 0; j < rec.size(); ++j) {
    q[j] = impulse(rec[j], c.params, opt.piston_profile);
    q_sum += q[j];
  }
  const double fbar = q_sum / (t1 - t0);

  // Mean-force subtraction for one segment: fbar * int_0^T exp(i w t) dt.
  const std::size_t M = grid.count;
  std::vector<std::complex<double>> mean_term(M);
  for (std::size_t k = 0; k < M; ++k) {
    const double w = grid.at(k);
    if (w == 0.0) {
      mean_term[k] = fbar * T;
    } else {
      const std::complex<double> e = std::polar(1.0, w * T);
      mean_term[k] = fbar * (e - 1.0) / std::complex<double>(0.0, w);
    }
  }

  std::vector<double> power(M, 0.0);
  std::vector<std::complex<double>> acc(M);
  std::size_t j = 0;
  for (std::size_t s = 0; s < K; ++s) {
    const double a = t0 + T * static_cast<double>(s);
    const double b = (s + 1 == K) ? t1 : a + T;
    std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
    for (; j < rec.size() && (rec[j].t < b || s + 1 == K); ++j) {
      const double tau = rec[j].t - a;
      std::complex<double> z = q[j] * std::polar(1.0, grid.start * tau);
      const std::complex<double> step = std::polar(1.0, grid.step * tau);
      for (std::size_t k = 0; k < M; ++k) {
        acc[k] += z;
        z *= step;
      }
    }
    for (std::size_t k = 0; k < M; ++k) power[k] += std::norm(acc[k] - mean_term[k]) / T;
  }

  SpectrumEstimate out;
  out.omega_grid = grid.values();
  out.values.resize(M);
  for (std::size_t k = 0; k < M; ++k) out.values[k] = power[k] / static_cast<double>(K);
  out.t_total = t1 - t0;
  out.segments = K;
  return out;
}

AnalyticMoments analytic_moments(const BilliardParams& p) {
  p.validate();
  const double v = speed_of(p);
  const double m2 = p.mass * p.mass;
  AnalyticMoments a;
  a.C_inf = (8.0 / (3.0 * kPi)) * m2 * v * v * v / p.Lx;
  a.c0 = 0.375 * m2 * std::pow(v, 4) / (p.Lx * p.Lx);
  a.c_inf = 0.25 * m2 * std::pow(v, 4) / (p.Lx * p.Lx);
  a.variance = a.c0 - a.c_inf;
  return a;
}

double comb_spectrum(double omega, const BilliardParams& p) {
  if (!(omega >= 0)) throw DomainError("comb_spectrum: omega must be >= 0");
  if (omega == 0.0) return 0.0;
  const double C_inf = analytic_moments(p).C_inf;
  const double w1 = kPi * speed_of(p) / p.Lx;

  auto n = static_cast<long long>(std::floor(omega / w1)) + 1;
  while (w1 * static_cast<double>(n) <= omega) ++n;
  double sum = 0;
  for (;; ++n) {
    const double x = omega / (w1 * static_cast<double>(n));
    const double x2 = x * x;
    const double term = 1.5 / static_cast<double>(n) * x2 * x2 / std::sqrt(1.0 - x2);
    sum += term;
    if (term < 1e-12 * sum) break;
  }
  return C_inf * sum;
}

double instability_exponent(double theta, const BilliardParams& p) {
  if (p.integrable()) return p.gamma0;
  return p.gamma0 + speed_of(p) / p.R * std::cos(theta);
}

double low_frequency_spectrum(double omega, const BilliardParams& p, LowFrequencyMode mode,
                              double gamma) {
  if (!(omega >= 0)) throw DomainError("low_frequency_spectrum: omega must be >= 0");
  const auto mom = analytic_moments(p);
  const double v = speed_of(p);

  switch (mode) {
    case LowFrequencyMode::Lorentzian: {
      if (!(gamma > 0)) throw DomainError("low_frequency_spectrum: Lorentzian needs gamma > 0");
      const double r = omega / gamma;
      return mom.variance * (2.0 / gamma) / (1.0 + r * r);
    }
    case LowFrequencyMode::Bouncing: {
      if (p.integrable()) throw DomainError("low_frequency_spectrum: bouncing mode needs finite R");
      if (p.gamma0 > 0) {
        // Lorentzian with gamma_theta averaged over the piston angle.
        auto f = [&](double th) {
          const double g = instability_exponent(th, p);
          return 2.0 * g / (g * g + omega * omega);
        };
        const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, 0.0, kPi / 2, 12, 1e-12);
        return mom.c_inf * I;
      }
      if (omega == 0.0)
        throw DomainError("low_frequency_spectrum: bouncing spectrum diverges at omega = 0 without gamma0");
      const double tR = p.R / v;
      const double s = std::sqrt(1.0 + omega * omega * tR * tR);
      return p.mass * p.mass * v * v * v / (2.0 * p.Lx * p.Lx) * p.R / s * std::atanh(1.0 / s);
    }
    case LowFrequencyMode::BouncingSmallOmega: {
      if (p.integrable()) throw DomainError("low_frequency_spectrum: bouncing mode needs finite R");
      const double cutoff = std::max(omega, p.gamma0);
      if (cutoff == 0.0)
        throw DomainError("low_frequency_spectrum: logarithm diverges at omega = gamma0 = 0");
      const double tR = p.R / v;
      return p.mass * p.mass * v * v * v * p.R / (2.0 * p.Lx * p.Lx) * std::log(2.0 / (cutoff * tR));
    }
  }
  return 0.0;
}

ClassicalGc gc_classical(const BilliardParams& p) {
  const auto s = derive_scales(p);
  if (p.gamma0 == 0.0) throw DomainError("gc_classical: diverges for gamma0 = 0");
  if (p.gamma0 >= 2.0 * s.DeltaR) {
    std::ostringstream os;
    os << "gamma0 = " << p.gamma0 << " >= 2 DeltaR = " << 2.0 * s.DeltaR
       << "; no enhancement, g_c set to 0";
    return {0.0, os.str()};
  }
  return {std::log(2.0 * s.DeltaR / p.gamma0) / s.u, std::nullopt};
}

double number_variance_c0(const CollisionSequence& c, double t_window,
                          const NumberVarianceOptions& opt) {
  const auto& rec = c.records;
  if (rec.empty()) throw DomainError("number_variance_c0: empty sequence");
  if (!(t_window > 0)) throw DomainError("number_variance_c0: window must be positive");
  if (!(opt.stride_fraction > 0)) throw DomainError("number_variance_c0: stride must be positive");

  const double t0 = rec.front().t;
  const double t1 = std::max(c.t_total, rec.back().t);
  const double stride = opt.stride_fraction * t_window;
  const auto n_windows = static_cast<std::size_t>(std::floor((t1 - t0 - t_window) / stride)) + 1;
  if (t1 - t0 < t_window || n_windows < opt.min_windows) {
    std::ostringstream os;
    os << "number_variance_c0: only " << (t1 - t0 < t_window ? 0 : n_windows)
       << " windows fit, need " << opt.min_windows;
    throw DomainError(os.str());
  }

  std::vector<double> q(rec.size());
  double q_mean = 0;
  for (std::size_t j = 0; j < rec.size(); ++j) {
    q[j] = opt.weighted ? impulse(rec[j], c.params, opt.piston_profile) : 1.0;
    q_mean += impulse(rec[j], c.params, opt.piston_profile);
  }
  q_mean /= static_cast<double>(rec.size());

  // Prefix sums make each window an O(log n) lookup.
  std::vector<double> prefix(rec.size() + 1, 0.0);
  for (std::size_t j = 0; j < rec.size(); ++j) prefix[j + 1] = prefix[j] + q[j];
  auto index_at = [&rec](double t) {
    return static_cast<std::size_t>(
        std::lower_bound(rec.begin(), rec.end(), t,
                         [](const PistonCollision& r, double x) { return r.t < x; }) -
        rec.begin());
  };

  double mean = 0, m2 = 0;
  for (std::size_t w = 0; w < n_windows; ++w) {
    const double a = t0 + stride * static_cast<double>(w);
    const double count = prefix[index_at(a + t_window)] - prefix[index_at(a)];
    const double delta = count - mean;
    mean += delta / static_cast<double>(w + 1);
    m2 += delta * (count - mean);
  }
  const double var = m2 / static_cast<double>(n_windows - 1);
  const double scale = opt.weighted ? 1.0 : q_mean * q_mean;
  return var / t_window * scale;
}

}  // namespace wqc::classical
