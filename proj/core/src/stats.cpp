#include "wqc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "wqc/error.hpp"
#include "wqc/scales.hpp"

namespace wqc::stats {

std::vector<double> spacings(std::span<const double> eigenvalues, double delta0,
                             const SpacingOptions& opt) {
  if (eigenvalues.size() < 10) throw DomainError("spacings: need at least 10 eigenvalues");
  if (!(delta0 > 0)) throw DomainError("spacings: Delta0 must be positive");
  std::vector<double> s;
  s.reserve(eigenvalues.size() - 1);
  for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
    const double d = (eigenvalues[i] - eigenvalues[i - 1]) / delta0;
    if (d < 0) throw DomainError("spacings: eigenvalues are not in ascending order");
    if (d >= opt.min_spacing) s.push_back(d);
  }
  return s;
}

double brody_b(double q) {
  if (!(q > -1)) throw DomainError("brody_b: q must exceed -1");
  return std::pow(std::tgamma((q + 2.0) / (q + 1.0)), q + 1.0);
}

double brody_cdf(double S, double q) {
  if (!(S >= 0)) throw DomainError("brody_cdf: S must be >= 0");
  if (S == kInfinity) return 1.0;
  return -std::expm1(-brody_b(q) * std::pow(S, q + 1.0));
}

std::vector<double> brody_sample(double q, std::size_t n, std::uint64_t seed) {
  const double b = brody_b(q);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& s : out) s = std::pow(-std::log1p(-U(rng)) / b, 1.0 / (q + 1.0));
  return out;
}

EmpiricalCdf empirical_cdf(std::span<const double> sample) {
  EmpiricalCdf c;
  c.x.assign(sample.begin(), sample.end());
  std::sort(c.x.begin(), c.x.end());
  const double n = static_cast<double>(c.x.size());
  c.F.resize(c.x.size());
  for (std::size_t i = 0; i < c.x.size(); ++i) c.F[i] = (static_cast<double>(i) + 0.5) / n;
  return c;
}

BrodyFit brody_fit(std::span<const double> sample) {
  if (sample.size() < 200) throw DomainError("brody_fit: need at least 200 spacings");
  const auto cdf = empirical_cdf(sample);
  BrodyFit fit;
  for (std::size_t i = 0; i < cdf.x.size(); ++i) {
    const double F = cdf.F[i];
    if (F <= 0.05 || F >= 0.95 || !(cdf.x[i] > 0)) continue;
    fit.x.push_back(std::log(cdf.x[i]));
    fit.T.push_back(std::log(-std::log1p(-F)));
  }
  fit.points = fit.x.size();
  if (fit.points < 2) throw DomainError("brody_fit: too few usable points");
  const double n = static_cast<double>(fit.points);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    mx += fit.x[i];
    my += fit.T[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    sxx += (fit.x[i] - mx) * (fit.x[i] - mx);
    sxy += (fit.x[i] - mx) * (fit.T[i] - my);
  }
  if (!(sxx > 1e-300)) throw DomainError("brody_fit: degenerate sample (all spacings equal)");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.q = std::clamp(fit.slope - 1.0, -0.2, 1.2);
  return fit;
}

std::vector<double> intensity(const Eigen::VectorXd& f_diagonal, const Eigen::VectorXd& energies) {
  if (f_diagonal.size() != energies.size()) throw DomainError("intensity: size mismatch");
  std::vector<double> I(static_cast<std::size_t>(energies.size()));
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    if (!(energies(i) > 0)) throw DomainError("intensity: energies must be positive");
    I[static_cast<std::size_t>(i)] = -f_diagonal(i) / (2.0 * energies(i));
  }
  return I;
}

double ks_distance_to_normal(std::span<const double> sample) {
  if (sample.size() < 2) throw DomainError("ks_distance_to_normal: need at least two values");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (n - 1.0));
  if (!(sd > 0)) throw DomainError("ks_distance_to_normal: zero variance");
  const boost::math::normal_distribution<double> N(mean, sd);
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = boost::math::cdf(N, x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

Histogram log_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw DomainError("log_histogram: bins must be positive");
  Histogram h;
  h.total = values.size();
  std::vector<double> logs;
  for (double v : values) {
    if (v < 0) throw DomainError("log_histogram: negative element");
    if (v == 0) {
      ++h.underflow;
    } else {
      logs.push_back(std::log(v));
    }
  }
  double lo = 0, hi = 1;
  if (!logs.empty()) {
    const auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
    lo = *mn;
    hi = *mx;
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double y : logs) {
    auto k = static_cast<std::size_t>((y - lo) / width);
    h.counts[std::min(k, bins - 1)] += 1;
  }
  return h;
}

std::vector<double> band_elements(const Eigen::MatrixXd& X, int max_offset) {
  if (X.rows() != X.cols()) throw DomainError("band_elements: matrix must be square");
  const auto n = X.rows();
  std::vector<double> out;
  for (Eigen::Index r = 1; r <= std::min<Eigen::Index>(max_offset, n - 1); ++r)
    for (Eigen::Index i = 0; i + r < n; ++i) out.push_back(X(i, i + r));
  return out;
}

Histogram element_histogram(const Eigen::MatrixXd& X, const measures::BandWeight& w,
                            std::size_t bins) {
  const auto values = band_elements(X, w.max_offset());
  return log_histogram(values, bins);
}

double log_chi2_1_density(double y) {
  return std::exp(0.5 * y - 0.5 * std::exp(y)) / std::sqrt(2.0 * kPi);
}

}  // namespace wqc::stats
