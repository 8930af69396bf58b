#pragma once

// Level-spacing statistics with the Brody interpolation, integrated
// intensities and element-size histograms.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wqc/measures.hpp"

namespace wqc::stats {

struct SpacingOptions {
  /// Spacings below this value (in units of Delta0) are dropped, e.g. to
  /// exclude symmetry-induced quasi-degeneracies. Zero keeps everything.
  double min_spacing = 0.0;
};

/// S_n = (E_{n+1} - E_n) / Delta0 for ascending eigenvalues (at least 10).
[[nodiscard]] std::vector<double> spacings(std::span<const double> eigenvalues, double delta0,
                                           const SpacingOptions& opt = {});

/// Brody scale factor b(q) = Gamma((q + 2) / (q + 1))^{q + 1}.
[[nodiscard]] double brody_b(double q);

/// F(S) = 1 - exp(-b S^{q+1}).
[[nodiscard]] double brody_cdf(double S, double q);

/// Inverse-CDF draws from the Brody distribution.
[[nodiscard]] std::vector<double> brody_sample(double q, std::size_t n, std::uint64_t seed);

struct BrodyFit {
  double q = 0;
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
  std::vector<double> x;  ///< ln S of the fitted points
  std::vector<double> T;  ///< ln(-ln(1 - F))
};

/// Least-squares line through (ln S, ln[-ln(1 - F(S))]) over 0.05 < F < 0.95;
/// q = slope - 1 clamped to [-0.2, 1.2]. Needs at least 200 spacings.
[[nodiscard]] BrodyFit brody_fit(std::span<const double> sample);

/// Empirical CDF at each sorted sample point, using the midpoint (i + 1/2) / n.
struct EmpiricalCdf {
  std::vector<double> x;
  std::vector<double> F;
};

[[nodiscard]] EmpiricalCdf empirical_cdf(std::span<const double> sample);

/// I_n = -F_nn / (2 E_n).
[[nodiscard]] std::vector<double> intensity(const Eigen::VectorXd& f_diagonal,
                                            const Eigen::VectorXd& energies);

/// Kolmogorov-Smirnov distance between the sample and a normal law of the
/// same mean and standard deviation.
[[nodiscard]] double ks_distance_to_normal(std::span<const double> sample);

struct Histogram {
  std::vector<double> edges;  ///< bins.size() + 1 edges in ln X
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;  ///< elements equal to zero
  std::size_t total = 0;
};

/// Histogram of ln X over the given elements.
[[nodiscard]] Histogram log_histogram(std::span<const double> values, std::size_t bins);

/// Elements X_nm with 1 <= |n - m| <= max_offset from the upper triangle.
[[nodiscard]] std::vector<double> band_elements(const Eigen::MatrixXd& X, int max_offset);

/// log_histogram of the in-band elements selected by the weight's support.
[[nodiscard]] Histogram element_histogram(const Eigen::MatrixXd& X, const measures::BandWeight& w,
                                          std::size_t bins);

/// Density of y = ln X when X = z^2 with z standard normal, i.e. ln chi^2_1.
[[nodiscard]] double log_chi2_1_density(double y);

}  // namespace wqc::stats
