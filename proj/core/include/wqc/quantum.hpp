#pragma once

// Truncated rectangular-basis model of the deformed box: deformation
// coefficients, Hamiltonian assembly and diagonalization, and the matrix of
// the piston force operator in the perturbed eigenbasis.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wqc/scales.hpp"

namespace wqc::quantum {

struct BoxState {
  int nx = 1;
  int ny = 1;
  double energy = 0;
};

/// Eigenpairs inside [E_lo, E_hi] are reported; the basis extends `buffer`
/// beyond both edges so that truncation effects stay out of the window.
struct SpectralWindow {
  double E_lo = 0;
  double E_hi = 0;
  double buffer = 0;

  void validate() const;
  [[nodiscard]] double center() const noexcept { return 0.5 * (E_lo + E_hi); }
  [[nodiscard]] double width() const noexcept { return E_hi - E_lo; }

  /// Window of `levels` mean spacings centred on `energy`, with a buffer of
  /// `buffer_fraction` times the window width on each side.
  static SpectralWindow around(double energy, double levels, const BilliardParams& p,
                               double buffer_fraction = 0.15);
};

/// Shape of the deformed wall as a function of y; the default is the arc.
using WallProfile = std::function<double(double)>;

/// D_u(y) = sqrt(R^2 - (y - eps)^2) - sqrt(R^2 - (Ly - eps)^2).
[[nodiscard]] double deformation_profile(double y, const BilliardParams& p);

/// D_nu = (1/Ly) int_0^Ly D(y) cos(nu pi y / Ly) dy by adaptive quadrature.
[[nodiscard]] double deformation_fourier(int nu, const BilliardParams& p,
                                         const WallProfile& profile = {});

/// D_nu for nu = 0 .. nu_max, computed once.
class DeformationTable {
 public:
  DeformationTable(const BilliardParams& p, int nu_max, const WallProfile& profile = {});
  [[nodiscard]] double operator()(int nu) const;
  [[nodiscard]] int nu_max() const noexcept { return static_cast<int>(d_.size()) - 1; }

 private:
  std::vector<double> d_;
};

/// U = (pi^2 / (m Lx^3)) (D_{ny-my} - D_{ny+my}) nx mx, the first-order shift
/// from pushing the left wall into the box by D_u(y).
[[nodiscard]] double u_matrix_element(const BoxState& n, const BoxState& m, const BilliardParams& p);
[[nodiscard]] double u_matrix_element(const BoxState& n, const BoxState& m, const BilliardParams& p,
                                      const DeformationTable& d);

/// |U| ~ (D_0 / (m Lx^3)) nx mx / (1 + |ny - my|^alpha). Analysis only.
[[nodiscard]] double u_magnitude_estimate(const BoxState& n, const BoxState& m,
                                          const BilliardParams& p, double alpha);

/// All box states with energy in [lo, hi], ordered by energy then (nx, ny).
[[nodiscard]] std::vector<BoxState> enumerate_box_states(double lo, double hi,
                                                         const BilliardParams& p);

struct EigenSolution {
  std::vector<BoxState> basis;
  /// Rectangle whose eigenstates form the basis. Its length is Lx minus the
  /// mean wall displacement when the wall is recentred.
  BilliardParams reference;
  /// Every eigenvalue of the truncated Hamiltonian, ascending.
  Eigen::VectorXd all_eigenvalues;
  /// Orthonormal eigenvectors as columns, over `basis`.
  Eigen::MatrixXd all_vectors;
  /// Eigenpairs first .. first + count - 1 lie inside the window.
  std::size_t first = 0;
  std::size_t count = 0;
  SpectralWindow window;
  /// Pairs of window indices whose gap is below 1e-9 Delta0.
  std::vector<std::pair<std::size_t, std::size_t>> quasi_degenerate;
  std::vector<std::string> warnings;

  [[nodiscard]] Eigen::VectorXd eigenvalues() const { return all_eigenvalues.segment(first, count); }
  [[nodiscard]] Eigen::MatrixXd eigenvectors() const {
    return all_vectors.middleCols(first, count);
  }
};

struct DiagonalizeOptions {
  WallProfile wall_profile;  ///< empty means the circular arc
  /// Expand around a rectangle whose left wall sits at the mean displacement
  /// D_0, so that only D(y) - D_0 enters U. A uniform shift in the first-order
  /// U couples every nx within a ny block with weight nx mx, and the truncated
  /// basis cannot represent the resulting eigenstates.
  bool recenter = true;
};

[[nodiscard]] EigenSolution build_and_diagonalize(const SpectralWindow& w, const BilliardParams& p,
                                                  const DiagonalizeOptions& opt = {});

/// PN = (sum |c|^2)^2 / sum |c|^4.
[[nodiscard]] double participation_number(std::span<const double> c);
[[nodiscard]] double participation_number(const Eigen::VectorXd& c);

/// Spread of an eigenstate over unperturbed levels, sigma_E / Delta0.
[[nodiscard]] double energy_width(const Eigen::VectorXd& c, const std::vector<BoxState>& basis,
                                  double delta0);

struct StateStatistics {
  double mean_pn = 0;
  double mean_width = 0;  ///< in mean level spacings
};

[[nodiscard]] StateStatistics state_statistics(const EigenSolution& sol);

/// Unperturbed force element -delta(ny, my) (pi^2 / (m Lx^3)) nx mx.
[[nodiscard]] double f0_element(const BoxState& n, const BoxState& m, const BilliardParams& p);

struct FMatrix {
  /// F_nm over the window eigenstates, symmetric.
  Eigen::MatrixXd values;
  /// Window eigenvalues matching the rows of `values`.
  Eigen::VectorXd energies;
  /// X_nm = |F_nm|^2.
  [[nodiscard]] Eigen::MatrixXd intensity() const { return values.cwiseAbs2(); }
};

/// F = V^T F0 V restricted to the window eigenstates, with F0 taken in the
/// reference rectangle of `sol`.
[[nodiscard]] FMatrix f_matrix(const EigenSolution& sol);

/// Rotation of F0 by an arbitrary orthogonal matrix over the given basis.
[[nodiscard]] Eigen::MatrixXd rotate_f0(const std::vector<BoxState>& basis, const Eigen::MatrixXd& V,
                                        const BilliardParams& p);

struct SumRuleCheck {
  /// max_n |sum_m |F_nm|^2 - (V^T F0^2 V)_nn| / (V^T F0^2 V)_nn over window states.
  double max_row_error = 0;
  /// | ||F||_F^2 - ||F0||_F^2 | / ||F0||_F^2 over the whole truncated basis.
  double frobenius_error = 0;
};

[[nodiscard]] SumRuleCheck sum_rule_check(const EigenSolution& sol);

struct FoptEstimates {
  double overlap = 0;  ///< U_nm / (E_n - E_m)
  double f_small = 0;  ///< (DeltaR / omega) (kE L)^{3 - alpha} / (m L^3), omega = |E_n - E_m|
  double f_large = 0;  ///< (kE L)^2 / (m L^3)
};

/// L is taken as Lx and kE from p.energy.
[[nodiscard]] FoptEstimates fopt_estimates(const BoxState& n, const BoxState& m,
                                           const BilliardParams& p, double alpha);

struct WindowAnalytics {
  double kE = 0;           ///< at the window centre
  double p0 = 0;           ///< 2 / (pi kE Ly)
  double p0_log = 0;       ///< p0 ln(2 kE / dk), dk = m (E_hi - E_lo) / kE
  /// Continuum count of same-ny pairs over the exact shell kl < k < kh,
  /// (1/N^2) int dn_x(ky)^2 dn_y. Unlike p0_log it keeps the near-grazing
  /// states with ky close to kE.
  double p0_shell = 0;
  double x_avg_inf = 0;    ///< (8/3pi) kE^3 / (m^2 Lx^2 Ly)
};

[[nodiscard]] WindowAnalytics window_analytics(const SpectralWindow& w, const BilliardParams& p);

/// Fraction of basis pairs (n, m) in the window with nonzero F0, diagonal included.
[[nodiscard]] double enumerate_p0(const SpectralWindow& w, const BilliardParams& p);

}  // namespace wqc::quantum
