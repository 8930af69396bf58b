#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "wqc/error.hpp"
#include "wqc/quantum.hpp"

namespace wqc::quantum {

void SpectralWindow::validate() const {
  if (!(E_lo > 0) || !(E_hi > E_lo)) throw DomainError("SpectralWindow: need 0 < E_lo < E_hi");
  if (!(buffer >= 0)) throw DomainError("SpectralWindow: buffer must be >= 0");
}

SpectralWindow SpectralWindow::around(double energy, double levels, const BilliardParams& p,
                                      double buffer_fraction) {
  if (!(levels > 0)) throw DomainError("SpectralWindow::around: levels must be positive");
  if (!(buffer_fraction >= 0)) throw DomainError("SpectralWindow::around: negative buffer");
  const double width = levels * mean_level_spacing(p);
  SpectralWindow w{energy - 0.5 * width, energy + 0.5 * width, buffer_fraction * width};
  w.validate();
  return w;
}

std::vector<BoxState> enumerate_box_states(double lo, double hi, const BilliardParams& p) {
  std::vector<BoxState> out;
  const double kmax = std::sqrt(2.0 * p.mass * std::max(hi, 0.0));
  const int ny_max = static_cast<int>(kmax * p.Ly / kPi) + 1;
  for (int ny = 1; ny <= ny_max; ++ny) {
    if (box_level(1, ny, p) > hi) break;
    const int nx_max = static_cast<int>(kmax * p.Lx / kPi) + 1;
    for (int nx = 1; nx <= nx_max; ++nx) {
      const double e = box_level(nx, ny, p);
      if (e > hi) break;
      if (e >= lo) out.push_back({nx, ny, e});
    }
  }
  std::sort(out.begin(), out.end(), [](const BoxState& a, const BoxState& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    if (a.nx != b.nx) return a.nx < b.nx;
    return a.ny < b.ny;
  });
  return out;
}

EigenSolution build_and_diagonalize(const SpectralWindow& w, const BilliardParams& p,
                                    const DiagonalizeOptions& opt) {
  w.validate();
  p.validate();
  const bool deformed = opt.wall_profile || !p.integrable();

  EigenSolution sol;
  sol.window = w;
  sol.reference = p;
  WallProfile profile = opt.wall_profile;
  if (deformed && opt.recenter) {
    const double d0 = deformation_fourier(0, p, profile);
    if (!(d0 < p.Lx)) throw DomainError("build_and_diagonalize: mean wall displacement exceeds Lx");
    sol.reference.Lx = p.Lx - d0;
    WallProfile base = profile ? profile : WallProfile([p](double y) { return deformation_profile(y, p); });
    profile = [base, d0](double y) { return base(y) - d0; };
  }
  const BilliardParams& ref = sol.reference;

  sol.basis = enumerate_box_states(w.E_lo - w.buffer, w.E_hi + w.buffer, ref);
  const auto n = static_cast<Eigen::Index>(sol.basis.size());
  if (n == 0) throw DomainError("build_and_diagonalize: no basis states in the window");
  if (w.buffer == 0.0)
    sol.warnings.emplace_back("buffer is zero; states near the window edges carry truncation bias");

  int ny_max = 0;
  for (const auto& s : sol.basis) ny_max = std::max(ny_max, s.ny);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  if (deformed) {
    const DeformationTable d(ref, 2 * ny_max, profile);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j; i < n; ++i)
        H(i, j) = u_matrix_element(sol.basis[static_cast<std::size_t>(i)],
                                   sol.basis[static_cast<std::size_t>(j)], ref, d);
  }
  for (Eigen::Index i = 0; i < n; ++i) H(i, i) += sol.basis[static_cast<std::size_t>(i)].energy;

  // Divide-and-conquer symmetric solver on the lower triangle (column major).
  Eigen::VectorXd evals(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                         H.data(), static_cast<lapack_int>(n), evals.data());
  if (info != 0) {
    std::ostringstream os;
    os << "build_and_diagonalize: dsyevd failed with info = " << info;
    throw NumericError(os.str());
  }
  sol.all_eigenvalues = std::move(evals);
  sol.all_vectors = std::move(H);

  const auto& ev = sol.all_eigenvalues;
  const auto lo = std::lower_bound(ev.data(), ev.data() + n, w.E_lo) - ev.data();
  const auto hi = std::upper_bound(ev.data(), ev.data() + n, w.E_hi) - ev.data();
  sol.first = static_cast<std::size_t>(lo);
  sol.count = static_cast<std::size_t>(hi - lo);
  if (sol.count == 0) throw DomainError("build_and_diagonalize: no eigenvalues inside the window");

  const double tiny = 1e-9 * mean_level_spacing(ref);
  for (std::size_t k = 1; k < sol.count; ++k) {
    const auto a = static_cast<Eigen::Index>(sol.first + k - 1);
    if (ev(a + 1) - ev(a) < tiny) sol.quasi_degenerate.emplace_back(k - 1, k);
  }
  if (!sol.quasi_degenerate.empty()) {
    std::ostringstream os;
    os << sol.quasi_degenerate.size() << " quasi-degenerate pairs (gap < 1e-9 Delta0)";
    sol.warnings.push_back(os.str());
  }
  return sol;
}

double participation_number(std::span<const double> c) {
  double s2 = 0, s4 = 0;
  for (double x : c) {
    const double x2 = x * x;
    s2 += x2;
    s4 += x2 * x2;
  }
  if (!(s4 > 0)) throw DomainError("participation_number: zero vector");
  return s2 * s2 / s4;
}

double participation_number(const Eigen::VectorXd& c) {
  return participation_number(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
}

double energy_width(const Eigen::VectorXd& c, const std::vector<BoxState>& basis, double delta0) {
  if (static_cast<std::size_t>(c.size()) != basis.size())
    throw DomainError("energy_width: vector and basis sizes differ");
  double w = 0, mean = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double p = c(i) * c(i);
    w += p;
    mean += p * basis[static_cast<std::size_t>(i)].energy;
  }
  if (!(w > 0)) throw DomainError("energy_width: zero vector");
  mean /= w;
  double var = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double d = basis[static_cast<std::size_t>(i)].energy - mean;
    var += c(i) * c(i) * d * d;
  }
  return std::sqrt(var / w) / delta0;
}

StateStatistics state_statistics(const EigenSolution& sol) {
  StateStatistics s;
  if (sol.count == 0) return s;
  const double d0 = mean_level_spacing(sol.reference);
  for (std::size_t k = 0; k < sol.count; ++k) {
    const Eigen::VectorXd c = sol.all_vectors.col(static_cast<Eigen::Index>(sol.first + k));
    s.mean_pn += participation_number(c);
    s.mean_width += energy_width(c, sol.basis, d0);
  }
  s.mean_pn /= static_cast<double>(sol.count);
  s.mean_width /= static_cast<double>(sol.count);
  return s;
}

}  // namespace wqc::quantum
