#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wqc/error.hpp"
#include "wqc/quantum.hpp"

namespace wqc::quantum {

namespace {

double f0_scale(const BilliardParams& p) { return kPi * kPi / (p.mass * p.Lx * p.Lx * p.Lx); }

// F0 = -c A A^T, where column b of A holds nx on the states of the b-th ny block.
Eigen::MatrixXd block_factor(const std::vector<BoxState>& basis) {
  std::map<int, Eigen::Index> column;
  for (const auto& s : basis) column.emplace(s.ny, 0);
  Eigen::Index next = 0;
  for (auto& [ny, col] : column) col = next++;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()), next);
  for (std::size_t i = 0; i < basis.size(); ++i)
    A(static_cast<Eigen::Index>(i), column.at(basis[i].ny)) = basis[i].nx;
  return A;
}

}  // namespace

double f0_element(const BoxState& n, const BoxState& m, const BilliardParams& p) {
  if (n.ny != m.ny) return 0.0;
  return -f0_scale(p) * n.nx * m.nx;
}

Eigen::MatrixXd rotate_f0(const std::vector<BoxState>& basis, const Eigen::MatrixXd& V,
                          const BilliardParams& p) {
  if (static_cast<std::size_t>(V.rows()) != basis.size())
    throw DomainError("rotate_f0: rotation rows must match the basis size");
  const Eigen::MatrixXd W = V.transpose() * block_factor(basis);
  Eigen::MatrixXd F = -f0_scale(p) * (W * W.transpose());
  return 0.5 * (F + F.transpose());
}

FMatrix f_matrix(const EigenSolution& sol) {
  FMatrix f;
  f.values = rotate_f0(sol.basis, sol.eigenvectors(), sol.reference);
  f.energies = sol.eigenvalues();
  return f;
}

SumRuleCheck sum_rule_check(const EigenSolution& sol) {
  const Eigen::MatrixXd A = block_factor(sol.basis);
  const Eigen::VectorXd a2 = A.colwise().squaredNorm().transpose();
  const double c = f0_scale(sol.reference);
  const Eigen::MatrixXd W = sol.all_vectors.transpose() * A;
  const Eigen::MatrixXd F = -c * (W * W.transpose());

  SumRuleCheck out;
  for (std::size_t k = 0; k < sol.count; ++k) {
    const auto n = static_cast<Eigen::Index>(sol.first + k);
    const double row = F.row(n).squaredNorm();
    const double expected = c * c * (W.row(n).transpose().cwiseAbs2().dot(a2));
    if (expected > 0) out.max_row_error = std::max(out.max_row_error, std::abs(row - expected) / expected);
  }
  const double f0_norm = c * c * a2.squaredNorm();
  out.frobenius_error = std::abs(F.squaredNorm() - f0_norm) / f0_norm;
  return out;
}

FoptEstimates fopt_estimates(const BoxState& n, const BoxState& m, const BilliardParams& p,
                             double alpha) {
  const auto s = derive_scales(p);
  const double gap = n.energy - m.energy;
  if (gap == 0.0) throw DomainError("fopt_estimates: degenerate pair, overlap undefined");
  FoptEstimates e;
  e.overlap = u_matrix_element(n, m, p) / gap;
  const double L = p.Lx;
  const double kl = s.kE * L;
  const double unit = 1.0 / (p.mass * L * L * L);
  e.f_large = unit * kl * kl;
  e.f_small = (s.DeltaR / std::abs(gap)) * unit * std::pow(kl, 3.0 - alpha);
  return e;
}

WindowAnalytics window_analytics(const SpectralWindow& w, const BilliardParams& p) {
  w.validate();
  WindowAnalytics a;
  a.kE = std::sqrt(2.0 * p.mass * w.center());
  a.p0 = 2.0 / (kPi * a.kE * p.Ly);
  const double dk = p.mass * w.width() / a.kE;
  a.p0_log = a.p0 * std::log(2.0 * a.kE / dk);

  // dn_x(ky) = (Lx / pi) [sqrt(kh^2 - ky^2) - sqrt(kl^2 - ky^2)], with the
  // second root dropped above kl; dn_y = (Ly / pi) dky.
  const double kl = std::sqrt(2.0 * p.mass * w.E_lo);
  const double kh = std::sqrt(2.0 * p.mass * w.E_hi);
  auto dnx2 = [&](double k) {
    const double hi = std::sqrt(std::max(0.0, kh * kh - k * k));
    const double lo = std::sqrt(std::max(0.0, kl * kl - k * k));
    const double d = p.Lx / kPi * (hi - lo);
    return d * d;
  };
  using boost::math::quadrature::gauss_kronrod;
  const double pairs = p.Ly / kPi *
                       (gauss_kronrod<double, 61>::integrate(dnx2, 0.0, kl, 15, 1e-10) +
                        gauss_kronrod<double, 61>::integrate(dnx2, kl, kh, 15, 1e-10));
  const double levels = w.width() / mean_level_spacing(p);
  a.p0_shell = pairs / (levels * levels);
  a.x_avg_inf = 8.0 / (3.0 * kPi) * a.kE * a.kE * a.kE / (p.mass * p.mass * p.Lx * p.Lx * p.Ly);
  return a;
}

double enumerate_p0(const SpectralWindow& w, const BilliardParams& p) {
  w.validate();
  const auto states = enumerate_box_states(w.E_lo, w.E_hi, p);
  if (states.empty()) throw DomainError("enumerate_p0: window holds no box states");
  std::map<int, double> per_block;
  for (const auto& s : states) per_block[s.ny] += 1.0;
  double coupled = 0;
  for (const auto& [ny, k] : per_block) coupled += k * k;
  const double n = static_cast<double>(states.size());
  return coupled / (n * n);
}

}  // namespace wqc::quantum
