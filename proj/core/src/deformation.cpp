#include <cmath>
#include <cstdlib>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wqc/error.hpp"
#include "wqc/quantum.hpp"

namespace wqc::quantum {

double deformation_profile(double y, const BilliardParams& p) {
  if (p.integrable()) return 0.0;
  if (!(p.R > p.Ly - p.eps) || !(p.R > p.eps))
    throw DomainError("deformation_profile: R must exceed max(Ly - eps, eps)");
  if (y < 0 || y > p.Ly) throw DomainError("deformation_profile: y outside [0, Ly]");
  const double a = y - p.eps;
  const double b = p.Ly - p.eps;
  // Difference of square roots written to avoid cancellation near y = Ly.
  const double s1 = std::sqrt(p.R * p.R - a * a);
  const double s2 = std::sqrt(p.R * p.R - b * b);
  return (b * b - a * a) / (s1 + s2);
}

double deformation_fourier(int nu, const BilliardParams& p, const WallProfile& profile) {
  if (nu < 0) throw DomainError("deformation_fourier: nu must be >= 0");
  if (!profile && p.integrable()) return 0.0;
  auto D = [&](double y) { return profile ? profile(y) : deformation_profile(y, p); };
  const double k = nu * kPi / p.Ly;
  auto f = [&](double y) { return D(y) * std::cos(k * y); };

  // One panel per half oscillation keeps every panel smooth and low order.
  // The depth cap matters at large nu, where a panel's integral sits at the
  // rounding floor and a relative tolerance can never be met.
  const int panels = std::max(1, nu);
  const double h = p.Ly / panels;
  double sum = 0;
  for (int i = 0; i < panels; ++i) {
    const double a = i * h;
    const double b = (i + 1 == panels) ? p.Ly : a + h;
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 5, 1e-12);
  }
  return sum / p.Ly;
}

DeformationTable::DeformationTable(const BilliardParams& p, int nu_max, const WallProfile& profile) {
  if (nu_max < 0) throw DomainError("DeformationTable: nu_max must be >= 0");
  d_.resize(static_cast<std::size_t>(nu_max) + 1);
  for (int nu = 0; nu <= nu_max; ++nu) d_[static_cast<std::size_t>(nu)] = deformation_fourier(nu, p, profile);
}

double DeformationTable::operator()(int nu) const {
  nu = std::abs(nu);
  if (nu > nu_max()) throw DomainError("DeformationTable: index beyond tabulated range");
  return d_[static_cast<std::size_t>(nu)];
}

double u_matrix_element(const BoxState& n, const BoxState& m, const BilliardParams& p,
                        const DeformationTable& d) {
  const double c = kPi * kPi / (p.mass * p.Lx * p.Lx * p.Lx);
  return c * (d(n.ny - m.ny) - d(n.ny + m.ny)) * n.nx * m.nx;
}

double u_matrix_element(const BoxState& n, const BoxState& m, const BilliardParams& p) {
  if (p.integrable()) return 0.0;
  const double c = kPi * kPi / (p.mass * p.Lx * p.Lx * p.Lx);
  const double dm = deformation_fourier(std::abs(n.ny - m.ny), p);
  const double dp = deformation_fourier(n.ny + m.ny, p);
  return c * (dm - dp) * n.nx * m.nx;
}

double u_magnitude_estimate(const BoxState& n, const BoxState& m, const BilliardParams& p,
                            double alpha) {
  if (!(alpha >= 1)) throw DomainError("u_magnitude_estimate: alpha must be >= 1");
  const double d0 = deformation_fourier(0, p);
  const int dy = std::abs(n.ny - m.ny);
  const double denom = dy == 0 ? 1.0 : 1.0 + std::pow(static_cast<double>(dy), alpha);
  return d0 / (p.mass * p.Lx * p.Lx * p.Lx) * n.nx * m.nx / denom;
}

}  // namespace wqc::quantum
