#include <algorithm>
#include <cmath>
#include <random>

#include "wqc/error.hpp"
#include "wqc/measures.hpp"

namespace wqc::measures {

namespace {

double median_of(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

void require_square(const Eigen::MatrixXd& X, const char* who) {
  if (X.rows() != X.cols()) throw DomainError(std::string(who) + ": matrix must be square");
}

}  // namespace

BandWeight::BandWeight(Kind kind, double b_c) : kind_(kind), b_c_(b_c) {
  if (!(b_c > 0) || !std::isfinite(b_c)) throw DomainError("BandWeight: b_c must be positive");
  if (kind == Kind::Tabulated) throw DomainError("BandWeight: use BandWeight::tabulated for explicit weights");
  int rmax = 0;
  if (kind == Kind::Exponential) {
    rmax = std::max(1, static_cast<int>(std::floor(10.0 * b_c)));
  } else if (kind == Kind::Rectangular) {
    rmax = static_cast<int>(std::floor(b_c));
    if (rmax < 1) throw DomainError("BandWeight: rectangular weight needs b_c >= 1");
  }
  w_.assign(static_cast<std::size_t>(rmax) + 1, 0.0);
  double total = 0;
  for (int r = 1; r <= rmax; ++r) {
    const double v = kind == Kind::Exponential ? std::exp(-r / b_c) : 1.0;
    w_[static_cast<std::size_t>(r)] = v;
    total += 2.0 * v;
  }
  for (auto& v : w_) v /= total;
}

BandWeight BandWeight::tabulated(std::vector<double> values) {
  if (values.empty()) throw DomainError("BandWeight: empty weight table");
  BandWeight w;
  w.w_.assign(1, 0.0);
  for (double v : values) {
    if (!(v >= 0) || !std::isfinite(v)) throw DomainError("BandWeight: weights must be finite and >= 0");
    w.w_.push_back(v);
  }
  w.b_c_ = static_cast<double>(values.size());
  return w;
}

BandWeight BandWeight::operator+(const BandWeight& other) const {
  const int R = std::max(max_offset(), other.max_offset());
  std::vector<double> v(static_cast<std::size_t>(R));
  for (int r = 1; r <= R; ++r) v[static_cast<std::size_t>(r - 1)] = (*this)(r) + other(r);
  return tabulated(std::move(v));
}

double BandWeight::operator()(int r) const noexcept {
  r = r < 0 ? -r : r;
  if (r >= static_cast<int>(w_.size())) return 0.0;
  return w_[static_cast<std::size_t>(r)];
}

std::string_view to_string(BandWeight::Kind k) {
  switch (k) {
    case BandWeight::Kind::Exponential: return "exponential";
    case BandWeight::Kind::Rectangular: return "rectangular";
    case BandWeight::Kind::Tabulated: return "tabulated";
  }
  return "?";
}

BandWeight::Kind weight_kind_from_string(std::string_view s) {
  if (s == "exponential") return BandWeight::Kind::Exponential;
  if (s == "rectangular") return BandWeight::Kind::Rectangular;
  throw DomainError("unknown weight kind '" + std::string(s) + "' (exponential|rectangular)");
}

BandProfile band_profiles(const Eigen::MatrixXd& X, int max_offset) {
  require_square(X, "band_profiles");
  const auto n = static_cast<int>(X.rows());
  if (n < 3) throw DomainError("band_profiles: dimension must be >= 3");
  const int rmax = max_offset > 0 ? std::min(max_offset, n - 1) : n - 1;
  BandProfile bp;
  std::vector<double> diag;
  for (int r = 1; r <= rmax; ++r) {
    diag.clear();
    double sum = 0;
    for (int i = 0; i + r < n; ++i) {
      diag.push_back(X(i, i + r));
      sum += X(i, i + r);
    }
    bp.r.push_back(r);
    bp.mean_values.push_back(sum / static_cast<double>(diag.size()));
    bp.median_values.push_back(median_of(diag));
  }
  return bp;
}

BinnedProfile energy_binned_profile(const Eigen::MatrixXd& X, const Eigen::VectorXd& energies,
                                    const std::vector<double>& edges) {
  require_square(X, "energy_binned_profile");
  if (energies.size() != X.rows()) throw DomainError("energy_binned_profile: size mismatch");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw DomainError("energy_binned_profile: need at least two ascending edges");
  const std::size_t nb = edges.size() - 1;
  std::vector<std::vector<double>> bins(nb);
  const auto n = X.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::abs(energies(j) - energies(i));
      const auto it = std::upper_bound(edges.begin(), edges.end(), w);
      if (it == edges.begin() || it == edges.end()) continue;
      bins[static_cast<std::size_t>(it - edges.begin() - 1)].push_back(X(i, j));
    }
  BinnedProfile out;
  for (std::size_t k = 0; k < nb; ++k) {
    auto& b = bins[k];
    out.omega.push_back(0.5 * (edges[k] + edges[k + 1]));
    out.counts.push_back(b.size());
    double sum = 0;
    for (double v : b) sum += v;
    out.mean_values.push_back(b.empty() ? 0.0 : sum / static_cast<double>(b.size()));
    out.median_values.push_back(median_of(b));
  }
  return out;
}

Eigen::MatrixXd uniformize(const Eigen::MatrixXd& X) {
  require_square(X, "uniformize");
  const auto n = X.rows();
  Eigen::MatrixXd U(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = X.diagonal(r).mean();
    for (Eigen::Index i = 0; i + r < n; ++i) {
      U(i, i + r) = mean;
      U(i + r, i) = mean;
    }
  }
  return U;
}

Eigen::MatrixXd untexture(const Eigen::MatrixXd& X, std::uint64_t seed) {
  require_square(X, "untexture");
  const auto n = X.rows();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd Y(n, n);
  std::vector<double> d;
  for (Eigen::Index r = 0; r < n; ++r) {
    d.resize(static_cast<std::size_t>(n - r));
    for (Eigen::Index i = 0; i + r < n; ++i) d[static_cast<std::size_t>(i)] = X(i, i + r);
    std::shuffle(d.begin(), d.end(), rng);
    for (Eigen::Index i = 0; i + r < n; ++i) {
      Y(i, i + r) = d[static_cast<std::size_t>(i)];
      Y(i + r, i) = d[static_cast<std::size_t>(i)];
    }
  }
  return Y;
}

double sparsity_s(const Eigen::MatrixXd& X, int max_offset) {
  require_square(X, "sparsity_s");
  const auto n = static_cast<int>(X.rows());
  if (n < 2) throw DomainError("sparsity_s: dimension must be >= 2");
  const int rmax = max_offset > 0 ? std::min(max_offset, n - 1) : n - 1;
  double sum = 0, sum2 = 0, unf2 = 0;
  for (int r = 1; r <= rmax; ++r) {
    const auto d = X.diagonal(r);
    const double s = d.sum();
    sum += s;
    sum2 += d.squaredNorm();
    unf2 += s * s / static_cast<double>(d.size());
  }
  if (!(sum2 > 0)) throw DomainError("sparsity_s: matrix has no nonzero elements in the band");
  // PN[X] / PN[X_unf] = sum X_unf^2 / sum X^2 since both share sum X.
  return unf2 / sum2;
}

double detect_bc(const BandProfile& profile) {
  const auto& m = profile.mean_values;
  const std::size_t n = m.size();
  if (n == 0) throw DomainError("detect_bc: empty profile");
  if (n < 3) return profile.r.back();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? i : i + 1;
    s[i] = (m[a] + m[i] + m[b]) / 3.0;
  }
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (s[i] < s[i - 1] && s[i] <= s[i + 1]) return profile.r[i];
  return profile.r.back();
}

}  // namespace wqc::measures
