#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "wqc/error.hpp"
#include "wqc/measures.hpp"

namespace wqc::measures {

ProbeNodes probe_nodes(int n, double probe_fraction) {
  if (!(probe_fraction >= 0) || !(probe_fraction < 0.5))
    throw DomainError("probe_fraction must lie in [0, 0.5)");
  if (n < 2) throw DomainError("network needs at least two nodes");
  const int a = static_cast<int>(std::floor(n * probe_fraction));
  const int b = n - 1 - a;
  if (a >= b) throw DomainError("probe nodes coincide; lower probe_fraction or enlarge the matrix");
  return {a, b};
}

namespace {

// Visits the in-band elements of rows first..last with their weights.
template <typename Fn>
void for_each_weighted(const Eigen::MatrixXd& X, const BandWeight& w, ProbeNodes rows, Fn&& fn) {
  const int n = static_cast<int>(X.rows());
  const int R = w.max_offset();
  for (int i = rows.first; i <= rows.last; ++i)
    for (int j = std::max(0, i - R); j <= std::min(n - 1, i + R); ++j)
      if (j != i) fn(w(i - j), X(i, j));
}

}  // namespace

double band_average(const Eigen::MatrixXd& X, const BandWeight& w, double probe_fraction) {
  if (X.rows() != X.cols()) throw DomainError("band_average: matrix must be square");
  const auto rows = probe_nodes(static_cast<int>(X.rows()), probe_fraction);
  double num = 0, den = 0;
  for_each_weighted(X, w, rows, [&](double f, double x) {
    num += f * x;
    den += f;
  });
  return num / den;
}

LowerBounds lower_bounds(const Eigen::MatrixXd& X, const BandWeight& w, double probe_fraction) {
  if (X.rows() != X.cols()) throw DomainError("lower_bounds: matrix must be square");
  const auto rows = probe_nodes(static_cast<int>(X.rows()), probe_fraction);
  std::vector<std::pair<double, double>> items;  // (value, weight)
  double wsum = 0, inv = 0, logs = 0;
  bool has_zero = false;
  for_each_weighted(X, w, rows, [&](double f, double x) {
    items.emplace_back(x, f);
    wsum += f;
    if (x > 0) {
      inv += f / x;
      logs += f * std::log(x);
    } else {
      has_zero = true;
    }
  });
  LowerBounds b;
  if (!has_zero) {
    b.harmonic = wsum / inv;
    b.geometric = std::exp(logs / wsum);
  }
  std::sort(items.begin(), items.end());
  double acc = 0;
  for (const auto& [x, f] : items) {
    acc += f;
    if (acc >= 0.5 * wsum) {
      b.median = x;
      break;
    }
  }
  return b;
}

NetworkResult network_conductance(const Eigen::MatrixXd& X, const BandWeight& w,
                                  const NetworkOptions& opt) {
  if (X.rows() != X.cols()) throw DomainError("network_conductance: matrix must be square");
  const int n = static_cast<int>(X.rows());
  const auto probes = probe_nodes(n, opt.probe_fraction);
  const int R = w.max_offset();

  auto link = [&](int i, int j) {
    const int r = j - i;
    const double x = 0.5 * (X(i, j) + X(j, i));
    if (x < 0) throw DomainError("network_conductance: negative matrix element");
    return 2.0 * w(r) * x / (static_cast<double>(r) * r);
  };

  // Component of the input terminal.
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> nodes;
  std::deque<int> queue{0};
  index[0] = 0;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    nodes.push_back(i);
    for (int j = std::max(0, i - R); j <= std::min(n - 1, i + R); ++j) {
      if (j == i || index[static_cast<std::size_t>(j)] >= 0) continue;
      if (link(std::min(i, j), std::max(i, j)) > 0) {
        index[static_cast<std::size_t>(j)] = 0;
        queue.push_back(j);
      }
    }
  }
  NetworkResult res;
  if (index[static_cast<std::size_t>(n - 1)] < 0) {
    res.connected = false;
    res.conductance = 0;
    res.diagnostic = "terminals are not connected; conductance set to 0";
    return res;
  }

  // Unknowns: every component node except the grounded output terminal.
  std::sort(nodes.begin(), nodes.end());
  std::fill(index.begin(), index.end(), -1);
  int m = 0;
  for (int i : nodes)
    if (i != n - 1) index[static_cast<std::size_t>(i)] = m++;

  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> diag(static_cast<std::size_t>(m), 0.0);
  for (int i : nodes)
    for (int j = i + 1; j <= std::min(n - 1, i + R); ++j) {
      const double g = link(i, j);
      if (g == 0) continue;
      const int a = index[static_cast<std::size_t>(i)];
      const int b = index[static_cast<std::size_t>(j)];
      if (a >= 0) diag[static_cast<std::size_t>(a)] += g;
      if (b >= 0) diag[static_cast<std::size_t>(b)] += g;
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -g);
        trip.emplace_back(b, a, -g);
      }
    }
  for (int a = 0; a < m; ++a) trip.emplace_back(a, a, diag[static_cast<std::size_t>(a)]);
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd I = Eigen::VectorXd::Zero(m);
  I(index[0]) = 1.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success) throw NumericError("network_conductance: factorization failed");
  Eigen::VectorXd V = solver.solve(I);
  for (int k = 0; k < opt.refinement_steps; ++k) {
    const Eigen::VectorXd r = I - L * V;
    if (r.lpNorm<Eigen::Infinity>() < 1e-15) break;
    V += solver.solve(r);
  }
  res.residual = (L * V - I).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(res.residual) || res.residual > 1e-10)
    throw NumericError("network_conductance: Kirchhoff residual above 1e-10 after refinement");

  auto voltage = [&](int node) {
    return node == n - 1 ? 0.0 : V(index[static_cast<std::size_t>(node)]);
  };
  // Probes outside the component move to the nearest component node inward.
  auto place = [&](int node, int step) {
    int k = node;
    while (k != n - 1 && index[static_cast<std::size_t>(k)] < 0) k += step;
    return k;
  };
  const int a = place(probes.first, +1);
  const int b = place(probes.last, -1);
  if (a != probes.first || b != probes.last) {
    std::ostringstream os;
    os << "probe nodes moved to " << a << " and " << b << " (isolated originals)";
    res.diagnostic = os.str();
  }
  double drop = voltage(a) - voltage(b);
  res.probes = {a, b};
  if (!(drop > 0) || b <= a) {
    // Dead-end branches in a sparse network can reverse the ordering of
    // the probe voltages; the terminal drop is always positive.
    std::ostringstream os;
    os << "voltage drop between probes " << a << " and " << b << " is not positive; terminals used";
    res.diagnostic = os.str();
    res.probes = {0, n - 1};
    drop = voltage(0);
  }
  if (!(drop > 0)) throw NumericError("network_conductance: non-positive voltage drop between terminals");
  res.conductance = static_cast<double>(res.probes.last - res.probes.first) / drop;
  return res;
}

double network_average(const Eigen::MatrixXd& X, const BandWeight& w, const NetworkOptions& opt) {
  const auto raw = network_conductance(X, w, opt);
  if (!raw.connected) return 0.0;
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(X.rows(), X.cols());
  NetworkOptions ref = opt;
  if (raw.probes.first == 0) ref.probe_fraction = 0;  // compare at the same nodes
  return raw.conductance / network_conductance(ones, w, ref).conductance;
}

}  // namespace wqc::measures
