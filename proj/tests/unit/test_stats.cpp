#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "wqc/error.hpp"
#include "wqc/quantum.hpp"
#include "wqc/stats.hpp"

using namespace wqc;
using namespace wqc::stats;
using doctest::Approx;

TEST_CASE("spacings") {
  const double d = 2.5;
  std::vector<double> e(12);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = d * static_cast<double>(i);
  const auto s = spacings(e, d);
  REQUIRE(s.size() == 11);
  for (double x : s) CHECK(x == Approx(1));

  auto bad = e;
  std::swap(bad[3], bad[4]);
  CHECK_THROWS_AS((void)spacings(bad, d), DomainError);
  CHECK_THROWS_AS((void)spacings(std::vector<double>{0, 1, 2}, d), DomainError);

  // Degenerate pairs can be dropped.
  e[5] = e[4];
  CHECK(spacings(e, d).size() == 11);
  CHECK(spacings(e, d, {0.01}).size() == 10);
}

TEST_CASE("box levels have unit mean spacing") {
  BilliardParams p;
  const double d0 = mean_level_spacing(p);
  std::vector<double> e;
  for (const auto& b : quantum::enumerate_box_states(p.energy - 300 * d0, p.energy + 300 * d0, p)) e.push_back(b.energy);
  const auto s = spacings(e, d0);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  // The perimeter term of the Weyl law lowers the density by about 1/kE.
  CHECK(mean == Approx(1).epsilon(0.05));
}

TEST_CASE("Brody distribution") {
  CHECK(brody_b(0) == Approx(1));
  CHECK(brody_b(1) == Approx(kPi / 4));
  for (double S : {0.1, 0.7, 2.0}) CHECK(brody_cdf(S, 0) == Approx(1 - std::exp(-S)));
  for (double q : {0.0, 0.3, 1.0}) {
    CHECK(brody_cdf(0, q) == 0.0);
    CHECK(brody_cdf(60, q) == Approx(1));
    // Unit mean spacing: int (1 - F) dS = 1.
    double mean = 0;
    const double h = 1e-3;
    for (double S = h / 2; S < 20; S += h) mean += (1 - brody_cdf(S, q)) * h;
    CHECK(mean == Approx(1).epsilon(1e-5));
  }
}

TEST_CASE("Brody round trip") {
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto s = brody_sample(q, 10000, 42 + static_cast<std::uint64_t>(q * 100));
    CHECK(s.size() == 10000);
    const auto fit = brody_fit(s);
    CHECK(fit.q == Approx(q).scale(1).epsilon(0.05));
    CHECK(fit.points > 8000);
    CHECK(fit.x.size() == fit.T.size());
  }
  CHECK(brody_sample(0.5, 100, 7) == brody_sample(0.5, 100, 7));
  CHECK_THROWS_AS((void)brody_fit(std::vector<double>(50, 1.0)), DomainError);
  CHECK_THROWS_AS((void)brody_fit(std::vector<double>(500, 1.0)), DomainError);
}

TEST_CASE("the flat box has Poisson-like spacings") {
  auto q_of = [](double Lx) {
    BilliardParams p;
    p.R = kInfinity;
    p.Lx = Lx;
    const double d0 = mean_level_spacing(p);
    std::vector<double> e;
    for (const auto& b : quantum::enumerate_box_states(p.energy - 300 * d0, p.energy + 300 * d0, p))
      e.push_back(b.energy);
    REQUIRE(e.size() >= 500);
    return brody_fit(spacings(e, d0, {1e-6})).q;
  };
  // A generic aspect ratio gives uncorrelated levels.
  CHECK(q_of((1 + std::sqrt(5.0)) / 2) < 0.15);
  CHECK(q_of(1.3081) < 0.15);
  // With (Lx/Ly)^2 rational the levels form arithmetic families and the
  // small-spacing weight is depleted once exact degeneracies are dropped.
  MESSAGE("flat box q at Lx = 1.5: " << q_of(1.5));
}

TEST_CASE("empirical CDF") {
  const std::vector<double> x{3, 1, 2, 4};
  const auto c = empirical_cdf(x);
  CHECK(c.x == std::vector<double>{1, 2, 3, 4});
  CHECK(c.F == std::vector<double>{0.125, 0.375, 0.625, 0.875});
}

TEST_CASE("integrated intensity of box states") {
  BilliardParams p;
  p.Lx = p.Ly = 1;
  for (int n : {1, 4, 9}) {
    const quantum::BoxState s{n, n, box_level(n, n, p)};
    Eigen::VectorXd f(1), e(1);
    f << quantum::f0_element(s, s, p);
    e << s.energy;
    CHECK(intensity(f, e)[0] == Approx(0.5));
  }
  BilliardParams q;
  const auto states = quantum::enumerate_box_states(5000, 6000, q);
  Eigen::VectorXd f(static_cast<Eigen::Index>(states.size())), e(f.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    f[static_cast<Eigen::Index>(i)] = quantum::f0_element(states[i], states[i], q);
    e[static_cast<Eigen::Index>(i)] = states[i].energy;
  }
  for (double I : intensity(f, e)) {
    CHECK(I > 0);
    CHECK(I <= 1 / q.Lx);
  }
}

TEST_CASE("intensity statistics move away from Gaussian as the wall bends") {
  auto ks = [](double R) {
    BilliardParams p;
    p.R = R;
    const auto sol = quantum::build_and_diagonalize(quantum::SpectralWindow::around(p.energy, 150, p), p);
    const auto F = quantum::f_matrix(sol);
    return ks_distance_to_normal(intensity(F.values.diagonal(), F.energies));
  };
  const double k1 = ks(1.0);
  const double k8 = ks(8.0);
  MESSAGE("KS distance to normal: R = 1 " << k1 << ", R = 8 " << k8);
  CHECK(k1 > k8);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(3, 2);
  std::vector<double> normal(20000);
  for (auto& v : normal) v = g(rng);
  CHECK(ks_distance_to_normal(normal) < 0.015);
}

TEST_CASE("element histograms") {
  const measures::BandWeight w(measures::BandWeight::Kind::Rectangular, 5);
  const auto flat = element_histogram(Eigen::MatrixXd::Constant(60, 60, 2.0), w, 10);
  CHECK(std::count_if(flat.counts.begin(), flat.counts.end(), [](std::size_t c) { return c > 0; }) == 1);
  CHECK(flat.total == band_elements(Eigen::MatrixXd::Ones(60, 60), 5).size());

  Eigen::MatrixXd Z = Eigen::MatrixXd::Ones(20, 20);
  Z(0, 1) = Z(1, 0) = 0;
  CHECK(element_histogram(Z, w, 5).underflow == 1);

  // Squared Gaussian amplitudes: ln X follows ln chi^2_1.
  const int n = 1200;
  const int band = 40;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= std::min(n - 1, i + band); ++j) {
      const double z = g(rng);
      X(i, j) = X(j, i) = z * z;
    }
  const auto h = element_histogram(X, measures::BandWeight(measures::BandWeight::Kind::Rectangular, band), 30);
  const double N = static_cast<double>(h.total);
  int outside = 0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double a = h.edges[k];
    const double b = h.edges[k + 1];
    double prob = 0;
    const int steps = 200;
    for (int i = 0; i < steps; ++i) prob += log_chi2_1_density(a + (i + 0.5) * (b - a) / steps) * (b - a) / steps;
    const double expect = N * prob;
    const double sigma = std::sqrt(N * prob * (1 - prob));
    if (std::abs(static_cast<double>(h.counts[k]) - expect) > 3 * sigma + 1) ++outside;
  }
  CHECK(outside <= 1);

  // Untexturing permutes elements within diagonals, so the histogram is unchanged.
  const auto u = element_histogram(measures::untexture(X, 9),
                                   measures::BandWeight(measures::BandWeight::Kind::Rectangular, band), 30);
  CHECK(u.counts == h.counts);
  CHECK(u.edges == h.edges);

  // The density integrates to one.
  double total = 0;
  for (double y = -40; y < 6; y += 1e-3) total += log_chi2_1_density(y) * 1e-3;
  CHECK(total == Approx(1).epsilon(1e-4));
}
