#pragma once

// Event-driven dynamics of the deformed rectangular billiard and the
// classical power spectrum of the piston force.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wqc/scales.hpp"

namespace wqc::classical {

struct Vec2 {
  double x = 0;
  double y = 0;
};

struct ParticleState {
  Vec2 position;
  Vec2 direction;  ///< unit vector
  double time = 0;
};

/// Arc is the deformed left wall (flat x = 0 when R is infinite).
enum class Wall { Piston, Top, Bottom, Arc };

[[nodiscard]] std::string_view to_string(Wall w);

/// Precomputed geometry of one billiard. The domain is
/// { |r - c| >= R } with 0 <= y <= Ly and x <= Lx, c = (-x_c, eps),
/// x_c = sqrt(R^2 - (Ly - eps)^2). The arc passes through (0, Ly) and bulges
/// into the box by D_u(y), so the deformed wall is dispersing.
class BilliardGeometry {
 public:
  explicit BilliardGeometry(const BilliardParams& p);

  [[nodiscard]] const BilliardParams& params() const noexcept { return p_; }
  /// x coordinate of the circle centre, -x_c (unused for the flat box).
  [[nodiscard]] double arc_center_x() const noexcept { return cx_; }
  /// x coordinate of the left wall at height y.
  [[nodiscard]] double left_wall_x(double y) const;
  /// Leftmost x of the domain.
  [[nodiscard]] double min_x() const;
  [[nodiscard]] bool contains(Vec2 r, double tol = 1e-12) const;

  struct Hit {
    double distance;
    Wall wall;
  };
  /// First boundary crossing along the ray from an interior point.
  [[nodiscard]] Hit next_hit(Vec2 r, Vec2 d) const;
  /// Outward unit normal of `wall` at boundary point r.
  [[nodiscard]] Vec2 outward_normal(Wall wall, Vec2 r) const;
  /// Places a point that drifted by rounding back onto `wall`.
  [[nodiscard]] Vec2 snap(Wall wall, Vec2 r) const;

 private:
  BilliardParams p_;
  bool flat_;
  double cx_;
  double R2_;
};

/// Directions whose normal component after reflection is below this are
/// nudged inward so the orbit cannot slide along a wall.
inline constexpr double kGrazingCos = 1e-9;

/// Moves to the next wall, reflects specularly, returns the post-reflection state.
[[nodiscard]] std::pair<ParticleState, Wall> propagate_to_next_collision(
    const ParticleState& s, const BilliardGeometry& g, double speed);
[[nodiscard]] std::pair<ParticleState, Wall> propagate_to_next_collision(
    const ParticleState& s, const BilliardParams& p);

struct PistonCollision {
  double t;
  double y;
  double theta;  ///< incidence angle from the piston normal, in (-pi/2, pi/2)
};

struct CollisionSequence {
  std::vector<PistonCollision> records;
  double t_total = 0;
  BilliardParams params;
  std::uint64_t seed = 0;
};

struct TrajectoryOptions {
  /// Budget of wall events allowed between consecutive piston hits.
  std::uint64_t max_events_between_hits = 1'000'000;
};

/// Random initial condition, uniform in position over the domain and in direction.
[[nodiscard]] ParticleState random_initial_state(const BilliardGeometry& g, std::uint64_t seed);

/// Runs from `start` until `n_piston_hits` piston collisions are recorded.
/// A hit at the start point itself (distance zero) is recorded at t = start.time.
[[nodiscard]] CollisionSequence simulate_from(const ParticleState& start, const BilliardParams& p,
                                              std::size_t n_piston_hits,
                                              const TrajectoryOptions& opt = {});

[[nodiscard]] CollisionSequence simulate_trajectory(const BilliardParams& p,
                                                    std::size_t n_piston_hits, std::uint64_t seed,
                                                    const TrajectoryOptions& opt = {});

/// Uniform angular-frequency grid omega_k = start + k step.
struct FrequencyGrid {
  double start = 0;
  double step = 1;
  std::size_t count = 0;

  [[nodiscard]] double at(std::size_t k) const noexcept { return start + step * static_cast<double>(k); }
  [[nodiscard]] std::vector<double> values() const;
  static FrequencyGrid linspace(double lo, double hi, std::size_t count);
};

struct SpectrumEstimate {
  std::vector<double> omega_grid;
  std::vector<double> values;
  double t_total = 0;
  std::size_t segments = 0;
};

/// Piston displacement profile D_f(y); the parallel piston is D_f = 1.
using PistonProfile = std::function<double(double)>;

struct SpectrumOptions {
  std::size_t segments = 16;
  PistonProfile piston_profile;  ///< empty means D_f = 1
};

/// Periodogram of the impulse train q_j = 2 m vE cos(theta_j) D_f(y_j).
///
/// The sequence is cut into equal-duration segments; each contributes
/// |sum_j q_j exp(i w t_j) - Fbar * integral_0^T exp(i w t) dt|^2 / T, where
/// Fbar is the global mean force, and the segments are averaged.
[[nodiscard]] SpectrumEstimate spike_spectrum(const CollisionSequence& c, const FrequencyGrid& grid,
                                              const SpectrumOptions& opt = {});

struct AnalyticMoments {
  double C_inf;     ///< <q^2/tau> = (8/3pi) m^2 v^3 / Lx
  double c0;        ///< <(q/tau)^2> = (3/8) m^2 v^4 / Lx^2
  double c_inf;     ///< <q/tau>^2 = (1/4) m^2 v^4 / Lx^2
  double variance;  ///< c0 - c_inf
};

[[nodiscard]] AnalyticMoments analytic_moments(const BilliardParams& p);

/// Ballistic peaks of the undeformed box at omega_n = n pi vE / Lx:
/// C_inf * sum_{omega_n > omega} (3/2n) (omega/omega_n)^4 / sqrt(1 - (omega/omega_n)^2).
/// The sum is one-sided at each peak; evaluate a grid step away from omega_n.
[[nodiscard]] double comb_spectrum(double omega, const BilliardParams& p);

enum class LowFrequencyMode { Lorentzian, Bouncing, BouncingSmallOmega };

/// Low-frequency spectrum models. `gamma` is used by the Lorentzian mode only;
/// the small-omega bouncing mode uses p.gamma0 as the lower cutoff.
[[nodiscard]] double low_frequency_spectrum(double omega, const BilliardParams& p,
                                            LowFrequencyMode mode, double gamma = 0.0);

struct ClassicalGc {
  double value;
  std::optional<std::string> warning;
};

/// g_c = ln(2 DeltaR / gamma0) / u, the zero-frequency enhancement with a background rate.
[[nodiscard]] ClassicalGc gc_classical(const BilliardParams& p);

struct NumberVarianceOptions {
  /// Count impulses weighted by q instead of unit spikes.
  bool weighted = false;
  /// Window start spacing as a fraction of the window length.
  double stride_fraction = 0.25;
  std::size_t min_windows = 100;
  PistonProfile piston_profile;
};

/// C(0) from the counting variance, Var(N(t)) / t, restored by <q>^2 for unit spikes.
[[nodiscard]] double number_variance_c0(const CollisionSequence& c, double t_window,
                                        const NumberVarianceOptions& opt = {});

/// gamma_theta = gamma0 + (vE / R) cos(theta).
[[nodiscard]] double instability_exponent(double theta, const BilliardParams& p);

/// Impulse of one collision record, 2 m vE cos(theta) D_f(y).
[[nodiscard]] double impulse(const PistonCollision& r, const BilliardParams& p,
                             const PistonProfile& profile = {});

}  // namespace wqc::classical
