#include <cmath>
#include <random>
#include <string>

#include "wqc/classical.hpp"
#include "wqc/error.hpp"

namespace wqc::classical {

ParticleState random_initial_state(const BilliardGeometry& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& p = g.params();
  std::uniform_real_distribution<double> ux(g.min_x(), p.Lx);
  std::uniform_real_distribution<double> uy(0.0, p.Ly);
  std::uniform_real_distribution<double> ua(-kPi, kPi);

  ParticleState s;
  do {
    s.position = {ux(rng), uy(rng)};
  } while (!g.contains(s.position, 0.0));
  const double a = ua(rng);
  s.direction = {std::cos(a), std::sin(a)};
  return s;
}

CollisionSequence simulate_from(const ParticleState& start, const BilliardParams& p,
                                std::size_t n_piston_hits, const TrajectoryOptions& opt) {
  if (n_piston_hits < 1) throw DomainError("simulate: n_piston_hits must be >= 1");
  const BilliardGeometry g(p);
  const double speed = std::sqrt(2.0 * p.energy / p.mass);

  CollisionSequence out;
  out.params = p;
  out.records.reserve(n_piston_hits);

  ParticleState s = start;
  std::uint64_t since_last = 0;
  while (out.records.size() < n_piston_hits) {
    const Vec2 incoming = s.direction;
    auto [next, wall] = propagate_to_next_collision(s, g, speed);
    if (wall == Wall::Piston) {
      out.records.push_back({next.time, next.position.y, std::atan2(incoming.y, incoming.x)});
      since_last = 0;
    } else if (++since_last > opt.max_events_between_hits) {
      throw NumericError("simulate: no piston collision within " +
                         std::to_string(opt.max_events_between_hits) +
                         " wall events (trajectory trapped away from the piston)");
    }
    s = next;
  }
  out.t_total = out.records.back().t;
  return out;
}

CollisionSequence simulate_trajectory(const BilliardParams& p, std::size_t n_piston_hits,
                                      std::uint64_t seed, const TrajectoryOptions& opt) {
  const BilliardGeometry g(p);
  auto c = simulate_from(random_initial_state(g, seed), p, n_piston_hits, opt);
  c.seed = seed;
  return c;
}

}  // namespace wqc::classical
