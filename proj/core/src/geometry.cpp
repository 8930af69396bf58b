#include <algorithm>
#include <cmath>

#include "wqc/classical.hpp"
#include "wqc/error.hpp"

namespace wqc::classical {

std::string_view to_string(Wall w) {
  switch (w) {
    case Wall::Piston: return "piston";
    case Wall::Top: return "top";
    case Wall::Bottom: return "bottom";
    case Wall::Arc: return "arc";
  }
  return "?";
}

BilliardGeometry::BilliardGeometry(const BilliardParams& p) : p_(p), flat_(p.integrable()) {
  p.validate();
  if (flat_) {
    cx_ = -kInfinity;
    R2_ = kInfinity;
  } else {
    const double h = p.Ly - p.eps;
    cx_ = -std::sqrt(p.R * p.R - h * h);
    R2_ = p.R * p.R;
  }
}

double BilliardGeometry::left_wall_x(double y) const {
  if (flat_) return 0.0;
  const double dy = y - p_.eps;
  return cx_ + std::sqrt(R2_ - dy * dy);
}

double BilliardGeometry::min_x() const { return 0.0; }

bool BilliardGeometry::contains(Vec2 r, double tol) const {
  const double scale = tol * std::max(p_.Lx, p_.Ly);
  if (r.y < -scale || r.y > p_.Ly + scale || r.x > p_.Lx + scale) return false;
  return r.x >= left_wall_x(std::clamp(r.y, 0.0, p_.Ly)) - scale;
}

BilliardGeometry::Hit BilliardGeometry::next_hit(Vec2 r, Vec2 d) const {
  Hit best{kInfinity, Wall::Piston};
  auto consider = [&best](double t, Wall w) {
    t = std::max(t, 0.0);
    if (t < best.distance) best = {t, w};
  };
  if (d.x > 0) consider((p_.Lx - r.x) / d.x, Wall::Piston);
  if (d.y > 0) consider((p_.Ly - r.y) / d.y, Wall::Top);
  if (d.y < 0) consider(-r.y / d.y, Wall::Bottom);
  if (flat_) {
    if (d.x < 0) consider(-r.x / d.x, Wall::Arc);
  } else {
    // Entry into the disk |r + t d - c| < R, which lies outside the domain.
    const double wx = r.x - cx_;
    const double wy = r.y - p_.eps;
    const double b = d.x * wx + d.y * wy;
    const double c = wx * wx + wy * wy - R2_;
    const double disc = b * b - c;
    double t = kInfinity;
    if (b < 0 && disc >= 0) t = c <= 0 ? 0.0 : c / (std::sqrt(disc) - b);
    consider(t, Wall::Arc);
  }
  if (!(best.distance < kInfinity))
    throw NumericError("billiard: ray leaves the domain without hitting a wall");
  return best;
}

Vec2 BilliardGeometry::outward_normal(Wall wall, Vec2 r) const {
  switch (wall) {
    case Wall::Piston: return {1.0, 0.0};
    case Wall::Top: return {0.0, 1.0};
    case Wall::Bottom: return {0.0, -1.0};
    case Wall::Arc: {
      if (flat_) return {-1.0, 0.0};
      // Out of the domain means towards the circle centre.
      const double wx = cx_ - r.x;
      const double wy = p_.eps - r.y;
      const double n = std::hypot(wx, wy);
      return {wx / n, wy / n};
    }
  }
  return {0.0, 0.0};
}

Vec2 BilliardGeometry::snap(Wall wall, Vec2 r) const {
  switch (wall) {
    case Wall::Piston: r.x = p_.Lx; break;
    case Wall::Top: r.y = p_.Ly; break;
    case Wall::Bottom: r.y = 0.0; break;
    case Wall::Arc:
      if (flat_) {
        r.x = 0.0;
      } else {
        const double wx = r.x - cx_;
        const double wy = r.y - p_.eps;
        const double s = p_.R / std::hypot(wx, wy);
        r = {cx_ + wx * s, p_.eps + wy * s};
      }
      break;
  }
  r.y = std::clamp(r.y, 0.0, p_.Ly);
  r.x = std::min(r.x, p_.Lx);
  return r;
}

std::pair<ParticleState, Wall> propagate_to_next_collision(const ParticleState& s,
                                                           const BilliardGeometry& g,
                                                           double speed) {
  const auto hit = g.next_hit(s.position, s.direction);
  ParticleState out = s;
  out.position = g.snap(hit.wall, {s.position.x + hit.distance * s.direction.x,
                                   s.position.y + hit.distance * s.direction.y});
  out.time = s.time + hit.distance / speed;

  const Vec2 n = g.outward_normal(hit.wall, out.position);
  const double dn = s.direction.x * n.x + s.direction.y * n.y;
  Vec2 d{s.direction.x - 2.0 * dn * n.x, s.direction.y - 2.0 * dn * n.y};

  // Minimum-advance guard: keep a small inward component after grazing hits.
  const double dn_after = d.x * n.x + d.y * n.y;  // <= 0 for an inward direction
  if (dn_after > -kGrazingCos) {
    const double shift = -kGrazingCos - dn_after;
    d.x += shift * n.x;
    d.y += shift * n.y;
  }
  // Renormalizing every step stops rounding from drifting the speed.
  const double norm = std::hypot(d.x, d.y);
  out.direction = {d.x / norm, d.y / norm};
  return {out, hit.wall};
}

std::pair<ParticleState, Wall> propagate_to_next_collision(const ParticleState& s,
                                                           const BilliardParams& p) {
  const BilliardGeometry g(p);
  return propagate_to_next_collision(s, g, std::sqrt(2.0 * p.energy / p.mass));
}

}  // namespace wqc::classical
