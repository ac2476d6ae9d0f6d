#include "hinfdae/robust.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "hinfdae/error.hpp"

namespace hinfdae::robust {

const char* to_string(Region region) {
  return region == Region::Exact ? "exact" : "conservative";
}

double UncertaintyBudget::nominal() const { return std::hypot(gamma1, gamma2); }

bool admissible(const UncertaintyBudget& b, double dg1, double dg2) {
  if (dg1 < 0.0 || dg2 < 0.0) throw Error(ErrorKind::Domain, "uncertainty increments must be non-negative");
  if (b.region == Region::Exact) return std::hypot(b.gamma1 + dg1, b.gamma2 + dg2) <= b.gamma_star;
  return std::hypot(dg1, dg2) <= b.gamma_star - b.nominal();
}

double max_uniform_delta(const UncertaintyBudget& b) {
  if (b.empty()) return 0.0;
  double d = 0.0;
  if (b.region == Region::Exact) {
    // (g1 + d)^2 + (g2 + d)^2 = g*^2
    const double s = b.gamma1 + b.gamma2;
    const double c = b.gamma1 * b.gamma1 + b.gamma2 * b.gamma2 - b.gamma_star * b.gamma_star;
    d = 0.5 * (-s + std::sqrt(std::max(0.0, s * s - 2.0 * c)));
  } else {
    d = (b.gamma_star - b.nominal()) / std::numbers::sqrt2;
  }
  d = std::max(0.0, d);
  while (d > 0.0 && !admissible(b, d, d)) d = std::nextafter(d, 0.0);
  return d;
}

std::vector<BoundaryPoint> region_boundary(const UncertaintyBudget& b, int samples) {
  if (samples < 2) throw Error(ErrorKind::Domain, "region_boundary needs at least 2 samples");
  std::vector<BoundaryPoint> out;
  if (b.empty()) return out;
  const double gs = b.gamma_star;

  // Exact: circle of radius g* centred at (-g1, -g2), first-quadrant part.
  const double t0 = std::atan2(0.0 + b.gamma2, std::sqrt(std::max(0.0, gs * gs - b.gamma2 * b.gamma2)));
  const double t1 = std::atan2(std::sqrt(std::max(0.0, gs * gs - b.gamma1 * b.gamma1)), b.gamma1);
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    double dg1 = gs * std::cos(t) - b.gamma1;
    double dg2 = gs * std::sin(t) - b.gamma2;
    if (i == 0) dg2 = 0.0;
    if (i == samples - 1) dg1 = 0.0;
    out.push_back({std::max(0.0, dg1), std::max(0.0, dg2), Region::Exact});
  }

  const double rho = gs - b.nominal();
  for (int i = 0; i < samples; ++i) {
    const double t = 0.5 * std::numbers::pi * i / (samples - 1);
    double dg1 = rho * std::cos(t), dg2 = rho * std::sin(t);
    if (i == 0) dg2 = 0.0;
    if (i == samples - 1) dg1 = 0.0;
    out.push_back({dg1, dg2, Region::Conservative});
  }
  return out;
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points) {
  os << "dg1,dg2,region_tag\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", p.dg1, p.dg2, to_string(p.region));
    os << buf;
  }
}

}  // namespace hinfdae::robust
