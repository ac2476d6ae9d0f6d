#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hinfdae::robust {

enum class Region { Exact, Conservative };

const char* to_string(Region region);

/// Additive Lipschitz-uncertainty budget around nominal constants gamma1,
/// gamma2 given the certified gamma_star.
struct UncertaintyBudget {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_star = 0.0;
  Region region = Region::Exact;

  double nominal() const;
  bool empty() const { return gamma_star < nominal(); }
};

/// Throws Error(Domain) for negative increments.
bool admissible(const UncertaintyBudget& budget, double dg1, double dg2);

/// Largest Delta with admissible(Delta, Delta); 0 for an empty budget.
double max_uniform_delta(const UncertaintyBudget& budget);

struct BoundaryPoint {
  double dg1 = 0.0;
  double dg2 = 0.0;
  Region region = Region::Exact;
};

/// `samples` points on the exact arc followed by `samples` points on the
/// conservative arc, both running from the dg1 axis to the dg2 axis.
/// Throws Error(Domain) for samples < 2.
std::vector<BoundaryPoint> region_boundary(const UncertaintyBudget& budget, int samples);

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points);

}  // namespace hinfdae::robust
