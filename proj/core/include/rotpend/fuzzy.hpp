#pragma once

// Grid-rule fuzzy approximators with product inference, singleton
// fuzzifier and centroid defuzzifier. With triangular partitions of unity
// the approximator reduces to f̂(X) = θᵀξ(X), where ξ is the normalized
// vector of rule firing strengths.

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rotpend/plant.hpp"

namespace rotpend {

/// Triangular membership functions over [lo, hi]. Each triangle peaks at its
/// center and reaches zero at the neighbouring centers; the first and last
/// functions saturate at 1 beyond the domain edges (shoulders).
class Partition {
 public:
  /// Centers must be finite and strictly increasing. lo() and hi() are the
  /// first and last center.
  explicit Partition(std::vector<double> centers);

  static Partition uniform(double lo, double hi, std::size_t count);

  double lo() const { return centers_.front(); }
  double hi() const { return centers_.back(); }
  std::size_t size() const { return centers_.size(); }
  const std::vector<double>& centers() const { return centers_; }

  /// Throws Error(kInvalidArgument) if index ≥ size().
  double membership(std::size_t index, double x) const;

  /// Writes all size() memberships at x into out.
  void memberships(double x, std::span<double> out) const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<double> centers_;
};

double triangular_membership(const Partition& part, std::size_t index,
                             double x);

/// ∏ size() over all partitions.
std::size_t rule_count(std::span<const Partition> parts);

/// Rule j ↔ index tuple (l1, …, lm) in lexicographic order, the last input
/// varying fastest.
std::vector<std::size_t> rule_indices(std::span<const Partition> parts,
                                      std::size_t rule);
std::vector<double> grid_point(std::span<const Partition> parts,
                               std::size_t rule);

/// ξ_j(X) = ∏ μ_{l_i}(x_i) / Σ_rules ∏ μ(x_i). Components lie in [0, 1] and
/// sum to 1. X must carry one coordinate per partition.
Eigen::VectorXd fuzzy_basis(std::span<const Partition> parts,
                            std::span<const double> X);

using ScalarField = std::function<double(std::span<const double>)>;

/// θ_j = fn(grid point j). Throws Error(kInvalidArgument) if fn returns a
/// non-finite value.
Eigen::VectorXd init_from_function(std::span<const Partition> parts,
                                   const ScalarField& fn);

class FuzzyApproximator {
 public:
  FuzzyApproximator(std::vector<Partition> partitions, Eigen::VectorXd theta);

  /// θ initialized from fn on the center grid.
  static FuzzyApproximator from_function(std::vector<Partition> partitions,
                                         const ScalarField& fn);

  const std::vector<Partition>& partitions() const { return partitions_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  void set_theta(Eigen::VectorXd theta);

  std::size_t size() const { return static_cast<std::size_t>(theta_.size()); }

  Eigen::VectorXd basis(std::span<const double> X) const;
  double evaluate(std::span<const double> X) const;

 private:
  std::vector<Partition> partitions_;
  Eigen::VectorXd theta_;
};

/// The approximators read (x2, x3, x4); the base angle x1 is not an input.
std::array<double, 3> fuzzy_inputs(const StateVector& x);

/// One row per rule: `rule,c1,…,cm,value`, header included, 17 significant
/// digits.
void write_theta_csv(std::ostream& os, const FuzzyApproximator& fa);

}  // namespace rotpend
