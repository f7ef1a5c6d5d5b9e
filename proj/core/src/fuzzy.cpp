#include "rotpend/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "rotpend/errors.hpp"

namespace rotpend {

Partition::Partition(std::vector<double> centers) : centers_(std::move(centers)) {
  if (centers_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "partition needs at least one center");
  }
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (!std::isfinite(centers_[i])) {
      throw Error(ErrorKind::kInvalidArgument, "partition center is not finite");
    }
    if (i > 0 && !(centers_[i] > centers_[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "partition centers must be strictly increasing");
    }
  }
}

Partition Partition::uniform(double lo, double hi, std::size_t count) {
  if (count == 0) {
    throw Error(ErrorKind::kInvalidArgument, "partition needs at least one center");
  }
  if (count == 1) {
    if (lo != hi) {
      throw Error(ErrorKind::kInvalidArgument,
                  "a single-center partition needs lo == hi");
    }
    return Partition({lo});
  }
  if (!(hi > lo)) {
    throw Error(ErrorKind::kInvalidArgument, "partition domain needs lo < hi");
  }
  std::vector<double> c(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    c[i] = lo + step * static_cast<double>(i);
  }
  c.back() = hi;
  return Partition(std::move(c));
}

double Partition::membership(std::size_t index, double x) const {
  const std::size_t n = centers_.size();
  if (index >= n) {
    throw Error(ErrorKind::kInvalidArgument,
                "membership index " + std::to_string(index) + " out of range");
  }
  if (n == 1) return 1.0;

  const double c = centers_[index];
  if (x == c) return 1.0;
  if (x < c) {
    if (index == 0) return 1.0;
    const double left = centers_[index - 1];
    if (x <= left) return 0.0;
    return (x - left) / (c - left);
  }
  if (index == n - 1) return 1.0;
  const double right = centers_[index + 1];
  if (x >= right) return 0.0;
  return (right - x) / (right - c);
}

void Partition::memberships(double x, std::span<double> out) const {
  const std::size_t n = centers_.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (n == 1 || x <= centers_.front()) {
    out[0] = 1.0;
    return;
  }
  if (x >= centers_.back()) {
    out[n - 1] = 1.0;
    return;
  }
  // First center strictly greater than x; x lies in [c[k-1], c[k]).
  const auto it = std::upper_bound(centers_.begin(), centers_.end(), x);
  const auto k = static_cast<std::size_t>(it - centers_.begin());
  const double right = (x - centers_[k - 1]) / (centers_[k] - centers_[k - 1]);
  out[k - 1] = 1.0 - right;
  out[k] = right;
}

double triangular_membership(const Partition& part, std::size_t index, double x) {
  return part.membership(index, x);
}

std::size_t rule_count(std::span<const Partition> parts) {
  std::size_t n = 1;
  for (const auto& p : parts) n *= p.size();
  return n;
}

std::vector<std::size_t> rule_indices(std::span<const Partition> parts,
                                      std::size_t rule) {
  std::vector<std::size_t> idx(parts.size());
  for (std::size_t i = parts.size(); i-- > 0;) {
    idx[i] = rule % parts[i].size();
    rule /= parts[i].size();
  }
  return idx;
}

std::vector<double> grid_point(std::span<const Partition> parts,
                               std::size_t rule) {
  const auto idx = rule_indices(parts, rule);
  std::vector<double> X(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    X[i] = parts[i].centers()[idx[i]];
  }
  return X;
}

Eigen::VectorXd fuzzy_basis(std::span<const Partition> parts,
                            std::span<const double> X) {
  if (X.size() != parts.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "fuzzy_basis: expected " + std::to_string(parts.size()) +
                    " inputs, got " + std::to_string(X.size()));
  }

  // Per-axis memberships, then the tensor product in rule order. Building the
  // product by repeated Kronecker expansion keeps the last input fastest.
  std::vector<double> mu;
  Eigen::VectorXd xi = Eigen::VectorXd::Ones(1);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    mu.assign(parts[i].size(), 0.0);
    parts[i].memberships(X[i], mu);
    Eigen::VectorXd next(xi.size() * static_cast<Eigen::Index>(mu.size()));
    Eigen::Index k = 0;
    for (Eigen::Index a = 0; a < xi.size(); ++a) {
      for (double m : mu) next[k++] = xi[a] * m;
    }
    xi = std::move(next);
  }

  const double denom = xi.sum();
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::kNumericalFailure,
                "fuzzy_basis: all rule strengths vanished");
  }
  xi /= denom;
  return xi;
}

Eigen::VectorXd init_from_function(std::span<const Partition> parts,
                                   const ScalarField& fn) {
  const std::size_t n = rule_count(parts);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto X = grid_point(parts, j);
    const double v = fn(X);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "init_from_function: non-finite value at rule " + std::to_string(j));
    }
    theta[static_cast<Eigen::Index>(j)] = v;
  }
  return theta;
}

FuzzyApproximator::FuzzyApproximator(std::vector<Partition> partitions,
                                     Eigen::VectorXd theta)
    : partitions_(std::move(partitions)) {
  set_theta(std::move(theta));
}

FuzzyApproximator FuzzyApproximator::from_function(
    std::vector<Partition> partitions, const ScalarField& fn) {
  auto theta = init_from_function(partitions, fn);
  return FuzzyApproximator(std::move(partitions), std::move(theta));
}

void FuzzyApproximator::set_theta(Eigen::VectorXd theta) {
  if (static_cast<std::size_t>(theta.size()) != rule_count(partitions_)) {
    throw Error(ErrorKind::kInvalidArgument,
                "theta length does not match the rule count");
  }
  if (!theta.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "theta has non-finite components");
  }
  theta_ = std::move(theta);
}

Eigen::VectorXd FuzzyApproximator::basis(std::span<const double> X) const {
  return fuzzy_basis(partitions_, X);
}

double FuzzyApproximator::evaluate(std::span<const double> X) const {
  return theta_.dot(basis(X));
}

std::array<double, 3> fuzzy_inputs(const StateVector& x) {
  return {x.x2, x.x3, x.x4};
}

void write_theta_csv(std::ostream& os, const FuzzyApproximator& fa) {
  const auto& parts = fa.partitions();
  const auto old_precision = os.precision(17);
  os << "rule";
  for (std::size_t i = 0; i < parts.size(); ++i) os << ",c" << (i + 1);
  os << ",value\n";
  for (std::size_t j = 0; j < fa.size(); ++j) {
    os << j;
    for (double c : grid_point(parts, j)) os << ',' << c;
    os << ',' << fa.theta()[static_cast<Eigen::Index>(j)] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace rotpend
