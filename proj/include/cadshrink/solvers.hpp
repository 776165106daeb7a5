#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cadshrink/expr.hpp"

namespace cadshrink {

/// Per-component polynomial in the loop index: value(i) = c[0] + c[1] i + c[2] i^2.
struct FitResult {
  std::array<std::array<double, 3>, 3> coef{};  // [component][degree]
  std::size_t n = 0;
  double max_residual = 0.0;
};

/// Least-squares fit, degree 1 before degree 2 for each component. Declines
/// for fewer than three items or a residual above eps.
std::optional<FitResult> fit_list(const std::vector<Vec3d>& vs, double eps);

/// The arithmetic term for one component, e.g. `60*i` or `i*i - 2`.
Expr polynomial_expr(const std::array<double, 3>& c, const std::string& var);

/// (Tabulate (i n) [f_x(i), f_y(i), f_z(i)])
Expr tabulate_of(const FitResult& fit);

std::optional<Expr> solve_list(const std::vector<Vec3d>& vs, double eps);

struct SortedSolution {
  Permutation perm;  // gather: Sort perm vs is the sorted list
  Expr tabulate;
};

/// Retries solve_list after stable-sorting by lex(x,y,z), lex(z,y,x), x, y, z.
std::optional<SortedSolution> solve_list_sorted(const std::vector<Vec3d>& vs, double eps);

/// Fits in spherical coordinates about the origin, then the centroid.
/// Returns (Unspherical n center fit), with an Unsort inside when sorting was needed.
std::optional<Expr> solve_spherical(const std::vector<Vec3d>& vs, double eps);

struct Grouping {
  Partitioning part;
  /// Original positions, group by group. Identity when the groups are contiguous.
  Permutation order;
  std::vector<std::vector<std::size_t>> groups;
  bool contiguous = true;
};

/// Groups items with equal keys. Viable when there are at least two groups and
/// one of them has two members. Contiguous groups keep their order; otherwise
/// smaller groups come first, ties by first appearance.
std::optional<Grouping> group_by_keys(const std::vector<std::string>& keys);

}  // namespace cadshrink
