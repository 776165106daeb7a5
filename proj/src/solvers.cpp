#include "cadshrink/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace cadshrink {
namespace {

double eval_poly(const std::array<double, 3>& c, double i) { return c[0] + c[1] * i + c[2] * i * i; }

double residual(const std::vector<double>& ys, const std::array<double, 3>& c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) worst = std::max(worst, std::abs(eval_poly(c, double(i)) - ys[i]));
  return worst;
}

std::array<double, 3> least_squares(const std::vector<double>& ys, int degree) {
  const auto n = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = static_cast<double>(i), p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= x) a(i, d) = p;
    b(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
  std::array<double, 3> c{};
  for (int d = 0; d <= degree; ++d) c[d] = round_sig(sol(d));
  return c;
}

// Rounded fit with negligible terms dropped, if that still fits.
std::optional<std::pair<std::array<double, 3>, double>> fit_component(const std::vector<double>& ys, double eps) {
  for (int degree = 1; degree <= 2; ++degree) {
    std::array<double, 3> c = least_squares(ys, degree);
    double r = residual(ys, c);
    if (!(r <= eps)) continue;
    std::array<double, 3> trimmed = c;
    for (double& x : trimmed)
      if (std::abs(x) < eps) x = 0.0;
    double rt = residual(ys, trimmed);
    if (rt <= eps) return std::make_pair(trimmed, rt);
    return std::make_pair(c, r);
  }
  return std::nullopt;
}

Expr term(double coef, Expr mono) {
  if (coef == 1.0) return mono;
  return mk::arith(Op::Mul, mk::num(coef), std::move(mono));
}

}  // namespace

std::optional<FitResult> fit_list(const std::vector<Vec3d>& vs, double eps) {
  if (vs.size() < 3) return std::nullopt;
  FitResult fit;
  fit.n = vs.size();
  for (int k = 0; k < 3; ++k) {
    std::vector<double> ys;
    ys.reserve(vs.size());
    for (const auto& v : vs) ys.push_back(v[k]);
    auto c = fit_component(ys, eps);
    if (!c) return std::nullopt;
    fit.coef[k] = c->first;
    fit.max_residual = std::max(fit.max_residual, c->second);
  }
  return fit;
}

Expr polynomial_expr(const std::array<double, 3>& c, const std::string& var) {
  Expr i = mk::var(var);
  std::vector<std::pair<double, Expr>> terms;
  if (c[1] != 0.0) terms.emplace_back(c[1], i);
  if (c[2] != 0.0) terms.emplace_back(c[2], mk::arith(Op::Mul, i, i));
  if (c[0] != 0.0) terms.emplace_back(c[0], Expr{});
  if (terms.empty()) return mk::num(0.0);
  Expr acc;
  for (auto& [coef, mono] : terms) {
    if (acc.empty()) {
      if (mono.empty()) {
        acc = mk::num(coef);
      } else if (coef == -1.0) {
        acc = mk::arith(Op::Mul, mk::num(-1.0), mono);
      } else if (mono.op() == Op::Mul && coef != 1.0) {
        acc = mk::arith(Op::Mul, mk::arith(Op::Mul, mk::num(coef), i), i);  // c*i*i
      } else {
        acc = term(coef, mono);
      }
      continue;
    }
    Op op = coef < 0 ? Op::Sub : Op::Add;
    double mag = std::abs(coef);
    Expr t;
    if (mono.empty()) {
      t = mk::num(mag);
    } else if (mono.op() == Op::Mul && mag != 1.0) {
      t = mk::arith(Op::Mul, mk::arith(Op::Mul, mk::num(mag), i), i);
    } else {
      t = term(mag, mono);
    }
    acc = mk::arith(op, acc, t);
  }
  return acc;
}

Expr tabulate_of(const FitResult& fit) {
  Expr body = mk::vec3(polynomial_expr(fit.coef[0], "i"), polynomial_expr(fit.coef[1], "i"),
                       polynomial_expr(fit.coef[2], "i"));
  return mk::tabulate({Binding{"i", static_cast<int>(fit.n)}}, body);
}

std::optional<Expr> solve_list(const std::vector<Vec3d>& vs, double eps) {
  auto fit = fit_list(vs, eps);
  if (!fit) return std::nullopt;
  return tabulate_of(*fit);
}

std::optional<SortedSolution> solve_list_sorted(const std::vector<Vec3d>& vs, double eps) {
  if (vs.size() < 3) return std::nullopt;
  // Values closer than the quantum compare equal so noise does not decide the order.
  const double quantum = std::max(10.0 * eps, 1e-9);
  auto q = [&](double x) { return std::llround(x / quantum); };
  using Key = std::function<bool(const Vec3d&, const Vec3d&)>;
  auto lex = [&](std::array<int, 3> axes) {
    return Key([=](const Vec3d& a, const Vec3d& b) {
      for (int k : axes) {
        auto x = q(a[k]), y = q(b[k]);
        if (x != y) return x < y;
      }
      return false;
    });
  };
  const std::vector<Key> keys = {lex({0, 1, 2}), lex({2, 1, 0}), lex({0, 0, 0}), lex({1, 1, 1}), lex({2, 2, 2})};
  std::vector<std::vector<int>> tried;
  for (const auto& key : keys) {
    std::vector<int> p(vs.size());
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return key(vs[a], vs[b]); });
    Permutation perm{p};
    if (perm.is_identity()) continue;
    if (std::find(tried.begin(), tried.end(), p) != tried.end()) continue;
    tried.push_back(p);
    std::vector<Vec3d> sorted;
    for (int k : p) sorted.push_back(vs[static_cast<std::size_t>(k)]);
    if (auto tab = solve_list(sorted, eps)) return SortedSolution{std::move(perm), *tab};
  }
  return std::nullopt;
}

std::optional<Expr> solve_spherical(const std::vector<Vec3d>& vs, double eps) {
  if (vs.size() < 3) return std::nullopt;
  Vec3d centroid{0, 0, 0};
  for (const auto& v : vs)
    for (int k = 0; k < 3; ++k) centroid[k] += v[k] / double(vs.size());
  centroid = round_sig(centroid);
  std::vector<Vec3d> centers = {Vec3d{0, 0, 0}};
  if (centroid != centers.front()) centers.push_back(centroid);
  const int n = static_cast<int>(vs.size());
  for (const auto& c : centers) {
    std::vector<Vec3d> sph;
    bool degenerate = false;
    for (const auto& v : vs) {
      Vec3d s = round_sig(to_spherical(c, v));
      if (s[0] < eps) degenerate = true;
      sph.push_back(s);
    }
    if (degenerate) continue;
    if (auto tab = solve_list(sph, eps)) return mk::unspherical(n, mk::vec3(c), *tab);
    if (auto sorted = solve_list_sorted(sph, eps))
      return mk::unspherical(n, mk::vec3(c), mk::unsort(sorted->perm, sorted->tabulate));
  }
  return std::nullopt;
}

std::optional<Grouping> group_by_keys(const std::vector<std::string>& keys) {
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto [it, fresh] = index.emplace(keys[i], groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  if (groups.size() < 2) return std::nullopt;
  if (std::none_of(groups.begin(), groups.end(), [](const auto& g) { return g.size() >= 2; })) return std::nullopt;
  Grouping out;
  out.contiguous = std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.back() - g.front() + 1 == g.size(); });
  if (!out.contiguous)
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (const auto& g : groups) {
    out.part.lengths.push_back(static_cast<int>(g.size()));
    for (std::size_t i : g) out.order.indices.push_back(static_cast<int>(i));
  }
  out.groups = std::move(groups);
  return out;
}

}  // namespace cadshrink
