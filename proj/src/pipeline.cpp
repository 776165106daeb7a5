#include "cadshrink/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cadshrink/egraph.hpp"
#include "cadshrink/equiv.hpp"
#include "cadshrink/eval.hpp"
#include "cadshrink/extract.hpp"
#include "cadshrink/syntax.hpp"

namespace cadshrink {

void Config::check() const {
  if (limits.max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  if (limits.max_nodes == 0) throw std::invalid_argument("max_nodes must be positive");
  if (!(limits.max_seconds > 0)) throw std::invalid_argument("max_seconds must be positive");
  if (!(solver_eps > 0)) throw std::invalid_argument("solver_eps must be positive");
  if (!(equiv_eps > 0)) throw std::invalid_argument("equiv_eps must be positive");
}

nlohmann::json to_json(const ShrinkReport& r) {
  nlohmann::json j;
  j["input_cost"] = r.input_cost;
  j["output_cost"] = r.output_cost;
  j["iterations"] = r.iterations;
  j["enodes"] = r.enodes;
  j["eclasses"] = r.eclasses;
  j["stop_reason"] = stop_reason_name(r.stop_reason);
  j["wall_seconds"] = r.wall_seconds;
  j["validated"] = r.validated ? nlohmann::json(*r.validated) : nlohmann::json(nullptr);
  return j;
}

ShrinkResult shrink(const Expr& input, const Config& cfg) {
  cfg.check();
  if (!is_core(input)) throw std::invalid_argument("shrink expects a Core Caddy program");
  auto start = std::chrono::steady_clock::now();

  EGraph g;
  ClassId root = g.add_expr(input);
  g.rebuild();
  SaturationReport sat = run_saturation(g, all_rules(cfg.groups), cfg.limits, cfg.solver_eps);
  Extractor ex(g);

  ShrinkResult res;
  res.output = ex.extract(root);
  ShrinkReport& r = res.report;
  r.input_cost = cost(input);
  r.output_cost = ex.cost_of(root);
  // The input tree stays in the root class, so extraction cannot lose.
  if (r.output_cost > r.input_cost) throw std::logic_error("extraction returned a costlier program than the input");
  r.iterations = sat.iterations;
  r.enodes = sat.enodes;
  r.eclasses = sat.eclasses;
  r.stop_reason = sat.stop_reason;
  if (cfg.validate) r.validated = validate(input, res.output, cfg.equiv_eps);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

bool validate(const Expr& input, const Expr& output, double eps) {
  return semantic_equiv(eval_to_core(output), input, eps);
}

namespace {

std::optional<Vec3d> literal_vec3(const Expr& e) {
  if (e.op() != Op::Vec3 || !free_vars(e).empty()) return std::nullopt;
  try {
    Value v = evaluate(e);
    return v.vec;
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

double max_abs(const Vec3d& v) { return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])}); }

class Perturber {
 public:
  Perturber(std::uint64_t seed, const PerturbOptions& o) : rng_(seed), o_(o) {}

  // `reach` bounds how much the enclosing affines magnify a unit change here.
  Expr go(const Expr& e, double reach, bool allow_swap = true) {
    if (is_affine(e.op()) && e.op() != Op::TranslateSpherical) return affine(e, reach, allow_swap);
    if (is_primitive(e.op())) return primitive(e, reach);
    if (e.op() == Op::Union || e.op() == Op::Intersection) return chain(e, reach);
    if (e.op() == Op::Difference) return mk::binop(Op::Difference, go(e.child(0), reach), go(e.child(1), reach));
    return e;
  }

 private:
  std::mt19937_64 rng_;
  PerturbOptions o_;

  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  double noise(double reach) {
    if (o_.jitter <= 0) return 0.0;
    return std::uniform_real_distribution<double>(-o_.jitter, o_.jitter)(rng_) / (3.0 * std::max(1.0, reach));
  }

  Expr affine(const Expr& e, double reach, bool allow_swap) {
    Op kind = e.op();
    auto v = literal_vec3(e.child(0));
    if (!v) return mk::affine(kind, e.child(0), go(e.child(1), reach));
    const Expr& c = e.child(1);

    if (o_.drop_identities && coin()) {
      bool identity = (kind == Op::Scale && *v == Vec3d{1, 1, 1}) || (kind != Op::Scale && *v == Vec3d{0, 0, 0});
      if (identity) return go(c, reach, allow_swap);
    }
    if (o_.substitute_identities && coin()) {
      if (kind == Op::Rotate && *v == Vec3d{0, 0, 180}) {
        kind = Op::Scale;
        *v = {-1, -1, 1};
      } else if (kind == Op::Scale && *v == Vec3d{-1, -1, 1}) {
        kind = Op::Rotate;
        *v = {0, 0, 180};
      }
    }
    if (o_.interchange && allow_swap && is_affine(c.op()) && coin()) {
      auto w = literal_vec3(c.child(0));
      if (w && kind == Op::Translate && c.op() == Op::Scale && std::none_of(w->begin(), w->end(), [](double x) { return x == 0.0; })) {
        Vec3d t{(*v)[0] / (*w)[0], (*v)[1] / (*w)[1], (*v)[2] / (*w)[2]};
        Expr inner = mk::affine(Op::Translate, mk::vec3(round_sig(t)), c.child(1));
        return finish(Op::Scale, *w, inner, reach);
      }
      if (w && kind == Op::Scale && c.op() == Op::Translate) {
        Vec3d t{(*v)[0] * (*w)[0], (*v)[1] * (*w)[1], (*v)[2] * (*w)[2]};
        Expr inner = mk::affine(Op::Scale, mk::vec3(*v), c.child(1));
        return finish(Op::Translate, round_sig(t), inner, reach);
      }
    }
    return finish(kind, *v, c, reach, allow_swap);
  }

  Expr finish(Op kind, Vec3d v, const Expr& child, double reach, bool allow_swap = false) {
    double inner = reach;
    if (kind == Op::Translate)
      for (double& x : v) x += noise(reach);
    if (kind == Op::Scale) inner = reach * std::max(1.0, max_abs(v));
    return mk::affine(kind, mk::vec3(v), go(child, inner, allow_swap));
  }

  double jittered(double x, double reach) {
    double y = x + noise(reach);
    return y > 0 ? y : x;
  }

  Expr primitive(const Expr& e, double reach) {
    if (o_.jitter <= 0 || !free_vars(e).empty()) return e;
    Value p = evaluate(e.child(0));
    if (e.op() == Op::Sphere) return mk::sphere(mk::num(jittered(p.number, reach)));
    if (e.op() == Op::Cuboid) {
      Vec3d d = p.vec;
      for (double& x : d) x = jittered(x, reach);
      return mk::cuboid(mk::vec3(d));
    }
    return mk::primitive(e.op(), mk::vec2(jittered(p.vec[0], reach), jittered(p.vec[1], reach)));
  }

  void leaves(const Expr& e, Op kind, std::vector<Expr>& out) {
    if (e.op() == kind) {
      leaves(e.child(0), kind, out);
      leaves(e.child(1), kind, out);
    } else {
      out.push_back(e);
    }
  }

  Expr chain(const Expr& e, double reach) {
    if (!o_.shuffle_ac) return mk::binop(e.op(), go(e.child(0), reach), go(e.child(1), reach));
    std::vector<Expr> xs;
    leaves(e, e.op(), xs);
    for (auto& x : xs) x = go(x, reach);
    std::shuffle(xs.begin(), xs.end(), rng_);
    Expr acc = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) acc = mk::binop(e.op(), acc, xs[i]);
    return acc;
  }
};

}  // namespace

Expr perturb(const Expr& input, std::uint64_t seed, const PerturbOptions& options) {
  Perturber p(seed, options);
  return p.go(input, 1.0);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<BenchEntry> bench(const std::filesystem::path& dir, const Config& cfg) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csexp") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<BenchEntry> out;
  for (const auto& f : files) {
    BenchEntry e;
    e.file = std::filesystem::relative(f, dir).generic_string();
    try {
      auto res = shrink(parse(read_file(f)), cfg);
      e.report = res.report;
      e.output = print(res.output);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json to_json(const BenchEntry& e) {
  nlohmann::json j;
  j["file"] = e.file;
  if (!e.error.empty()) {
    j["error"] = e.error;
    return j;
  }
  j["report"] = to_json(e.report);
  j["output"] = e.output;
  return j;
}

}  // namespace cadshrink
