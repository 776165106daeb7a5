// Command-line front end: shrink, validate, perturb, eval, bench.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cadshrink/equiv.hpp"
#include "cadshrink/eval.hpp"
#include "cadshrink/pipeline.hpp"
#include "cadshrink/syntax.hpp"

using namespace cadshrink;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Expr load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what());
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrink flat CSG programs into structured Caddy"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Config cfg;
  bool no_cad = false, no_inverse = false;
  app.add_option("--max-iters", cfg.limits.max_iters, "Saturation iteration limit")->capture_default_str();
  app.add_option("--max-nodes", cfg.limits.max_nodes, "E-node limit")->capture_default_str();
  app.add_option("--max-seconds", cfg.limits.max_seconds, "Wall-clock limit for saturation")->capture_default_str();
  app.add_option("--solver-eps", cfg.solver_eps, "Residual tolerance of the list solvers")->capture_default_str();
  app.add_option("--equiv-eps", cfg.equiv_eps, "Tolerance of the equivalence oracle")->capture_default_str();
  app.add_flag("--no-cad-identities", no_cad, "Disable CAD identity rewrites");
  app.add_flag("--no-inverse", no_inverse, "Disable inverse transformations");
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();

  auto* shrink_cmd = app.add_subcommand("shrink", "Shrink a Core Caddy program");
  std::string in_path, out_path, json_path;
  shrink_cmd->add_option("input", in_path, "Core Caddy file")->required();
  shrink_cmd->add_option("-o,--output", out_path, "Write the program here instead of stdout");
  shrink_cmd->add_option("--json", json_path, "Write the ShrinkReport as JSON ('-' for stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "Check a Caddy program against its Core Caddy source");
  std::string program_path;
  validate_cmd->add_option("input", in_path, "Core Caddy file")->required();
  validate_cmd->add_option("program", program_path, "Caddy file")->required();

  auto* perturb_cmd = app.add_subcommand("perturb", "Obfuscate a Core Caddy program");
  PerturbOptions popt;
  bool no_sub = false, no_drop = false, no_swap = false, no_shuffle = false;
  perturb_cmd->add_option("input", in_path, "Core Caddy file")->required();
  perturb_cmd->add_flag("--no-substitute", no_sub, "Keep Rotate [0,0,180] and Scale [-1,-1,1] as written");
  perturb_cmd->add_flag("--no-drop", no_drop, "Keep identity affines");
  perturb_cmd->add_flag("--no-interchange", no_swap, "Keep Scale/Translate order");
  perturb_cmd->add_flag("--no-shuffle", no_shuffle, "Keep Union/Intersection order");
  perturb_cmd->add_option("--jitter", popt.jitter, "Uniform noise bound on translations and sizes")->capture_default_str();
  perturb_cmd->add_option("-o,--output", out_path, "Output file");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a Caddy program to Core Caddy");
  eval_cmd->add_option("input", in_path, "Caddy file")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Shrink every .csexp file in a directory");
  std::string dir;
  bool bench_json = false;
  bench_cmd->add_option("dir", dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_flag("--json", bench_json, "Print one JSON array instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  cfg.groups.cad_identities = !no_cad;
  cfg.groups.inverse = !no_inverse;

  try {
    cfg.check();
    if (*shrink_cmd) {
      Expr input = load(in_path);
      if (!is_core(input)) throw InputError(in_path + ": not a Core Caddy program");
      ShrinkResult res = shrink(input, cfg);
      emit(print(res.output), out_path);
      if (!json_path.empty()) emit(to_json(res.report).dump(2), json_path);
      return res.report.validated.value_or(true) ? kOk : kValidationFailed;
    }
    if (*validate_cmd) {
      Expr input = load(in_path);
      Expr program = load(program_path);
      bool ok = validate(input, program, cfg.equiv_eps);
      std::cout << (ok ? "equivalent" : "NOT equivalent") << "\n";
      return ok ? kOk : kValidationFailed;
    }
    if (*perturb_cmd) {
      Expr input = load(in_path);
      if (!is_core(input)) throw InputError(in_path + ": not a Core Caddy program");
      popt.substitute_identities = !no_sub;
      popt.drop_identities = !no_drop;
      popt.interchange = !no_swap;
      popt.shuffle_ac = !no_shuffle;
      emit(print(perturb(input, cfg.seed, popt)), out_path);
      return kOk;
    }
    if (*eval_cmd) {
      std::cout << print(eval_to_core(load(in_path))) << "\n";
      return kOk;
    }
    if (*bench_cmd) {
      auto entries = bench(dir, cfg);
      bool all_ok = true;
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& e : entries) {
        all_ok = all_ok && e.error.empty() && e.report.validated.value_or(true);
        arr.push_back(to_json(e));
      }
      if (bench_json) {
        std::cout << arr.dump(2) << "\n";
      } else {
        for (const auto& e : entries) {
          if (!e.error.empty()) {
            std::cout << e.file << "  error: " << e.error << "\n";
            continue;
          }
          std::cout << e.file << "  " << e.report.input_cost << " -> " << e.report.output_cost << "  "
                    << stop_reason_name(e.report.stop_reason) << "  " << e.report.wall_seconds << "s\n";
        }
      }
      return all_ok ? kOk : kValidationFailed;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DegenerateScale& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
