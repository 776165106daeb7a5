#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cadshrink/cost.hpp"
#include "cadshrink/expr.hpp"
#include "cadshrink/rewrite.hpp"
#include "cadshrink/rules.hpp"
#include "json.hpp"

namespace cadshrink {

struct Config {
  Limits limits;
  double solver_eps = 1e-3;
  double equiv_eps = 1e-6;
  RuleGroups groups;
  std::uint64_t seed = 0;
  bool validate = true;  // run the oracle on the result and fill ShrinkReport::validated

  /// Throws std::invalid_argument for non-positive limits or tolerances.
  void check() const;
};

struct ShrinkReport {
  Cost input_cost = 0;
  Cost output_cost = 0;
  int iterations = 0;
  std::size_t enodes = 0;
  std::size_t eclasses = 0;
  StopReason stop_reason = StopReason::Saturated;
  double wall_seconds = 0.0;
  std::optional<bool> validated;
};

nlohmann::json to_json(const ShrinkReport& r);

struct ShrinkResult {
  Expr output;
  ShrinkReport report;
};

/// Saturates an e-graph seeded with `input` and extracts the cheapest program.
/// `input` must be Core Caddy.
ShrinkResult shrink(const Expr& input, const Config& cfg = {});

/// Evaluates `output` back to Core Caddy and compares with the analytic oracle.
bool validate(const Expr& input, const Expr& output, double eps = 1e-6);

struct PerturbOptions {
  bool substitute_identities = true;  // Rotate [0,0,180] <-> Scale [-1,-1,1]
  bool drop_identities = true;
  bool interchange = true;  // Scale/Translate order swaps
  bool shuffle_ac = true;   // reorder Union / Intersection chains
  double jitter = 0.0;
};

/// Seeded, semantics-preserving obfuscation of a Core Caddy program (up to
/// `jitter` noise on translations and primitive sizes).
Expr perturb(const Expr& input, std::uint64_t seed, const PerturbOptions& options = {});

struct BenchEntry {
  std::string file;
  ShrinkReport report;
  std::string output;
  std::string error;  // non-empty when the file could not be processed
};

/// Shrinks every `*.csexp` file under `dir` (sorted by name).
std::vector<BenchEntry> bench(const std::filesystem::path& dir, const Config& cfg = {});

nlohmann::json to_json(const BenchEntry& e);

std::string read_file(const std::filesystem::path& path);

}  // namespace cadshrink
