#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cadshrink/rewrite.hpp"

namespace cadshrink {

struct RuleGroups {
  bool reroll = true;
  bool cad_identities = true;
  bool inverse = true;
  bool numeric = true;
  bool bridge = true;
};

std::vector<Rewrite> reroll_rules();
std::vector<Rewrite> cad_identity_rules();
std::vector<Rewrite> inverse_rules();
std::vector<Rewrite> bridge_rules();
std::vector<Rewrite> numeric_rules();

std::vector<Rewrite> all_rules(const RuleGroups& groups = {});

/// Grouping keys tried by the partitioner, in priority order, for each list item.
std::vector<std::vector<std::string>> partition_keys(RuleContext& ctx, const std::vector<ClassId>& items);

/// (Unpart P ...) or (Unsort g (Unpart P ...)) for the first viable key.
std::vector<Expr> partition_list(RuleContext& ctx, const std::vector<ClassId>& items);

/// Embeds per-sublist permutations at their block offsets; identity elsewhere.
Permutation embed_permutations(const Partitioning& part, const std::vector<std::optional<Permutation>>& perms);

}  // namespace cadshrink
