#include "apla/game.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "apla/errors.hpp"

namespace apla {

Game::Game(std::vector<std::size_t> action_counts,
           std::vector<std::vector<double>> utilities)
    : action_counts_(std::move(action_counts)), utilities_(std::move(utilities)) {
  if (action_counts_.empty()) {
    throw UsageError("game needs at least one player");
  }
  strides_.reserve(action_counts_.size());
  for (std::size_t count : action_counts_) {
    if (count == 0) throw UsageError("every player needs at least one action");
    strides_.push_back(num_profiles_);
    if (num_profiles_ > std::numeric_limits<std::size_t>::max() / count) {
      throw UsageError("profile space too large");
    }
    num_profiles_ *= count;
  }
  if (utilities_.size() != action_counts_.size()) {
    throw UsageError("expected one utility table per player, got " +
                     std::to_string(utilities_.size()) + " for " +
                     std::to_string(action_counts_.size()) + " players");
  }
  for (std::size_t i = 0; i < utilities_.size(); ++i) {
    if (utilities_[i].size() != num_profiles_) {
      throw UsageError("utility table of player " + std::to_string(i) + " has " +
                       std::to_string(utilities_[i].size()) + " entries, expected " +
                       std::to_string(num_profiles_));
    }
  }
}

std::size_t Game::num_actions(std::size_t player) const {
  if (player >= num_players()) {
    throw UsageError("player index " + std::to_string(player) + " out of range");
  }
  return action_counts_[player];
}

void Game::check_profile(ProfileId profile) const {
  if (profile.value >= num_profiles_) {
    throw UsageError("profile index " + std::to_string(profile.value) + " out of range");
  }
}

double Game::utility(std::size_t player, ProfileId profile) const {
  if (player >= num_players()) {
    throw UsageError("player index " + std::to_string(player) + " out of range");
  }
  check_profile(profile);
  return utilities_[player][profile.value];
}

std::vector<std::size_t> Game::decode(ProfileId profile) const {
  check_profile(profile);
  std::vector<std::size_t> actions(num_players());
  std::size_t rest = profile.value;
  for (std::size_t i = 0; i < num_players(); ++i) {
    actions[i] = rest % action_counts_[i];
    rest /= action_counts_[i];
  }
  return actions;
}

ProfileId Game::encode(std::span<const std::size_t> actions) const {
  if (actions.size() != num_players()) {
    throw UsageError("joint action has wrong arity");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] >= action_counts_[i]) {
      throw UsageError("action " + std::to_string(actions[i]) + " out of range for player " +
                       std::to_string(i));
    }
    index += actions[i] * strides_[i];
  }
  return ProfileId{index};
}

std::size_t Game::action_of(ProfileId profile, std::size_t player) const {
  check_profile(profile);
  return (profile.value / strides_.at(player)) % action_counts_[player];
}

ProfileId Game::with_action(ProfileId profile, std::size_t player, std::size_t action) const {
  if (action >= num_actions(player)) throw UsageError("action out of range");
  const std::size_t current = action_of(profile, player);
  return ProfileId{profile.value - current * strides_[player] + action * strides_[player]};
}

std::optional<std::size_t> Game::sole_mover(ProfileId from, ProfileId to) const {
  check_profile(from);
  check_profile(to);
  std::optional<std::size_t> mover;
  for (std::size_t i = 0; i < num_players(); ++i) {
    if (action_of(from, i) != action_of(to, i)) {
      if (mover) return std::nullopt;
      mover = i;
    }
  }
  return mover;
}

double Game::min_utility() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& table : utilities_) {
    for (double u : table) lo = std::min(lo, u);
  }
  return lo;
}

double Game::max_utility() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& table : utilities_) {
    for (double u : table) hi = std::max(hi, u);
  }
  return hi;
}

std::string Game::label(ProfileId profile) const {
  const auto actions = decode(profile);
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) out << ',';
    if (action_counts_[i] <= 26) {
      out << static_cast<char>('A' + actions[i]);
    } else {
      out << actions[i];
    }
  }
  out << ')';
  return out.str();
}

Game coordination_game(double a, double b, double c, double d) {
  // index = row + 2 * col
  return Game({2, 2}, {{a, c, b, d}, {a, b, c, d}});
}

double utility_at(const Game& game, std::size_t player, ProfileId profile) {
  return game.utility(player, profile);
}

BetterReplies better_replies(const Game& game, ProfileId profile, std::size_t player) {
  BetterReplies result;
  const double current = game.utility(player, profile);
  double best_value = current;
  for (std::size_t a = 0; a < game.num_actions(player); ++a) {
    const ProfileId candidate = game.with_action(profile, player, a);
    if (candidate == profile) continue;
    const double value = game.utility(player, candidate);
    if (!(value > current)) continue;
    result.replies.push_back(candidate);
    if (value > best_value) {
      best_value = value;
      result.best = candidate;
      result.maximizers.assign(1, candidate);
    } else if (value == best_value) {
      result.maximizers.push_back(candidate);
    }
  }
  return result;
}

std::vector<ProfileId> pure_nash_equilibria(const Game& game) {
  std::vector<ProfileId> equilibria;
  for (std::size_t p = 0; p < game.num_profiles(); ++p) {
    const ProfileId profile{p};
    bool stable = true;
    for (std::size_t i = 0; i < game.num_players() && stable; ++i) {
      stable = better_replies(game, profile, i).replies.empty();
    }
    if (stable) equilibria.push_back(profile);
  }
  return equilibria;
}

std::optional<ImprovementPath> improvement_path_to(const Game& game, ProfileId start,
                                                   std::span<const ProfileId> targets,
                                                   bool best_reply_only) {
  if (targets.empty()) throw UsageError("improvement path search needs a nonempty target set");
  const std::set<ProfileId> goal(targets.begin(), targets.end());
  game.utility(0, start);  // range check

  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(game.num_profiles(), kUnseen);
  std::vector<std::size_t> parent_mover(game.num_profiles(), 0);
  std::deque<ProfileId> frontier{start};
  parent[start.value] = start.value;

  std::optional<ProfileId> reached;
  while (!frontier.empty()) {
    const ProfileId current = frontier.front();
    frontier.pop_front();
    if (goal.contains(current)) {
      reached = current;
      break;
    }
    for (std::size_t i = 0; i < game.num_players(); ++i) {
      const auto replies = better_replies(game, current, i);
      const auto& next = best_reply_only ? replies.maximizers : replies.replies;
      for (ProfileId candidate : next) {
        if (parent[candidate.value] != kUnseen) continue;
        parent[candidate.value] = current.value;
        parent_mover[candidate.value] = i;
        frontier.push_back(candidate);
      }
    }
  }
  if (!reached) return std::nullopt;

  ImprovementPath path;
  for (ProfileId p = *reached; ; p = ProfileId{parent[p.value]}) {
    path.profiles.push_back(p);
    if (p == start) break;
    path.movers.push_back(parent_mover[p.value]);
  }
  std::reverse(path.profiles.begin(), path.profiles.end());
  std::reverse(path.movers.begin(), path.movers.end());
  return path;
}

WeakAcyclicity is_weakly_acyclic(const Game& game) {
  WeakAcyclicity result;
  const auto equilibria = pure_nash_equilibria(game);
  if (equilibria.empty()) return result;
  const std::set<ProfileId> ne(equilibria.begin(), equilibria.end());
  for (std::size_t p = 0; p < game.num_profiles(); ++p) {
    const ProfileId profile{p};
    if (ne.contains(profile)) continue;
    auto path = improvement_path_to(game, profile, equilibria, false);
    if (!path) {
      result.witnesses.clear();
      return result;
    }
    result.witnesses.emplace(profile, std::move(*path));
  }
  result.weakly_acyclic = true;
  return result;
}

std::vector<ProfileId> payoff_dominant_equilibria(const Game& game) {
  std::vector<ProfileId> dominant;
  for (ProfileId candidate : pure_nash_equilibria(game)) {
    bool dominates = true;
    for (std::size_t i = 0; i < game.num_players() && dominates; ++i) {
      const double value = game.utility(i, candidate);
      for (std::size_t p = 0; p < game.num_profiles(); ++p) {
        if (game.utility(i, ProfileId{p}) > value) {
          dominates = false;
          break;
        }
      }
    }
    if (dominates) dominant.push_back(candidate);
  }
  return dominant;
}

bool validate_positive_utility(const Game& game) {
  for (const auto& table : game.utilities()) {
    for (double u : table) {
      if (!(u > 0.0)) return false;
    }
  }
  return true;
}

}  // namespace apla
