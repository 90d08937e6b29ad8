#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace apla {

/// Index of a joint action profile. Profiles are encoded mixed-radix with
/// per-player radices |A_i|, player 0 being the least significant digit.
struct ProfileId {
  std::size_t value = 0;

  friend auto operator<=>(const ProfileId&, const ProfileId&) = default;
};

/// Finite strategic-form game: action counts plus one utility table per
/// player, each indexed by ProfileId.
class Game {
 public:
  Game(std::vector<std::size_t> action_counts,
       std::vector<std::vector<double>> utilities);

  std::size_t num_players() const { return action_counts_.size(); }
  std::size_t num_actions(std::size_t player) const;
  std::size_t num_profiles() const { return num_profiles_; }
  const std::vector<std::size_t>& action_counts() const { return action_counts_; }
  const std::vector<std::vector<double>>& utilities() const { return utilities_; }

  double utility(std::size_t player, ProfileId profile) const;

  std::vector<std::size_t> decode(ProfileId profile) const;
  ProfileId encode(std::span<const std::size_t> actions) const;
  std::size_t action_of(ProfileId profile, std::size_t player) const;
  /// Profile obtained when `player` switches to `action`, others fixed.
  ProfileId with_action(ProfileId profile, std::size_t player,
                        std::size_t action) const;
  /// Index of the single player whose action differs, if exactly one does.
  std::optional<std::size_t> sole_mover(ProfileId from, ProfileId to) const;

  double min_utility() const;
  double max_utility() const;

  /// Human-readable label such as "(A,B)"; actions are lettered per player.
  std::string label(ProfileId profile) const;

 private:
  void check_profile(ProfileId profile) const;

  std::vector<std::size_t> action_counts_;
  std::vector<std::size_t> strides_;
  std::vector<std::vector<double>> utilities_;
  std::size_t num_profiles_ = 1;
};

/// 2x2 coordination game with row/column payoffs
///   (A,A) = a,a   (A,B) = b,c
///   (B,A) = c,b   (B,B) = d,d
Game coordination_game(double a, double b, double c, double d);

struct ImprovementPath {
  std::vector<ProfileId> profiles;
  std::vector<std::size_t> movers;  // movers[k] moves profiles[k] -> profiles[k+1]

  std::size_t length() const { return movers.size(); }
  ProfileId back() const { return profiles.back(); }
};

struct BetterReplies {
  std::vector<ProfileId> replies;  // ascending action order
  std::optional<ProfileId> best;   // arg max, lowest action index on ties
  std::vector<ProfileId> maximizers;  // every element of the arg max set
};

struct WeakAcyclicity {
  bool weakly_acyclic = false;
  std::map<ProfileId, ImprovementPath> witnesses;  // one per non-NE profile
};

double utility_at(const Game& game, std::size_t player, ProfileId profile);

std::vector<ProfileId> pure_nash_equilibria(const Game& game);

BetterReplies better_replies(const Game& game, ProfileId profile, std::size_t player);

/// Shortest better-reply (or best-reply) path from `start` into `targets`.
/// Throws UsageError when `targets` is empty.
std::optional<ImprovementPath> improvement_path_to(const Game& game, ProfileId start,
                                                   std::span<const ProfileId> targets,
                                                   bool best_reply_only);

WeakAcyclicity is_weakly_acyclic(const Game& game);

std::vector<ProfileId> payoff_dominant_equilibria(const Game& game);

bool validate_positive_utility(const Game& game);

}  // namespace apla
