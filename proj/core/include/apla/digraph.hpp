#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "apla/game.hpp"
#include "apla/transition.hpp"

namespace apla {

/// Which edge annotation a graph search sums.
enum class Weighting {
  Coefficient,  // epsilon/delta-free coefficients; used for stability classification
  Resistance,   // finite (epsilon, delta) resistances
};

/// Pure strategy states joined by annotated one-step transitions.
class ResistanceDigraph {
 public:
  ResistanceDigraph() = default;
  /// Edges are sorted by (from, to). Self-loops, duplicates, and endpoints
  /// outside [0, node_count) are rejected with UsageError.
  ResistanceDigraph(std::size_t node_count, std::vector<EdgeAnalysis> edges);

  std::size_t node_count() const { return node_count_; }
  std::span<const EdgeAnalysis> edges() const { return edges_; }
  /// Indices into edges() of the arcs leaving `node`, ascending by destination.
  std::span<const std::size_t> out_edges(std::size_t node) const;
  const EdgeAnalysis* find(ProfileId from, ProfileId to) const;
  double cost(std::size_t edge_index, Weighting weighting) const;

 private:
  std::size_t node_count_ = 0;
  std::vector<EdgeAnalysis> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

/// Arrow assignment over the node set: every node outside `roots` is the
/// tail of exactly one arrow, and following arrows always ends in `roots`.
struct WGraph {
  std::vector<ProfileId> roots;
  std::map<ProfileId, ProfileId> arrows;

  friend bool operator==(const WGraph&, const WGraph&) = default;
};

/// Direct structural check of both W-graph clauses over `node_count` nodes.
bool is_wgraph(const WGraph& graph, std::size_t node_count);

/// Sum of the chosen weighting over the arrows of `graph`. Throws
/// UsageError if an arrow is not an edge of `digraph`.
double graph_cost(const ResistanceDigraph& digraph, const WGraph& graph, Weighting weighting);

inline constexpr std::size_t kDefaultEnumerationCap = 12;

/// Visits every W-graph over `digraph` whose arrows are digraph edges. The
/// visitor receives, per node, the index of its chosen edge (unused for
/// roots). Throws CapacityError above `cap` nodes.
void for_each_wgraph(const ResistanceDigraph& digraph, std::span<const ProfileId> roots,
                     const std::function<void(std::span<const std::size_t>)>& visit,
                     std::size_t cap = kDefaultEnumerationCap);

std::vector<WGraph> enumerate_wgraphs(const ResistanceDigraph& digraph,
                                      std::span<const ProfileId> roots,
                                      std::size_t cap = kDefaultEnumerationCap);

struct MinResistance {
  ProfileId root;
  double value = 0.0;
  WGraph witness;
};

/// Minimum-cost spanning in-arborescence rooted at `root` (Chu-Liu/Edmonds).
MinResistance min_resistance(const ResistanceDigraph& digraph, ProfileId root,
                             Weighting weighting = Weighting::Coefficient);

/// Same minimum by exhaustive enumeration; for cross-checking only.
MinResistance min_resistance_enumerated(const ResistanceDigraph& digraph, ProfileId root,
                                        Weighting weighting = Weighting::Coefficient,
                                        std::size_t cap = kDefaultEnumerationCap);

std::vector<MinResistance> min_resistances(const ResistanceDigraph& digraph,
                                           Weighting weighting = Weighting::Coefficient);

/// Nodes whose minimum resistance is within `rel_tol` (relative) of the
/// global minimum.
std::vector<ProfileId> stochastically_stable_set(const ResistanceDigraph& digraph,
                                                 double rel_tol = 1e-9,
                                                 Weighting weighting = Weighting::Coefficient);
std::vector<ProfileId> stochastically_stable_set(std::span<const MinResistance> resistances,
                                                 double rel_tol = 1e-9);

enum class ChainMode {
  TreeSum,  // ratio of summed {s}-graph weights, evaluated in log space
  Solver,   // GTH elimination on the row-normalized chain
};

std::string_view to_string(ChainMode mode);

/// Stationary distribution of the chain with off-diagonal entries
/// gamma * probability per edge. Solver mode throws ParameterError when a
/// row's self-loop mass would be negative.
std::vector<double> fw_stationary(const ResistanceDigraph& digraph, ChainMode mode,
                                  std::size_t cap = kDefaultEnumerationCap);

}  // namespace apla
