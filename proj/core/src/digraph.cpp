#include "apla/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "apla/errors.hpp"

namespace apla {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Arc {
  std::size_t from;
  std::size_t to;
  double weight;
  std::size_t id;  // position in the caller's arc list
};

// Chu-Liu/Edmonds for in-arborescences: every non-root node keeps exactly one
// outgoing arc and all paths lead to `root`. Returns positions into `arcs`.
std::vector<std::size_t> min_in_arborescence(std::size_t n, std::size_t root,
                                             const std::vector<Arc>& arcs) {
  std::vector<std::size_t> best(n, kNone);
  for (std::size_t p = 0; p < arcs.size(); ++p) {
    const Arc& a = arcs[p];
    if (a.from == root || a.from == a.to) continue;
    if (best[a.from] == kNone || a.weight < arcs[best[a.from]].weight) best[a.from] = p;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (v != root && best[v] == kNone) {
      throw DomainError("node " + std::to_string(v) + " cannot reach the root");
    }
  }

  // Label cycles of the functional graph v -> to(best[v]).
  std::vector<std::size_t> cycle_of(n, kNone);
  std::vector<std::size_t> visited_by(n, kNone);
  std::size_t cycle_count = 0;
  for (std::size_t start = 0; start < n; ++start) {
    std::size_t v = start;
    while (v != root && visited_by[v] == kNone && cycle_of[v] == kNone) {
      visited_by[v] = start;
      v = arcs[best[v]].to;
    }
    if (v != root && visited_by[v] == start && cycle_of[v] == kNone) {
      for (std::size_t u = v;;) {
        cycle_of[u] = cycle_count;
        u = arcs[best[u]].to;
        if (u == v) break;
      }
      ++cycle_count;
    }
  }

  if (cycle_count == 0) {
    std::vector<std::size_t> chosen;
    for (std::size_t v = 0; v < n; ++v) {
      if (v != root) chosen.push_back(best[v]);
    }
    return chosen;
  }

  // Contract every cycle into one node.
  std::vector<std::size_t> comp(n, kNone);
  std::size_t next_id = cycle_count;
  for (std::size_t v = 0; v < n; ++v) {
    comp[v] = cycle_of[v] != kNone ? cycle_of[v] : next_id++;
  }
  std::vector<Arc> contracted;
  contracted.reserve(arcs.size());
  for (std::size_t p = 0; p < arcs.size(); ++p) {
    const Arc& a = arcs[p];
    if (comp[a.from] == comp[a.to]) continue;
    double w = a.weight;
    if (cycle_of[a.from] != kNone) w -= arcs[best[a.from]].weight;
    contracted.push_back({comp[a.from], comp[a.to], w, p});
  }
  const auto inner = min_in_arborescence(next_id, comp[root], contracted);

  std::vector<std::size_t> chosen;
  std::vector<bool> has_exit(n, false);
  for (std::size_t q : inner) {
    const std::size_t p = contracted[q].id;
    chosen.push_back(p);
    has_exit[arcs[p].from] = true;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (cycle_of[v] != kNone && !has_exit[v]) chosen.push_back(best[v]);
  }
  return chosen;
}

std::vector<bool> root_mask(std::size_t n, std::span<const ProfileId> roots) {
  if (roots.empty()) throw UsageError("W-graph root set must be nonempty");
  std::vector<bool> mask(n, false);
  for (ProfileId r : roots) {
    if (r.value >= n) throw UsageError("root outside the node set");
    mask[r.value] = true;
  }
  return mask;
}

std::vector<ProfileId> sorted_roots(std::span<const ProfileId> roots) {
  std::vector<ProfileId> out(roots.begin(), roots.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

WGraph wgraph_from_choice(const ResistanceDigraph& digraph, std::span<const ProfileId> roots,
                          std::span<const std::size_t> choice) {
  WGraph graph;
  graph.roots = sorted_roots(roots);
  for (std::size_t v = 0; v < choice.size(); ++v) {
    if (choice[v] == kNone) continue;
    const EdgeAnalysis& e = digraph.edges()[choice[v]];
    graph.arrows.emplace(e.from, e.to);
  }
  return graph;
}

}  // namespace

ResistanceDigraph::ResistanceDigraph(std::size_t node_count, std::vector<EdgeAnalysis> edges)
    : node_count_(node_count), edges_(std::move(edges)), out_(node_count) {
  std::sort(edges_.begin(), edges_.end(), [](const EdgeAnalysis& a, const EdgeAnalysis& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const EdgeAnalysis& e = edges_[k];
    if (e.from.value >= node_count || e.to.value >= node_count) {
      throw UsageError("edge endpoint outside the node set");
    }
    if (e.from == e.to) throw UsageError("self-loops are not one-step transitions");
    if (k > 0 && edges_[k - 1].from == e.from && edges_[k - 1].to == e.to) {
      throw UsageError("duplicate edge");
    }
    out_[e.from.value].push_back(k);
  }
}

std::span<const std::size_t> ResistanceDigraph::out_edges(std::size_t node) const {
  if (node >= node_count_) throw UsageError("node outside the digraph");
  return out_[node];
}

const EdgeAnalysis* ResistanceDigraph::find(ProfileId from, ProfileId to) const {
  if (from.value >= node_count_) return nullptr;
  for (std::size_t k : out_[from.value]) {
    if (edges_[k].to == to) return &edges_[k];
  }
  return nullptr;
}

double ResistanceDigraph::cost(std::size_t edge_index, Weighting weighting) const {
  const EdgeAnalysis& e = edges_.at(edge_index);
  return weighting == Weighting::Coefficient ? e.coefficient : e.resistance;
}

bool is_wgraph(const WGraph& graph, std::size_t node_count) {
  std::vector<bool> is_root(node_count, false);
  for (ProfileId r : graph.roots) {
    if (r.value >= node_count) return false;
    is_root[r.value] = true;
  }
  if (graph.roots.empty()) return false;
  std::vector<std::size_t> succ(node_count, kNone);
  for (const auto& [from, to] : graph.arrows) {
    if (from.value >= node_count || to.value >= node_count) return false;
    if (from == to || is_root[from.value]) return false;
    succ[from.value] = to.value;
  }
  // Clause 1: each non-root is the tail of exactly one arrow (map keys are unique).
  for (std::size_t v = 0; v < node_count; ++v) {
    if (!is_root[v] && succ[v] == kNone) return false;
  }
  // Clause 2: following arrows from any node reaches a root within node_count steps.
  for (std::size_t v = 0; v < node_count; ++v) {
    std::size_t x = v;
    std::size_t steps = 0;
    while (!is_root[x]) {
      x = succ[x];
      if (++steps > node_count) return false;
    }
  }
  return true;
}

double graph_cost(const ResistanceDigraph& digraph, const WGraph& graph, Weighting weighting) {
  double total = 0.0;
  for (const auto& [from, to] : graph.arrows) {
    const EdgeAnalysis* e = digraph.find(from, to);
    if (!e) throw UsageError("arrow is not a one-step edge of the digraph");
    total += weighting == Weighting::Coefficient ? e->coefficient : e->resistance;
  }
  return total;
}

namespace {

// Depth-first assignment of one outgoing arrow per non-root node, skipping
// arrows that would close a cycle. `leaf(choice, cost)` sees every W-graph
// once, with `cost` the sum of `edge_cost` over its arrows. With a `bound`
// and nonnegative costs, branches whose partial cost already reaches *bound
// are skipped; they cannot produce a strictly cheaper graph.
template <class Leaf>
void enumerate_wgraphs_impl(const ResistanceDigraph& digraph, std::span<const ProfileId> roots,
                            std::size_t cap, const std::vector<double>& edge_cost, Leaf&& leaf,
                            const double* bound = nullptr) {
  const std::size_t n = digraph.node_count();
  if (n > cap) {
    std::ostringstream msg;
    msg << "W-graph enumeration over " << n << " nodes exceeds the cap of " << cap
        << "; use the arborescence or solver routines instead";
    throw CapacityError(msg.str());
  }
  const std::vector<bool> is_root = root_mask(n, roots);
  std::vector<std::size_t> free_nodes;
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_root[v]) free_nodes.push_back(v);
  }
  std::vector<std::size_t> succ(n, kNone);
  std::vector<std::size_t> choice(n, kNone);

  auto closes_cycle = [&](std::size_t v, std::size_t w) {
    for (std::size_t x = w;;) {
      if (x == v) return true;
      if (is_root[x] || succ[x] == kNone) return false;
      x = succ[x];
    }
  };

  auto recurse = [&](auto&& self, std::size_t depth, double cost) -> void {
    if (depth == free_nodes.size()) {
      leaf(std::span<const std::size_t>(choice), cost);
      return;
    }
    const std::size_t v = free_nodes[depth];
    for (std::size_t k : digraph.out_edges(v)) {
      const std::size_t w = digraph.edges()[k].to.value;
      const double next = edge_cost.empty() ? 0.0 : cost + edge_cost[k];
      if (bound != nullptr && next >= *bound) continue;
      if (closes_cycle(v, w)) continue;
      succ[v] = w;
      choice[v] = k;
      self(self, depth + 1, next);
    }
    succ[v] = kNone;
    choice[v] = kNone;
  };
  recurse(recurse, 0, 0.0);
}

}  // namespace

void for_each_wgraph(const ResistanceDigraph& digraph, std::span<const ProfileId> roots,
                     const std::function<void(std::span<const std::size_t>)>& visit,
                     std::size_t cap) {
  enumerate_wgraphs_impl(digraph, roots, cap, {},
                         [&](std::span<const std::size_t> choice, double) { visit(choice); });
}

std::vector<WGraph> enumerate_wgraphs(const ResistanceDigraph& digraph,
                                      std::span<const ProfileId> roots, std::size_t cap) {
  std::vector<WGraph> graphs;
  for_each_wgraph(
      digraph, roots,
      [&](std::span<const std::size_t> choice) {
        graphs.push_back(wgraph_from_choice(digraph, roots, choice));
      },
      cap);
  return graphs;
}

MinResistance min_resistance(const ResistanceDigraph& digraph, ProfileId root,
                             Weighting weighting) {
  const std::size_t n = digraph.node_count();
  if (root.value >= n) throw UsageError("root outside the node set");
  std::vector<Arc> arcs;
  arcs.reserve(digraph.edges().size());
  for (std::size_t k = 0; k < digraph.edges().size(); ++k) {
    const EdgeAnalysis& e = digraph.edges()[k];
    arcs.push_back({e.from.value, e.to.value, digraph.cost(k, weighting), k});
  }
  MinResistance result;
  result.root = root;
  result.witness.roots = {root};
  for (std::size_t p : min_in_arborescence(n, root.value, arcs)) {
    const EdgeAnalysis& e = digraph.edges()[p];
    result.witness.arrows.emplace(e.from, e.to);
    result.value += digraph.cost(p, weighting);
  }
  return result;
}

MinResistance min_resistance_enumerated(const ResistanceDigraph& digraph, ProfileId root,
                                        Weighting weighting, std::size_t cap) {
  const std::vector<ProfileId> roots{root};
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_choice;
  std::vector<double> edge_cost(digraph.edges().size());
  bool nonnegative = true;
  for (std::size_t k = 0; k < edge_cost.size(); ++k) {
    edge_cost[k] = digraph.cost(k, weighting);
    nonnegative = nonnegative && edge_cost[k] >= 0.0;
  }
  enumerate_wgraphs_impl(
      digraph, roots, cap, edge_cost,
      [&](std::span<const std::size_t> choice, double total) {
        if (total < best) {
          best = total;
          best_choice.assign(choice.begin(), choice.end());
        }
      },
      nonnegative ? &best : nullptr);
  if (best_choice.empty() && digraph.node_count() > 1) {
    throw DomainError("no W-graph exists for this root");
  }
  MinResistance result;
  result.root = root;
  result.value = digraph.node_count() > 1 ? best : 0.0;
  result.witness = wgraph_from_choice(digraph, roots, best_choice);
  return result;
}

std::vector<MinResistance> min_resistances(const ResistanceDigraph& digraph,
                                           Weighting weighting) {
  std::vector<MinResistance> all;
  all.reserve(digraph.node_count());
  for (std::size_t s = 0; s < digraph.node_count(); ++s) {
    all.push_back(min_resistance(digraph, ProfileId{s}, weighting));
  }
  return all;
}

std::vector<ProfileId> stochastically_stable_set(std::span<const MinResistance> resistances,
                                                 double rel_tol) {
  if (!(rel_tol > 0.0)) throw UsageError("rel_tol must be positive");
  if (resistances.empty()) return {};
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& r : resistances) lowest = std::min(lowest, r.value);
  const double slack = rel_tol * std::max(std::abs(lowest), std::numeric_limits<double>::min());
  std::vector<ProfileId> stable;
  for (const auto& r : resistances) {
    if (r.value - lowest <= slack) stable.push_back(r.root);
  }
  std::sort(stable.begin(), stable.end());
  return stable;
}

std::vector<ProfileId> stochastically_stable_set(const ResistanceDigraph& digraph,
                                                 double rel_tol, Weighting weighting) {
  const auto all = min_resistances(digraph, weighting);
  return stochastically_stable_set(all, rel_tol);
}

std::string_view to_string(ChainMode mode) {
  return mode == ChainMode::TreeSum ? "tree_sum" : "solver";
}

std::vector<double> fw_stationary(const ResistanceDigraph& digraph, ChainMode mode,
                                  std::size_t cap) {
  const std::size_t n = digraph.node_count();
  if (n == 0) return {};
  if (n == 1) return {1.0};

  // log of the chain entry gamma * probability, kept in log space so that
  // strongly resisted edges do not underflow before normalization.
  auto log_entry = [&](std::size_t k) {
    const EdgeAnalysis& e = digraph.edges()[k];
    return std::log(e.gamma) - e.resistance;
  };

  if (mode == ChainMode::TreeSum) {
    std::vector<double> log_weight(n, -std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < n; ++s) {
      const std::vector<ProfileId> roots{ProfileId{s}};
      double peak = -std::numeric_limits<double>::infinity();
      double scaled = 0.0;
      for_each_wgraph(
          digraph, roots,
          [&](std::span<const std::size_t> choice) {
            double x = 0.0;
            for (std::size_t k : choice) {
              if (k != kNone) x += log_entry(k);
            }
            if (x > peak) {
              scaled = scaled * std::exp(peak - x) + 1.0;
              peak = x;
            } else {
              scaled += std::exp(x - peak);
            }
          },
          cap);
      if (scaled > 0.0) log_weight[s] = peak + std::log(scaled);
    }
    const double top = *std::max_element(log_weight.begin(), log_weight.end());
    if (!std::isfinite(top)) throw DomainError("chain has no spanning in-tree");
    std::vector<double> pi(n);
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) total += pi[s] = std::exp(log_weight[s] - top);
    for (double& v : pi) v /= total;
    return pi;
  }

  // Grassmann-Taksar-Heyman elimination: subtraction-free, so tiny entries
  // keep their relative accuracy.
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < digraph.edges().size(); ++k) {
    const EdgeAnalysis& e = digraph.edges()[k];
    p[e.from.value][e.to.value] = e.gamma * e.probability;
  }
  for (std::size_t s = 0; s < n; ++s) {
    double out = 0.0;
    for (std::size_t t = 0; t < n; ++t) out += p[s][t];
    if (out > 1.0) {
      std::ostringstream msg;
      msg << "self-loop mass 1 - " << out << " < 0 at node " << s
          << ": epsilon too large for chain approximation";
      throw ParameterError(msg.str());
    }
  }
  for (std::size_t m = n - 1; m >= 1; --m) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += p[m][j];
    if (!(s > 0.0)) throw DomainError("chain is reducible or its entries underflow");
    for (std::size_t i = 0; i < m; ++i) p[i][m] /= s;
    for (std::size_t i = 0; i < m; ++i) {
      if (p[i][m] == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) p[i][j] += p[i][m] * p[m][j];
      }
    }
  }
  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) pi[j] += pi[i] * p[i][j];
  }
  double total = 0.0;
  for (double v : pi) total += v;
  for (double& v : pi) v /= total;
  return pi;
}

}  // namespace apla
