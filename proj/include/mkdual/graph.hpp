#pragma once

// Dense digraph utilities shared by the rerouting graph (support pairs) and
// the W3 graph (X-nodes). Weights are k x k row-major; +inf means "no edge",
// -inf is allowed.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mkdual::graph {

struct ClosedWalk {
  std::vector<std::size_t> nodes;  // v0 -> v1 -> ... -> v_{L-1} -> v0
  double weight = 0.0;
};

// Shortest closed walk (fewest edges, at most k) with weight < -tol; among
// walks of that length the most negative one, lowest start index on ties.
// Returns nullopt when none exists. Self-loops count only if allowed.
std::optional<ClosedWalk> find_negative_cycle(std::size_t k, std::span<const double> w, double tol,
                                              bool allow_self_loops);

// Simple cycle of minimum mean weight (Karp). nullopt for acyclic graphs.
std::optional<ClosedWalk> min_mean_cycle(std::size_t k, std::span<const double> w, bool allow_self_loops);

// Shortest-path distances from a virtual source with a zero-weight edge to
// every node. All results are <= 0. Assumes no cycle below tolerance.
std::vector<double> super_source_distances(std::size_t k, std::span<const double> w);

}  // namespace mkdual::graph
