#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "brt/dist.hpp"
#include "brt/shuffle.hpp"
#include "brt/tree.hpp"

namespace brt {

// Bundle of the per-tree statistics. subtree_sizes[v] is the number of
// descendants of node v (the node itself not counted); index 0 is unused.
struct TreeStatistics {
    std::int64_t branches = 0;
    std::vector<std::int64_t> subtree_sizes;
    std::int64_t depth_of_n = 0;
    std::int64_t position_of_n = 0;
};

TreeStatistics compute_statistics(const RecursiveTree& t, const ShufflePermutation& g);

// Number of children of the root.
std::int64_t count_branches(const RecursiveTree& t);

// Entries of the one-line word smaller than everything before them (the
// leading 1 excluded). Equals count_branches of the corresponding tree.
std::int64_t count_anti_records(const ShufflePermutation& g);

// Descendant count per node, single reverse pass (parent(i) < i means child
// totals are complete before they are folded into the parent). No recursion,
// so n = 10^7 scale inputs are fine.
std::vector<std::int64_t> descendant_counts(const RecursiveTree& t);

// |{v : descendants(v) >= k}|. The root is included, so the count is n for
// k = 0 and 0 for k > n-1.
std::int64_t count_at_least_k(const RecursiveTree& t, std::int64_t k);

// |{v : descendants(v) = k}|; telescopes against count_at_least_k exactly.
std::int64_t count_exactly_k(const RecursiveTree& t, std::int64_t k);

// Edge count from the root down to node n.
std::int64_t depth_of_node_n(const RecursiveTree& t);

// Same value computed without the tree: scan left from the word position of
// n, counting successive new minima.
std::int64_t depth_via_antirecords(const ShufflePermutation& g);

// Deck position of the largest card, i.e. the word index of value n.
std::int64_t position_of_n(const ShufflePermutation& g);

// Depth of every node (index 0 unused); forward pass.
std::vector<std::int64_t> all_depths(const RecursiveTree& t);

// Evaluate one statistic from a deck arrangement using caller-owned scratch
// buffers, building only what the statistic needs. gamma holds the positions
// of cards 2..n; parent needs n-1 entries, stack n, desc n+1. Shared by the
// enumeration and sampling hot loops.
std::int64_t eval_statistic_from_gamma(Statistic stat, std::int64_t k,
                                       std::span<const std::int32_t> gamma,
                                       std::span<std::int32_t> parent,
                                       std::span<std::int32_t> stack,
                                       std::span<std::int64_t> desc);

// Digit-stream versions: the same statistics read directly off the digit
// word, without building the permutation or the tree. These back the large-n
// sampling paths and are property-tested against the tree versions.
namespace stream {

std::int64_t branches(std::span<const std::int32_t> digits);
std::int64_t at_least_k(std::span<const std::int32_t> digits, std::int64_t k);
std::int64_t exactly_k(std::span<const std::int32_t> digits, std::int64_t k);
std::int64_t depth_of_n(std::span<const std::int32_t> digits);
std::int64_t position_of_n(std::span<const std::int32_t> digits);

}  // namespace stream

}  // namespace brt
