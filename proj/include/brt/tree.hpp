#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brt/shuffle.hpp"

namespace brt {

// Rooted increasing tree on nodes 1..n stored as a parent array. parent(i)
// < i for every i >= 2, node 1 is the root; child lists are derived on
// demand rather than stored.
class RecursiveTree {
  public:
    // parents[i - 2] is the parent of node i, for i = 2..n.
    explicit RecursiveTree(std::vector<std::int32_t> parents);

    std::int64_t n() const { return std::int64_t(parents_.size()) + 1; }
    std::int32_t parent(std::int64_t node) const { return parents_[node - 2]; }
    const std::vector<std::int32_t>& parent_array() const { return parents_; }

    std::vector<std::int32_t> child_counts() const;  // indexed by node, [0] unused
    std::int32_t max_degree() const;

    // Newline-free JSON array of the parent pointers: "[1,2,2]".
    std::string to_parent_json() const;
    // One "child parent" pair per line.
    std::string to_edge_list() const;

    static RecursiveTree from_parent_json(const std::string& text);
    static RecursiveTree from_edge_list(const std::string& text);

    bool operator==(const RecursiveTree& o) const { return parents_ == o.parents_; }

  private:
    std::vector<std::int32_t> parents_;
};

// Builds the tree from the one-line word (1, g(2), ..., g(n)): each entry
// attaches to the nearest smaller value on its left. Monotone-stack scan,
// O(n).
RecursiveTree tree_from_permutation(const ShufflePermutation& g);

// Same construction by literal backwards scanning, O(n^2). Kept as the
// reference implementation the fast version is tested against.
RecursiveTree tree_from_permutation_naive(const ShufflePermutation& g);

// Inverse map: the unique word whose nearest-smaller-to-left tree is t,
// recovered by a preorder walk that visits children in decreasing label
// order. O(n).
ShufflePermutation permutation_from_tree(const RecursiveTree& t);

// Reference inverse: insert nodes 2..n in label order, each immediately to
// the right of its parent. O(n^2).
ShufflePermutation permutation_from_tree_by_insertion(const RecursiveTree& t);

namespace detail {

// Stack scan into caller-provided buffers: gamma holds (g(2), ..., g(n)),
// parent_out[i-2] receives the parent of node i, stack is scratch of size n.
void tree_from_gamma_into(std::span<const std::int32_t> gamma,
                          std::span<std::int32_t> parent_out,
                          std::span<std::int32_t> stack);

}  // namespace detail

}  // namespace brt
