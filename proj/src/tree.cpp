#include "brt/tree.hpp"

#include <algorithm>
#include <sstream>

#include "brt/errors.hpp"

#include <nlohmann/json.hpp>

namespace brt {

namespace detail {

void tree_from_gamma_into(std::span<const std::int32_t> gamma,
                          std::span<std::int32_t> parent_out,
                          std::span<std::int32_t> stack) {
    std::int64_t sp = 0;
    stack[0] = 1;
    for (std::int32_t v : gamma) {
        while (stack[sp] > v) --sp;
        parent_out[v - 2] = stack[sp];
        stack[++sp] = v;
    }
}

}  // namespace detail

RecursiveTree::RecursiveTree(std::vector<std::int32_t> parents)
    : parents_(std::move(parents)) {
    std::int64_t n = std::int64_t(parents_.size()) + 1;
    if (n < 2) throw usage_error("tree needs n >= 2");
    for (std::int64_t i = 2; i <= n; ++i) {
        std::int32_t p = parents_[i - 2];
        if (p < 1 || p >= i)
            throw usage_error("parent of node " + std::to_string(i) +
                              " must lie in 1.." + std::to_string(i - 1));
    }
}

std::vector<std::int32_t> RecursiveTree::child_counts() const {
    std::vector<std::int32_t> deg(n() + 1, 0);
    for (std::int32_t p : parents_) ++deg[p];
    return deg;
}

std::int32_t RecursiveTree::max_degree() const {
    auto deg = child_counts();
    return *std::max_element(deg.begin() + 1, deg.end());
}

std::string RecursiveTree::to_parent_json() const {
    return nlohmann::json(parents_).dump();
}

std::string RecursiveTree::to_edge_list() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < parents_.size(); ++i)
        out << (i + 2) << ' ' << parents_[i] << '\n';
    return out.str();
}

RecursiveTree RecursiveTree::from_parent_json(const std::string& text) {
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw usage_error("expected a JSON array of parent pointers");
    return RecursiveTree(j.get<std::vector<std::int32_t>>());
}

RecursiveTree RecursiveTree::from_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::int64_t child = 0, parent = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    std::int64_t n = 1;
    while (in >> child >> parent) {
        edges.emplace_back(child, parent);
        n = std::max(n, child);
    }
    std::vector<std::int32_t> parents(n - 1, 0);
    for (auto [c, p] : edges) {
        if (c < 2 || c > n) throw usage_error("edge child out of range");
        parents[c - 2] = std::int32_t(p);
    }
    for (std::int64_t i = 2; i <= n; ++i)
        if (parents[i - 2] == 0) throw usage_error("missing edge for node " + std::to_string(i));
    return RecursiveTree(std::move(parents));
}

RecursiveTree tree_from_permutation(const ShufflePermutation& g) {
    std::vector<std::int32_t> parents(g.n() - 1);
    std::vector<std::int32_t> stack(g.n());
    detail::tree_from_gamma_into(g.values(), parents, stack);
    return RecursiveTree(std::move(parents));
}

RecursiveTree tree_from_permutation_naive(const ShufflePermutation& g) {
    // Word with the sentinel restored; node word[s] attaches to the nearest
    // smaller value to its left.
    std::int64_t n = g.n();
    std::vector<std::int32_t> word(n);
    word[0] = 1;
    for (std::int64_t c = 2; c <= n; ++c) word[c - 1] = g.gamma(c);
    std::vector<std::int32_t> parents(n - 1);
    for (std::int64_t s = 1; s < n; ++s) {
        std::int64_t r = s - 1;
        while (word[r] > word[s]) --r;
        parents[word[s] - 2] = word[r];
    }
    return RecursiveTree(std::move(parents));
}

ShufflePermutation permutation_from_tree(const RecursiveTree& t) {
    std::int64_t n = t.n();
    // Children per node in increasing label order (single counting pass).
    std::vector<std::int32_t> head(n + 1, 0), child(n - 1), deg(n + 1, 0);
    for (std::int64_t i = 2; i <= n; ++i) ++deg[t.parent(i)];
    std::int32_t pos = 0;
    for (std::int64_t v = 1; v <= n; ++v) {
        head[v] = pos;
        pos += deg[v];
    }
    std::vector<std::int32_t> fill(head.begin(), head.end());
    for (std::int64_t i = 2; i <= n; ++i) child[fill[t.parent(i)]++] = std::int32_t(i);

    // Preorder with children visited in decreasing label order: push them in
    // increasing order so the stack pops the largest first.
    std::vector<std::int32_t> stack;
    stack.reserve(n);
    stack.push_back(1);
    std::vector<std::int32_t> word;
    word.reserve(n);
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        word.push_back(v);
        for (std::int32_t c = head[v]; c < head[v] + deg[v]; ++c)
            stack.push_back(child[c]);
    }
    return ShufflePermutation(std::vector<std::int32_t>(word.begin() + 1, word.end()));
}

ShufflePermutation permutation_from_tree_by_insertion(const RecursiveTree& t) {
    std::int64_t n = t.n();
    std::vector<std::int32_t> word{1};
    word.reserve(n);
    for (std::int64_t i = 2; i <= n; ++i) {
        auto it = std::find(word.begin(), word.end(), t.parent(i));
        word.insert(it + 1, std::int32_t(i));
    }
    return ShufflePermutation(std::vector<std::int32_t>(word.begin() + 1, word.end()));
}

}  // namespace brt
