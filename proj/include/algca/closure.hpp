#pragma once

// Generic subgroup generation and subgroup enumeration for finite abelian
// groups whose elements are values of type T with an addition functor.

#include "algca/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

namespace algca {

/// Extends the subgroup `members` (closed under addition) by the cyclic group of g.
/// `members` and `index` are updated in place.
template <class T, class Hash, class Add>
void extend_subgroup(std::vector<T>& members, std::unordered_set<T, Hash>& index, const T& g,
                     Add&& add, std::size_t cap) {
  if (index.contains(g)) return;
  const std::vector<T> base = members;
  T multiple = g;
  while (!index.contains(multiple)) {
    for (const T& b : base) {
      T sum = add(b, multiple);
      if (index.insert(sum).second) members.push_back(std::move(sum));
    }
    if (members.size() > cap) throw CapExceeded("subgroup closure exceeded cap");
    multiple = add(multiple, g);
  }
}

/// Smallest subgroup containing `seeds` and closed under every operator (each
/// operator must be a group endomorphism of the ambient group).
template <class T, class Hash = std::hash<T>, class Add, class Op>
std::vector<T> close_subgroup(std::span<const T> seeds, const T& zero, Add&& add, std::span<const Op> operators,
                              std::size_t cap) {
  std::vector<T> members{zero};
  std::unordered_set<T, Hash> index{zero};
  std::deque<T> pending(seeds.begin(), seeds.end());
  while (!pending.empty()) {
    T g = std::move(pending.front());
    pending.pop_front();
    if (index.contains(g)) continue;
    extend_subgroup(members, index, g, add, cap);
    for (const auto& op : operators) pending.push_back(op(g));
  }
  std::sort(members.begin(), members.end());
  return members;
}

/// All subgroups of the finite group whose elements are listed in `elements`.
/// Each subgroup comes back sorted; the list is sorted by (size, elements).
template <class T, class Hash = std::hash<T>, class Add>
std::vector<std::vector<T>> enumerate_all_subgroups(const std::vector<T>& elements, const T& zero,
                                                    Add&& add, std::size_t max_subgroups) {
  std::set<std::vector<T>> seen;
  std::deque<std::vector<T>> queue;
  seen.insert({zero});
  queue.push_back({zero});
  while (!queue.empty()) {
    std::vector<T> current = std::move(queue.front());
    queue.pop_front();
    std::unordered_set<T, Hash> current_index(current.begin(), current.end());
    for (const T& g : elements) {
      if (current_index.contains(g)) continue;
      std::vector<T> members = current;
      std::unordered_set<T, Hash> index = current_index;
      extend_subgroup(members, index, g, add, elements.size());
      std::sort(members.begin(), members.end());
      if (seen.insert(members).second) {
        if (seen.size() > max_subgroups) throw CapExceeded("subgroup enumeration exceeded cap");
        queue.push_back(std::move(members));
      }
    }
  }
  std::vector<std::vector<T>> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

}  // namespace algca
