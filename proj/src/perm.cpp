#include "dehnlift/perm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dehnlift {

namespace {

void check_same_size(const Permutation& p, const Permutation& q, const char* what) {
  if (p.size() != q.size()) {
    throw std::invalid_argument(std::string(what) + ": sheet counts differ (" +
                                std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
}

}  // namespace

Permutation::Permutation(int n) {
  if (n < 0) throw std::invalid_argument("Permutation: negative sheet count");
  images_.resize(n);
  std::iota(images_.begin(), images_.end(), 1);
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int n = static_cast<int>(images_.size());
  std::vector<char> seen(n, 0);
  for (int v : images_) {
    if (v < 1 || v > n || seen[v - 1]) {
      throw std::invalid_argument("Permutation: image table is not a bijection of {1..n}");
    }
    seen[v - 1] = 1;
  }
}

Permutation Permutation::from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
  Permutation result(n);
  std::vector<char> used(n, 0);
  for (const auto& cycle : cycles) {
    for (size_t k = 0; k < cycle.size(); ++k) {
      int from = cycle[k];
      int to = cycle[(k + 1) % cycle.size()];
      if (from < 1 || from > n) throw std::invalid_argument("from_cycles: label out of range");
      if (used[from - 1]) throw std::invalid_argument("from_cycles: label repeated across cycles");
      used[from - 1] = 1;
      result.images_[from - 1] = to;
    }
  }
  // Re-validate: overlapping cycles could have produced a non-bijection.
  return Permutation(std::move(result.images_));
}

bool Permutation::is_identity() const {
  for (int i = 0; i < size(); ++i) {
    if (images_[i] != i + 1) return false;
  }
  return true;
}

std::vector<std::vector<int>> Permutation::cycle_decomposition() const {
  std::vector<std::vector<int>> cycles;
  std::vector<char> seen(size(), 0);
  for (int start = 1; start <= size(); ++start) {
    if (seen[start - 1]) continue;
    std::vector<int> cycle;
    int cur = start;
    do {
      seen[cur - 1] = 1;
      cycle.push_back(cur);
      cur = apply(cur);
    } while (cur != start);
    cycles.push_back(std::move(cycle));
  }
  return cycles;  // starts are visited in ascending order, so this is canonical
}

int Permutation::cycle_count() const {
  int count = 0;
  std::vector<char> seen(size(), 0);
  for (int start = 1; start <= size(); ++start) {
    if (seen[start - 1]) continue;
    ++count;
    int cur = start;
    do {
      seen[cur - 1] = 1;
      cur = apply(cur);
    } while (cur != start);
  }
  return count;
}

bool Permutation::is_full_cycle() const { return size() >= 1 && cycle_count() == 1; }

std::string Permutation::to_string() const {
  if (is_identity()) return "id";
  std::string out;
  for (const auto& cycle : cycle_decomposition()) {
    out += '(';
    for (size_t k = 0; k < cycle.size(); ++k) {
      if (k) out += ' ';
      out += std::to_string(cycle[k]);
    }
    out += ')';
  }
  return out;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  check_same_size(p, q, "compose");
  std::vector<int> images(p.size());
  for (int i = 1; i <= p.size(); ++i) images[i - 1] = p(q(i));
  return Permutation(std::move(images));
}

Permutation inverse(const Permutation& p) {
  std::vector<int> images(p.size());
  for (int i = 1; i <= p.size(); ++i) images[p(i) - 1] = i;
  return Permutation(std::move(images));
}

Permutation power(const Permutation& p, int exponent) {
  Permutation base = exponent < 0 ? inverse(p) : p;
  int reps = exponent < 0 ? -exponent : exponent;
  Permutation acc(p.size());
  for (int k = 0; k < reps; ++k) acc = compose(base, acc);
  return acc;
}

std::vector<std::vector<int>> orbits(const std::vector<Permutation>& generators, int n) {
  for (const auto& g : generators) {
    if (g.size() != n) throw std::invalid_argument("orbits: generator sheet count mismatch");
  }
  // Union-find over {1..n}.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const auto& g : generators) {
    for (int i = 1; i <= n; ++i) unite(i - 1, g(i) - 1);
  }
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of(n, -1);
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    if (class_of[root] < 0) {
      class_of[root] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[class_of[root]].push_back(i + 1);
  }
  return classes;  // roots are minima and appear in ascending order
}

bool is_transitive(const std::vector<Permutation>& generators, int n) {
  if (n < 1) throw std::invalid_argument("is_transitive: sheet count must be positive");
  return orbits(generators, n).size() == 1;
}

}  // namespace dehnlift
