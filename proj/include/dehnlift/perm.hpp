#pragma once

#include <string>
#include <vector>

namespace dehnlift {

// A permutation of the sheet labels {1..n}. Values are immutable once
// constructed; every operation returns a fresh value.
//
// Composition convention, fixed repo-wide: compose(p, q) applies q first,
// i.e. compose(p, q)(i) = p(q(i)).
class Permutation {
 public:
  // Identity on {1..n}. n == 0 is allowed (empty permutation).
  explicit Permutation(int n);

  // From an image table: images[i] is the image of label i+1 (1-based labels).
  // Throws std::invalid_argument if the table is not a bijection of {1..n}.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n) { return Permutation(n); }

  // From disjoint cycles over {1..n}, e.g. {{1,2,3},{4}} on n=4.
  // Labels absent from all cycles are fixed points.
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles);

  int size() const { return static_cast<int>(images_.size()); }
  int apply(int label) const { return images_[label - 1]; }
  int operator()(int label) const { return apply(label); }

  bool is_identity() const;

  // Canonical disjoint-cycle form: each cycle starts at its minimum label,
  // cycles sorted by that minimum, fixed points included as 1-cycles.
  std::vector<std::vector<int>> cycle_decomposition() const;

  int cycle_count() const;

  // True iff the whole of {1..n} is a single n-cycle (n == 1 counts).
  bool is_full_cycle() const;

  // Canonical cycle-notation text, e.g. "(1 2 3)(4)". Identity prints as "id".
  // Fixed points are kept explicit so the sheet count stays readable.
  std::string to_string() const;

  bool operator==(const Permutation& other) const { return images_ == other.images_; }
  bool operator!=(const Permutation& other) const { return !(*this == other); }

 private:
  std::vector<int> images_;  // images_[i] = image of label i+1
};

// p after q: result(i) = p(q(i)). Throws std::invalid_argument on size mismatch.
Permutation compose(const Permutation& p, const Permutation& q);

Permutation inverse(const Permutation& p);

Permutation power(const Permutation& p, int exponent);

// Finest partition of {1..n} closed under all generators, classes sorted by
// their minimum element, elements ascending within a class.
std::vector<std::vector<int>> orbits(const std::vector<Permutation>& generators, int n);

// True iff orbits(generators, n) has exactly one class. n >= 1 required.
bool is_transitive(const std::vector<Permutation>& generators, int n);

}  // namespace dehnlift
