#include "dehnlift/perm.hpp"

#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace dehnlift;

namespace {

Permutation random_perm(std::mt19937& rng, int n) {
  std::vector<int> images(n);
  for (int i = 0; i < n; ++i) images[i] = i + 1;
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(images[i], images[pick(rng)]);
  }
  return Permutation(std::move(images));
}

}  // namespace

TEST_CASE("identity and basic application") {
  Permutation id3(3);
  CHECK(id3.is_identity());
  CHECK(id3(1) == 1);
  CHECK(id3(3) == 3);
  CHECK(id3.to_string() == "id");
}

TEST_CASE("compose applies the right factor first") {
  Permutation c123 = Permutation::from_cycles(3, {{1, 2, 3}});
  CHECK(compose(Permutation(3), c123) == c123);

  Permutation swap2 = Permutation::from_cycles(2, {{1, 2}});
  CHECK(compose(swap2, swap2).is_identity());

  // p = (1 2 3), q = (1 2): p(q(1)) = p(2) = 3, p(q(2)) = p(1) = 2,
  // p(q(3)) = p(3) = 1, i.e. the transposition (1 3).
  Permutation q = Permutation::from_cycles(3, {{1, 2}});
  Permutation r = compose(c123, q);
  CHECK(r == Permutation::from_cycles(3, {{1, 3}}));

  CHECK_THROWS_AS(compose(Permutation(3), swap2), std::invalid_argument);
}

TEST_CASE("inverse") {
  CHECK(inverse(Permutation(4)) == Permutation(4));
  Permutation c123 = Permutation::from_cycles(3, {{1, 2, 3}});
  CHECK(inverse(c123) == Permutation::from_cycles(3, {{1, 3, 2}}));

  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 50; ++trial) {
    Permutation p = random_perm(rng, 1 + trial % 9);
    CHECK(inverse(inverse(p)) == p);
    CHECK(compose(p, inverse(p)).is_identity());
  }
}

TEST_CASE("cycle decomposition is canonical and reconstructs") {
  Permutation id4(4);
  CHECK(id4.cycle_decomposition() ==
        std::vector<std::vector<int>>{{1}, {2}, {3}, {4}});

  Permutation c123 = Permutation::from_cycles(3, {{1, 2, 3}});
  CHECK(c123.cycle_decomposition() == std::vector<std::vector<int>>{{1, 2, 3}});

  Permutation pairs = Permutation::from_cycles(4, {{1, 2}, {3, 4}});
  CHECK(pairs.cycle_decomposition() == std::vector<std::vector<int>>{{1, 2}, {3, 4}});
  CHECK(pairs.cycle_count() == 2);

  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + trial % 11;
    Permutation p = random_perm(rng, n);
    auto cycles = p.cycle_decomposition();
    size_t total = 0;
    for (const auto& c : cycles) total += c.size();
    CHECK(total == static_cast<size_t>(n));
    CHECK(Permutation::from_cycles(n, cycles) == p);
  }
}

TEST_CASE("associativity on random triples") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + trial % 8;
    Permutation p = random_perm(rng, n), q = random_perm(rng, n), r = random_perm(rng, n);
    CHECK(compose(compose(p, q), r) == compose(p, compose(q, r)));
    CHECK(compose(p, Permutation(n)) == p);
    CHECK(compose(Permutation(n), p) == p);
  }
}

TEST_CASE("orbits and transitivity") {
  CHECK(orbits({}, 3) == std::vector<std::vector<int>>{{1}, {2}, {3}});
  Permutation c123 = Permutation::from_cycles(3, {{1, 2, 3}});
  CHECK(orbits({c123}, 3) == std::vector<std::vector<int>>{{1, 2, 3}});
  Permutation pairs = Permutation::from_cycles(4, {{1, 2}, {3, 4}});
  CHECK(orbits({pairs}, 4) == std::vector<std::vector<int>>{{1, 2}, {3, 4}});

  CHECK(is_transitive({c123}, 3));
  CHECK_FALSE(is_transitive({pairs}, 4));
  CHECK(is_transitive({}, 1));

  // Orbits are stable under enlarging the generating set with products and
  // inverses of existing generators.
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + trial % 7;
    Permutation p = random_perm(rng, n), q = random_perm(rng, n);
    auto base = orbits({p, q}, n);
    CHECK(orbits({p, q, inverse(p)}, n) == base);
    CHECK(orbits({p, q, compose(p, q)}, n) == base);
  }
}

TEST_CASE("full cycle detection") {
  CHECK(Permutation::from_cycles(3, {{1, 2, 3}}).is_full_cycle());
  CHECK(Permutation(1).is_full_cycle());
  CHECK_FALSE(Permutation::from_cycles(4, {{1, 2}, {3, 4}}).is_full_cycle());
  CHECK_FALSE(Permutation(2).is_full_cycle());
}

TEST_CASE("print form") {
  CHECK(Permutation::from_cycles(4, {{1, 2, 3}}).to_string() == "(1 2 3)(4)");
  CHECK(Permutation::from_cycles(2, {{1, 2}}).to_string() == "(1 2)");
}

TEST_CASE("invalid tables rejected") {
  CHECK_THROWS_AS(Permutation({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({3, 1}), std::invalid_argument);
}
