#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ccdyn/rng.hpp"
#include "ccdyn/sampling.hpp"
#include "support/stats.hpp"

using namespace ccdyn;

TEST_CASE("construction totals and argument errors") {
  WeightedSampler s1(std::vector<uint64_t>{1});
  CHECK(s1.total_weight() == 1);
  WeightedSampler s2(std::vector<uint64_t>{1, 3});
  CHECK(s2.total_weight() == 4);
  CHECK_THROWS_AS(WeightedSampler(std::vector<uint64_t>{1, 0}), std::invalid_argument);
}

TEST_CASE("single element is drawn with certainty; empty sampler throws") {
  RngStream rng(1, 1);
  WeightedSampler s(std::vector<uint64_t>{7});
  CHECK(s.sample_remove(rng) == 0);
  CHECK(s.empty());
  CHECK_THROWS_AS(s.sample_remove(rng), std::logic_error);
}

TEST_CASE("weights [1,3]: heavier item first with frequency 3/4") {
  RngStream rng(42, 0);
  const int trials = 100000;
  int heavy_first = 0;
  for (int t = 0; t < trials; ++t) {
    WeightedSampler s(std::vector<uint64_t>{1, 3});
    if (s.sample_remove(rng) == 1) ++heavy_first;
  }
  double freq = static_cast<double>(heavy_first) / trials;
  CHECK(freq == doctest::Approx(0.75).epsilon(0.0134));  // 0.01 absolute
  CHECK(std::fabs(freq - 0.75) < 0.01);
}

TEST_CASE("uniform weights pass a chi-square sanity check") {
  RngStream rng(7, 7);
  const int trials = 100000;
  std::map<int64_t, int64_t> counts;
  for (int t = 0; t < trials; ++t) {
    WeightedSampler s(std::vector<uint64_t>{2, 2, 2, 2});
    ++counts[s.sample_remove(rng)];
  }
  double stat = 0;
  for (auto& [k, c] : counts) {
    double e = trials / 4.0;
    stat += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
  }
  CHECK(teststat::chi2_pvalue(stat, 3) > 1e-4);
}

TEST_CASE("a drain visits every element exactly once") {
  RngStream rng(3, 1);
  std::vector<uint64_t> w(50);
  for (size_t i = 0; i < w.size(); ++i) w[i] = 1 + (i % 7);
  WeightedSampler s(w);
  std::set<int64_t> seen;
  while (!s.empty()) CHECK(seen.insert(s.sample_remove(rng)).second);
  CHECK(seen.size() == w.size());
}

TEST_CASE("remove semantics") {
  RngStream rng(5, 2);
  SUBCASE("removed elements never appear") {
    WeightedSampler s(std::vector<uint64_t>{1, 2, 3, 4});
    CHECK(s.remove(2));
    std::set<int64_t> seen;
    while (!s.empty()) seen.insert(s.sample_remove(rng));
    CHECK(!seen.contains(2));
    CHECK(seen == std::set<int64_t>{0, 1, 3});
  }
  SUBCASE("removing all but one leaves the survivor") {
    WeightedSampler s(std::vector<uint64_t>{5, 6, 7});
    s.remove(0);
    s.remove(2);
    CHECK(s.sample_remove(rng) == 1);
  }
  SUBCASE("absent ids are a no-op") {
    WeightedSampler s(std::vector<uint64_t>{1, 1});
    CHECK(s.remove(0));
    CHECK(!s.remove(0));
    CHECK(!s.remove(99));
    CHECK(s.count() == 1);
  }
  SUBCASE("interleaved removes and samples account for every element") {
    WeightedSampler s(std::vector<uint64_t>(100, 3));
    std::set<int64_t> out, removed;
    for (int i = 0; i < 30; ++i) {
      int64_t id = rng.uniform_int(100);
      if (s.contains(id)) {
        s.remove(id);
        removed.insert(id);
      }
    }
    while (!s.empty()) out.insert(s.sample_remove(rng));
    CHECK(out.size() + removed.size() == 100);
    for (int64_t id : removed) CHECK(!out.contains(id));
  }
}

TEST_CASE("drain order distribution matches sequential weighted sampling (n <= 5)") {
  // Exact probability of each drain permutation vs Monte-Carlo within 3 sigma.
  std::vector<uint64_t> w{1, 2, 3, 4};
  std::vector<int> perm{0, 1, 2, 3};
  std::map<std::vector<int>, double> exact;
  std::sort(perm.begin(), perm.end());
  do {
    double p = 1.0, total = 10.0;
    for (int idx : perm) {
      p *= static_cast<double>(w[static_cast<size_t>(idx)]) / total;
      total -= static_cast<double>(w[static_cast<size_t>(idx)]);
    }
    exact[perm] = p;
  } while (std::next_permutation(perm.begin(), perm.end()));

  RngStream rng(123, 5);
  const int trials = 100000;
  std::map<std::vector<int>, int64_t> counts;
  for (int t = 0; t < trials; ++t) {
    WeightedSampler s(w);
    std::vector<int> order;
    while (!s.empty()) order.push_back(static_cast<int>(s.sample_remove(rng)));
    ++counts[order];
  }
  for (auto& [ord, p] : exact) {
    double expect = p * trials;
    double sigma = std::sqrt(trials * p * (1 - p));
    CHECK(std::fabs(static_cast<double>(counts[ord]) - expect) <= 3.5 * sigma + 1.0);
  }
}

TEST_CASE("fixed stream implies byte-identical drain order") {
  std::vector<uint64_t> w{3, 1, 4, 1, 5, 9, 2, 6};
  std::vector<int64_t> a, b;
  {
    RngStream rng(77, 8);
    WeightedSampler s(w);
    while (!s.empty()) a.push_back(s.sample_remove(rng));
  }
  {
    RngStream rng(77, 8);
    WeightedSampler s(w);
    while (!s.empty()) b.push_back(s.sample_remove(rng));
  }
  CHECK(a == b);
  RngStream other(77, 9);
  WeightedSampler s(w);
  std::vector<int64_t> c;
  while (!s.empty()) c.push_back(s.sample_remove(other));
  CHECK(c != a);  // independent stream, near-certainly different order
}

TEST_CASE("real-weight sampler basics") {
  RngStream rng(11, 3);
  RealWeightedSampler s(std::vector<double>{0.25, 0.75});
  int heavy = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    RealWeightedSampler fresh(std::vector<double>{0.25, 0.75});
    if (fresh.sample_remove(rng) == 1) ++heavy;
  }
  CHECK(static_cast<double>(heavy) / trials == doctest::Approx(0.75).epsilon(0.02));
  CHECK_THROWS_AS(RealWeightedSampler(std::vector<double>{1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("late insertion joins the pool") {
  RngStream rng(13, 1);
  WeightedSampler s(std::vector<uint64_t>{1, 1});
  s.insert(10, 8);
  std::set<int64_t> seen;
  while (!s.empty()) seen.insert(s.sample_remove(rng));
  CHECK(seen == std::set<int64_t>{0, 1, 10});
}
