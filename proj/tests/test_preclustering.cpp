#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ccdyn/oracle.hpp"
#include "ccdyn/preclustering.hpp"
#include "support/corpus.hpp"

using namespace ccdyn;

namespace {

// Clique of size k on vertices [0, k) inside a graph of size n.
Graph clique_in(int32_t n, int32_t k) {
  Graph g(n);
  for (VertexId u = 0; u < k; ++u)
    for (VertexId v = u + 1; v < k; ++v) g.add_edge(u, v);
  return g;
}

std::vector<std::vector<VertexId>> nonsingleton_clusters(const Clustering& c) {
  std::vector<std::vector<VertexId>> out;
  std::vector<char> seen(static_cast<size_t>(c.cluster_ids()), 0);
  for (VertexId v = 0; v < c.n(); ++v) {
    ClusterId cl = c.label(v);
    if (seen[static_cast<size_t>(cl)] || c.size(cl) <= 1) continue;
    seen[static_cast<size_t>(cl)] = 1;
    auto mem = c.members(cl);
    std::sort(mem.begin(), mem.end());
    out.push_back(mem);
  }
  return out;
}

}  // namespace

TEST_CASE("is_agreeing") {
  SUBCASE("isolated clique agrees for any positive beta") {
    Graph g = clique_in(8, 5);
    std::vector<VertexId> c{0, 1, 2, 3, 4};
    CHECK(is_agreeing(c, g, 0.05));
    CHECK(is_agreeing(c, g, 1.0 / 6.0));
  }
  SUBCASE("2-path endpoint needs beta above 1/3") {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    std::vector<VertexId> c{0, 1, 2};
    CHECK(!is_agreeing(c, g, 1.0 / 3.0));  // |N(0) xor C| = 1 = (1/3)*3, not strict
    CHECK(is_agreeing(c, g, 0.34));
  }
}

TEST_CASE("clean: no violations means no change") {
  Graph g = clique_in(6, 6);
  ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::one_cluster(6));
  REQUIRE(rep.cost() == 0);
  CleanResult out = clean(rep);
  CHECK(out.rep.cost() == 0);
  CHECK(equivalent(out.rep.clustering, rep.clustering));
}

TEST_CASE("clean: a heavy vertex is split off, the remainder survives as an atom") {
  // 40-clique cluster, except vertex 0 misses its edges to 1..4.
  Graph g = clique_in(40, 40);
  for (VertexId v = 1; v <= 4; ++v) g.remove_edge(0, v);
  ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::one_cluster(40));
  REQUIRE(rep.cost() == 4);  // p_0 = 4 >= 0.05 * 40; everyone else has p = 1 < 2
  CleanResult out = clean(rep);
  CHECK(out.rep.clustering.size(out.rep.clustering.label(0)) == 1);
  ClusterId atom = out.rep.clustering.label(5);
  CHECK(out.rep.clustering.size(atom) == 39);
  for (VertexId v = 1; v < 40; ++v) CHECK(out.rep.clustering.label(v) == atom);
  // All of 0's 35 surviving edges become violations.
  CHECK(out.rep.cost() == 35);
  CHECK(out.rep.cost() == clustering_cost(g, out.rep.clustering));
  auto atoms = nonsingleton_clusters(out.rep.clustering);
  REQUIRE(atoms.size() == 1);
  CHECK(is_agreeing(atoms[0], g, 2.0 / 19.0));
}

TEST_CASE("clean: too many marks shatter the cluster into singletons") {
  // An independent set clustered together: every vertex is marked.
  Graph g(20);
  ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::one_cluster(20));
  REQUIRE(rep.cost() == 190);
  CleanResult out = clean(rep);
  CHECK(out.rep.clustering.cluster_count() == 20);
  CHECK(out.rep.cost() == 0);
}

TEST_CASE("clean guarantees over a random corpus") {
  RngStream rng(21, 1);
  for (int t = 0; t < 120; ++t) {
    int32_t n = 8 + static_cast<int32_t>(rng.uniform_int(40));
    double p = 0.2 + 0.2 * static_cast<double>(rng.uniform_int(4));
    Graph g = Graph::gnp(n, p, rng);
    Clustering c = testcorpus::random_clustering(n, 1 + static_cast<int32_t>(rng.uniform_int(5)), rng);
    ClusterRepresentation rep = ClusterRepresentation::from(g, c);
    CleanResult out = clean(rep);
    CHECK(out.rep.cost() == clustering_cost(g, out.rep.clustering));
    CHECK(out.rep.cost() <= kCleanCostFactor * rep.cost());
    for (const auto& cluster : nonsingleton_clusters(out.rep.clustering)) {
      CHECK(is_agreeing(cluster, g, 2.0 / 19.0));
      CHECK(is_agreeing(cluster, g, 1.0 / 6.0));  // hence strong
    }
  }
}

TEST_CASE("strong clusters are subsumed in the optimum with at least 3/4 of its size") {
  // At this scale only isolated perfect cliques survive cleaning (any
  // violation marks its vertex when 0.05|C| < 1), so the corpus plants one
  // clique next to a noisy remainder.
  RngStream rng(22, 2);
  int checked = 0;
  for (int t = 0; t < 150; ++t) {
    int32_t n = 8 + static_cast<int32_t>(rng.uniform_int(5));  // n <= 12
    int32_t k = 3 + static_cast<int32_t>(rng.uniform_int(3));
    Graph g(n);
    for (VertexId u = 0; u < k; ++u)
      for (VertexId v = u + 1; v < k; ++v) g.add_edge(u, v);
    for (VertexId u = k; u < n; ++u)
      for (VertexId v = u + 1; v < n; ++v)
        if (rng.bernoulli(0.5)) g.add_edge(u, v);
    std::vector<ClusterId> lab(static_cast<size_t>(n));
    for (VertexId v = 0; v < n; ++v)
      lab[static_cast<size_t>(v)] = v < k ? 0 : 1 + static_cast<ClusterId>(rng.uniform_int(2));
    ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::from_labels(lab));
    CleanResult out = clean(rep);
    auto atoms = nonsingleton_clusters(out.rep.clustering);
    if (atoms.empty()) continue;
    OptResult opt = brute_force_opt(g);
    for (const auto& atom : atoms) {
      ClusterId host = opt.clustering.label(atom.front());
      for (VertexId v : atom) CHECK(opt.clustering.label(v) == host);
      CHECK(4 * static_cast<int64_t>(atom.size()) >= 3 * opt.clustering.size(host));
      ++checked;
    }
  }
  CHECK(checked > 20);  // the corpus actually exercised the property
}

TEST_CASE("atom admissible lists") {
  SUBCASE("isolated atom lists nobody") {
    Graph g = clique_in(8, 4);
    std::vector<ClusterId> lab{0, 0, 0, 0, 1, 2, 3, 4};
    ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::from_labels(lab));
    Preclustering pre(&rep, AdmParams{});
    CHECK(pre.atom_admissible(rep.clustering.label(0)).empty());
  }
  SUBCASE("a singleton with one-third overlap and similar degree is listed") {
    // Atom = 4-clique {0,1,2,3}; u = 4 adjacent to 0,1 plus filler.
    Graph g = clique_in(8, 4);
    g.add_edge(4, 0);
    g.add_edge(4, 1);
    g.add_edge(4, 5);  // keeps d(4) = 3, similar to the atom's degrees
    std::vector<ClusterId> lab{0, 0, 0, 0, 1, 2, 3, 4};
    ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::from_labels(lab));
    Preclustering pre(&rep, AdmParams{});
    ClusterId atom = rep.clustering.label(0);
    const auto& lst = pre.atom_admissible(atom);
    CHECK(std::find(lst.begin(), lst.end(), 4) != lst.end());
    CHECK(pre.exact_admissible(4, 0));
  }
  SUBCASE("members of other atoms are never listed") {
    // Two 4-cliques joined by two edges: atom-atom pairs stay non-admissible.
    Graph g = clique_in(8, 4);
    for (VertexId u = 4; u < 8; ++u)
      for (VertexId v = u + 1; v < 8; ++v) g.add_edge(u, v);
    g.add_edge(0, 4);
    g.add_edge(1, 5);
    std::vector<ClusterId> lab{0, 0, 0, 0, 1, 1, 1, 1};
    ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::from_labels(lab));
    Preclustering pre(&rep, AdmParams{});
    CHECK(pre.atom_admissible(rep.clustering.label(0)).empty());
    CHECK(!pre.exact_admissible(0, 4));
  }
}

namespace {

// Twins u = 0, v = 1 sharing 20 interconnected neighbors.
ClusterRepresentation twins_rep() {
  Graph g(22);
  for (VertexId w = 2; w < 22; ++w) {
    g.add_edge(0, w);
    g.add_edge(1, w);
  }
  for (VertexId a = 2; a < 22; ++a)
    for (VertexId b = a + 1; b < 22; ++b) g.add_edge(a, b);
  return ClusterRepresentation::singletons(g);
}

}  // namespace

TEST_CASE("check_admissible") {
  SUBCASE("disjoint neighborhoods are rejected outright") {
    Graph g(6);
    g.add_edge(0, 2);
    g.add_edge(1, 3);
    g.add_edge(2, 4);
    g.add_edge(3, 5);
    ClusterRepresentation rep = ClusterRepresentation::singletons(g);
    Preclustering pre(&rep, AdmParams{});
    RngStream rng(1, 1);
    CHECK(!pre.check_admissible(0, 1, rng));
    CHECK(!pre.exact_admissible(0, 1));
  }
  SUBCASE("degree-dissimilar pairs fail the gate") {
    Graph g(30);
    for (VertexId v = 2; v < 30; ++v) g.add_edge(0, v);
    g.add_edge(1, 2);
    ClusterRepresentation rep = ClusterRepresentation::singletons(g);
    Preclustering pre(&rep, AdmParams{.epsilon = 0.05});
    RngStream rng(2, 2);
    // d(0) = 28, d(1) = 1: 0.05 * 28 = 1.4 >= 1.
    CHECK(!pre.degree_similar(0, 1));
    CHECK(!pre.check_admissible(0, 1, rng));
  }
  SUBCASE("twins pass with failure rate well below exp(-t/2)") {
    ClusterRepresentation rep = twins_rep();
    REQUIRE(rep.deg(0) == 20);
    {
      Preclustering exact(&rep, AdmParams{.exact = true});
      CHECK(exact.exact_admissible(0, 1));
    }
    RngStream rng(3, 3);
    const int trials = 10000;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      Preclustering pre(&rep, AdmParams{.epsilon = 0.05, .t_floor = 8});
      if (!pre.check_admissible(0, 1, rng)) ++failures;
    }
    // exp(-8/2) ~ 0.018; the estimator sits far above the threshold here.
    CHECK(static_cast<double>(failures) / trials <= std::exp(-4.0) + 0.01);
  }
  SUBCASE("verdicts are memoized write-once") {
    ClusterRepresentation rep = twins_rep();
    Preclustering pre(&rep, AdmParams{});
    RngStream rng(4, 4);
    bool first = pre.check_admissible(0, 1, rng);
    int64_t entries = pre.memo_entries();
    for (int i = 0; i < 10; ++i) CHECK(pre.check_admissible(1, 0, rng) == first);
    CHECK(pre.memo_entries() == entries);
  }
}

TEST_CASE("list_admissible") {
  SUBCASE("isolated vertex lists nothing") {
    Graph g(5);
    g.add_edge(1, 2);
    ClusterRepresentation rep = ClusterRepresentation::singletons(g);
    Preclustering pre(&rep, AdmParams{});
    RngStream rng(5, 5);
    CHECK(pre.list_admissible(0, rng).empty());
  }
  SUBCASE("admissible atoms are listed deterministically") {
    Graph g = clique_in(8, 4);
    g.add_edge(4, 0);
    g.add_edge(4, 1);
    g.add_edge(4, 5);
    std::vector<ClusterId> lab{0, 0, 0, 0, 1, 2, 3, 4};
    ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::from_labels(lab));
    Preclustering pre(&rep, AdmParams{});
    RngStream rng(6, 6);
    auto lst = pre.list_admissible(4, rng);
    for (VertexId v : {0, 1, 2, 3}) CHECK(std::find(lst.begin(), lst.end(), v) != lst.end());
  }
  SUBCASE("planted partner is found with miss rate at most exp(-t)") {
    ClusterRepresentation rep = twins_rep();
    RngStream rng(7, 7);
    int misses = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
      Preclustering pre(&rep, AdmParams{});
      auto lst = pre.list_admissible(0, rng);
      if (std::find(lst.begin(), lst.end(), 1) == lst.end()) ++misses;
    }
    CHECK(misses <= 2);  // t >= 8, exp(-8) ~ 3e-4
  }
}

TEST_CASE("preclustering of a perfect clique partition has no admissible pairs") {
  Graph g(9);
  for (int32_t base : {0, 3, 6})
    for (VertexId u = static_cast<VertexId>(base); u < base + 3; ++u)
      for (VertexId v = u + 1; v < base + 3; ++v) g.add_edge(u, v);
  std::vector<ClusterId> lab{0, 0, 0, 1, 1, 1, 2, 2, 2};
  ClusterRepresentation rep = ClusterRepresentation::from(g, Clustering::from_labels(lab));
  ClusterRepresentation atoms = clean(rep).rep;
  CHECK(equivalent(atoms.clustering, rep.clustering));
  Preclustering pre(&atoms, AdmParams{.exact = true});
  auto props = verify_preclustering_properties(pre);
  CHECK(props.admissible_pairs == 0);
  CHECK(props.all());
}

TEST_CASE("preclustering structural properties over a random corpus") {
  RngStream rng(23, 3);
  for (int t = 0; t < 40; ++t) {
    int32_t n = 10 + static_cast<int32_t>(rng.uniform_int(51));  // n <= 60
    Graph g = Graph::gnp(n, 0.25, rng);
    Clustering c = testcorpus::random_clustering(n, 4, rng);
    ClusterRepresentation rep = ClusterRepresentation::from(g, c);
    ClusterRepresentation atoms = clean(rep).rep;
    Preclustering pre(&atoms, AdmParams{.exact = true});
    auto props = verify_preclustering_properties(pre);
    CHECK(props.singleton_endpoint);
    CHECK(props.degree_similarity);
    CHECK(props.degree_bound);
    CHECK(props.atom_degree_bound);
    // |E_adm| < (2/eps^2 + 6) cost(K) whenever there are any violations.
    if (atoms.cost() > 0) CHECK(props.total_bound);
  }
}

TEST_CASE("an accepted near-optimal clustering exists on tiny graphs") {
  // Repair the optimum: repeatedly split off vertices with weak ties to
  // their cluster, then check the cost and size conditions.
  RngStream rng(24, 4);
  const double eps = 0.05;
  for (int t = 0; t < 30; ++t) {
    int32_t n = 6 + static_cast<int32_t>(rng.uniform_int(5));
    Graph g = Graph::gnp(n, 0.5, rng);
    ClusterRepresentation rep = ClusterRepresentation::singletons(g);
    ClusterRepresentation atoms = clean(rep).rep;
    OptResult opt = brute_force_opt(g);

    Clustering c = opt.clustering;
    StampSet in_c(static_cast<size_t>(n));
    bool changed = true;
    while (changed) {
      changed = false;
      for (VertexId u = 0; u < n && !changed; ++u) {
        ClusterId cl = c.label(u);
        if (c.size(cl) <= 1) continue;
        if (atoms.clustering.size(atoms.clustering.label(u)) > 1) continue;  // atom members stay
        in_c.clear();
        c.for_members(cl, [&](VertexId w) { in_c.mark(w); });
        int64_t inside = 1;
        for (VertexId w : g.neighbors(u))
          if (in_c.contains(w)) ++inside;
        if (static_cast<double>(inside) <=
            0.5 * static_cast<double>(c.size(cl)) + eps * static_cast<double>(g.degree(u))) {
          c.move(u, c.make_cluster());
          changed = true;
        }
      }
    }
    int64_t cost_c = clustering_cost(g, c);
    CHECK(static_cast<double>(cost_c) <=
          static_cast<double>(opt.cost) + 4.0 * eps * static_cast<double>(atoms.cost()) + 1e-9);
    for (VertexId v = 0; v < n; ++v) {
      ClusterId cl = c.label(v);
      if (c.size(cl) > 1)
        CHECK(static_cast<double>(c.size(cl)) > eps * static_cast<double>(g.degree(v)));
    }
  }
}

TEST_CASE("preclustering serialization carries atom flags") {
  Graph g = clique_in(8, 5);
  g.add_edge(5, 6);
  std::vector<ClusterId> lab{0, 0, 0, 0, 0, 1, 2, 3};
  ClusterRepresentation atoms = clean(ClusterRepresentation::from(g, Clustering::from_labels(lab))).rep;
  std::stringstream ss;
  write_preclustering(atoms, ss);
  std::string text = ss.str();
  ClusterRepresentation back = read_preclustering(ss);
  CHECK(equivalent(back.clustering, atoms.clustering));
  // The trailing line flags exactly the non-singleton clusters.
  auto last_line = text.substr(text.find_last_of('\n', text.size() - 2) + 1);
  CHECK(last_line.find('1') != std::string::npos);
}
