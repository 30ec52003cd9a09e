#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ecx/io.hpp"
#include "ecx/netgen.hpp"
#include "ecx/pipeline.hpp"

using namespace ecx;

namespace {

SpecializationMatrix two_cliques() {
  SpecializationMatrix m;
  m.values = Mat(4, 6);
  m.values << 1, 1, 1, 0, 0, 0,
              1, 1, 1, 0, 0, 0,
              0, 0, 0, 1, 1, 1,
              0, 0, 0, 1, 1, 1;
  m.economy_ids = {"c0", "c1", "c2", "c3"};
  m.activity_ids = {"p0", "p1", "p2", "p3", "p4", "p5"};
  m.diversity = m.values.rowwise().sum();
  m.ubiquity = m.values.colwise().sum().transpose();
  return m;
}

ProximityMatrix manual_proximity(const Mat& w) {
  ProximityMatrix phi;
  phi.values = w;
  phi.ubiquity = Vec::Ones(w.rows());
  for (int i = 0; i < w.rows(); ++i) phi.ids.push_back("p" + std::to_string(i));
  return phi;
}

const GraphEdge* find_edge(const RelatednessGraph& g, int u, int v) {
  for (const auto& e : g.edges) {
    if (e.u == u && e.v == v) return &e;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("proximity splits cleanly across unrelated groups") {
  const SpecializationMatrix m = two_cliques();
  const ProximityMatrix cooc = proximity(m, ProximityKind::cooccurrence);
  const ProximityMatrix cond = proximity(m, ProximityKind::min_conditional);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      const bool same_group = (a < 3) == (b < 3);
      CHECK(cooc.values(a, b) == (same_group ? 2.0 : 0.0));
      CHECK(cond.values(a, b) == (same_group ? 1.0 : 0.0));
    }
  }
  CHECK(cond.ubiquity(0) == 2.0);
  CHECK(cond.zero_ubiquity.empty());
  CHECK((cond.values - cond.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("proximity flags activities nobody does") {
  SpecializationMatrix m = two_cliques();
  m.values.col(5).setZero();
  m.diversity = m.values.rowwise().sum();
  m.ubiquity = m.values.colwise().sum().transpose();
  const ProximityMatrix phi = proximity(m, ProximityKind::min_conditional);
  CHECK(phi.zero_ubiquity == std::vector<int>{5});
  CHECK(phi.values.row(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(phi.values.col(5).cwiseAbs().maxCoeff() == 0.0);

  m.values(0, 5) = 0.5;  // not a 0/1 matrix any more
  CHECK_THROWS_AS(proximity(m, ProximityKind::min_conditional), ValidationError);
}

TEST_CASE("equal-weight cliques keep only a spanning forest") {
  const ProximityMatrix phi = proximity(two_cliques(), ProximityKind::min_conditional);
  const RelatednessGraph g = backbone(phi);
  CHECK(g.n_nodes == 6);
  CHECK(g.edges.size() == 6);  // two triangles
  // std = 0, so no strong extras: forest has n - components edges
  CHECK(g.backbone_edge_count == 4);
  CHECK(g.strong_threshold == 1.0);
  // Kruskal tie-break keeps the lexicographically first pairs
  CHECK(find_edge(g, 0, 1)->in_backbone);
  CHECK(find_edge(g, 0, 2)->in_backbone);
  CHECK(!find_edge(g, 1, 2)->in_backbone);
  CHECK(find_edge(g, 3, 4)->in_backbone);
  CHECK(find_edge(g, 3, 5)->in_backbone);
  CHECK(!find_edge(g, 4, 5)->in_backbone);

  const std::vector<int> comp = connected_components(g, false);
  CHECK(comp == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(connected_components(g, true) == comp);
  CHECK(backbone_degrees(g) == std::vector<int>{2, 1, 1, 2, 1, 1});
}

TEST_CASE("strong off-tree edges join the backbone") {
  // triangle of heavy edges over a light chain; the lightest triangle side is
  // redundant for the forest but sits above mean + std
  Mat w = Mat::Zero(10, 10);
  auto set = [&](int a, int b, double x) { w(a, b) = x; w(b, a) = x; };
  set(0, 1, 100.0);
  set(1, 2, 90.0);
  set(0, 2, 85.0);
  for (int i = 2; i < 9; ++i) set(i, i + 1, 1.0);
  const RelatednessGraph g = backbone(manual_proximity(w));
  CHECK(g.edges.size() == 10);
  CHECK(g.strong_threshold > 69.0);
  CHECK(g.strong_threshold < 71.0);
  CHECK(find_edge(g, 0, 2)->in_backbone);  // strong, though not in the forest
  CHECK(g.backbone_edge_count == 10);      // 9 forest edges + the strong extra
}

TEST_CASE("backbone rejects malformed proximity input") {
  Mat w = Mat::Zero(3, 3);
  CHECK_THROWS_AS(backbone(manual_proximity(w)), ValidationError);  // no edges
  Mat asym = Mat::Zero(3, 3);
  asym(0, 1) = 1.0;  // missing the mirrored entry
  CHECK_THROWS_AS(backbone(manual_proximity(asym)), ValidationError);
}

TEST_CASE("edge list round-trips byte for byte") {
  const ProximityMatrix phi = proximity(two_cliques(), ProximityKind::min_conditional);
  RelatednessGraph g = backbone(phi);
  Vec pci(6);
  pci << 1.5, 0.25, -0.5, 0.75, -1.0, -1.25;
  attach_node_attributes(g, pci, phi.ubiquity);

  const std::string dir = "/tmp/ecx_netgen_test";
  ensure_directory(dir);
  export_graph(g, GraphFormat::edge_csv, dir + "/edges.csv");
  const RelatednessGraph back = import_edge_csv(dir + "/edges.csv");
  CHECK(back.n_nodes == g.n_nodes);
  CHECK(back.ids == g.ids);
  CHECK(back.backbone_edge_count == g.backbone_edge_count);
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    CHECK(back.edges[i].u == g.edges[i].u);
    CHECK(back.edges[i].v == g.edges[i].v);
    CHECK(back.edges[i].weight == g.edges[i].weight);
    CHECK(back.edges[i].in_backbone == g.edges[i].in_backbone);
  }
  export_graph(back, GraphFormat::edge_csv, dir + "/edges2.csv");
  CHECK(read_text_file(dir + "/edges.csv") == read_text_file(dir + "/edges2.csv"));
}

TEST_CASE("graph exports carry the expected structure") {
  const ProximityMatrix phi = proximity(two_cliques(), ProximityKind::min_conditional);
  RelatednessGraph g = backbone(phi);
  Vec pci = Vec::Zero(6);
  pci(0) = 2.0;
  attach_node_attributes(g, pci, phi.ubiquity);
  g.ids[0] = "a<b&\"c\"";  // must come out escaped

  const std::string dir = "/tmp/ecx_netgen_test";
  ensure_directory(dir);
  export_graph(g, GraphFormat::graphml, dir + "/g.graphml");
  const std::string xml = read_text_file(dir + "/g.graphml");
  CHECK(xml.find("<graphml") != std::string::npos);
  CHECK(xml.find("a&lt;b&amp;&quot;c&quot;") != std::string::npos);
  std::size_t nodes = 0, edges = 0, pos = 0;
  while ((pos = xml.find("<node ", pos)) != std::string::npos) { ++nodes; pos += 6; }
  pos = 0;
  while ((pos = xml.find("<edge ", pos)) != std::string::npos) { ++edges; pos += 6; }
  CHECK(nodes == 6);
  CHECK(edges == 6);

  export_graph(g, GraphFormat::dot, dir + "/g.dot");
  const std::string dot = read_text_file(dir + "/g.dot");
  CHECK(dot.rfind("graph relatedness {", 0) == 0);
  CHECK(dot.find(" -- ") != std::string::npos);
  CHECK(dot.find("style=bold") != std::string::npos);
}

TEST_CASE("spectral bisection recovers the two planted groups") {
  Mat w = Mat::Zero(6, 6);
  auto set = [&](int a, int b, double x) { w(a, b) = x; w(b, a) = x; };
  set(0, 1, 1.0);
  set(0, 2, 1.0);
  set(1, 2, 1.0);
  set(3, 4, 1.0);
  set(3, 5, 1.0);
  set(4, 5, 1.0);
  set(2, 3, 0.1);  // weak bridge
  const RelatednessGraph g = backbone(manual_proximity(w));
  const std::vector<int> cut = spectral_bisection(g);
  REQUIRE(cut.size() == 6);
  CHECK(cut[0] == cut[1]);
  CHECK(cut[1] == cut[2]);
  CHECK(cut[3] == cut[4]);
  CHECK(cut[4] == cut[5]);
  CHECK(cut[0] != cut[3]);
}

TEST_CASE("ring witness walks the full cycle when strong edges close it") {
  // octagon: heavy ring edges, light skip-one and skip-two chords pull the
  // threshold below the ring weight so the whole ring enters the backbone
  const int n = 8;
  Mat w = Mat::Zero(n, n);
  auto set = [&](int a, int b, double x) { w(a, b) = x; w(b, a) = x; };
  for (int i = 0; i < n; ++i) set(i, (i + 1) % n, 1.0);
  for (int i = 0; i < n; ++i) set(i, (i + 2) % n, 0.5);
  for (int i = 0; i < n / 2; ++i) set(i, i + 4, 0.5);
  const RelatednessGraph g = backbone(manual_proximity(w));
  const std::vector<int> cycle = find_ring_cycle(g);
  REQUIRE(cycle.size() == 8);
  std::set<int> seen(cycle.begin(), cycle.end());
  CHECK(seen.size() == 8);
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const int a = cycle[k];
    const int b = cycle[(k + 1) % cycle.size()];
    const int d = std::abs(a - b);
    CHECK((d == 1 || d == n - 1));  // consecutive on the octagon
  }
}

TEST_CASE("ring witness returns empty on a tree") {
  Mat w = Mat::Zero(5, 5);
  auto set = [&](int a, int b, double x) { w(a, b) = x; w(b, a) = x; };
  set(0, 1, 1.0);
  set(1, 2, 0.9);
  set(2, 3, 0.8);
  set(3, 4, 0.7);
  const RelatednessGraph g = backbone(manual_proximity(w));
  CHECK(find_ring_cycle(g).empty());
}

TEST_CASE("quartile degrees keep pci and connectivity aligned") {
  // path 0-1-2-...-7 with pci decreasing along it; interior nodes have
  // backbone degree 2, the ends degree 1
  const int n = 8;
  Mat w = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    w(i, i + 1) = 1.0;
    w(i + 1, i) = 1.0;
  }
  RelatednessGraph g = backbone(manual_proximity(w));
  Vec pci(n);
  pci << 7, 6, 5, 4, 3, 2, 1, 0;
  attach_node_attributes(g, pci, Vec::Ones(n));
  const QuartileDegrees qd = degree_by_pci_quartile(g);
  // top quartile = nodes 0,1 (degrees 1,2); bottom = nodes 6,7 (degrees 2,1)
  CHECK(qd.top == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(qd.bottom == doctest::Approx(1.5).epsilon(1e-15));

  // move the top-pci nodes into the middle of the path: degree rises
  Vec pci2(n);
  pci2 << 0, 7, 6, 5, 4, 3, 2, 1;
  attach_node_attributes(g, pci2, Vec::Ones(n));
  const QuartileDegrees qd2 = degree_by_pci_quartile(g);
  CHECK(qd2.top == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(qd2.bottom == doctest::Approx(1.0).epsilon(1e-15));
}
