#include "ecx/netgen.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecx/io.hpp"

namespace ecx {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  bool unite(int a, int b) {
    const int ra = find(a);
    const int rb = find(b);
    if (ra == rb) return false;
    parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    return true;
  }
};

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Weighted Laplacian over backbone edges.
Mat backbone_laplacian(const RelatednessGraph& g) {
  Mat l = Mat::Zero(g.n_nodes, g.n_nodes);
  for (const GraphEdge& e : g.edges) {
    if (!e.in_backbone) continue;
    l(e.u, e.u) += e.weight;
    l(e.v, e.v) += e.weight;
    l(e.u, e.v) -= e.weight;
    l(e.v, e.u) -= e.weight;
  }
  return l;
}

std::set<std::pair<int, int>> backbone_edge_set(const RelatednessGraph& g) {
  std::set<std::pair<int, int>> s;
  for (const GraphEdge& e : g.edges) {
    if (e.in_backbone) s.insert({e.u, e.v});
  }
  return s;
}

bool has_edge(const std::set<std::pair<int, int>>& s, int a, int b) {
  return s.count({std::min(a, b), std::max(a, b)}) > 0;
}

}  // namespace

ProximityMatrix proximity(const SpecializationMatrix& m, ProximityKind kind) {
  const int nc = static_cast<int>(m.values.rows());
  const int np = static_cast<int>(m.values.cols());
  if (nc < 1 || np < 2) {
    throw ValidationError("proximity: need at least 1x2 specialization");
  }
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < np; ++j) {
      const double v = m.values(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("proximity: specialization matrix is not 0/1");
      }
    }
  }

  ProximityMatrix out;
  out.kind = kind;
  out.ids = m.activity_ids.empty() ? index_ids('p', np) : m.activity_ids;
  out.ubiquity = m.values.colwise().sum().transpose();
  out.values = m.values.transpose() * m.values;  // cooccurrence counts

  for (int p = 0; p < np; ++p) {
    if (out.ubiquity(p) == 0.0) out.zero_ubiquity.push_back(p);
  }

  if (kind == ProximityKind::min_conditional) {
    for (int a = 0; a < np; ++a) {
      for (int b = 0; b < np; ++b) {
        const double denom = std::max(out.ubiquity(a), out.ubiquity(b));
        out.values(a, b) = denom > 0.0 ? out.values(a, b) / denom : 0.0;
      }
    }
  } else {
    for (int p : out.zero_ubiquity) {
      out.values.row(p).setZero();
      out.values.col(p).setZero();
    }
  }
  return out;
}

RelatednessGraph backbone(const ProximityMatrix& phi) {
  const int n = static_cast<int>(phi.values.rows());
  if (n != phi.values.cols()) {
    throw ValidationError("backbone: proximity matrix is not square");
  }

  RelatednessGraph g;
  g.n_nodes = n;
  g.ids = phi.ids.empty() ? index_ids('p', n) : phi.ids;
  g.ubiquity = phi.ubiquity;

  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (std::abs(phi.values(u, v) - phi.values(v, u)) > 1e-12) {
        throw ValidationError("backbone: proximity matrix is not symmetric");
      }
      const double w = phi.values(u, v);
      if (w > 0.0) {
        GraphEdge e;
        e.u = u;
        e.v = v;
        e.weight = w;
        g.edges.push_back(e);
      }
    }
  }
  if (g.edges.empty()) {
    throw ValidationError("backbone: graph has no positive-weight edges");
  }

  Vec weights(static_cast<int>(g.edges.size()));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    weights(static_cast<int>(i)) = g.edges[i].weight;
  }
  g.strong_threshold = mean_of(weights) + stddev_of(weights);

  // maximum spanning forest, Kruskal
  std::vector<std::size_t> order(g.edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (g.edges[a].weight != g.edges[b].weight) {
      return g.edges[a].weight > g.edges[b].weight;
    }
    if (g.edges[a].u != g.edges[b].u) return g.edges[a].u < g.edges[b].u;
    return g.edges[a].v < g.edges[b].v;
  });
  UnionFind uf(n);
  for (std::size_t i : order) {
    if (uf.unite(g.edges[i].u, g.edges[i].v)) g.edges[i].in_backbone = true;
  }

  for (GraphEdge& e : g.edges) {
    if (e.weight > g.strong_threshold) e.in_backbone = true;
    if (e.in_backbone) ++g.backbone_edge_count;
  }

  g.layout.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / n;
    g.layout.emplace_back(std::cos(a), std::sin(a));
  }
  return g;
}

void attach_node_attributes(RelatednessGraph& g, const Vec& pci,
                            const Vec& ubiquity) {
  if (pci.size() != 0 && pci.size() != g.n_nodes) {
    throw ValidationError("attach_node_attributes: pci size mismatch");
  }
  if (ubiquity.size() != 0 && ubiquity.size() != g.n_nodes) {
    throw ValidationError("attach_node_attributes: ubiquity size mismatch");
  }
  g.pci = pci;
  g.ubiquity = ubiquity;
}

void export_graph(const RelatednessGraph& g, GraphFormat format,
                  const std::string& path) {
  std::ostringstream out;
  switch (format) {
    case GraphFormat::edge_csv: {
      out << "u,v,u_id,v_id,weight,in_backbone\n";
      for (const GraphEdge& e : g.edges) {
        out << e.u << ',' << e.v << ',' << g.ids[static_cast<std::size_t>(e.u)]
            << ',' << g.ids[static_cast<std::size_t>(e.v)] << ','
            << format_double(e.weight) << ',' << (e.in_backbone ? 1 : 0)
            << '\n';
      }
      break;
    }
    case GraphFormat::graphml: {
      out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
          << "  <key id=\"d0\" for=\"node\" attr.name=\"pci\" "
             "attr.type=\"double\"/>\n"
          << "  <key id=\"d1\" for=\"node\" attr.name=\"ubiquity\" "
             "attr.type=\"double\"/>\n"
          << "  <key id=\"d2\" for=\"edge\" attr.name=\"weight\" "
             "attr.type=\"double\"/>\n"
          << "  <key id=\"d3\" for=\"edge\" attr.name=\"in_backbone\" "
             "attr.type=\"boolean\"/>\n"
          << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
      for (int i = 0; i < g.n_nodes; ++i) {
        out << "    <node id=\""
            << xml_escape(g.ids[static_cast<std::size_t>(i)]) << "\">";
        if (g.pci.size() == g.n_nodes) {
          out << "<data key=\"d0\">" << format_double(g.pci(i)) << "</data>";
        }
        if (g.ubiquity.size() == g.n_nodes) {
          out << "<data key=\"d1\">" << format_double(g.ubiquity(i))
              << "</data>";
        }
        out << "</node>\n";
      }
      for (const GraphEdge& e : g.edges) {
        out << "    <edge source=\""
            << xml_escape(g.ids[static_cast<std::size_t>(e.u)])
            << "\" target=\""
            << xml_escape(g.ids[static_cast<std::size_t>(e.v)]) << "\">"
            << "<data key=\"d2\">" << format_double(e.weight) << "</data>"
            << "<data key=\"d3\">" << (e.in_backbone ? "true" : "false")
            << "</data></edge>\n";
      }
      out << "  </graph>\n</graphml>\n";
      break;
    }
    case GraphFormat::dot: {
      out << "graph relatedness {\n";
      for (int i = 0; i < g.n_nodes; ++i) {
        out << "  \"" << g.ids[static_cast<std::size_t>(i)] << "\"";
        if (g.pci.size() == g.n_nodes) {
          out << " [pci=\"" << format_double(g.pci(i)) << "\"]";
        }
        out << ";\n";
      }
      for (const GraphEdge& e : g.edges) {
        out << "  \"" << g.ids[static_cast<std::size_t>(e.u)] << "\" -- \""
            << g.ids[static_cast<std::size_t>(e.v)] << "\" [weight=\""
            << format_double(e.weight) << "\"";
        if (e.in_backbone) out << ", style=bold";
        out << "];\n";
      }
      out << "}\n";
      break;
    }
  }
  write_text_file(path, out.str());
}

RelatednessGraph import_edge_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("import_edge_csv: empty file " + path);
  }
  if (split_line(line) !=
      std::vector<std::string>{"u", "v", "u_id", "v_id", "weight",
                               "in_backbone"}) {
    throw ValidationError("import_edge_csv: unexpected header in " + path);
  }

  RelatednessGraph g;
  std::vector<std::pair<int, std::string>> seen_ids;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_line(line);
    if (f.size() != 6) {
      throw ValidationError("import_edge_csv: malformed row in " + path);
    }
    GraphEdge e;
    try {
      e.u = std::stoi(f[0]);
      e.v = std::stoi(f[1]);
      e.weight = std::stod(f[4]);
      e.in_backbone = std::stoi(f[5]) != 0;
    } catch (const std::exception&) {
      throw ValidationError("import_edge_csv: unparsable row in " + path);
    }
    if (e.u < 0 || e.v <= e.u) {
      throw ValidationError("import_edge_csv: bad node pair in " + path);
    }
    seen_ids.emplace_back(e.u, f[2]);
    seen_ids.emplace_back(e.v, f[3]);
    if (e.in_backbone) ++g.backbone_edge_count;
    g.n_nodes = std::max(g.n_nodes, e.v + 1);
    g.edges.push_back(e);
  }

  g.ids = index_ids('p', g.n_nodes);
  for (const auto& [idx, id] : seen_ids) {
    g.ids[static_cast<std::size_t>(idx)] = id;
  }
  g.layout.reserve(static_cast<std::size_t>(g.n_nodes));
  for (int i = 0; i < g.n_nodes; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / g.n_nodes;
    g.layout.emplace_back(std::cos(a), std::sin(a));
  }
  return g;
}

std::vector<int> connected_components(const RelatednessGraph& g,
                                      bool backbone_only) {
  UnionFind uf(g.n_nodes);
  for (const GraphEdge& e : g.edges) {
    if (backbone_only && !e.in_backbone) continue;
    uf.unite(e.u, e.v);
  }
  std::vector<int> label(static_cast<std::size_t>(g.n_nodes), -1);
  std::vector<int> root_label(static_cast<std::size_t>(g.n_nodes), -1);
  int next = 0;
  for (int i = 0; i < g.n_nodes; ++i) {
    const int r = uf.find(i);
    if (root_label[static_cast<std::size_t>(r)] < 0) {
      root_label[static_cast<std::size_t>(r)] = next++;
    }
    label[static_cast<std::size_t>(i)] = root_label[static_cast<std::size_t>(r)];
  }
  return label;
}

std::vector<int> backbone_degrees(const RelatednessGraph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.n_nodes), 0);
  for (const GraphEdge& e : g.edges) {
    if (!e.in_backbone) continue;
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

std::vector<int> spectral_bisection(const RelatednessGraph& g) {
  if (g.n_nodes < 2) {
    throw ValidationError("spectral_bisection: need at least 2 nodes");
  }
  const Mat l = backbone_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Mat> es(l);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spectral_bisection: eigensolver failed");
  }
  const Vec fiedler = es.eigenvectors().col(1);
  std::vector<int> label(static_cast<std::size_t>(g.n_nodes), 0);
  for (int i = 0; i < g.n_nodes; ++i) {
    label[static_cast<std::size_t>(i)] = fiedler(i) >= 0.0 ? 1 : 0;
  }
  return label;
}

std::vector<int> find_ring_cycle(const RelatednessGraph& g) {
  if (g.n_nodes < 3) return {};
  const Mat l = backbone_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Mat> es(l);
  if (es.info() != Eigen::Success) return {};

  // circular embedding from the two slowest nontrivial modes
  const Vec x = es.eigenvectors().col(1);
  const Vec y = es.eigenvectors().col(2);
  std::vector<double> angle(static_cast<std::size_t>(g.n_nodes), 0.0);
  for (int i = 0; i < g.n_nodes; ++i) {
    angle[static_cast<std::size_t>(i)] = std::atan2(y(i), x(i));
  }

  const std::set<std::pair<int, int>> edges = backbone_edge_set(g);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n_nodes));
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }

  int start = 0;
  for (int i = 1; i < g.n_nodes; ++i) {
    if (angle[static_cast<std::size_t>(i)] <
        angle[static_cast<std::size_t>(start)]) {
      start = i;
    }
  }

  // walk forward in angle along real edges, greedily taking the nearest
  // unvisited neighbor ahead of us
  std::vector<char> visited(static_cast<std::size_t>(g.n_nodes), 0);
  std::vector<int> chain{start};
  visited[static_cast<std::size_t>(start)] = 1;
  int cur = start;
  while (true) {
    int best = -1;
    double best_step = std::numeric_limits<double>::infinity();
    for (int nb : adj[static_cast<std::size_t>(cur)]) {
      if (visited[static_cast<std::size_t>(nb)]) continue;
      double step = angle[static_cast<std::size_t>(nb)] -
                    angle[static_cast<std::size_t>(cur)];
      while (step <= 0.0) step += 2.0 * M_PI;
      if (step < best_step || (step == best_step && nb < best)) {
        best_step = step;
        best = nb;
      }
    }
    if (best < 0) break;
    visited[static_cast<std::size_t>(best)] = 1;
    chain.push_back(best);
    cur = best;
  }

  // the walk can overshoot into a spur; trim until the cycle closes
  while (chain.size() >= 3) {
    if (has_edge(edges, chain.back(), chain.front())) return chain;
    chain.pop_back();
  }
  return {};
}

QuartileDegrees degree_by_pci_quartile(const RelatednessGraph& g) {
  if (g.pci.size() != g.n_nodes) {
    throw ValidationError("degree_by_pci_quartile: pci attribute missing");
  }
  if (g.n_nodes < 4) {
    throw ValidationError("degree_by_pci_quartile: need at least 4 nodes");
  }
  std::vector<int> order(static_cast<std::size_t>(g.n_nodes));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.pci(a) != g.pci(b)) return g.pci(a) > g.pci(b);
    return a < b;
  });
  const std::vector<int> deg = backbone_degrees(g);
  const int quarter = std::max(1, g.n_nodes / 4);

  QuartileDegrees out;
  for (int i = 0; i < quarter; ++i) {
    out.top += deg[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    out.bottom += deg[static_cast<std::size_t>(
        order[static_cast<std::size_t>(g.n_nodes - 1 - i)])];
  }
  out.top /= quarter;
  out.bottom /= quarter;
  return out;
}

}  // namespace ecx
