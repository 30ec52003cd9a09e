#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ecx/common.hpp"
#include "ecx/pipeline.hpp"

namespace ecx {

enum class ProximityKind { min_conditional, cooccurrence };

// Symmetric activity-activity relatedness. Zero-ubiquity activities have zero
// proximity to everything and are listed in zero_ubiquity.
struct ProximityMatrix {
  Mat values;
  ProximityKind kind = ProximityKind::min_conditional;
  Vec ubiquity;
  std::vector<int> zero_ubiquity;
  std::vector<std::string> ids;
};

struct GraphEdge {
  int u = 0;
  int v = 0;  // u < v
  double weight = 0.0;
  bool in_backbone = false;
};

// Relatedness graph over activities: all positive off-diagonal proximity
// pairs, with backbone flags (maximum spanning forest plus strong edges).
struct RelatednessGraph {
  int n_nodes = 0;
  std::vector<std::string> ids;
  Vec pci;       // optional node attribute (size 0 when absent)
  Vec ubiquity;  // optional node attribute
  std::vector<GraphEdge> edges;
  double strong_threshold = 0.0;  // mean + std of off-diagonal nonzero weights
  int backbone_edge_count = 0;
  std::vector<std::pair<double, double>> layout;  // deterministic circular
};

// phi(p,p') = cooccurrence count, optionally divided by max(ubiquity) for the
// min-conditional variant. Diagonal is 1 (or the ubiquity count) but is
// ignored by the backbone.
ProximityMatrix proximity(const SpecializationMatrix& m, ProximityKind kind);

// Backbone = maximum-weight spanning forest (one tree per connected
// component) union edges strictly above mean + std of the off-diagonal
// nonzero weights. Ties are broken by (higher weight, lower node pair).
RelatednessGraph backbone(const ProximityMatrix& phi);

void attach_node_attributes(RelatednessGraph& g, const Vec& pci,
                            const Vec& ubiquity);

enum class GraphFormat { edge_csv, graphml, dot };

// Writes nodes with {pci, ubiquity} and edges with {weight, in_backbone}.
// Floats carry 17 significant digits.
void export_graph(const RelatednessGraph& g, GraphFormat format,
                  const std::string& path);

// Edge-list CSV reader matching export_graph's edge_csv output.
RelatednessGraph import_edge_csv(const std::string& path);

// --- analysis helpers -------------------------------------------------------

// Component label per node; backbone_only restricts to backbone edges.
std::vector<int> connected_components(const RelatednessGraph& g,
                                      bool backbone_only);

// Node degrees counting backbone edges only.
std::vector<int> backbone_degrees(const RelatednessGraph& g);

// Two-way cut from the Fiedler vector of the (backbone) weighted Laplacian.
std::vector<int> spectral_bisection(const RelatednessGraph& g);

// Longest chordless-ish cycle witness found by walking the spectral circular
// embedding of the backbone; every consecutive pair (and the closing pair) is
// checked against real backbone edges. Empty when no cycle closes.
std::vector<int> find_ring_cycle(const RelatednessGraph& g);

// Mean backbone degree of the top and bottom PCI quartiles.
struct QuartileDegrees {
  double top = 0.0;
  double bottom = 0.0;
};
QuartileDegrees degree_by_pci_quartile(const RelatednessGraph& g);

}  // namespace ecx
