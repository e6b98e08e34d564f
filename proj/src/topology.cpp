#include "topogen/topology.hpp"

#include <algorithm>

namespace topogen {
namespace {

ComponentTopology component_topology(const TriangleMesh& mesh) {
  const MeshDiagnostics d = validate_manifold(mesh);
  if (!d.is_closed) throw PreconditionError("mesh is not closed");
  if (!d.is_oriented) throw PreconditionError("mesh is not consistently oriented");
  if (d.component_count != 1)
    throw PreconditionError("mesh has " + std::to_string(d.component_count) +
                            " components, expected 1");
  const std::int64_t twice_genus = 2 - d.euler_characteristic;
  if (twice_genus % 2 != 0 || twice_genus < 0)
    throw InconsistencyError("Euler characteristic " +
                             std::to_string(d.euler_characteristic) +
                             " is impossible for a closed orientable surface");
  return {static_cast<int>(twice_genus / 2), d.euler_characteristic,
          d.vertex_count, d.edge_count, d.face_count};
}

}  // namespace

std::vector<int> TopologySummary::genus_multiset() const {
  std::vector<int> g;
  g.reserve(components.size());
  for (const auto& c : components) g.push_back(c.genus);
  std::sort(g.begin(), g.end());
  return g;
}

int genus_of_component(const TriangleMesh& mesh) {
  return component_topology(mesh).genus;
}

BettiTriple betti_from_genera(const std::vector<int>& genera) {
  const auto c = static_cast<std::int64_t>(genera.size());
  std::int64_t b1 = 0;
  for (int g : genera) b1 += 2 * g;
  return {c, b1, c};
}

TopologySummary scene_summary(const std::vector<TriangleMesh>& meshes) {
  TopologySummary s;
  std::vector<int> genera;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    try {
      s.components.push_back(component_topology(meshes[i]));
    } catch (const PreconditionError& e) {
      throw PreconditionError("object " + std::to_string(i) + ": " + e.what());
    } catch (const InconsistencyError& e) {
      throw InconsistencyError("object " + std::to_string(i) + ": " + e.what());
    }
    genera.push_back(s.components.back().genus);
  }
  s.scene_betti = betti_from_genera(genera);
  s.scene_chi = s.scene_betti[0] - s.scene_betti[1] + s.scene_betti[2];
  return s;
}

TopologySummary scene_summary(const TriangleMesh& mesh) {
  return scene_summary(connected_components(mesh));
}

bool ambiguity_witness(const TopologySummary& a, const TopologySummary& b) {
  return a.scene_betti == b.scene_betti &&
         a.genus_multiset() != b.genus_multiset();
}

}  // namespace topogen
