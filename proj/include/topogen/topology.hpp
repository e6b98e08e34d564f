#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "topogen/mesh.hpp"

namespace topogen {

/// The mesh does not satisfy the closed / oriented / connected preconditions
/// for reading genus off the Euler characteristic.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// V - E + F produced a value a closed orientable surface cannot have.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ComponentTopology {
  int genus = 0;
  std::int64_t chi = 0;
  std::int64_t vertices = 0;
  std::int64_t edges = 0;
  std::int64_t faces = 0;
};

using BettiTriple = std::array<std::int64_t, 3>;

struct TopologySummary {
  std::vector<ComponentTopology> components;
  BettiTriple scene_betti{0, 0, 0};
  std::int64_t scene_chi = 0;

  /// Component genera, sorted ascending.
  [[nodiscard]] std::vector<int> genus_multiset() const;
};

/// Genus of a closed, oriented, single-component mesh: (2 - chi) / 2.
int genus_of_component(const TriangleMesh& mesh);

/// Per-object genus and the scene Betti triple (C, sum 2g, C). Errors carry the
/// offending object index.
TopologySummary scene_summary(const std::vector<TriangleMesh>& meshes);

/// Convenience: splits `mesh` into connected components first.
TopologySummary scene_summary(const TriangleMesh& mesh);

/// True iff the Betti triples agree while the genus multisets differ.
bool ambiguity_witness(const TopologySummary& a, const TopologySummary& b);

/// Betti triple of a scene made of closed orientable surfaces of the given
/// genera.
BettiTriple betti_from_genera(const std::vector<int>& genera);

}  // namespace topogen
