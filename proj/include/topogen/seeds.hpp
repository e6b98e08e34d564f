#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "topogen/mesh.hpp"
#include "topogen/wfc.hpp"

namespace topogen {

/// Solid/empty voxel block with unit cells, x fastest.
struct VoxelSolid {
  GridDims dims;
  std::vector<char> solid;
  Vec3 origin = Vec3::Zero();

  VoxelSolid() = default;
  VoxelSolid(GridDims d, Vec3 o = Vec3::Zero())
      : dims(d), solid(d.size(), 0), origin(std::move(o)) {}

  [[nodiscard]] bool at(int x, int y, int z) const {
    if (x < 0 || y < 0 || z < 0 || x >= dims.nx || y >= dims.ny || z >= dims.nz)
      return false;
    return solid[dims.index(x, y, z)] != 0;
  }
  void set(int x, int y, int z, bool v = true) {
    solid[dims.index(x, y, z)] = v ? 1 : 0;
  }
};

/// Boundary surface of the solid, outward wound, two triangles per exposed
/// cell face. Solid cells touching only along an edge or at a corner get
/// separate vertices there, so the result is always a closed 2-manifold.
TriangleMesh boundary_surface(const VoxelSolid& solid);

/// (4g+3) x 3 x 3 slab with g unit tunnels along z; g = 0 gives a cube.
VoxelSolid seed_solid(int genus);

/// Uniform Laplacian relaxation with the enclosed volume restored after each
/// round. A round is dropped if it would create an intersection (within the
/// mesh or against `others`) or a degenerate triangle. Returns rounds kept.
int relax(std::vector<TriangleMesh*> meshes, int rounds, double lambda = 0.5);

/// Closed orientable mesh of the requested genus, in voxel units.
TriangleMesh make_seed(int genus, int smoothing_rounds = 3);

/// Two disjoint meshes of the given genera whose handles thread through each
/// other's tunnels. Throws std::invalid_argument if either genus is 0.
std::pair<TriangleMesh, TriangleMesh> make_linked_pair(int genus_a, int genus_b,
                                                       int smoothing_rounds = 3);

using Rotation = Eigen::Matrix3d;

/// The 24 rotations mapping coordinate axes to coordinate axes.
const std::vector<Rotation>& axis_rotations();

struct SeedSpec {
  int genus = 0;
  std::optional<int> linked_to;
  /// Scene units per voxel unit of the seed construction.
  double scale = 1.0;
};

struct Placement {
  Vec3 position = Vec3::Zero();  // minimum corner of the placed bounds
  int rotation = 0;              // index into axis_rotations()
};

struct PlacedSeeds {
  std::vector<TriangleMesh> meshes;  // one per spec, in spec order
  std::vector<Placement> placements;
};

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection-samples rigid placements (axis rotation + translation) so that
/// every triangle's bounding box lies in free cells of `env`, and separate
/// placement units keep at least one cell of bounding-box clearance.
/// Linked specs are built and placed together as one unit.
PlacedSeeds place_seeds(const std::vector<SeedSpec>& specs,
                        const OccupancyGrid& env, std::uint64_t rng_seed,
                        int max_attempts = 1000);

/// Checks the symmetric-link invariant of a spec list; throws
/// std::invalid_argument on violation.
void validate_specs(const std::vector<SeedSpec>& specs, int max_genus = 64);

}  // namespace topogen
