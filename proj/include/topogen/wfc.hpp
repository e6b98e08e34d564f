#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topogen/mesh.hpp"

namespace topogen {

/// Axis direction of a tile face. Values index {+x, -x, +y, -y, +z, -z}.
enum class Direction : int { PosX = 0, NegX, PosY, NegY, PosZ, NegZ };

inline constexpr std::array<Direction, 6> kAllDirections = {
    Direction::PosX, Direction::NegX, Direction::PosY,
    Direction::NegY, Direction::PosZ, Direction::NegZ};

Direction opposite(Direction d);
int axis_of(Direction d);
/// +1 or -1.
int sign_of(Direction d);

/// 3x3x3 boolean voxel block; cell (x, y, z) at index x + 3y + 9z.
struct Tile {
  int id = 0;
  std::array<bool, 27> cells{};
  std::string name;

  [[nodiscard]] bool at(int x, int y, int z) const { return cells[x + 3 * y + 9 * z]; }
  [[nodiscard]] int occupied_count() const;
  /// 3x3 boolean pattern on the face pointing in `d`, in a fixed (u, v) order.
  [[nodiscard]] std::array<bool, 9> face(Direction d) const;
  /// Occupied cells form one 6-connected piece containing the centre (or the
  /// tile is empty).
  [[nodiscard]] bool is_connected_through_center() const;
};

struct GridDims {
  int nx = 1, ny = 1, nz = 1;
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  [[nodiscard]] std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(nx) * (static_cast<std::size_t>(y) +
                                            static_cast<std::size_t>(ny) * z);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Tile assignment per slot, x fastest.
struct TileGrid {
  GridDims dims;
  std::vector<int> assignment;
  std::uint64_t rng_seed = 0;
  int restarts = 0;
};

/// Boolean barrier cells, x fastest; dims are 3x the tile grid.
struct OccupancyGrid {
  GridDims dims;
  std::vector<char> occupied;
  double cell_size = 1.0;

  [[nodiscard]] bool in_range(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims.nx && y < dims.ny && z < dims.nz;
  }
  [[nodiscard]] bool occupied_at(int x, int y, int z) const {
    return occupied[dims.index(x, y, z)] != 0;
  }
  [[nodiscard]] std::size_t occupied_count() const;
  /// Box of the whole grid in scene units (origin at 0).
  [[nodiscard]] Aabb box() const;
};

/// Fully free occupancy grid.
OccupancyGrid empty_environment(GridDims dims, double cell_size);

enum class BoundaryRule { Closed, Open };

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty tile, 3 straights, 12 quarter turns, 3 planar crosses and the full
/// 3D cross; ids 0..19 in that order.
std::vector<Tile> default_tileset();

/// Dead-end caps, one per direction. Not part of the default set.
std::vector<Tile> dead_end_tiles(int first_id);

/// a's face in direction d equals b's face in the opposite direction.
bool face_compatible(const Tile& a, const Tile& b, Direction d);

struct CollapseOptions {
  BoundaryRule boundary = BoundaryRule::Closed;
  /// Per-tile weights (by position in the tileset); empty means uniform.
  std::vector<double> weights;
  int max_restarts = 100;
};

/// Minimum-entropy wave function collapse with constraint propagation.
/// Restarts from scratch on contradiction with the generator advanced.
TileGrid collapse(GridDims dims, const std::vector<Tile>& tileset,
                  std::uint64_t rng_seed, const CollapseOptions& options = {});

/// Exhaustive check: every adjacent pair is face compatible and, for a
/// closed boundary, every outward face is empty.
bool audit_tiling(const TileGrid& grid, const std::vector<Tile>& tileset,
                  BoundaryRule boundary = BoundaryRule::Closed);

OccupancyGrid voxelize(const TileGrid& grid, const std::vector<Tile>& tileset,
                       double cell_size);

nlohmann::json to_json(const TileGrid& grid);
TileGrid tile_grid_from_json(const nlohmann::json& j);

/// One closed box per occupied cell, for viewing the barrier.
TriangleMesh barrier_mesh(const OccupancyGrid& env);

}  // namespace topogen
