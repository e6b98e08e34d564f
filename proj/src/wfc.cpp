#include "topogen/wfc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "topogen/rng.hpp"

namespace topogen {

Direction opposite(Direction d) {
  return static_cast<Direction>(static_cast<int>(d) ^ 1);
}
int axis_of(Direction d) { return static_cast<int>(d) / 2; }
int sign_of(Direction d) { return static_cast<int>(d) % 2 == 0 ? 1 : -1; }

int Tile::occupied_count() const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), true));
}

std::array<bool, 9> Tile::face(Direction d) const {
  const int axis = axis_of(d);
  const int layer = sign_of(d) > 0 ? 2 : 0;
  std::array<bool, 9> out{};
  for (int v = 0; v < 3; ++v)
    for (int u = 0; u < 3; ++u) {
      int c[3];
      c[axis] = layer;
      c[(axis + 1) % 3] = u;
      c[(axis + 2) % 3] = v;
      out[u + 3 * v] = at(c[0], c[1], c[2]);
    }
  return out;
}

bool Tile::is_connected_through_center() const {
  const int total = occupied_count();
  if (total == 0) return true;
  if (!at(1, 1, 1)) return false;
  std::array<bool, 27> seen{};
  std::vector<int> stack{13};
  seen[13] = true;
  int reached = 0;
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    ++reached;
    const int x = c % 3, y = (c / 3) % 3, z = c / 9;
    const int nb[6][3] = {{x + 1, y, z}, {x - 1, y, z}, {x, y + 1, z},
                          {x, y - 1, z}, {x, y, z + 1}, {x, y, z - 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] > 2 || n[1] > 2 || n[2] > 2)
        continue;
      const int i = n[0] + 3 * n[1] + 9 * n[2];
      if (cells[i] && !seen[i]) {
        seen[i] = true;
        stack.push_back(i);
      }
    }
  }
  return reached == total;
}

namespace {

const char* kDirName[6] = {"+x", "-x", "+y", "-y", "+z", "-z"};

// Centre cell plus one arm per direction.
Tile corridor(int id, std::string name, std::initializer_list<Direction> arms) {
  Tile t;
  t.id = id;
  t.name = std::move(name);
  t.cells[13] = true;
  for (Direction d : arms) {
    int c[3] = {1, 1, 1};
    c[axis_of(d)] += sign_of(d);
    t.cells[c[0] + 3 * c[1] + 9 * c[2]] = true;
  }
  return t;
}

}  // namespace

std::vector<Tile> default_tileset() {
  std::vector<Tile> ts;
  Tile empty;
  empty.id = 0;
  empty.name = "empty";
  ts.push_back(empty);
  const char axes[3] = {'x', 'y', 'z'};
  for (int a = 0; a < 3; ++a) {
    const auto pos = static_cast<Direction>(2 * a);
    ts.push_back(corridor(static_cast<int>(ts.size()),
                          std::string("straight-") + axes[a],
                          {pos, opposite(pos)}));
  }
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      const auto di = static_cast<Direction>(i), dj = static_cast<Direction>(j);
      if (axis_of(di) == axis_of(dj)) continue;
      ts.push_back(corridor(static_cast<int>(ts.size()),
                            std::string("turn") + kDirName[i] + kDirName[j],
                            {di, dj}));
    }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const auto da = static_cast<Direction>(2 * a);
      const auto db = static_cast<Direction>(2 * b);
      ts.push_back(corridor(static_cast<int>(ts.size()),
                            std::string("cross-") + axes[a] + axes[b],
                            {da, opposite(da), db, opposite(db)}));
    }
  ts.push_back(corridor(static_cast<int>(ts.size()), "cross-xyz",
                        {Direction::PosX, Direction::NegX, Direction::PosY,
                         Direction::NegY, Direction::PosZ, Direction::NegZ}));
  return ts;
}

std::vector<Tile> dead_end_tiles(int first_id) {
  std::vector<Tile> ts;
  for (int i = 0; i < 6; ++i)
    ts.push_back(corridor(first_id + i, std::string("cap") + kDirName[i],
                          {static_cast<Direction>(i)}));
  return ts;
}

bool face_compatible(const Tile& a, const Tile& b, Direction d) {
  return a.face(d) == b.face(opposite(d));
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(
      std::count_if(occupied.begin(), occupied.end(), [](char c) { return c != 0; }));
}

Aabb OccupancyGrid::box() const {
  Aabb b;
  b.lo = Vec3::Zero();
  b.hi = Vec3(dims.nx, dims.ny, dims.nz) * cell_size;
  return b;
}

OccupancyGrid empty_environment(GridDims dims, double cell_size) {
  OccupancyGrid g;
  g.dims = dims;
  g.cell_size = cell_size;
  g.occupied.assign(dims.size(), 0);
  return g;
}

namespace {

using Mask = std::uint64_t;

class Solver {
 public:
  Solver(GridDims dims, const std::vector<Tile>& tiles,
         const CollapseOptions& opt)
      : dims_(dims), tiles_(tiles), opt_(opt) {
    const std::size_t n = tiles.size();
    weights_ = opt.weights.empty() ? std::vector<double>(n, 1.0) : opt.weights;
    for (int d = 0; d < 6; ++d) {
      compat_[d].assign(n, 0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (face_compatible(tiles[a], tiles[b], static_cast<Direction>(d)))
            compat_[d][a] |= Mask{1} << b;
    }
    for (int d = 0; d < 6; ++d) {
      closed_face_[d] = 0;
      for (std::size_t a = 0; a < n; ++a) {
        const auto f = tiles[a].face(static_cast<Direction>(d));
        if (std::none_of(f.begin(), f.end(), [](bool c) { return c; }))
          closed_face_[d] |= Mask{1} << a;
      }
    }
    for (std::size_t a = 0; a < n; ++a)
      if (weights_[a] > 0.0) all_ |= Mask{1} << a;
  }

  // True on success; `out` filled.
  bool attempt(CounterRng& rng, std::vector<int>& out) {
    wave_.assign(dims_.size(), all_);
    pending_.clear();
    if (opt_.boundary == BoundaryRule::Closed) {
      for (int z = 0; z < dims_.nz; ++z)
        for (int y = 0; y < dims_.ny; ++y)
          for (int x = 0; x < dims_.nx; ++x) {
            const int c[3] = {x, y, z};
            const int n[3] = {dims_.nx, dims_.ny, dims_.nz};
            Mask m = wave_[dims_.index(x, y, z)];
            for (int a = 0; a < 3; ++a) {
              if (c[a] == n[a] - 1) m &= closed_face_[2 * a];
              if (c[a] == 0) m &= closed_face_[2 * a + 1];
            }
            if (m == 0) return false;
            if (m != wave_[dims_.index(x, y, z)]) {
              wave_[dims_.index(x, y, z)] = m;
              pending_.push_back(dims_.index(x, y, z));
            }
          }
    } else {
      for (std::size_t i = 0; i < wave_.size(); ++i) pending_.push_back(i);
    }
    if (!propagate()) return false;

    for (;;) {
      const auto slot = lowest_entropy(rng);
      if (slot == kNone) break;
      const Mask m = wave_[slot];
      double total = 0.0;
      for (std::size_t t = 0; t < tiles_.size(); ++t)
        if (m >> t & 1) total += weights_[t];
      double r = rng.uniform() * total;
      std::size_t pick = tiles_.size();
      for (std::size_t t = 0; t < tiles_.size(); ++t) {
        if (!(m >> t & 1)) continue;
        pick = t;
        r -= weights_[t];
        if (r < 0.0) break;
      }
      wave_[slot] = Mask{1} << pick;
      pending_.push_back(slot);
      if (!propagate()) return false;
    }
    out.resize(wave_.size());
    for (std::size_t i = 0; i < wave_.size(); ++i)
      out[i] = tiles_[static_cast<std::size_t>(std::countr_zero(wave_[i]))].id;
    return true;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t lowest_entropy(CounterRng& rng) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = kNone;
    for (std::size_t i = 0; i < wave_.size(); ++i) {
      const Mask m = wave_[i];
      if (std::popcount(m) <= 1) continue;
      double sw = 0.0, swl = 0.0;
      for (std::size_t t = 0; t < tiles_.size(); ++t)
        if (m >> t & 1) {
          sw += weights_[t];
          swl += weights_[t] * std::log(weights_[t]);
        }
      const double h = std::log(sw) - swl / sw + 1e-6 * rng.uniform();
      if (h < best) {
        best = h;
        arg = i;
      }
    }
    return arg;
  }

  bool propagate() {
    while (!pending_.empty()) {
      const std::size_t i = pending_.back();
      pending_.pop_back();
      const int x = static_cast<int>(i % dims_.nx);
      const int y = static_cast<int>((i / dims_.nx) % dims_.ny);
      const int z = static_cast<int>(i / (static_cast<std::size_t>(dims_.nx) * dims_.ny));
      for (int d = 0; d < 6; ++d) {
        int c[3] = {x, y, z};
        const auto dir = static_cast<Direction>(d);
        c[axis_of(dir)] += sign_of(dir);
        if (c[0] < 0 || c[1] < 0 || c[2] < 0 || c[0] >= dims_.nx ||
            c[1] >= dims_.ny || c[2] >= dims_.nz)
          continue;
        Mask allowed = 0;
        const Mask m = wave_[i];
        for (std::size_t t = 0; t < tiles_.size(); ++t)
          if (m >> t & 1) allowed |= compat_[d][t];
        const std::size_t j = dims_.index(c[0], c[1], c[2]);
        const Mask next = wave_[j] & allowed;
        if (next == wave_[j]) continue;
        if (next == 0) return false;
        wave_[j] = next;
        pending_.push_back(j);
      }
    }
    return true;
  }

  GridDims dims_;
  const std::vector<Tile>& tiles_;
  CollapseOptions opt_;
  std::vector<double> weights_;
  std::array<std::vector<Mask>, 6> compat_;
  std::array<Mask, 6> closed_face_{};
  Mask all_ = 0;
  std::vector<Mask> wave_;
  std::vector<std::size_t> pending_;
};

}  // namespace

TileGrid collapse(GridDims dims, const std::vector<Tile>& tileset,
                  std::uint64_t rng_seed, const CollapseOptions& options) {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
    throw std::invalid_argument("collapse: grid dimensions must be >= 1");
  if (tileset.empty()) throw std::invalid_argument("collapse: empty tileset");
  if (tileset.size() > 64)
    throw std::invalid_argument("collapse: at most 64 tiles supported");
  if (!options.weights.empty() && options.weights.size() != tileset.size())
    throw std::invalid_argument("collapse: one weight per tile required");
  for (double w : options.weights)
    if (!(w >= 0.0)) throw std::invalid_argument("collapse: negative weight");

  Solver solver(dims, tileset, options);
  CounterRng rng(rng_seed, 0x77FC);
  TileGrid grid;
  grid.dims = dims;
  grid.rng_seed = rng_seed;
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    if (solver.attempt(rng, grid.assignment)) {
      grid.restarts = attempt;
      return grid;
    }
  }
  throw GenerationError("wave function collapse found no tiling for seed " +
                        std::to_string(rng_seed) + " after " +
                        std::to_string(options.max_restarts) + " restarts");
}

namespace {

const Tile& tile_by_id(const std::vector<Tile>& ts, int id) {
  for (const auto& t : ts)
    if (t.id == id) return t;
  throw std::invalid_argument("unknown tile id " + std::to_string(id));
}

}  // namespace

bool audit_tiling(const TileGrid& grid, const std::vector<Tile>& tileset,
                  BoundaryRule boundary) {
  const auto& d = grid.dims;
  if (grid.assignment.size() != d.size()) return false;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const Tile& t = tile_by_id(tileset, grid.assignment[d.index(x, y, z)]);
        for (Direction dir : kAllDirections) {
          int c[3] = {x, y, z};
          c[axis_of(dir)] += sign_of(dir);
          const bool outside = c[0] < 0 || c[1] < 0 || c[2] < 0 ||
                               c[0] >= d.nx || c[1] >= d.ny || c[2] >= d.nz;
          if (outside) {
            if (boundary == BoundaryRule::Closed) {
              const auto f = t.face(dir);
              if (std::any_of(f.begin(), f.end(), [](bool b) { return b; }))
                return false;
            }
            continue;
          }
          const Tile& u = tile_by_id(tileset, grid.assignment[d.index(c[0], c[1], c[2])]);
          if (!face_compatible(t, u, dir)) return false;
        }
      }
  return true;
}

OccupancyGrid voxelize(const TileGrid& grid, const std::vector<Tile>& tileset,
                       double cell_size) {
  OccupancyGrid env = empty_environment(
      {3 * grid.dims.nx, 3 * grid.dims.ny, 3 * grid.dims.nz}, cell_size);
  for (int z = 0; z < grid.dims.nz; ++z)
    for (int y = 0; y < grid.dims.ny; ++y)
      for (int x = 0; x < grid.dims.nx; ++x) {
        const Tile& t =
            tile_by_id(tileset, grid.assignment[grid.dims.index(x, y, z)]);
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
              if (t.at(i, j, k))
                env.occupied[env.dims.index(3 * x + i, 3 * y + j, 3 * z + k)] = 1;
      }
  return env;
}

nlohmann::json to_json(const TileGrid& grid) {
  return {{"dims", {grid.dims.nx, grid.dims.ny, grid.dims.nz}},
          {"rng_seed", grid.rng_seed},
          {"tiles", grid.assignment}};
}

TileGrid tile_grid_from_json(const nlohmann::json& j) {
  TileGrid g;
  const auto& dims = j.at("dims");
  g.dims = {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
  g.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  g.assignment = j.at("tiles").get<std::vector<int>>();
  if (g.assignment.size() != g.dims.size())
    throw std::invalid_argument("environment JSON: tile count does not match dims");
  return g;
}

TriangleMesh barrier_mesh(const OccupancyGrid& env) {
  TriangleMesh m;
  // Cube corners and outward-wound faces.
  static const int kFaces[12][3] = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7},
                                    {0, 1, 5}, {0, 5, 4}, {2, 3, 7}, {2, 7, 6},
                                    {1, 2, 6}, {1, 6, 5}, {0, 4, 7}, {0, 7, 3}};
  const double s = env.cell_size;
  for (int z = 0; z < env.dims.nz; ++z)
    for (int y = 0; y < env.dims.ny; ++y)
      for (int x = 0; x < env.dims.nx; ++x) {
        if (!env.occupied_at(x, y, z)) continue;
        const int base = static_cast<int>(m.vertices.size());
        const Vec3 o(x * s, y * s, z * s);
        m.vertices.push_back(o + Vec3(0, 0, 0));
        m.vertices.push_back(o + Vec3(s, 0, 0));
        m.vertices.push_back(o + Vec3(s, s, 0));
        m.vertices.push_back(o + Vec3(0, s, 0));
        m.vertices.push_back(o + Vec3(0, 0, s));
        m.vertices.push_back(o + Vec3(s, 0, s));
        m.vertices.push_back(o + Vec3(s, s, s));
        m.vertices.push_back(o + Vec3(0, s, s));
        for (const auto& f : kFaces)
          m.triangles.push_back({base + f[0], base + f[1], base + f[2]});
      }
  return m;
}

}  // namespace topogen
