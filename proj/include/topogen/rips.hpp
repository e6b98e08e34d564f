#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include "topogen/mesh.hpp"

namespace topogen {

/// Point count above which build_rips refuses to run.
inline constexpr std::size_t kDefaultRipsPointLimit = 400;

class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Simplex {
  std::array<int, 3> vertices{};  // ascending; only the first dim+1 are used
  int dim = 0;
  double birth = 0.0;
};

/// Simplices sorted by (birth, dimension, vertices).
struct Filtration {
  std::vector<Simplex> simplices;
};

struct Interval {
  int dim = 0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();
};

struct Barcode {
  std::vector<Interval> intervals;
  [[nodiscard]] std::vector<Interval> in_dim(int dim) const;
};

/// Vietoris-Rips filtration up to `max_dim` (<= 2) and diameter max_radius.
Filtration build_rips(const std::vector<Vec3>& points, double max_radius, int max_dim = 2,
                      std::size_t max_points = kDefaultRipsPointLimit);

/// Column reduction over Z/2 of the full boundary matrix. Returns dimension
/// 0 and 1 intervals; zero-length intervals are dropped.
Barcode persistence(const Filtration& filtration);

struct BettiPair {
  int b0 = 0;
  int b1 = 0;
  friend bool operator==(const BettiPair&, const BettiPair&) = default;
};

/// Intervals with birth <= radius < death.
BettiPair betti_at(const Barcode& barcode, double radius);

void write_barcode_csv(std::ostream& os, const Barcode& barcode);

}  // namespace topogen
