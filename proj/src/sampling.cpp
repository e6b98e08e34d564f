#include "topogen/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Geometry>

#include "topogen/rng.hpp"

namespace topogen {

LabeledCloud sample_cloud(const std::vector<TriangleMesh>& objects,
                          const std::vector<int>& genera, std::size_t n,
                          std::uint64_t rng_seed) {
  if (objects.empty()) throw std::invalid_argument("sample_cloud: empty scene");
  if (genera.size() != objects.size())
    throw std::invalid_argument("sample_cloud: one genus per object required");
  if (n == 0) throw std::invalid_argument("sample_cloud: point count must be positive");

  struct Source {
    int object;
    const TriangleMesh* mesh;
    std::size_t tri;
  };
  std::vector<Source> sources;
  std::vector<double> cumulative;
  double total = 0.0;
  for (std::size_t o = 0; o < objects.size(); ++o) {
    check_indices(objects[o]);
    for (std::size_t t = 0; t < objects[o].triangles.size(); ++t) {
      total += triangle_area(objects[o], t);
      sources.push_back({static_cast<int>(o), &objects[o], t});
      cumulative.push_back(total);
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample_cloud: scene has zero area");

  LabeledCloud cloud;
  cloud.rng_seed = rng_seed;
  cloud.points.resize(n);
  cloud.genus_label.resize(n);
  cloud.object_id.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    CounterRng rng(rng_seed, k);
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const Source& s = sources[static_cast<std::size_t>(it - cumulative.begin())];
    const auto& tri = s.mesh->triangles[s.tri];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    cloud.points[k] = (1.0 - r1) * s.mesh->vertices[tri[0]] +
                      r1 * (1.0 - r2) * s.mesh->vertices[tri[1]] +
                      r1 * r2 * s.mesh->vertices[tri[2]];
    cloud.genus_label[k] = genera[s.object];
    cloud.object_id[k] = s.object;
  }
  return cloud;
}

AugmentConfig AugmentConfig::identity() {
  AugmentConfig c;
  c.mirror_prob = 0.0;
  c.rotation_max = 0.0;
  c.scale_spread = 0.0;
  c.shift_range = 0.0;
  c.jitter_sigma = 0.0;
  return c;
}

LabeledCloud augment(const LabeledCloud& cloud, const AugmentConfig& cfg) {
  CounterRng global(cfg.rng_seed, 0);
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  for (int a = 0; a < 3; ++a)
    if (global.bernoulli(cfg.mirror_prob)) m(a, a) = -1.0;
  for (int a = 0; a < 3; ++a) {
    const double angle = global.uniform() * cfg.rotation_max;
    m = Eigen::AngleAxisd(angle, Vec3::Unit(a)).toRotationMatrix() * m;
  }
  Vec3 scale, shift;
  for (int a = 0; a < 3; ++a)
    scale[a] = global.uniform(1.0 - cfg.scale_spread, 1.0 + cfg.scale_spread);
  for (int a = 0; a < 3; ++a) shift[a] = global.uniform(-cfg.shift_range, cfg.shift_range);
  m = scale.asDiagonal() * m;

  LabeledCloud out = cloud;
  out.rng_seed = cfg.rng_seed;
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    Vec3 p = m * cloud.points[k] + shift;
    if (cfg.jitter_sigma > 0.0) {
      CounterRng rng(cfg.rng_seed, k + 1);
      p += cfg.jitter_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    out.points[k] = p;
  }
  return out;
}

void write_cloud_csv(std::ostream& os, const LabeledCloud& cloud) {
  os << "x,y,z,genus,object_id\n";
  os << std::setprecision(9);
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const auto& p = cloud.points[k];
    os << p.x() << ',' << p.y() << ',' << p.z() << ',' << cloud.genus_label[k] << ','
       << cloud.object_id[k] << '\n';
  }
}

LabeledCloud read_cloud_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("cloud CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z,genus,object_id")
    throw std::runtime_error("cloud CSV: unexpected header '" + line + "'");
  LabeledCloud cloud;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Vec3 p;
    int g = 0, o = 0;
    if (!(ls >> p.x() >> p.y() >> p.z() >> g >> o))
      throw std::runtime_error("cloud CSV: malformed row " + std::to_string(row));
    cloud.points.push_back(p);
    cloud.genus_label.push_back(g);
    cloud.object_id.push_back(o);
  }
  return cloud;
}

void save_cloud(const std::string& path, const LabeledCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_cloud_csv(os, cloud);
}

LabeledCloud load_cloud(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_cloud_csv(is);
}

std::vector<int> read_labels(std::istream& is) {
  std::vector<int> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(line, &used));
      if (line.find_first_not_of(" \t\r", used) != std::string::npos)
        throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error("labels: malformed line " + std::to_string(row));
    }
  }
  return out;
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_labels(is);
}

void write_labels(std::ostream& os, const std::vector<int>& labels) {
  for (int l : labels) os << l << '\n';
}

}  // namespace topogen
