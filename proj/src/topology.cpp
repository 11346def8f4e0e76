// Copyright 2026 The d2dcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "d2dcache/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "d2dcache/errors.hpp"

namespace d2dcache {

void CellConfig::validate() const {
  if (!(std::isfinite(cell_radius_m) && cell_radius_m > 0)) {
    throw ConfigError("topology.cell_radius_m", "must be > 0");
  }
  if (!(std::isfinite(density_per_m2) && density_per_m2 > 0)) {
    throw ConfigError("topology.density_per_m2", "must be > 0");
  }
  if (!(std::isfinite(r_d2d_m) && r_d2d_m > 0)) {
    throw ConfigError("topology.r_d2d_m", "must be > 0");
  }
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Topology::Topology(const CellConfig& cfg, std::vector<Point> positions)
    : cfg_(cfg), positions_(std::move(positions)) {
  const double extent = 2.0 * cfg_.cell_radius_m;
  cell_size_ = std::max(cfg_.r_d2d_m, extent / 256.0);
  grid_dim_ = std::max(1, static_cast<int>(std::ceil(extent / cell_size_)));
  grid_.assign(static_cast<std::size_t>(grid_dim_) * grid_dim_, {});
  auto cell_of = [&](double v) {
    const int c = static_cast<int>((v + cfg_.cell_radius_m) / cell_size_);
    return std::clamp(c, 0, grid_dim_ - 1);
  };
  for (DeviceId d = 0; d < num_devices(); ++d) {
    const Point p = positions_[d];
    grid_[static_cast<std::size_t>(cell_of(p.y)) * grid_dim_ + cell_of(p.x)]
        .push_back(d);
  }
  d2d_.resize(positions_.size());
  for (DeviceId d = 0; d < num_devices(); ++d) {
    d2d_[d] = scan(d, cfg_.r_d2d_m);
    std::sort(d2d_[d].begin(), d2d_[d].end(),
              [](const Neighbor& a, const Neighbor& b) {
                if (a.distance_m != b.distance_m) {
                  return a.distance_m < b.distance_m;
                }
                return a.id < b.id;
              });
  }
}

void Topology::check(DeviceId dev) const {
  if (dev < 0 || dev >= num_devices()) {
    throw DomainError("unknown device id " + std::to_string(dev));
  }
}

Point Topology::position(DeviceId dev) const {
  check(dev);
  return positions_[dev];
}

double Topology::distance(DeviceId a, DeviceId b) const {
  check(a);
  check(b);
  return d2dcache::distance(positions_[a], positions_[b]);
}

double Topology::distance_to_bs(DeviceId dev) const {
  check(dev);
  return std::hypot(positions_[dev].x, positions_[dev].y);
}

std::span<const Neighbor> Topology::d2d_neighbors(DeviceId dev) const {
  check(dev);
  return d2d_[dev];
}

std::vector<Neighbor> Topology::scan(DeviceId dev, double radius) const {
  const Point p = positions_[dev];
  const int reach = static_cast<int>(std::ceil(radius / cell_size_));
  const int cx = std::clamp(
      static_cast<int>((p.x + cfg_.cell_radius_m) / cell_size_), 0,
      grid_dim_ - 1);
  const int cy = std::clamp(
      static_cast<int>((p.y + cfg_.cell_radius_m) / cell_size_), 0,
      grid_dim_ - 1);
  std::vector<Neighbor> out;
  for (int gy = std::max(0, cy - reach);
       gy <= std::min(grid_dim_ - 1, cy + reach); ++gy) {
    for (int gx = std::max(0, cx - reach);
         gx <= std::min(grid_dim_ - 1, cx + reach); ++gx) {
      for (DeviceId other :
           grid_[static_cast<std::size_t>(gy) * grid_dim_ + gx]) {
        if (other == dev) continue;
        const double d = d2dcache::distance(p, positions_[other]);
        if (d <= radius) out.push_back({other, d});
      }
    }
  }
  return out;
}

std::vector<DeviceId> Topology::neighbors(DeviceId dev, double radius) const {
  check(dev);
  if (!(radius >= 0)) throw DomainError("neighbor radius must be >= 0");
  std::vector<DeviceId> ids;
  for (const Neighbor& n : scan(dev, radius)) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void Topology::write_csv(std::ostream& out) const {
  out << "device,x_m,y_m\n";
  const auto old = out.precision(17);
  for (DeviceId d = 0; d < num_devices(); ++d) {
    out << d << ',' << positions_[d].x << ',' << positions_[d].y << '\n';
  }
  out.precision(old);
}

Topology sample_topology(const CellConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  const double area = std::numbers::pi * cfg.cell_radius_m * cfg.cell_radius_m;
  std::poisson_distribution<int> count(cfg.density_per_m2 * area);
  const int n = count(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> positions(n);
  for (Point& p : positions) {
    // sqrt of a uniform radius fraction gives uniform density on the disc.
    const double r = cfg.cell_radius_m * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    p = {r * std::cos(theta), r * std::sin(theta)};
  }
  return Topology(cfg, std::move(positions));
}

double expected_neighbor_count(const CellConfig& cfg) {
  return cfg.density_per_m2 * std::numbers::pi * cfg.r_d2d_m * cfg.r_d2d_m;
}

}  // namespace d2dcache
