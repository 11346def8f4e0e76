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

#ifndef D2DCACHE_TOPOLOGY_HPP
#define D2DCACHE_TOPOLOGY_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "d2dcache/catalog.hpp"

namespace d2dcache {

struct CellConfig {
  double cell_radius_m = 500.0;
  double density_per_m2 = 0.0015;
  double r_d2d_m = 200.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct Neighbor {
  DeviceId id = -1;
  double distance_m = 0.0;
};

// Single cell, base station at the origin, devices from a homogeneous PPP on
// the disc. Immutable once sampled.
class Topology {
 public:
  Topology(const CellConfig& cfg, std::vector<Point> positions);

  const CellConfig& config() const { return cfg_; }
  int num_devices() const { return static_cast<int>(positions_.size()); }
  // True when the PPP draw produced no devices at all.
  bool degenerate() const { return positions_.empty(); }

  Point position(DeviceId dev) const;
  double distance(DeviceId a, DeviceId b) const;
  double distance_to_bs(DeviceId dev) const;

  // Devices within cfg.r_d2d_m of dev, nearest first (ties by id).
  std::span<const Neighbor> d2d_neighbors(DeviceId dev) const;

  // Devices at Euclidean distance <= radius from dev, excluding dev,
  // ascending by id. Throws DomainError for unknown ids or negative radius.
  std::vector<DeviceId> neighbors(DeviceId dev, double radius) const;

  void write_csv(std::ostream& out) const;

 private:
  void check(DeviceId dev) const;
  std::vector<Neighbor> scan(DeviceId dev, double radius) const;

  CellConfig cfg_;
  std::vector<Point> positions_;
  // Uniform grid over [-R, R]^2 with cell edge cell_size_.
  double cell_size_ = 1.0;
  int grid_dim_ = 1;
  std::vector<std::vector<DeviceId>> grid_;
  std::vector<std::vector<Neighbor>> d2d_;
};

Topology sample_topology(const CellConfig& cfg);

// Mean neighbor count lambda * pi * R_D2D^2 of an unbounded PPP.
double expected_neighbor_count(const CellConfig& cfg);

}  // namespace d2dcache

#endif  // D2DCACHE_TOPOLOGY_HPP
