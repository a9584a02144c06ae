// Copyright 2026 Offnav Authors
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

#include "offnav/grid.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace offnav {

ElevationBelief init_belief(const GridSpec& spec, double robot_x,
                            double robot_y, double free_elevation,
                            double init_variance, double known_radius) {
  ElevationBelief belief(spec);
  belief.mean.fill(static_cast<float>(free_elevation));
  belief.variance.fill(static_cast<float>(init_variance));
  if (known_radius <= 0.0) return belief;

  const double r2 = known_radius * known_radius;
  const int n = spec.cells_per_side();
  for (int j = 0; j < n; ++j) {
    const double cy = spec.origin_y + (j + 0.5) * spec.resolution;
    const double dy2 = (cy - robot_y) * (cy - robot_y);
    if (dy2 > r2) continue;
    for (int i = 0; i < n; ++i) {
      const double cx = spec.origin_x + (i + 0.5) * spec.resolution;
      const double d2 = (cx - robot_x) * (cx - robot_x) + dy2;
      if (d2 <= r2) {
        belief.variance.at(i, j) = 0.0f;
        belief.observed.at(i, j) = 1;
      }
    }
  }
  // The robot's own cell is always inside the known region.
  if (auto c = world_to_cell(robot_x, robot_y, spec)) {
    belief.variance.at(*c) = 0.0f;
    belief.observed.at(*c) = 1;
  }
  return belief;
}

namespace {

// Nearest observed cell by expanding Chebyshev rings; exact Euclidean with
// lowest-linear-index tie-break. Occluded cells are normally close to an
// observed boundary, so the ring search terminates quickly.
bool nearest_observed(const ElevationBelief& b, int ci, int cj, float* out) {
  const int n = b.observed.width();
  long best_d2 = std::numeric_limits<long>::max();
  size_t best_idx = 0;
  bool found = false;
  const int max_ring = n;  // worst case scans the whole map
  for (int ring = 0; ring <= max_ring; ++ring) {
    if (found) {
      // Any closer cell must lie within ceil(sqrt(best_d2)) Chebyshev rings.
      const long r2 = static_cast<long>(ring) * ring;
      if (r2 > best_d2) break;
    }
    const int i0 = ci - ring, i1 = ci + ring;
    const int j0 = cj - ring, j1 = cj + ring;
    auto visit = [&](int i, int j) {
      if (i < 0 || j < 0 || i >= n || j >= n) return;
      if (!b.observed.at(i, j)) return;
      const long di = i - ci, dj = j - cj;
      const long d2 = di * di + dj * dj;
      const size_t idx = b.observed.linear(i, j);
      if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
        best_d2 = d2;
        best_idx = idx;
        found = true;
      }
    };
    if (ring == 0) {
      visit(ci, cj);
    } else {
      for (int i = i0; i <= i1; ++i) {
        visit(i, j0);
        visit(i, j1);
      }
      for (int j = j0 + 1; j < j1; ++j) {
        visit(i0, j);
        visit(i1, j);
      }
    }
  }
  if (found) *out = b.mean.data()[best_idx];
  return found;
}

}  // namespace

void inpaint_occluded(ElevationBelief& belief,
                      const Grid2D<std::uint8_t>& fov_mask) {
  const int n = belief.mean.width();
  // Snapshot semantics: fills are computed against the pre-call observed
  // set, so fill order cannot matter (inpainted cells stay unobserved).
  std::vector<std::pair<CellIndex, float>> fills;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!fov_mask.at(i, j) || belief.observed.at(i, j)) continue;
      float value = 0.0f;
      if (nearest_observed(belief, i, j, &value)) {
        fills.push_back({{i, j}, value});
      }
    }
  }
  for (const auto& [cell, value] : fills) belief.mean.at(cell) = value;
}

std::vector<std::vector<double>> sample_elevation_at(
    const ElevationBelief& belief,
    const std::vector<std::pair<double, double>>& points, int n_samples,
    Rng& rng) {
  std::vector<double> mean(points.size());
  std::vector<double> sigma(points.size());
  for (size_t p = 0; p < points.size(); ++p) {
    const auto cell = world_to_cell(points[p].first, points[p].second,
                                    belief.spec);
    if (!cell) {
      std::ostringstream msg;
      msg << "sample_elevation_at: point (" << points[p].first << ", "
          << points[p].second << ") is outside the map";
      throw std::out_of_range(msg.str());
    }
    mean[p] = belief.mean.at(*cell);
    sigma[p] = std::sqrt(static_cast<double>(belief.variance.at(*cell)));
  }
  std::vector<std::vector<double>> result(n_samples,
                                          std::vector<double>(points.size()));
  for (int s = 0; s < n_samples; ++s) {
    const double xi = rng.normal();
    for (size_t p = 0; p < points.size(); ++p) {
      result[s][p] = mean[p] + xi * sigma[p];
    }
  }
  return result;
}

GroundTruthMap load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  int width = 0, height = 0;
  double resolution = 0, ox = 0, oy = 0;
  if (!(in >> width >> height >> resolution >> ox >> oy)) {
    throw std::runtime_error("bad grid header in " + path);
  }
  if (width != height) {
    throw std::runtime_error("grid file must be square: " + path);
  }
  GridSpec spec{width * resolution, resolution, ox, oy};
  if (!spec.valid()) throw std::runtime_error("invalid grid spec in " + path);
  GroundTruthMap map(spec);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      double h;
      if (!(in >> h)) throw std::runtime_error("short grid file: " + path);
      if (!std::isfinite(h)) {
        throw std::runtime_error("non-finite height in " + path);
      }
      map.elevation.at(i, j) = static_cast<float>(h);
    }
  }
  return map;
}

void save_grid(const std::string& path, const GridSpec& spec,
               const Grid2D<float>& layer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file: " + path);
  const int n = spec.cells_per_side();
  out << n << " " << n << " " << spec.resolution << " " << spec.origin_x
      << " " << spec.origin_y << "\n";
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out << layer.at(i, j) << (i + 1 == n ? '\n' : ' ');
    }
  }
}

void export_belief(const std::string& mean_path,
                   const std::string& variance_path,
                   const ElevationBelief& belief) {
  save_grid(mean_path, belief.spec, belief.mean);
  save_grid(variance_path, belief.spec, belief.variance);
}

}  // namespace offnav
