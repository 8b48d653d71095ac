#include "voxup/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "voxup/rng.hpp"

namespace voxup {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::vector<int> expanded_cells(const CellSampleSet& samples) {
  std::vector<int> out;
  out.reserve(std::size_t(samples.total()));
  for (const auto& [cell, mult] : samples.entries) {
    for (long t = 0; t < mult; ++t) out.push_back(cell);
  }
  return out;
}

std::vector<double> effective_density(const DensityField& field) {
  std::vector<double> out(field.density.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = double(field.density[c]) * sigmoid(double(field.occupancy_logit[c]));
  }
  return out;
}

CellSampleSet multinomial_sample(std::span<const double> weights, long trials,
                                 std::uint64_t seed) {
  if (trials < 1) throw Error("multinomial_sample: trials must be positive");
  std::vector<double> cdf;
  cdf.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw Error("multinomial_sample: negative weight");
    acc += w;
    cdf.push_back(acc);
  }
  if (acc <= 0.0) throw Error("empty density field");

  std::map<int, long> counts;
  for (long t = 0; t < trials; ++t) {
    const double u = counter_uniform(seed, std::uint64_t(t)) * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int cell = int(it - cdf.begin());
    if (cell >= int(cdf.size())) cell = int(cdf.size()) - 1;
    // Skip over zero-weight cells a boundary hit may land on.
    while (weights[static_cast<std::size_t>(cell)] == 0.0 && cell + 1 < int(cdf.size())) ++cell;
    counts[cell] += 1;
  }

  CellSampleSet set;
  set.entries.assign(counts.begin(), counts.end());
  return set;
}

std::vector<int> weighted_fps(std::span<const Vec3> positions,
                              std::span<const double> weights, int m) {
  const int n = int(positions.size());
  if (n == 0) throw Error("weighted_fps: empty candidates");
  if (m < 1 || m > n) throw Error("weighted_fps: m out of range");
  if (int(weights.size()) != n) throw Error("weighted_fps: weight/position size mismatch");

  int start = 0;
  for (int i = 1; i < n; ++i) {
    if (weights[static_cast<std::size_t>(i)] > weights[static_cast<std::size_t>(start)]) start = i;
  }

  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(m));
  selected.push_back(start);
  std::vector<double> min_d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    min_d2[static_cast<std::size_t>(i)] = sqdist(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(start)]);
  }
  min_d2[static_cast<std::size_t>(start)] = -1.0;

  while (int(selected.size()) < m) {
    int pick = -1;
    double pick_score = -1.0;
    for (int i = 0; i < n; ++i) {
      if (min_d2[static_cast<std::size_t>(i)] < 0.0) continue;
      const double score = weights[static_cast<std::size_t>(i)] * std::sqrt(min_d2[static_cast<std::size_t>(i)]);
      if (pick < 0 || score > pick_score) {
        pick_score = score;
        pick = i;
      }
    }
    selected.push_back(pick);
    const Vec3& p = positions[static_cast<std::size_t>(pick)];
    for (int i = 0; i < n; ++i) {
      if (min_d2[static_cast<std::size_t>(i)] < 0.0) continue;
      const double d2 = sqdist(positions[static_cast<std::size_t>(i)], p);
      if (d2 < min_d2[static_cast<std::size_t>(i)]) min_d2[static_cast<std::size_t>(i)] = d2;
    }
    min_d2[static_cast<std::size_t>(pick)] = -1.0;
  }
  return selected;
}

namespace {

std::vector<int> reduce_cells(const CellSampleSet& candidates,
                              std::span<const double> weights, bool use_weights,
                              const VoxelGrid& grid, int m) {
  if (candidates.entries.empty()) throw Error("fps_cells: empty candidates");
  const int n = int(candidates.entries.size());
  if (m < 1 || m > n) throw Error("fps_cells: m exceeds distinct candidate count");

  std::vector<Vec3> centers;
  std::vector<double> w;
  centers.reserve(static_cast<std::size_t>(n));
  w.reserve(static_cast<std::size_t>(n));
  for (const auto& [cell, mult] : candidates.entries) {
    centers.push_back(grid.cell_center(cell));
    w.push_back(use_weights ? weights[static_cast<std::size_t>(cell)] : 1.0);
  }
  const auto picked = weighted_fps(centers, w, m);
  std::vector<int> cells;
  cells.reserve(picked.size());
  for (int i : picked) cells.push_back(candidates.entries[static_cast<std::size_t>(i)].first);
  return cells;
}

}  // namespace

std::vector<int> dfps_cells(const CellSampleSet& candidates,
                            std::span<const double> weights, const VoxelGrid& grid, int m) {
  return reduce_cells(candidates, weights, true, grid, m);
}

std::vector<int> fps_cells(const CellSampleSet& candidates, const VoxelGrid& grid, int m) {
  return reduce_cells(candidates, {}, false, grid, m);
}

CellSampleSet threshold_topk_sample(const DensityField& field, long count) {
  if (count < 1) throw Error("threshold_topk_sample: count must be positive");
  std::vector<int> passing;
  for (int c = 0; c < int(field.density.size()); ++c) {
    if (sigmoid(double(field.occupancy_logit[static_cast<std::size_t>(c)])) > 0.5) passing.push_back(c);
  }
  if (passing.empty()) throw Error("threshold_topk_sample: no cell passes threshold");

  std::stable_sort(passing.begin(), passing.end(), [&](int a, int b) {
    const float da = field.density[static_cast<std::size_t>(a)];
    const float db = field.density[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });
  if (long(passing.size()) > count) passing.resize(static_cast<std::size_t>(count));

  std::vector<double> w;
  w.reserve(passing.size());
  for (int c : passing) w.push_back(double(field.density[static_cast<std::size_t>(c)]));
  return allocate_points(passing, w, count);
}

CellSampleSet allocate_points(std::span<const int> cells, std::span<const double> weights,
                              long total) {
  const int n = int(cells.size());
  if (n == 0) throw Error("allocate_points: no cells selected");
  if (int(weights.size()) != n) throw Error("allocate_points: weight/cell size mismatch");
  if (total < n) throw Error("allocate_points: total below one point per cell");

  double wsum = 0.0;
  for (double w : weights) wsum += w;

  std::vector<long> alloc(static_cast<std::size_t>(n), 0);
  if (wsum <= 0.0) {
    // Uniform fallback.
    for (int i = 0; i < n; ++i) alloc[static_cast<std::size_t>(i)] = total / n + (i < total % n ? 1 : 0);
  } else {
    std::vector<double> remainder(static_cast<std::size_t>(n));
    long assigned = 0;
    for (int i = 0; i < n; ++i) {
      const double quota = weights[static_cast<std::size_t>(i)] / wsum * double(total);
      alloc[static_cast<std::size_t>(i)] = long(std::floor(quota));
      remainder[static_cast<std::size_t>(i)] = quota - double(alloc[static_cast<std::size_t>(i)]);
      assigned += alloc[static_cast<std::size_t>(i)];
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (remainder[static_cast<std::size_t>(a)] != remainder[static_cast<std::size_t>(b)])
        return remainder[static_cast<std::size_t>(a)] > remainder[static_cast<std::size_t>(b)];
      return a < b;
    });
    for (long t = 0; t < total - assigned; ++t) {
      alloc[std::size_t(order[std::size_t(t % n)])] += 1;
    }
  }

  // Every selected cell gets at least one point; take from the largest.
  for (int i = 0; i < n; ++i) {
    if (alloc[static_cast<std::size_t>(i)] > 0) continue;
    int donor = 0;
    for (int j = 1; j < n; ++j) {
      if (alloc[static_cast<std::size_t>(j)] > alloc[static_cast<std::size_t>(donor)]) donor = j;
    }
    alloc[static_cast<std::size_t>(donor)] -= 1;
    alloc[static_cast<std::size_t>(i)] += 1;
  }

  CellSampleSet set;
  set.entries.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) set.entries.emplace_back(cells[static_cast<std::size_t>(i)], alloc[static_cast<std::size_t>(i)]);
  std::sort(set.entries.begin(), set.entries.end());
  return set;
}

CellSampleSet sample_cells(const DensityField& field, const SamplerConfig& config,
                           long input_points) {
  if (config.rate <= 0.0) throw Error("sample_cells: rate must be positive");
  if (config.multiplier < 1.0) throw Error("sample_cells: multiplier must be >= 1");
  if (input_points < 1) throw Error("sample_cells: input point count must be positive");

  const long target = std::llround(config.rate * double(input_points));
  if (target < 1) throw Error("sample_cells: target count is zero");

  if (config.method == SampleMethod::ThresholdTopK) {
    return threshold_topk_sample(field, target);
  }

  const auto weights = effective_density(field);

  if (config.method == SampleMethod::Multinomial) {
    return multinomial_sample(weights, target, config.seed);
  }

  const long trials = long(std::ceil(config.multiplier * config.rate * double(input_points)));
  const CellSampleSet candidates = multinomial_sample(weights, trials, config.seed);
  const int m = int(std::min<long>(long(candidates.entries.size()), target));
  const auto cells = config.method == SampleMethod::MultinomialDfps
                         ? dfps_cells(candidates, weights, field.grid, m)
                         : fps_cells(candidates, field.grid, m);
  std::vector<double> cell_weights;
  cell_weights.reserve(cells.size());
  for (int c : cells) cell_weights.push_back(weights[static_cast<std::size_t>(c)]);
  return allocate_points(cells, cell_weights, target);
}

}  // namespace voxup
