#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lpigrad/dataset.hpp"
#include "lpigrad/grid.hpp"
#include "lpigrad/oracle.hpp"
#include "lpigrad/weights.hpp"

namespace lpigrad {

struct WeightCacheKey {
  std::uint64_t dataset_hash = 0;
  InterpolationConfig config;

  static WeightCacheKey of(const Dataset& ds, const InterpolationConfig& config) {
    return {ds.hash(), config};
  }
};

inline constexpr std::uint32_t kWeightCacheVersion = 1;

/// Deterministic file name for a key, e.g. `weights_<hash>_m500_h0.01_l1_rectangular_upper.bin`.
std::string weight_cache_file_name(const WeightCacheKey& key);

/// LPIGRAD_CACHE_DIR when set, otherwise `fallback`.
std::filesystem::path weight_cache_dir(const std::filesystem::path& fallback);

void save_weight_cache(const std::filesystem::path& path, const WeightCacheKey& key,
                       const std::vector<WeightSet<double>>& weights);

/// nullopt on a missing file, a bad header, a version or key mismatch, or truncation.
std::optional<std::vector<WeightSet<double>>> load_weight_cache(const std::filesystem::path& path,
                                                                const WeightCacheKey& key);

/// Loads weights from `cache_dir` when present and valid, otherwise computes them.
LpiGradientOperator load_or_build_operator(const Dataset& ds, const InterpolationConfig& config,
                                           const std::optional<std::filesystem::path>& cache_dir);

}  // namespace lpigrad
