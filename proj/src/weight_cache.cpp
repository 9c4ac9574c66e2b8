#include "lpigrad/weight_cache.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "lpigrad/errors.hpp"

namespace lpigrad {

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'P', 'I', 'W', 'G', 'H', 'T', '\0'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_key(std::ostream& out, const WeightCacheKey& key) {
  const auto& c = key.config;
  put(out, key.dataset_hash);
  put(out, static_cast<std::int32_t>(c.dim));
  put(out, static_cast<std::int32_t>(c.resolution));
  put(out, c.bandwidth);
  put(out, static_cast<std::int32_t>(c.order));
  put(out, static_cast<std::int32_t>(c.kernel));
  put(out, c.ridge);
  put(out, static_cast<std::int32_t>(c.convention));
}

bool key_matches(std::istream& in, const WeightCacheKey& key) {
  std::uint64_t hash;
  std::int32_t dim, resolution, order, kernel, convention;
  double bandwidth, ridge;
  if (!get(in, hash) || !get(in, dim) || !get(in, resolution) || !get(in, bandwidth) ||
      !get(in, order) || !get(in, kernel) || !get(in, ridge) || !get(in, convention))
    return false;
  const auto& c = key.config;
  return hash == key.dataset_hash && dim == c.dim && resolution == c.resolution &&
         bandwidth == c.bandwidth && order == c.order &&
         kernel == static_cast<std::int32_t>(c.kernel) && ridge == c.ridge &&
         convention == static_cast<std::int32_t>(c.convention);
}

}  // namespace

std::string weight_cache_file_name(const WeightCacheKey& key) {
  const auto& c = key.config;
  char buf[256];
  std::snprintf(buf, sizeof buf, "weights_%016llx_d%d_m%d_h%.17g_l%d_%s_%s_r%.17g.bin",
                static_cast<unsigned long long>(key.dataset_hash), c.dim, c.resolution, c.bandwidth,
                c.order, to_string(c.kernel).c_str(), to_string(c.convention).c_str(), c.ridge);
  return buf;
}

std::filesystem::path weight_cache_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("LPIGRAD_CACHE_DIR"); env && *env) return env;
  return fallback;
}

void save_weight_cache(const std::filesystem::path& path, const WeightCacheKey& key,
                       const std::vector<WeightSet<double>>& weights) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write weight cache " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put(out, kWeightCacheVersion);
  put_key(out, key);
  put(out, static_cast<std::uint64_t>(weights.size()));
  for (const auto& ws : weights) {
    put(out, static_cast<std::uint32_t>(ws.point.size()));
    out.write(reinterpret_cast<const char*>(ws.point.data()),
              static_cast<std::streamsize>(sizeof(double) * ws.point.size()));
    put(out, static_cast<std::uint64_t>(ws.indices.size()));
    for (std::size_t k = 0; k < ws.indices.size(); ++k) {
      put(out, static_cast<std::int64_t>(ws.indices[k]));
      put(out, ws.values(static_cast<Eigen::Index>(k)));
    }
  }
  if (!out) throw IoError("error writing weight cache " + path.string());
}

std::optional<std::vector<WeightSet<double>>> load_weight_cache(const std::filesystem::path& path,
                                                                const WeightCacheKey& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) return std::nullopt;
  std::uint32_t version;
  if (!get(in, version) || version != kWeightCacheVersion) return std::nullopt;
  if (!key_matches(in, key)) return std::nullopt;

  std::uint64_t count;
  if (!get(in, count)) return std::nullopt;
  std::vector<WeightSet<double>> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  const auto grid_size = static_cast<std::int64_t>(std::pow(key.config.resolution, key.config.dim));
  for (std::uint64_t w = 0; w < count; ++w) {
    std::uint32_t dim;
    if (!get(in, dim) || static_cast<int>(dim) != key.config.dim) return std::nullopt;
    WeightSet<double> ws;
    ws.point.resize(dim);
    if (!in.read(reinterpret_cast<char*>(ws.point.data()), sizeof(double) * dim)) return std::nullopt;
    std::uint64_t support;
    if (!get(in, support) || support > static_cast<std::uint64_t>(grid_size)) return std::nullopt;
    ws.indices.resize(support);
    ws.values.resize(static_cast<Eigen::Index>(support));
    for (std::uint64_t k = 0; k < support; ++k) {
      std::int64_t idx;
      double v;
      if (!get(in, idx) || !get(in, v) || idx < 0 || idx >= grid_size) return std::nullopt;
      ws.indices[k] = idx;
      ws.values(static_cast<Eigen::Index>(k)) = v;
    }
    out.push_back(std::move(ws));
  }
  return out;
}

LpiGradientOperator load_or_build_operator(const Dataset& ds, const InterpolationConfig& config,
                                           const std::optional<std::filesystem::path>& cache_dir) {
  if (cache_dir) {
    const auto key = WeightCacheKey::of(ds, config);
    if (auto cached = load_weight_cache(*cache_dir / weight_cache_file_name(key), key);
        cached && static_cast<Eigen::Index>(cached->size()) == ds.size())
      return LpiGradientOperator(ds, config, std::move(*cached));
  }
  return LpiGradientOperator(ds, config);
}

}  // namespace lpigrad
