#pragma once

#include "fmcorr/core/fmb.hpp"
#include "fmcorr/core/mesh_io.hpp"
#include "fmcorr/descriptors/shot.hpp"
#include "fmcorr/io/manifest.hpp"
#include "fmcorr/spectral/projection.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

namespace fmcorr {

/// Advisory lock over a cache directory; concurrent CLI invocations block on
/// each other instead of interleaving writes.
class CacheLock {
 public:
  explicit CacheLock(const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / ".lock").string();
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~CacheLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

 private:
  int fd_ = -1;
};

struct PrecomputeSettings {
  Index k = 60;
  double shot_radius_frac = 0.05;
};

inline std::string resolve_cache_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FMCORR_CACHE"); env && *env) return env;
  return "fmcorr-cache";
}

inline std::uint64_t precompute_config_hash(const PrecomputeSettings& settings) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "k=%lld;radius_frac=%.17g", static_cast<long long>(settings.k),
                settings.shot_radius_frac);
  return fnv1a(buf);
}

inline std::string cache_dir_for(const std::string& mesh_path, const std::string& root,
                                 std::uint64_t mesh_checksum) {
  const std::string stem = std::filesystem::path(mesh_path).stem().string();
  return (std::filesystem::path(root) / (stem + "-" + hex_u64(mesh_checksum))).string();
}

namespace detail {

inline Matrix stiffness_to_triplets(const SparseMatrix& w) {
  Matrix trips(w.nonZeros(), 3);
  Index r = 0;
  for (Index c = 0; c < w.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(w, c); it; ++it) {
      trips(r, 0) = static_cast<double>(it.row());
      trips(r, 1) = static_cast<double>(it.col());
      trips(r, 2) = it.value();
      ++r;
    }
  return trips;
}

inline SparseMatrix triplets_to_stiffness(const Matrix& trips, Index n) {
  std::vector<Eigen::Triplet<double>> list;
  list.reserve(static_cast<std::size_t>(trips.rows()));
  for (Index r = 0; r < trips.rows(); ++r)
    list.emplace_back(static_cast<int>(trips(r, 0)), static_cast<int>(trips(r, 1)), trips(r, 2));
  SparseMatrix w(n, n);
  w.setFromTriplets(list.begin(), list.end());
  return w;
}

inline const char* const kCacheArtifacts[] = {"phi.fmb", "lambda.fmb", "mass.fmb",
                                              "stiffness.fmb", "shot.fmb"};

inline void verify_cache_artifacts(const std::string& dir, const Manifest& manifest) {
  namespace fs = std::filesystem;
  for (const char* name : kCacheArtifacts) {
    const std::string path = (fs::path(dir) / name).string();
    if (!fs::exists(path)) throw io_error("cache artifact missing: " + path);
    const std::uint64_t expect = manifest.get_u64(std::string("checksum.") + name);
    const std::uint64_t got = fnv1a_file(path);
    if (expect != got)
      throw io_error("cache checksum mismatch for " + path + " (expected " + hex_u64(expect) +
                     ", found " + hex_u64(got) + ")");
  }
}

}  // namespace detail

struct CacheReport {
  std::string dir;
  bool was_cached = false;
  Index k_effective = 0;
};

/// Builds (or validates) the per-mesh cache: Laplacian, eigenbasis, SHOT
/// field, and a manifest with content checksums. Re-running with unchanged
/// inputs is a no-op; a config change on an existing entry is reported as a
/// conflict unless force is set.
inline CacheReport precompute_mesh(const std::string& mesh_path, const PrecomputeSettings& settings,
                                   const std::string& cache_root, bool force = false) {
  namespace fs = std::filesystem;
  const std::uint64_t mesh_checksum = fnv1a_file(mesh_path);
  const std::uint64_t config_hash = precompute_config_hash(settings);
  const std::string dir = cache_dir_for(mesh_path, cache_root, mesh_checksum);
  const std::string manifest_path = (fs::path(dir) / "manifest.txt").string();

  // Entries for distinct meshes are independent, so the lock is per entry.
  CacheLock lock(dir);

  if (fs::exists(manifest_path)) {
    const Manifest manifest = Manifest::read_file(manifest_path);
    const bool same_config = manifest.get_u64("config_hash") == config_hash;
    const bool same_mesh = manifest.get_u64("mesh_checksum") == mesh_checksum;
    if (same_config && same_mesh && !force) {
      detail::verify_cache_artifacts(dir, manifest);
      CacheReport report;
      report.dir = dir;
      report.was_cached = true;
      report.k_effective = manifest.get_int("k");
      return report;
    }
    if (!force && (!same_config || !same_mesh))
      throw io_error("stale cache entry at " + dir +
                     " (config or mesh changed); re-run with --force to rebuild");
  }

  const TriMesh mesh = load_mesh_file(mesh_path);
  const LaplaceOperator op = build_fem_laplacian(mesh);
  const Index k_eff = std::min<Index>(settings.k, mesh.n_vertices());
  const SpectralBasis basis = compute_eigenbasis(op, k_eff);
  const double radius = default_shot_radius(mesh, settings.shot_radius_frac);
  const DescriptorField shot = compute_shot(mesh, radius);

  fs::create_directories(dir);
  write_fmb_file((fs::path(dir) / "phi.fmb").string(), basis.eigenfunctions);
  write_fmb_file((fs::path(dir) / "lambda.fmb").string(), basis.eigenvalues);
  write_fmb_file((fs::path(dir) / "mass.fmb").string(), basis.mass);
  write_fmb_file((fs::path(dir) / "stiffness.fmb").string(), detail::stiffness_to_triplets(op.stiffness));
  write_fmb_file((fs::path(dir) / "shot.fmb").string(), shot.values);

  Manifest manifest;
  manifest.set("producing_command", "precompute");
  manifest.set("mesh_file", fs::path(mesh_path).filename().string());
  manifest.set_u64("mesh_checksum", mesh_checksum);
  manifest.set_u64("config_hash", config_hash);
  manifest.set_int("n", mesh.n_vertices());
  manifest.set_int("k", k_eff);
  char radius_buf[32];
  std::snprintf(radius_buf, sizeof radius_buf, "%.17g", radius);
  manifest.set("shot_radius", radius_buf);
  manifest.set_int("shot_zero_descriptors", shot.meta.zero_descriptor_count);
  for (const char* name : detail::kCacheArtifacts)
    manifest.set_u64(std::string("checksum.") + name, fnv1a_file((fs::path(dir) / name).string()));
  manifest.write_file(manifest_path);

  CacheReport report;
  report.dir = dir;
  report.was_cached = false;
  report.k_effective = k_eff;
  return report;
}

struct CachedShape {
  TriMesh mesh;
  SpectralBasis basis;
  DescriptorField shot;
  std::uint64_t mesh_checksum = 0;
};

/// Loads and checksum-verifies a cache entry produced by precompute_mesh.
inline CachedShape load_cached_shape(const std::string& mesh_path, const std::string& cache_root) {
  namespace fs = std::filesystem;
  const std::uint64_t mesh_checksum = fnv1a_file(mesh_path);
  const std::string dir = cache_dir_for(mesh_path, cache_root, mesh_checksum);
  const std::string manifest_path = (fs::path(dir) / "manifest.txt").string();
  if (!fs::exists(manifest_path))
    throw io_error("no cache entry for '" + mesh_path + "'; run precompute first");
  const Manifest manifest = Manifest::read_file(manifest_path);
  detail::verify_cache_artifacts(dir, manifest);

  CachedShape shape;
  shape.mesh = load_mesh_file(mesh_path);
  shape.mesh_checksum = mesh_checksum;
  shape.basis.eigenfunctions = read_fmb_file((fs::path(dir) / "phi.fmb").string());
  shape.basis.eigenvalues = read_fmb_file((fs::path(dir) / "lambda.fmb").string());
  shape.basis.mass = read_fmb_file((fs::path(dir) / "mass.fmb").string());
  shape.basis.k = shape.basis.eigenfunctions.cols();
  shape.basis.id = hex_u64(mesh_checksum);
  shape.shot.values = read_fmb_file((fs::path(dir) / "shot.fmb").string());
  shape.shot.q = static_cast<int>(shape.shot.values.cols());
  shape.shot.meta.radius = std::stod(manifest.get("shot_radius"));
  shape.shot.meta.zero_descriptor_count = static_cast<int>(manifest.get_int("shot_zero_descriptors"));
  return shape;
}

}  // namespace fmcorr
