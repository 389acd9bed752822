#pragma once

#include "fmcorr/core/fmb.hpp"
#include "fmcorr/fmnet/network.hpp"
#include "fmcorr/io/manifest.hpp"

#include <filesystem>

namespace fmcorr {

/// Checkpoint layout: <dir>/checkpoint.txt manifest (q, blocks, seed,
/// iteration) plus one FMB matrix per weight and bias.
inline void save_checkpoint(const NetworkParams& params, long long iteration,
                            const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Manifest manifest;
  manifest.set_int("q", params.q);
  manifest.set_int("blocks", static_cast<long long>(params.blocks.size()));
  manifest.set_u64("seed", params.seed);
  manifest.set_int("iteration", iteration);
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    char name[64];
    const auto file = [&](const char* tensor) {
      std::snprintf(name, sizeof name, "block%02zu_%s.fmb", b, tensor);
      return (fs::path(dir) / name).string();
    };
    write_fmb_file(file("W1"), params.blocks[b].W1);
    write_fmb_file(file("W2"), params.blocks[b].W2);
    write_fmb_file(file("b1"), params.blocks[b].b1);
    write_fmb_file(file("b2"), params.blocks[b].b2);
  }
  manifest.write_file((fs::path(dir) / "checkpoint.txt").string());
}

inline NetworkParams load_checkpoint(const std::string& dir, long long* iteration_out = nullptr) {
  namespace fs = std::filesystem;
  const Manifest manifest = Manifest::read_file((fs::path(dir) / "checkpoint.txt").string());
  NetworkParams params;
  params.q = static_cast<int>(manifest.get_int("q"));
  params.seed = manifest.get_u64("seed");
  if (iteration_out) *iteration_out = manifest.get_int("iteration");
  const auto n_blocks = manifest.get_int("blocks");
  params.blocks.resize(static_cast<std::size_t>(n_blocks));
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    char name[64];
    const auto file = [&](const char* tensor) {
      std::snprintf(name, sizeof name, "block%02zu_%s.fmb", b, tensor);
      return (fs::path(dir) / name).string();
    };
    params.blocks[b].W1 = read_fmb_file(file("W1"));
    params.blocks[b].W2 = read_fmb_file(file("W2"));
    params.blocks[b].b1 = read_fmb_file(file("b1"));
    params.blocks[b].b2 = read_fmb_file(file("b2"));
    if (params.blocks[b].W1.rows() != params.q || params.blocks[b].W1.cols() != params.q)
      throw io_error("checkpoint: block tensor shape does not match q");
  }
  return params;
}

}  // namespace fmcorr
