// fmcorr: functional-map correspondence pipeline CLI.
//
// Subcommands: precompute, train, match, upscale, eval, curves.
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.

#include "fmcorr/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using fmcorr::PipelineConfig;

struct CommonFlags {
  std::string config_path;
  std::string cache_root;
  long long k = -1;
  long long seed = -1;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value configuration file");
  cmd->add_option("--cache", flags.cache_root, "cache root (overrides FMCORR_CACHE)");
  cmd->add_option("--k", flags.k, "spectral truncation order");
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_flag("--force", flags.force, "rebuild cache entries even if present");
}

PipelineConfig build_config(const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty())
    cfg = PipelineConfig::from_config(fmcorr::KeyValueConfig::parse_file(flags.config_path));
  if (!flags.cache_root.empty()) cfg.cache_root = flags.cache_root;
  if (flags.k >= 0) cfg.k = flags.k;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  cfg.force = flags.force;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional-map correspondence toolkit"};
  app.require_subcommand(1);

  // precompute
  auto* precompute = app.add_subcommand("precompute", "build per-mesh spectral/descriptor cache");
  CommonFlags pre_flags;
  std::vector<std::string> pre_meshes;
  precompute->add_option("meshes", pre_meshes, "mesh files (OFF/OBJ/PLY)")->required();
  add_common(precompute, pre_flags);

  // train
  auto* train_cmd = app.add_subcommand("train", "train the correspondence network");
  CommonFlags train_flags;
  std::string train_pairs, train_out = "train-out", train_loss;
  long long train_iters = -1, train_batch = -1, train_blocks = -1;
  double train_ridge = -1.0, train_alpha = -1.0;
  bool train_timing = false;
  train_cmd->add_option("pairs", train_pairs, "pair list: src tgt gt [gt_reverse] per line")->required();
  train_cmd->add_option("--out", train_out, "output directory");
  train_cmd->add_option("--iters", train_iters, "training iterations");
  train_cmd->add_option("--batch", train_batch, "matches per mini-batch");
  train_cmd->add_option("--loss", train_loss, "loss mode")->check(CLI::IsMember({"soft_error", "siamese"}));
  train_cmd->add_option("--ridge", train_ridge, "fixed ridge for the training solve (default adaptive)");
  train_cmd->add_option("--alpha", train_alpha, "ADAM learning rate");
  train_cmd->add_option("--blocks", train_blocks, "residual block count");
  train_cmd->add_flag("--timing", train_timing, "record wall-clock times in the loss CSV");
  add_common(train_cmd, train_flags);

  // match
  auto* match_cmd = app.add_subcommand("match", "compute a dense correspondence for a shape pair");
  CommonFlags match_flags;
  std::string match_src, match_tgt, match_ckpt, match_out = "match-out";
  double match_ridge = -1.0;
  bool match_raw = false;
  match_cmd->add_option("src", match_src, "source mesh")->required();
  match_cmd->add_option("tgt", match_tgt, "target mesh")->required();
  match_cmd->add_option("--checkpoint", match_ckpt, "trained checkpoint directory");
  match_cmd->add_flag("--raw", match_raw, "use raw SHOT descriptors (no network)");
  match_cmd->add_option("--ridge", match_ridge, "ridge for the functional-map solve (default 0)");
  match_cmd->add_option("--out", match_out, "output directory");
  add_common(match_cmd, match_flags);

  // upscale
  auto* up_cmd = app.add_subcommand("upscale", "transfer a low-resolution map to full resolution");
  CommonFlags up_flags;
  std::string up_low_src, up_low_tgt, up_full_src, up_full_tgt, up_map, up_out = "upscale-out";
  double up_rho = -1.0;
  long long up_iters = -1;
  double up_tol_primal = -1.0, up_tol_dual = -1.0;
  up_cmd->add_option("low_src", up_low_src, "low-resolution source mesh")->required();
  up_cmd->add_option("low_tgt", up_low_tgt, "low-resolution target mesh")->required();
  up_cmd->add_option("full_src", up_full_src, "full-resolution source mesh")->required();
  up_cmd->add_option("full_tgt", up_full_tgt, "full-resolution target mesh")->required();
  up_cmd->add_option("low_map", up_map, "low-resolution point map file")->required();
  up_cmd->add_option("--rho", up_rho, "ADMM penalty");
  up_cmd->add_option("--iters", up_iters, "ADMM iteration cap");
  up_cmd->add_option("--tol-primal", up_tol_primal, "primal residual tolerance");
  up_cmd->add_option("--tol-dual", up_tol_dual, "dual residual tolerance");
  up_cmd->add_option("--out", up_out, "output directory");
  add_common(up_cmd, up_flags);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "geodesic-error evaluation of a point map");
  CommonFlags eval_flags;
  std::string eval_map, eval_gt, eval_mesh, eval_out = "eval-out";
  long long eval_sample = -1;
  eval_cmd->add_option("map", eval_map, "predicted point map")->required();
  eval_cmd->add_option("gt", eval_gt, "ground-truth point map")->required();
  eval_cmd->add_option("target_mesh", eval_mesh, "target mesh")->required();
  eval_cmd->add_option("--sample", eval_sample, "evaluate a random vertex subsample of this size");
  eval_cmd->add_option("--out", eval_out, "output directory");
  add_common(eval_cmd, eval_flags);

  // curves
  auto* curves_cmd = app.add_subcommand("curves", "CMC curve and descriptor distance histogram");
  CommonFlags curves_flags;
  std::string curves_src, curves_tgt, curves_gt, curves_ckpt, curves_out = "curves-out";
  long long curves_rank = -1;
  curves_cmd->add_option("src", curves_src, "source mesh")->required();
  curves_cmd->add_option("tgt", curves_tgt, "target mesh")->required();
  curves_cmd->add_option("gt", curves_gt, "ground-truth point map")->required();
  curves_cmd->add_option("--checkpoint", curves_ckpt, "refine descriptors with this checkpoint");
  curves_cmd->add_option("--max-rank", curves_rank, "largest CMC rank");
  curves_cmd->add_option("--out", curves_out, "output directory");
  add_common(curves_cmd, curves_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (precompute->parsed()) {
      return fmcorr::cmd_precompute(pre_meshes, build_config(pre_flags));
    }
    if (train_cmd->parsed()) {
      PipelineConfig cfg = build_config(train_flags);
      if (train_iters >= 0) cfg.iters = static_cast<int>(train_iters);
      if (train_batch > 0) cfg.batch_matches = static_cast<int>(train_batch);
      if (!train_loss.empty()) cfg.loss = train_loss;
      if (train_ridge >= 0.0) cfg.ridge = train_ridge;
      if (train_alpha > 0.0) cfg.alpha = train_alpha;
      if (train_blocks > 0) cfg.n_blocks = static_cast<int>(train_blocks);
      cfg.timing = train_timing;
      return fmcorr::cmd_train(train_pairs, cfg, train_out);
    }
    if (match_cmd->parsed()) {
      PipelineConfig cfg = build_config(match_flags);
      cfg.raw = match_raw;
      if (match_ridge >= 0.0) cfg.ridge = match_ridge;
      return fmcorr::cmd_match(match_src, match_tgt, match_ckpt, cfg, match_out);
    }
    if (up_cmd->parsed()) {
      PipelineConfig cfg = build_config(up_flags);
      if (up_rho > 0.0) cfg.rho = up_rho;
      if (up_iters > 0) cfg.admm_max_iter = static_cast<int>(up_iters);
      if (up_tol_primal > 0.0) cfg.tol_primal = up_tol_primal;
      if (up_tol_dual > 0.0) cfg.tol_dual = up_tol_dual;
      return fmcorr::cmd_upscale(up_low_src, up_low_tgt, up_full_src, up_full_tgt, up_map, cfg, up_out);
    }
    if (eval_cmd->parsed()) {
      PipelineConfig cfg = build_config(eval_flags);
      if (eval_sample >= 0) cfg.sample = eval_sample;
      return fmcorr::cmd_eval(eval_map, eval_gt, eval_mesh, cfg, eval_out);
    }
    if (curves_cmd->parsed()) {
      PipelineConfig cfg = build_config(curves_flags);
      if (curves_rank > 0) cfg.max_rank = curves_rank;
      return fmcorr::cmd_curves(curves_src, curves_tgt, curves_gt, curves_ckpt, cfg, curves_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const fmcorr::io_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const fmcorr::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
