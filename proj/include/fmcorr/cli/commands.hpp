#pragma once

#include "fmcorr/cli/cache.hpp"
#include "fmcorr/eval/curves.hpp"
#include "fmcorr/fmnet/checkpoint.hpp"
#include "fmcorr/fmnet/train.hpp"
#include "fmcorr/geodesics/geodesics.hpp"
#include "fmcorr/io/config.hpp"
#include "fmcorr/upscale/upscale.hpp"

#include <json.hpp>

#include <filesystem>
#include <future>
#include <iostream>
#include <set>

namespace fmcorr {

struct PipelineConfig {
  // spectral / descriptors
  Index k = 60;
  double shot_radius_frac = 0.05;
  // training
  int iters = 200;
  int batch_matches = 1000;
  std::uint64_t seed = 7;
  double alpha = 1e-3, beta1 = 0.9, beta2 = 0.999, eps_adam = 1e-8;
  std::optional<double> ridge;  // empty: adaptive in training, 0 in matching
  std::string loss = "soft_error";
  int n_blocks = 7;
  double siamese_gamma = 0.5, siamese_margin = 1.0;
  // admm
  double rho = 1.0;
  int admm_max_iter = 1000;
  double tol_primal = 1e-8, tol_dual = 1e-8;
  // eval
  int thresholds = 256;
  double max_threshold = 0.25;
  long long sample = 0;  // 0 = all source vertices
  int hist_bins = 64;
  long long max_rank = 0;  // 0 = min(100, n_target)
  // plumbing
  std::string cache_root;  // resolved lazily
  bool force = false;
  bool raw = false;
  bool timing = false;

  static PipelineConfig from_config(const KeyValueConfig& file) {
    PipelineConfig cfg;
    cfg.k = file.get_int("spectral.k", cfg.k);
    cfg.shot_radius_frac = file.get_double("shot.radius_frac", cfg.shot_radius_frac);
    cfg.iters = static_cast<int>(file.get_int("train.iters", cfg.iters));
    cfg.batch_matches = static_cast<int>(file.get_int("train.batch_matches", cfg.batch_matches));
    cfg.seed = static_cast<std::uint64_t>(file.get_int("train.seed", static_cast<long long>(cfg.seed)));
    cfg.alpha = file.get_double("train.alpha", cfg.alpha);
    cfg.beta1 = file.get_double("train.beta1", cfg.beta1);
    cfg.beta2 = file.get_double("train.beta2", cfg.beta2);
    cfg.eps_adam = file.get_double("train.eps", cfg.eps_adam);
    if (file.has("train.ridge")) cfg.ridge = file.get_double("train.ridge", 0.0);
    cfg.loss = file.get_string("train.loss", cfg.loss);
    cfg.n_blocks = static_cast<int>(file.get_int("train.blocks", cfg.n_blocks));
    cfg.siamese_gamma = file.get_double("train.gamma", cfg.siamese_gamma);
    cfg.siamese_margin = file.get_double("train.margin", cfg.siamese_margin);
    cfg.rho = file.get_double("admm.rho", cfg.rho);
    cfg.admm_max_iter = static_cast<int>(file.get_int("admm.max_iter", cfg.admm_max_iter));
    cfg.tol_primal = file.get_double("admm.tol_primal", cfg.tol_primal);
    cfg.tol_dual = file.get_double("admm.tol_dual", cfg.tol_dual);
    cfg.thresholds = static_cast<int>(file.get_int("eval.thresholds", cfg.thresholds));
    cfg.max_threshold = file.get_double("eval.max_threshold", cfg.max_threshold);
    cfg.sample = file.get_int("eval.sample", cfg.sample);
    cfg.hist_bins = static_cast<int>(file.get_int("eval.hist_bins", cfg.hist_bins));
    cfg.max_rank = file.get_int("eval.max_rank", cfg.max_rank);
    cfg.cache_root = file.get_string("cache.root", cfg.cache_root);
    return cfg;
  }

  std::uint64_t hash() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "k=%lld;rf=%.17g;it=%d;bm=%d;seed=%llu;a=%.17g;b1=%.17g;b2=%.17g;e=%.17g;"
                  "ridge=%.17g;loss=%s;nb=%d;g=%.17g;m=%.17g;rho=%.17g;ami=%d;tp=%.17g;td=%.17g;raw=%d",
                  static_cast<long long>(k), shot_radius_frac, iters, batch_matches,
                  static_cast<unsigned long long>(seed), alpha, beta1, beta2, eps_adam,
                  ridge ? *ridge : -1.0, loss.c_str(), n_blocks, siamese_gamma, siamese_margin,
                  rho, admm_max_iter, tol_primal, tol_dual, raw ? 1 : 0);
    return fnv1a(buf);
  }

  PrecomputeSettings precompute_settings() const { return {k, shot_radius_frac}; }
  std::string resolved_cache_root() const { return resolve_cache_root(cache_root); }
};

namespace detail {

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << body;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_sidecar(const std::string& artifact_path, const std::string& command,
                          const PipelineConfig& cfg,
                          const std::vector<std::pair<std::string, std::uint64_t>>& inputs) {
  Manifest m;
  m.set("producing_command", command);
  m.set_u64("config_hash", cfg.hash());
  for (const auto& [name, checksum] : inputs) m.set_u64("input." + name, checksum);
  m.set_u64("artifact_checksum", fnv1a_file(artifact_path));
  m.write_file(artifact_path + ".manifest.txt");
}

inline void write_curve_csv(const std::string& path, const CurveSeries& curve,
                            const char* x_name) {
  std::string body = std::string(x_name) + ",fraction\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
    body += fmt_double(curve.thresholds[i]) + "," + fmt_double(curve.fractions[i]) + "\n";
  write_text_file(path, body);
}

inline void write_curve_json(const std::string& path, const CurveSeries& curve,
                             const char* x_name) {
  nlohmann::json j;
  j[x_name] = curve.thresholds;
  j["fraction"] = curve.fractions;
  write_text_file(path, j.dump(2) + "\n");
}

// Distance rows at every distinct ground-truth target referenced by the map.
inline DistanceRows rows_at_truth_targets(const TriMesh& tgt_mesh, const PointMap& truth,
                                          const std::vector<int>* sources = nullptr) {
  std::set<int> targets;
  if (sources) {
    for (int s : *sources) targets.insert(truth.assignments[static_cast<std::size_t>(s)]);
  } else {
    for (int t : truth.assignments) targets.insert(t);
  }
  return geodesic_distances(tgt_mesh, std::vector<int>(targets.begin(), targets.end()));
}

inline Matrix refined_or_raw_descriptors(const CachedShape& shape,
                                         const NetworkParams* checkpoint) {
  if (!checkpoint) return shape.shot.values;
  return forward(*checkpoint, shape.shot.values);
}

}  // namespace detail

/// precompute: per-mesh spectral + descriptor cache. Meshes are independent
/// and build concurrently; reports print in input order.
inline int cmd_precompute(const std::vector<std::string>& mesh_paths, const PipelineConfig& cfg,
                          std::ostream& out = std::cout) {
  const std::string root = cfg.resolved_cache_root();
  std::vector<std::future<CacheReport>> jobs;
  jobs.reserve(mesh_paths.size());
  for (const auto& path : mesh_paths)
    jobs.push_back(std::async(mesh_paths.size() > 1 ? std::launch::async : std::launch::deferred,
                              [&, path] {
                                return precompute_mesh(path, cfg.precompute_settings(), root, cfg.force);
                              }));
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CacheReport report = jobs[i].get();
    for (const char* artifact : detail::kCacheArtifacts)
      out << mesh_paths[i] << ": " << artifact << ' ' << (report.was_cached ? "cached" : "computed")
          << '\n';
    out << mesh_paths[i] << ": k=" << report.k_effective << " -> " << report.dir << '\n';
  }
  return 0;
}

struct TrainPairSpec {
  std::string src_mesh, tgt_mesh, gt_file;
  std::string reverse_gt_file;  // optional
};

inline std::vector<TrainPairSpec> parse_pair_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open pair list '" + path + "'");
  std::vector<TrainPairSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream iss(line);
    TrainPairSpec spec;
    if (!(iss >> spec.src_mesh >> spec.tgt_mesh >> spec.gt_file)) continue;
    iss >> spec.reverse_gt_file;
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw io_error("pair list '" + path + "' holds no usable lines");
  return specs;
}

/// train: build TrainPairs from cached shapes + ground-truth index files, run
/// the mini-batch loop, store checkpoint + loss CSV.
inline int cmd_train(const std::string& pair_list_path, const PipelineConfig& cfg,
                     const std::string& out_dir, std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  const std::string root = cfg.resolved_cache_root();
  const auto specs = parse_pair_list(pair_list_path);

  std::vector<TrainPair> pairs;
  Index k_train = cfg.k;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;

  const auto add_direction = [&](const CachedShape& src, const CachedShape& tgt,
                                 const std::string& gt_file) {
    const PointMap truth = load_point_map_file(gt_file);
    if (static_cast<Index>(truth.assignments.size()) != src.mesh.n_vertices())
      throw io_error("ground truth '" + gt_file + "' does not cover the source mesh");
    for (int t : truth.assignments)
      if (t < 0 || t >= tgt.mesh.n_vertices())
        throw io_error("ground truth '" + gt_file + "' holds an out-of-range target index");
    TrainPair pair;
    pair.src.basis = src.basis;
    pair.src.descriptors = src.shot.values;
    pair.tgt.basis = tgt.basis;
    pair.tgt.descriptors = tgt.shot.values;
    pair.truth = truth;
    pair.tgt_rows = detail::rows_at_truth_targets(tgt.mesh, truth);
    pairs.push_back(std::move(pair));
    inputs.emplace_back(fs::path(gt_file).filename().string(), fnv1a_file(gt_file));
  };

  for (const auto& spec : specs) {
    const CachedShape src = load_cached_shape(spec.src_mesh, root);
    const CachedShape tgt = load_cached_shape(spec.tgt_mesh, root);
    k_train = std::min({k_train, src.basis.k, tgt.basis.k});
    add_direction(src, tgt, spec.gt_file);
    if (!spec.reverse_gt_file.empty()) add_direction(tgt, src, spec.reverse_gt_file);
    inputs.emplace_back(fs::path(spec.src_mesh).filename().string(), src.mesh_checksum);
    inputs.emplace_back(fs::path(spec.tgt_mesh).filename().string(), tgt.mesh_checksum);
  }
  if (k_train < cfg.k)
    log << "note: k clamped to " << k_train << " (cached basis size)\n";

  TrainConfig tc;
  tc.k = k_train;
  tc.batch_matches = cfg.batch_matches;
  tc.iters = cfg.iters;
  tc.seed = cfg.seed;
  if (cfg.ridge) tc.ridge.value = cfg.ridge;
  tc.loss = cfg.loss == "siamese" ? LossKind::siamese : LossKind::soft_error;
  tc.adam = {cfg.alpha, cfg.beta1, cfg.beta2, cfg.eps_adam};
  tc.n_blocks = cfg.n_blocks;
  tc.siamese_gamma = cfg.siamese_gamma;
  tc.siamese_margin = cfg.siamese_margin;

  const TrainResult result = train(pairs, tc);

  fs::create_directories(out_dir);
  save_checkpoint(result.params, cfg.iters, out_dir);
  Manifest info;
  info.set("producing_command", "train");
  info.set_int("k", k_train);
  info.set_u64("config_hash", cfg.hash());
  info.set("loss", cfg.loss);
  info.write_file((fs::path(out_dir) / "train_info.txt").string());

  std::string csv = "iter,loss,wall_ms\n";
  for (const auto& entry : result.log)
    csv += std::to_string(entry.iter) + "," + detail::fmt_double(entry.loss) + "," +
           std::to_string(cfg.timing ? entry.wall_ms : 0) + "\n";
  const std::string csv_path = (fs::path(out_dir) / "loss.csv").string();
  detail::write_text_file(csv_path, csv);
  detail::write_sidecar(csv_path, "train", cfg, inputs);
  log << "trained " << cfg.iters << " iterations over " << pairs.size() << " directed pairs -> "
      << out_dir << '\n';
  return 0;
}

/// match: raw SHOT or checkpoint-refined descriptors -> C -> dense point map.
inline int cmd_match(const std::string& src_mesh, const std::string& tgt_mesh,
                     const std::string& checkpoint_dir, const PipelineConfig& cfg,
                     const std::string& out_dir, std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  if (!cfg.raw && checkpoint_dir.empty())
    throw std::invalid_argument("match: refined mode needs --checkpoint (or pass --raw)");

  const std::string root = cfg.resolved_cache_root();
  const CachedShape src = load_cached_shape(src_mesh, root);
  const CachedShape tgt = load_cached_shape(tgt_mesh, root);

  std::optional<NetworkParams> checkpoint;
  Index k_eff = std::min({cfg.k, src.basis.k, tgt.basis.k});
  if (!cfg.raw) {
    checkpoint = load_checkpoint(checkpoint_dir);
    if (checkpoint->q != src.shot.q)
      throw io_error("checkpoint q=" + std::to_string(checkpoint->q) +
                     " does not match descriptor dimension " + std::to_string(src.shot.q));
    const std::string info_path = (fs::path(checkpoint_dir) / "train_info.txt").string();
    if (fs::exists(info_path)) {
      const Index k_ckpt = Manifest::read_file(info_path).get_int("k");
      if (k_ckpt > std::min(src.basis.k, tgt.basis.k))
        throw io_error("checkpoint was trained with k=" + std::to_string(k_ckpt) +
                       " but the cache only holds k=" +
                       std::to_string(std::min(src.basis.k, tgt.basis.k)));
      k_eff = k_ckpt;
    }
  }

  const SpectralBasis src_basis = truncate_basis(src.basis, k_eff);
  const SpectralBasis tgt_basis = truncate_basis(tgt.basis, k_eff);
  const Matrix f = detail::refined_or_raw_descriptors(src, checkpoint ? &*checkpoint : nullptr);
  const Matrix g = detail::refined_or_raw_descriptors(tgt, checkpoint ? &*checkpoint : nullptr);

  FunctionalMap map = solve_fmap(project(src_basis, f), project(tgt_basis, g),
                                 cfg.ridge.value_or(0.0));
  map.source_basis_id = src_basis.id;
  map.target_basis_id = tgt_basis.id;
  const PointMap pmap = recover_point_map(src_basis, tgt_basis, map);

  fs::create_directories(out_dir);
  const std::string map_path = (fs::path(out_dir) / "map.txt").string();
  const std::string c_path = (fs::path(out_dir) / "C.fmb").string();
  save_point_map_file(pmap, map_path);
  write_fmb_file(c_path, map.C);
  const std::vector<std::pair<std::string, std::uint64_t>> inputs = {
      {fs::path(src_mesh).filename().string(), src.mesh_checksum},
      {fs::path(tgt_mesh).filename().string(), tgt.mesh_checksum}};
  detail::write_sidecar(map_path, "match", cfg, inputs);
  detail::write_sidecar(c_path, "match", cfg, inputs);
  log << "match: k=" << k_eff << (cfg.raw ? " raw" : " refined") << " -> " << map_path << '\n';
  return 0;
}

/// upscale: transfer a low-resolution map to the full meshes via the robust
/// l2,1 fit; emits the dense map, C*, and a convergence CSV.
inline int cmd_upscale(const std::string& low_src_mesh, const std::string& low_tgt_mesh,
                       const std::string& full_src_mesh, const std::string& full_tgt_mesh,
                       const std::string& low_map_path, const PipelineConfig& cfg,
                       const std::string& out_dir, std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  const std::string root = cfg.resolved_cache_root();
  const TriMesh low_src = load_mesh_file(low_src_mesh);
  const TriMesh low_tgt = load_mesh_file(low_tgt_mesh);
  const CachedShape full_src = load_cached_shape(full_src_mesh, root);
  const CachedShape full_tgt = load_cached_shape(full_tgt_mesh, root);
  const PointMap low_map = load_point_map_file(low_map_path);
  if (static_cast<Index>(low_map.assignments.size()) != low_src.n_vertices())
    throw io_error("low map size does not match the low-resolution source mesh");

  const Index k_eff = std::min({cfg.k, full_src.basis.k, full_tgt.basis.k});
  const SpectralBasis src_basis = truncate_basis(full_src.basis, k_eff);
  const SpectralBasis tgt_basis = truncate_basis(full_tgt.basis, k_eff);
  const Injection inj_src = nearest_neighbor_injection(low_src, full_src.mesh);
  const Injection inj_tgt = nearest_neighbor_injection(low_tgt, full_tgt.mesh);

  AdmmConfig admm;
  admm.rho = cfg.rho;
  admm.max_iter = cfg.admm_max_iter;
  admm.tol_primal = cfg.tol_primal;
  admm.tol_dual = cfg.tol_dual;

  AdmmResult info;
  const PointMap dense = upscale_map(low_map, inj_src, inj_tgt, src_basis, tgt_basis, admm, &info);

  fs::create_directories(out_dir);
  const std::string map_path = (fs::path(out_dir) / "dense_map.txt").string();
  const std::string c_path = (fs::path(out_dir) / "C_upscaled.fmb").string();
  save_point_map_file(dense, map_path);
  write_fmb_file(c_path, info.map.C);

  std::string csv = "iter,objective,primal_res,dual_res\n";
  for (std::size_t i = 0; i < info.log.iter.size(); ++i)
    csv += std::to_string(info.log.iter[i]) + "," + detail::fmt_double(info.log.objective[i]) + "," +
           detail::fmt_double(info.log.primal_res[i]) + "," + detail::fmt_double(info.log.dual_res[i]) + "\n";
  const std::string csv_path = (fs::path(out_dir) / "admm_convergence.csv").string();
  detail::write_text_file(csv_path, csv);

  const std::vector<std::pair<std::string, std::uint64_t>> inputs = {
      {fs::path(full_src_mesh).filename().string(), full_src.mesh_checksum},
      {fs::path(full_tgt_mesh).filename().string(), full_tgt.mesh_checksum},
      {fs::path(low_map_path).filename().string(), fnv1a_file(low_map_path)}};
  detail::write_sidecar(map_path, "upscale", cfg, inputs);
  detail::write_sidecar(c_path, "upscale", cfg, inputs);
  detail::write_sidecar(csv_path, "upscale", cfg, inputs);
  if (!info.converged)
    log << "warning: ADMM hit max_iter (" << cfg.admm_max_iter << ") before the tolerances\n";
  log << "upscale: " << info.iterations << " ADMM iterations, objective "
      << detail::fmt_double(info.objective) << " -> " << map_path << '\n';
  return 0;
}

/// eval: geodesic errors of a predicted map against ground truth, Princeton
/// curve, and summary statistics.
inline int cmd_eval(const std::string& map_path, const std::string& gt_path,
                    const std::string& tgt_mesh_path, const PipelineConfig& cfg,
                    const std::string& out_dir, std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  const PointMap predicted = load_point_map_file(map_path);
  const PointMap truth = load_point_map_file(gt_path);
  if (predicted.assignments.size() != truth.assignments.size())
    throw io_error("eval: predicted map and ground truth differ in size");
  const TriMesh tgt_mesh = load_mesh_file(tgt_mesh_path);
  for (int t : predicted.assignments)
    if (t < 0 || t >= tgt_mesh.n_vertices()) throw io_error("eval: map target out of range");
  for (int t : truth.assignments)
    if (t < 0 || t >= tgt_mesh.n_vertices()) throw io_error("eval: truth target out of range");

  std::vector<int> sources(predicted.assignments.size());
  std::iota(sources.begin(), sources.end(), 0);
  if (cfg.sample > 0 && cfg.sample < static_cast<long long>(sources.size())) {
    Rng rng(cfg.seed);
    std::vector<int> picked;
    picked.reserve(static_cast<std::size_t>(cfg.sample));
    std::vector<int> pool = sources;
    for (long long i = 0; i < cfg.sample; ++i) {
      const auto at = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(pool.size())));
      picked.push_back(pool[at]);
      pool[at] = pool.back();
      pool.pop_back();
    }
    std::sort(picked.begin(), picked.end());
    sources = std::move(picked);
  }

  const DistanceRows rows = detail::rows_at_truth_targets(tgt_mesh, truth, &sources);
  std::vector<double> errors;
  errors.reserve(sources.size());
  std::string errors_csv = "source,error\n";
  for (int s : sources) {
    const double err = geodesic_error(predicted.assignments[static_cast<std::size_t>(s)],
                                      truth.assignments[static_cast<std::size_t>(s)], rows,
                                      tgt_mesh.total_area);
    errors.push_back(err);
    errors_csv += std::to_string(s) + "," + detail::fmt_double(err) + "\n";
  }

  const CurveSeries curve =
      princeton_curve(errors, default_error_thresholds(cfg.thresholds, cfg.max_threshold));

  double mean = 0.0, max_err = 0.0;
  long long zeros = 0;
  for (double e : errors) {
    mean += e;
    max_err = std::max(max_err, e);
    if (e == 0.0) ++zeros;
  }
  mean /= static_cast<double>(errors.size());
  const double frac_zero = static_cast<double>(zeros) / static_cast<double>(errors.size());

  fs::create_directories(out_dir);
  detail::write_text_file((fs::path(out_dir) / "errors.csv").string(), errors_csv);
  detail::write_curve_csv((fs::path(out_dir) / "princeton.csv").string(), curve, "threshold");
  detail::write_curve_json((fs::path(out_dir) / "princeton.json").string(), curve, "threshold");

  nlohmann::json summary;
  summary["mean_error"] = mean;
  summary["max_error"] = max_err;
  summary["fraction_at_zero"] = frac_zero;
  summary["evaluated"] = errors.size();
  detail::write_text_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  std::string summary_txt = "mean_error=" + detail::fmt_double(mean) + "\n" +
                            "max_error=" + detail::fmt_double(max_err) + "\n" +
                            "fraction_at_zero=" + detail::fmt_double(frac_zero) + "\n" +
                            "evaluated=" + std::to_string(errors.size()) + "\n";
  detail::write_text_file((fs::path(out_dir) / "summary.txt").string(), summary_txt);

  const std::vector<std::pair<std::string, std::uint64_t>> inputs = {
      {fs::path(map_path).filename().string(), fnv1a_file(map_path)},
      {fs::path(gt_path).filename().string(), fnv1a_file(gt_path)}};
  detail::write_sidecar((fs::path(out_dir) / "errors.csv").string(), "eval", cfg, inputs);
  log << "eval: mean=" << detail::fmt_double(mean) << " max=" << detail::fmt_double(max_err)
      << " zero=" << detail::fmt_double(frac_zero) << " over " << errors.size() << " vertices\n";
  return 0;
}

/// curves: CMC + descriptor-distance histogram for raw or refined features.
inline int cmd_curves(const std::string& src_mesh, const std::string& tgt_mesh,
                      const std::string& gt_path, const std::string& checkpoint_dir,
                      const PipelineConfig& cfg, const std::string& out_dir,
                      std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  const std::string root = cfg.resolved_cache_root();
  const CachedShape src = load_cached_shape(src_mesh, root);
  const CachedShape tgt = load_cached_shape(tgt_mesh, root);
  const PointMap truth = load_point_map_file(gt_path);
  if (static_cast<Index>(truth.assignments.size()) != src.mesh.n_vertices())
    throw io_error("curves: ground truth does not cover the source mesh");

  std::optional<NetworkParams> checkpoint;
  if (!checkpoint_dir.empty()) checkpoint = load_checkpoint(checkpoint_dir);

  DescriptorField f, g;
  f.values = detail::refined_or_raw_descriptors(src, checkpoint ? &*checkpoint : nullptr);
  f.q = static_cast<int>(f.values.cols());
  g.values = detail::refined_or_raw_descriptors(tgt, checkpoint ? &*checkpoint : nullptr);
  g.q = static_cast<int>(g.values.cols());

  const int max_rank = cfg.max_rank > 0
                           ? static_cast<int>(cfg.max_rank)
                           : static_cast<int>(std::min<Index>(100, tgt.mesh.n_vertices()));
  const CurveSeries cmc = cmc_curve(f, g, truth, max_rank);
  const Histogram hist = match_distance_histogram(f, g, truth, cfg.hist_bins);

  fs::create_directories(out_dir);
  detail::write_curve_csv((fs::path(out_dir) / "cmc.csv").string(), cmc, "rank");
  detail::write_curve_json((fs::path(out_dir) / "cmc.json").string(), cmc, "rank");

  std::string hist_csv = "bin_lo,bin_hi,count\n";
  const double width = hist.counts.empty() ? 0.0 : (hist.hi - hist.lo) / static_cast<double>(hist.counts.size());
  for (std::size_t b = 0; b < hist.counts.size(); ++b)
    hist_csv += detail::fmt_double(hist.lo + width * static_cast<double>(b)) + "," +
                detail::fmt_double(hist.lo + width * static_cast<double>(b + 1)) + "," +
                std::to_string(hist.counts[b]) + "\n";
  detail::write_text_file((fs::path(out_dir) / "descriptor_distances.csv").string(), hist_csv);
  nlohmann::json hist_json;
  hist_json["lo"] = hist.lo;
  hist_json["hi"] = hist.hi;
  hist_json["counts"] = hist.counts;
  detail::write_text_file((fs::path(out_dir) / "descriptor_distances.json").string(),
                          hist_json.dump(2) + "\n");

  const std::vector<std::pair<std::string, std::uint64_t>> inputs = {
      {fs::path(src_mesh).filename().string(), src.mesh_checksum},
      {fs::path(tgt_mesh).filename().string(), tgt.mesh_checksum},
      {fs::path(gt_path).filename().string(), fnv1a_file(gt_path)}};
  detail::write_sidecar((fs::path(out_dir) / "cmc.csv").string(), "curves", cfg, inputs);
  log << "curves: rank-1 " << detail::fmt_double(cmc.fractions.front()) << ", rank-" << max_rank
      << " " << detail::fmt_double(cmc.fractions.back()) << " -> " << out_dir << '\n';
  return 0;
}

}  // namespace fmcorr
