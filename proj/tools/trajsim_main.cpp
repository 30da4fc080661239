// trajsim: trajectory similarity pipeline front end.
//
// Subcommands cover the whole pipeline: synth -> ingest -> resample ->
// rasterize/train -> embed -> distmat -> cluster -> evaluate/sweep-ac/bench.
// Every stage reads and writes plain files, so each artifact can be
// inspected and re-produced in isolation.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajsim/bench.hpp"
#include "trajsim/cae.hpp"
#include "trajsim/clustering.hpp"
#include "trajsim/config.hpp"
#include "trajsim/error.hpp"
#include "trajsim/format.hpp"
#include "trajsim/raster.hpp"
#include "trajsim/resample.hpp"
#include "trajsim/similarity.hpp"
#include "trajsim/synth.hpp"
#include "trajsim/threads.hpp"
#include "trajsim/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace trajsim;

namespace {

std::vector<Trajectory> read_trajectories(const std::string& path, const BoundingBox& bbox,
                                          int min_points) {
  IngestOptions opts;
  opts.bbox = bbox;
  opts.min_points = static_cast<std::size_t>(min_points);
  return ingest_csv(path, opts).trajectories;
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char ch : id) out.push_back(std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
  return out;
}

GridSpec make_grid(const PipelineConfig& cfg) { return GridSpec::from_delta(cfg.bbox, cfg.delta); }

// Straight parallel lanes spread across the bbox latitude range, with a
// margin that keeps all jittered points inside the box.
std::vector<LaneSpec> parallel_lanes(const PipelineConfig& cfg, int lanes, int per_lane,
                                     double jitter, double speed_min, double speed_max,
                                     double interval_min, double interval_max) {
  if (lanes < 1) throw Error("synth: need at least one lane");
  std::vector<LaneSpec> specs;
  const double lat_extent = cfg.bbox.lat_max - cfg.bbox.lat_min;
  const double lng_extent = cfg.bbox.lng_max - cfg.bbox.lng_min;
  const double margin = 0.05 * lng_extent + 4.0 * jitter;
  for (int i = 0; i < lanes; ++i) {
    double lat = cfg.bbox.lat_min + lat_extent * (i + 1.0) / (lanes + 1.0);
    LaneSpec lane;
    lane.waypoints = {{cfg.bbox.lng_min + margin, lat}, {cfg.bbox.lng_max - margin, lat}};
    lane.jitter_sigma = jitter;
    lane.speed_min = speed_min;
    lane.speed_max = speed_max;
    lane.interval_min = interval_min;
    lane.interval_max = interval_max;
    lane.count = per_lane;
    specs.push_back(std::move(lane));
  }
  return specs;
}

std::vector<Embedding> embed_all(const std::vector<Trajectory>& trajs, const CaeModel& model,
                                 std::uint32_t epsilon, int threads) {
  std::vector<Embedding> embs(trajs.size());
  parallel_for(trajs.size(), threads, [&](std::size_t i) {
    auto [counts, image] = rasterize(trajs[i], model.grid(), epsilon);
    embs[i] = {trajs[i].id, model.encode(image).first};
  });
  return embs;
}

int run(int argc, char** argv) {
  // --config provides defaults; explicit flags override them.
  PipelineConfig cfg;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") cfg = PipelineConfig::load(argv[i + 1]);
  }
  if (const char* env = std::getenv("TRAJSIM_THREADS"); env && cfg.threads == 0)
    cfg.threads = std::atoi(env);

  CLI::App app{"vessel trajectory similarity toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "pipeline config file (key = value lines)");
  app.add_option("--threads", cfg.threads, "worker threads (0 = machine parallelism)");

  auto add_bbox = [&](CLI::App* c) {
    c->add_option("--lat-min", cfg.bbox.lat_min);
    c->add_option("--lat-max", cfg.bbox.lat_max);
    c->add_option("--lng-min", cfg.bbox.lng_min);
    c->add_option("--lng-max", cfg.bbox.lng_max);
  };

  // synth
  auto* synth = app.add_subcommand("synth", "generate labeled synthetic lane trajectories");
  std::string out_path, labels_path;
  int lanes = 3, per_lane = 20;
  double jitter = 0.003, speed_min = 2e-4, speed_max = 3e-4, sample_min = 4.0, sample_max = 8.0;
  synth->add_option("--out", out_path, "trajectory CSV output")->required();
  synth->add_option("--labels-out", labels_path, "ground-truth labels CSV output")->required();
  synth->add_option("--lanes", lanes, "number of parallel lanes");
  synth->add_option("--per-lane", per_lane, "trajectories per lane");
  synth->add_option("--jitter", jitter, "lateral jitter sigma (degrees)");
  synth->add_option("--speed-min", speed_min, "min speed (degrees/s)");
  synth->add_option("--speed-max", speed_max, "max speed (degrees/s)");
  synth->add_option("--sample-min", sample_min, "min sampling interval (s)");
  synth->add_option("--sample-max", sample_max, "max sampling interval (s)");
  synth->add_option("--seed", cfg.seed);
  add_bbox(synth);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "filter and normalize an AIS CSV");
  std::string in_path;
  ingest->add_option("--in", in_path, "input AIS CSV")->required();
  ingest->add_option("--out", out_path, "normalized trajectory CSV")->required();
  ingest->add_option("--min-points", cfg.min_points);
  ingest->add_option("--max-gap", cfg.max_gap, "split gaps larger than this many seconds (0 = off)");
  add_bbox(ingest);

  // resample
  auto* resample_cmd = app.add_subcommand("resample", "spline-resample to a fixed interval");
  resample_cmd->add_option("--in", in_path)->required();
  resample_cmd->add_option("--out", out_path)->required();
  resample_cmd->add_option("--interval", cfg.interval, "resample interval (s)");
  resample_cmd->add_option("--min-points", cfg.min_points);
  add_bbox(resample_cmd);

  // rasterize
  auto* rasterize_cmd = app.add_subcommand("rasterize", "export binary trajectory images as PGM");
  std::string out_dir;
  rasterize_cmd->add_option("--in", in_path)->required();
  rasterize_cmd->add_option("--outdir", out_dir)->required();
  rasterize_cmd->add_option("--delta", cfg.delta);
  rasterize_cmd->add_option("--epsilon", cfg.epsilon);
  add_bbox(rasterize_cmd);

  // train
  auto* train_cmd = app.add_subcommand("train", "train the auto-encoder on trajectory images");
  std::string model_path, loss_path;
  train_cmd->add_option("--in", in_path, "trajectory CSV (resampled)")->required();
  train_cmd->add_option("--model-out", model_path)->required();
  train_cmd->add_option("--loss-out", loss_path, "per-epoch loss CSV");
  train_cmd->add_option("--delta", cfg.delta);
  train_cmd->add_option("--epsilon", cfg.epsilon);
  train_cmd->add_option("--embedding-dim", cfg.embedding_dim);
  train_cmd->add_option("--lambda1", cfg.lambda1);
  train_cmd->add_option("--lambda2", cfg.lambda2);
  train_cmd->add_option("--batch-size", cfg.batch_size);
  train_cmd->add_option("--epochs", cfg.epochs);
  train_cmd->add_option("--lr", cfg.lr);
  train_cmd->add_option("--optimizer", cfg.optimizer, "adam or sgd");
  train_cmd->add_option("--seed", cfg.seed);
  add_bbox(train_cmd);

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "encode trajectories to embeddings CSV");
  embed_cmd->add_option("--in", in_path)->required();
  embed_cmd->add_option("--model", model_path)->required();
  embed_cmd->add_option("--out", out_path)->required();
  embed_cmd->add_option("--epsilon", cfg.epsilon);
  add_bbox(embed_cmd);

  // distmat
  auto* distmat_cmd = app.add_subcommand("distmat", "build a pairwise distance matrix");
  distmat_cmd->add_option("--in", in_path)->required();
  distmat_cmd->add_option("--out", out_path)->required();
  distmat_cmd->add_option("--metric", cfg.metric, "cae, dtw or frechet");
  distmat_cmd->add_option("--model", model_path, "model file (required for cae)");
  distmat_cmd->add_option("--epsilon", cfg.epsilon);
  add_bbox(distmat_cmd);

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "hierarchical clustering of a distance matrix");
  std::string matrix_path, geojson_path;
  cluster_cmd->add_option("--matrix", matrix_path)->required();
  cluster_cmd->add_option("--out", out_path)->required();
  cluster_cmd->add_option("--z", cfg.z, "number of clusters");
  cluster_cmd->add_option("--linkage", cfg.linkage, "average, complete or single");
  cluster_cmd->add_option("--geojson", geojson_path, "also write a GeoJSON FeatureCollection");
  cluster_cmd->add_option("--in", in_path, "trajectory CSV (needed for --geojson)");
  add_bbox(cluster_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "BC/WC/AC and optional Rand index");
  std::string assign_path, emb_path, truth_path;
  eval_cmd->add_option("--assignment", assign_path)->required();
  eval_cmd->add_option("--embeddings", emb_path)->required();
  eval_cmd->add_option("--truth", truth_path, "ground-truth labels CSV");
  eval_cmd->add_option("--out", out_path, "evaluation CSV");

  // sweep-ac
  auto* sweep_cmd = app.add_subcommand("sweep-ac", "AC criterion across a range of cluster counts");
  sweep_cmd->add_option("--matrix", matrix_path)->required();
  sweep_cmd->add_option("--embeddings", emb_path)->required();
  sweep_cmd->add_option("--out", out_path)->required();
  sweep_cmd->add_option("--zmin", cfg.z_min);
  sweep_cmd->add_option("--zmax", cfg.z_max);
  sweep_cmd->add_option("--linkage", cfg.linkage);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "time distance-matrix construction per method");
  std::string methods_csv = "cae,dtw,frechet";
  int repetitions = 1;
  bench_cmd->add_option("--in", in_path)->required();
  bench_cmd->add_option("--out", out_path)->required();
  bench_cmd->add_option("--methods", methods_csv, "comma-separated subset of cae,dtw,frechet");
  bench_cmd->add_option("--repetitions", repetitions);
  bench_cmd->add_option("--model", model_path, "model file (required when methods include cae)");
  bench_cmd->add_option("--epsilon", cfg.epsilon);
  add_bbox(bench_cmd);

  // export-images
  auto* export_cmd = app.add_subcommand("export-images", "PGM pairs: input image and reconstruction");
  export_cmd->add_option("--in", in_path)->required();
  export_cmd->add_option("--model", model_path)->required();
  export_cmd->add_option("--outdir", out_dir)->required();
  export_cmd->add_option("--epsilon", cfg.epsilon);
  add_bbox(export_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 1;
  }

  if (synth->parsed()) {
    auto specs = parallel_lanes(cfg, lanes, per_lane, jitter, speed_min, speed_max, sample_min,
                                sample_max);
    SynthResult res = generate(specs, cfg.seed);
    write_trajectory_csv(out_path, res.trajectories);
    std::vector<std::string> ids;
    for (const auto& t : res.trajectories) ids.push_back(t.id);
    write_labels_csv(labels_path, ids, res.labels);
    std::cout << "synth: " << res.trajectories.size() << " trajectories across " << lanes
              << " lanes -> " << out_path << "\n";
  } else if (ingest->parsed()) {
    IngestOptions opts;
    opts.bbox = cfg.bbox;
    opts.min_points = static_cast<std::size_t>(cfg.min_points);
    IngestResult res = ingest_csv(in_path, opts);
    std::vector<Trajectory> out;
    if (cfg.max_gap > 0.0) {
      for (const auto& t : res.trajectories)
        for (auto& seg : split_on_gap(t, cfg.max_gap))
          if (seg.points.size() >= static_cast<std::size_t>(cfg.min_points))
            out.push_back(std::move(seg));
    } else {
      out = std::move(res.trajectories);
    }
    if (out.empty()) throw Error("ingest: no trajectory survived gap splitting");
    write_trajectory_csv(out_path, out);
    std::cout << "ingest: " << out.size() << " trajectories (" << res.rows_malformed
              << " malformed rows skipped, " << res.rows_outside_bbox << " outside bbox) -> "
              << out_path << "\n";
  } else if (resample_cmd->parsed()) {
    auto trajs = read_trajectories(in_path, cfg.bbox, cfg.min_points);
    std::vector<Trajectory> out(trajs.size());
    ResampleSpec spec{cfg.interval};
    parallel_for(trajs.size(), cfg.threads, [&](std::size_t i) { out[i] = resample(trajs[i], spec); });
    write_trajectory_csv(out_path, out);
    std::cout << "resample: " << out.size() << " trajectories at " << cfg.interval << " s -> "
              << out_path << "\n";
  } else if (rasterize_cmd->parsed()) {
    auto trajs = read_trajectories(in_path, cfg.bbox, cfg.min_points);
    GridSpec grid = make_grid(cfg);
    fs::create_directories(out_dir);
    for (const auto& t : trajs) {
      auto [counts, image] = rasterize(t, grid, cfg.epsilon);
      write_pgm((fs::path(out_dir) / (sanitize_id(t.id) + ".pgm")).string(), image);
    }
    std::cout << "rasterize: " << trajs.size() << " images on a " << grid.w << "x" << grid.h
              << " grid (padded " << grid.pad_w << "x" << grid.pad_h << ") -> " << out_dir << "\n";
  } else if (train_cmd->parsed()) {
    auto trajs = read_trajectories(in_path, cfg.bbox, cfg.min_points);
    GridSpec grid = make_grid(cfg);
    std::vector<TrajectoryImage> images;
    images.reserve(trajs.size());
    for (const auto& t : trajs) images.push_back(rasterize(t, grid, cfg.epsilon).second);
    TrainResult res = train(images, grid, cfg.cae_config());
    res.model.save(model_path);
    if (!loss_path.empty()) {
      std::ofstream out(loss_path, std::ios::binary);
      if (!out) throw Error("cannot write loss CSV: " + loss_path);
      out << "epoch,loss\n";
      for (std::size_t e = 0; e < res.epoch_loss.size(); ++e)
        out << (e + 1) << ',' << fmt_g12(res.epoch_loss[e]) << "\n";
    }
    if (res.tail_rising)
      std::cerr << "warning: loss rose over the last 10% of epochs; consider a lower lr\n";
    std::cout << "train: " << images.size() << " images, " << cfg.epochs << " epochs, final loss "
              << (res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back()) << " -> " << model_path
              << "\n";
  } else if (embed_cmd->parsed()) {
    CaeModel model = CaeModel::load(model_path);
    auto trajs = read_trajectories(in_path, model.grid().bbox, cfg.min_points);
    auto embs = embed_all(trajs, model, cfg.epsilon, cfg.threads);
    write_embeddings_csv(out_path, embs);
    std::cout << "embed: " << embs.size() << " embeddings of dimension " << model.embedding_dim()
              << " -> " << out_path << "\n";
  } else if (distmat_cmd->parsed()) {
    BuildMatrixOptions opts;
    opts.metric = metric_from_string(cfg.metric);
    opts.epsilon = cfg.epsilon;
    opts.threads = cfg.threads;
    CaeModel model;
    const CaeModel* model_ptr = nullptr;
    BoundingBox bbox = cfg.bbox;
    if (opts.metric == Metric::cae) {
      if (model_path.empty()) throw Error("distmat: --model is required for the cae metric");
      model = CaeModel::load(model_path);
      bbox = model.grid().bbox;
      model_ptr = &model;
    }
    auto trajs = read_trajectories(in_path, bbox, cfg.min_points);
    DistanceMatrix m = build_matrix(trajs, opts, model_ptr);
    write_matrix_csv(out_path, m);
    std::cout << "distmat: " << m.n() << "x" << m.n() << " " << cfg.metric << " matrix -> "
              << out_path << "\n";
  } else if (cluster_cmd->parsed()) {
    DistanceMatrix m = read_matrix_csv(matrix_path);
    Dendrogram dendro = hca(m, linkage_from_string(cfg.linkage));
    ClusterAssignment assignment = cut(dendro, cfg.z);
    write_assignment_csv(out_path, m.ids, assignment);
    if (!geojson_path.empty()) {
      if (in_path.empty()) throw Error("cluster: --geojson requires --in trajectories");
      auto trajs = read_trajectories(in_path, cfg.bbox, cfg.min_points);
      if (trajs.size() != m.n()) throw Error("cluster: trajectory count does not match matrix");
      write_geojson(geojson_path, trajs, assignment);
    }
    std::cout << "cluster: Z=" << cfg.z << " (" << cfg.linkage << " linkage) -> " << out_path
              << "\n";
  } else if (eval_cmd->parsed()) {
    std::vector<std::string> ids;
    ClusterAssignment assignment = read_assignment_csv(assign_path, &ids);
    std::vector<Embedding> embs = read_embeddings_csv(emb_path);
    if (embs.size() != assignment.labels.size())
      throw Error("evaluate: assignment and embeddings disagree on trajectory count");
    for (std::size_t i = 0; i < embs.size(); ++i)
      if (embs[i].id != ids[i]) throw Error("evaluate: id mismatch at row " + std::to_string(i));
    BcWcAc r = bc_wc_ac(assignment, embs);
    std::string summary = "BC=" + fmt_g12(r.bc) + " WC=" + fmt_g12(r.wc) + " AC=" + fmt_g12(r.ac);
    double rand_score = -1.0;
    if (!truth_path.empty()) {
      auto truth_rows = read_labels_csv(truth_path);
      if (truth_rows.size() != ids.size()) throw Error("evaluate: truth size mismatch");
      ClusterAssignment truth;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (truth_rows[i].first != ids[i])
          throw Error("evaluate: truth id mismatch at row " + std::to_string(i));
        truth.labels.push_back(truth_rows[i].second);
        truth.z = std::max(truth.z, truth_rows[i].second);
      }
      rand_score = rand_index(assignment, truth);
      summary += " rand=" + fmt_g12(rand_score);
    }
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw Error("cannot write evaluation CSV: " + out_path);
      out << "BC,WC,AC" << (rand_score >= 0.0 ? ",rand_index" : "") << "\n";
      out << fmt_g12(r.bc) << ',' << fmt_g12(r.wc) << ',' << fmt_g12(r.ac);
      if (rand_score >= 0.0) out << ',' << fmt_g12(rand_score);
      out << "\n";
    }
    std::cout << "evaluate: " << summary << "\n";
  } else if (sweep_cmd->parsed()) {
    DistanceMatrix m = read_matrix_csv(matrix_path);
    std::vector<Embedding> embs = read_embeddings_csv(emb_path);
    if (embs.size() != m.n()) throw Error("sweep-ac: matrix and embeddings disagree on count");
    Dendrogram dendro = hca(m, linkage_from_string(cfg.linkage));
    auto rows = sweep_ac(dendro, embs, cfg.z_min, cfg.z_max);
    write_ac_sweep_csv(out_path, rows);
    std::cout << "sweep-ac: Z in [" << cfg.z_min << ", " << cfg.z_max << "] -> " << out_path
              << "\n";
  } else if (bench_cmd->parsed()) {
    BenchOptions opts;
    opts.repetitions = repetitions;
    opts.epsilon = cfg.epsilon;
    opts.threads = cfg.threads;
    std::string token;
    std::istringstream ms(methods_csv);
    while (std::getline(ms, token, ',')) opts.methods.push_back(metric_from_string(token));
    CaeModel model;
    const CaeModel* model_ptr = nullptr;
    BoundingBox bbox = cfg.bbox;
    bool wants_cae = false;
    for (auto m : opts.methods) wants_cae |= m == Metric::cae;
    if (wants_cae) {
      if (model_path.empty()) throw Error("bench: --model required when methods include cae");
      model = CaeModel::load(model_path);
      bbox = model.grid().bbox;
      model_ptr = &model;
    }
    auto trajs = read_trajectories(in_path, bbox, cfg.min_points);
    BenchReport report = run_bench(trajs, opts, model_ptr);
    write_bench_csv(out_path, report);
    std::cout << "bench: N=" << trajs.size();
    if (report.ratio_dtw_cae) std::cout << " R_D/C=" << fmt_g12(*report.ratio_dtw_cae);
    if (report.ratio_frechet_cae) std::cout << " R_F/C=" << fmt_g12(*report.ratio_frechet_cae);
    std::cout << " -> " << out_path << "\n";
  } else if (export_cmd->parsed()) {
    CaeModel model = CaeModel::load(model_path);
    auto trajs = read_trajectories(in_path, model.grid().bbox, cfg.min_points);
    fs::create_directories(out_dir);
    for (const auto& t : trajs) {
      auto [counts, image] = rasterize(t, model.grid(), cfg.epsilon);
      auto [emb, recs] = model.encode(image);
      nn::Tensor recon = model.decode(emb, recs);
      std::string base = (fs::path(out_dir) / sanitize_id(t.id)).string();
      write_pgm(base + ".pgm", image);
      write_pgm(base + "_recon.pgm", recon.v, recon.h, recon.w);
    }
    std::cout << "export-images: " << trajs.size() << " image pairs -> " << out_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
