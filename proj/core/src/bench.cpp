#include "trajsim/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "trajsim/error.hpp"
#include "trajsim/format.hpp"

namespace trajsim {

BenchReport run_bench(const std::vector<Trajectory>& trajs, const BenchOptions& opts,
                      const CaeModel* model) {
  if (trajs.size() < 2) throw Error("bench: need at least 2 trajectories");
  if (opts.repetitions < 1) throw Error("bench: repetitions must be >= 1");
  if (opts.methods.empty()) throw Error("bench: no methods selected");

  BenchReport report;
  double mean_cae = 0.0, mean_dtw = 0.0, mean_frechet = 0.0;
  for (Metric method : opts.methods) {
    if (method == Metric::cae && model == nullptr)
      throw Error("bench: cae method requires a trained model");
    BuildMatrixOptions bo;
    bo.metric = method;
    bo.epsilon = opts.epsilon;
    bo.threads = opts.threads;

    std::vector<double> times;
    times.reserve(opts.repetitions);
    for (int r = 0; r < opts.repetitions; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      DistanceMatrix m = build_matrix(trajs, bo, model);
      auto t1 = std::chrono::steady_clock::now();
      if (m.n() != trajs.size()) throw Error("bench: matrix size mismatch");
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    var /= static_cast<double>(times.size());

    report.rows.push_back({trajs.size(), method, mean, std::sqrt(var)});
    switch (method) {
      case Metric::cae: mean_cae = mean; break;
      case Metric::dtw: mean_dtw = mean; break;
      case Metric::frechet: mean_frechet = mean; break;
    }
  }
  if (mean_cae > 0.0 && mean_dtw > 0.0) report.ratio_dtw_cae = mean_dtw / mean_cae;
  if (mean_cae > 0.0 && mean_frechet > 0.0) report.ratio_frechet_cae = mean_frechet / mean_cae;
  return report;
}

void write_bench_csv(const std::string& path, const BenchReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write bench CSV: " + path);
  out << "N,method,mean_s,std_s\n";
  for (const auto& r : report.rows)
    out << r.n << ',' << to_string(r.method) << ',' << fmt_g12(r.mean_s) << ','
        << fmt_g12(r.std_s) << "\n";
}

}  // namespace trajsim
