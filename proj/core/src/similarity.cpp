#include "trajsim/similarity.hpp"

#include <cmath>
#include <fstream>
#include <functional>

#include "trajsim/baseline.hpp"
#include "trajsim/error.hpp"
#include "trajsim/format.hpp"
#include "trajsim/threads.hpp"

namespace trajsim {

Metric metric_from_string(const std::string& name) {
  if (name == "cae") return Metric::cae;
  if (name == "dtw") return Metric::dtw;
  if (name == "frechet") return Metric::frechet;
  throw Error("unknown metric '" + name + "' (expected cae, dtw or frechet)");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::cae: return "cae";
    case Metric::dtw: return "dtw";
    case Metric::frechet: return "frechet";
  }
  return "?";
}

void DistanceMatrix::validate() const {
  const std::size_t nn = n();
  if (values.size() != nn * nn) throw Error("distance matrix: size mismatch");
  for (std::size_t i = 0; i < nn; ++i) {
    if (at(i, i) != 0.0) throw Error("distance matrix: nonzero diagonal");
    for (std::size_t j = i + 1; j < nn; ++j) {
      double d = at(i, j);
      if (!(d >= 0.0)) throw Error("distance matrix: negative or NaN entry");
      if (std::abs(d - at(j, i)) > 1e-12) throw Error("distance matrix: asymmetric");
    }
  }
}

double euclid_embed(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("euclid_embed: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double euclid_embed(const Embedding& a, const Embedding& b) {
  return euclid_embed(std::span<const double>(a.values), std::span<const double>(b.values));
}

namespace {

DistanceMatrix fill_pairwise(std::vector<std::string> ids,
                             const std::function<double(std::size_t, std::size_t)>& dist,
                             Metric metric, int threads) {
  DistanceMatrix m;
  m.metric = metric;
  m.ids = std::move(ids);
  const std::size_t n = m.ids.size();
  m.values.assign(n * n, 0.0);
  // Flatten the upper triangle so parallel work items stay balanced.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    auto [i, j] = pairs[k];
    double d = dist(i, j);
    m.at(i, j) = d;
    m.at(j, i) = d;
  });
  return m;
}

}  // namespace

DistanceMatrix build_matrix(const std::vector<Trajectory>& trajs, const BuildMatrixOptions& opts,
                            const CaeModel* model) {
  if (trajs.size() < 2) throw Error("build_matrix: need at least 2 trajectories");
  std::vector<std::string> ids;
  ids.reserve(trajs.size());
  for (const auto& t : trajs) ids.push_back(t.id);

  if (opts.metric == Metric::cae) {
    if (model == nullptr) throw Error("build_matrix: cae metric requires a model");
    // Encode once per trajectory; the n^2 part is vector arithmetic only.
    std::vector<std::vector<double>> embs(trajs.size());
    parallel_for(trajs.size(), opts.threads, [&](std::size_t i) {
      auto [counts, image] = rasterize(trajs[i], model->grid(), opts.epsilon);
      embs[i] = model->encode(image).first;
    });
    return fill_pairwise(
        std::move(ids),
        [&](std::size_t i, std::size_t j) { return euclid_embed(embs[i], embs[j]); }, Metric::cae,
        opts.threads);
  }

  std::vector<PointSeq> seqs(trajs.size());
  for (std::size_t i = 0; i < trajs.size(); ++i) seqs[i] = to_point_seq(trajs[i]);
  if (opts.metric == Metric::dtw)
    return fill_pairwise(
        std::move(ids), [&](std::size_t i, std::size_t j) { return dtw(seqs[i], seqs[j]); },
        Metric::dtw, opts.threads);
  return fill_pairwise(
      std::move(ids),
      [&](std::size_t i, std::size_t j) { return frechet_discrete(seqs[i], seqs[j]); },
      Metric::frechet, opts.threads);
}

DistanceMatrix embedding_matrix(const std::vector<Embedding>& embs, int threads) {
  if (embs.size() < 2) throw Error("embedding_matrix: need at least 2 embeddings");
  std::vector<std::string> ids;
  ids.reserve(embs.size());
  for (const auto& e : embs) ids.push_back(e.id);
  return fill_pairwise(
      std::move(ids),
      [&](std::size_t i, std::size_t j) { return euclid_embed(embs[i], embs[j]); }, Metric::cae,
      threads);
}

void write_matrix_csv(const std::string& path, const DistanceMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write matrix CSV: " + path);
  for (std::size_t i = 0; i < m.ids.size(); ++i) out << (i ? "," : "") << m.ids[i];
  out << "\n";
  const std::size_t n = m.n();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << fmt_g12(m.at(i, j));
    out << "\n";
  }
}

DistanceMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix CSV: " + path);
  DistanceMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw Error("matrix CSV: empty file");
  for (auto f : split_csv_line(trim(line))) m.ids.emplace_back(trim(f));
  const std::size_t n = m.ids.size();
  m.values.reserve(n * n);
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto fields = split_csv_line(sv);
    if (fields.size() != n) throw Error("matrix CSV: row width mismatch");
    for (auto f : fields) {
      auto v = parse_double(f);
      if (!v) throw Error("matrix CSV: bad number");
      m.values.push_back(*v);
    }
  }
  if (m.values.size() != n * n) throw Error("matrix CSV: row count mismatch");
  return m;
}

}  // namespace trajsim
