#include "trajsim/cae.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "trajsim/error.hpp"
#include "trajsim/format.hpp"
#include "trajsim/threads.hpp"

namespace trajsim {

namespace {

constexpr std::array<int, 4> kEncKernels = {9, 7, 5, 3};
constexpr std::array<int, 4> kEncChannels = {16, 16, 8, 8};
// Mirrored decoder: each deconv is the adjoint of the opposite encoder conv,
// so output channels run 8,16,16,1 and every unpool record lines up.
constexpr std::array<int, 4> kDecKernels = {3, 5, 7, 9};

constexpr char kMagic[12] = {'t', 'r', 'a', 'j', 's', 'i', 'm', '-', 'c', 'a', 'e', '\n'};
constexpr std::uint32_t kFormatVersion = 1;

constexpr double kSsimC1 = 0.01 * 0.01;  // (0.01 * R)^2, R = 1 for binary images
constexpr double kSsimC2 = 0.03 * 0.03;

void check_same_shape(std::span<const nn::Tensor> a, std::span<const nn::Tensor> b) {
  if (a.size() != b.size() || a.empty()) throw Error("loss: batch size mismatch or empty batch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].same_shape(b[i])) throw Error("loss: image shape mismatch");
}

struct SsimParts {
  double value;
  double a, bb;          // luminance and structure factors
  double mx, my, vx, vy, cxy;
};

SsimParts ssim_parts(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw Error("ssim: shape mismatch");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double vx = 0, vy = 0, cxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    cxy += dx * dy;
  }
  vx /= n;
  vy /= n;
  cxy /= n;
  SsimParts p;
  p.mx = mx; p.my = my; p.vx = vx; p.vy = vy; p.cxy = cxy;
  p.a = (2.0 * mx * my + kSsimC1) / (mx * mx + my * my + kSsimC1);
  p.bb = (2.0 * cxy + kSsimC2) / (vx + vy + kSsimC2);
  p.value = p.a * p.bb;
  return p;
}

}  // namespace

nn::Tensor to_tensor(const TrajectoryImage& img) {
  nn::Tensor t(1, img.grid.pad_w, img.grid.pad_h);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) t.v[i] = img.pixels[i];
  return t;
}

CaeModel CaeModel::init(const GridSpec& grid, int embedding_dim, std::uint64_t seed) {
  if (embedding_dim < 1) throw Error("cae: embedding dimension must be >= 1");
  if (grid.pad_w % 16 != 0 || grid.pad_h % 16 != 0) throw Error("cae: grid not padded to 16");

  CaeModel m;
  m.grid_ = grid;
  int in_ch = 1;
  for (int i = 0; i < 4; ++i) {
    m.conv_[i] = nn::Conv2d(in_ch, kEncChannels[i], kEncKernels[i]);
    in_ch = kEncChannels[i];
  }
  const int flat = 8 * (grid.pad_w / 16) * (grid.pad_h / 16);
  m.enc_dense_ = nn::Dense(flat, embedding_dim);
  m.dec_dense_ = nn::Dense(embedding_dim, flat);
  for (int i = 0; i < 4; ++i) {
    // adjoint of conv_[3-i]: maps that conv's output channels back to its inputs
    const auto& twin = m.conv_[3 - i];
    m.deconv_[i] = nn::Deconv2d(twin.out_ch, twin.in_ch, kDecKernels[i]);
  }

  std::mt19937_64 rng(seed);
  for (auto& c : m.conv_) nn::glorot_fill(c.w, c.in_ch * c.k * c.k, c.out_ch * c.k * c.k, rng);
  nn::glorot_fill(m.enc_dense_.w, m.enc_dense_.in, m.enc_dense_.out, rng);
  nn::glorot_fill(m.dec_dense_.w, m.dec_dense_.in, m.dec_dense_.out, rng);
  for (auto& d : m.deconv_) nn::glorot_fill(d.w, d.in_ch * d.k * d.k, d.out_ch * d.k * d.k, rng);
  return m;
}

std::pair<std::vector<double>, PoolRecords> CaeModel::encode(const TrajectoryImage& img) const {
  if (!(img.grid == grid_)) throw Error("encode: image grid does not match model grid");
  nn::Tensor t = to_tensor(img);
  PoolRecords recs;
  for (int i = 0; i < 4; ++i) {
    auto [pooled, rec] = nn::maxpool2(nn::relu(conv_[i].forward(t)));
    t = std::move(pooled);
    recs.stage[i] = std::move(rec);
  }
  return {enc_dense_.forward(t.v), std::move(recs)};
}

nn::Tensor CaeModel::decode(std::span<const double> embedding, const PoolRecords& recs) const {
  if (embedding.size() != static_cast<std::size_t>(enc_dense_.out))
    throw Error("decode: embedding dimension mismatch");
  std::vector<double> flat = dec_dense_.forward(embedding);
  nn::Tensor t(8, bottleneck_h(), bottleneck_w());
  t.v = std::move(flat);
  for (int i = 0; i < 4; ++i) {
    const nn::PoolRecord& rec = recs.stage[3 - i];
    if (rec.empty()) throw Error("decode: missing pool records");
    t = nn::relu(deconv_[i].forward(nn::unpool2(t, rec)));
  }
  return t;
}

CaeModel::Cache CaeModel::forward(const nn::Tensor& x0) const {
  if (x0.c != 1 || x0.h != grid_.pad_w || x0.w != grid_.pad_h)
    throw Error("forward: input shape does not match model grid");
  Cache c;
  c.x0 = x0;
  const nn::Tensor* cur = &c.x0;
  for (int i = 0; i < 4; ++i) {
    c.enc_relu[i] = nn::relu(conv_[i].forward(*cur));
    auto [pooled, rec] = nn::maxpool2(c.enc_relu[i]);
    c.enc_pooled[i] = std::move(pooled);
    c.recs.stage[i] = std::move(rec);
    cur = &c.enc_pooled[i];
  }
  c.embedding = enc_dense_.forward(c.enc_pooled[3].v);
  c.dec_flat = dec_dense_.forward(c.embedding);

  nn::Tensor t(8, bottleneck_h(), bottleneck_w());
  t.v = c.dec_flat;
  for (int i = 0; i < 4; ++i) {
    c.dec_unpooled[i] = nn::unpool2(t, c.recs.stage[3 - i]);
    c.dec_relu[i] = nn::relu(deconv_[i].forward(c.dec_unpooled[i]));
    t = c.dec_relu[i];
  }
  return c;
}

void CaeModel::backward(const Cache& cache, const nn::Tensor& grad_output,
                        std::span<double> grad_flat) const {
  if (grad_flat.size() != param_count()) throw Error("backward: gradient buffer size mismatch");
  if (cache.recs.stage[0].empty()) throw Error("backward: forward cache absent");

  // Slice the flat buffer in declaration order.
  std::array<std::span<double>, 20> slices;
  std::size_t off = 0, si = 0;
  each_param_block([&](const std::vector<double>& blk) {
    slices[si++] = grad_flat.subspan(off, blk.size());
    off += blk.size();
  });

  // Decoder, reversed.
  nn::Tensor g = grad_output;
  for (int i = 3; i >= 0; --i) {
    g = nn::relu_backward(cache.dec_relu[i], g);
    g = deconv_[i].backward(cache.dec_unpooled[i], g, slices[12 + 2 * i], slices[13 + 2 * i]);
    g = nn::unpool2_backward(cache.recs.stage[3 - i], g);
  }
  std::vector<double> g_demb =
      dec_dense_.backward(cache.embedding, g.v, slices[10], slices[11]);
  std::vector<double> g_flat =
      enc_dense_.backward(cache.enc_pooled[3].v, g_demb, slices[8], slices[9]);

  // Encoder, reversed.
  nn::Tensor gt(8, bottleneck_h(), bottleneck_w());
  gt.v = std::move(g_flat);
  for (int i = 3; i >= 0; --i) {
    gt = nn::maxpool2_backward(cache.recs.stage[i], gt);
    gt = nn::relu_backward(cache.enc_relu[i], gt);
    const nn::Tensor& input = i == 0 ? cache.x0 : cache.enc_pooled[i - 1];
    gt = conv_[i].backward(input, gt, slices[2 * i], slices[2 * i + 1]);
  }
}

std::size_t CaeModel::param_count() const {
  std::size_t n = 0;
  each_param_block([&](const std::vector<double>& blk) { n += blk.size(); });
  return n;
}

void CaeModel::export_params(std::span<double> out) const {
  if (out.size() != param_count()) throw Error("export_params: buffer size mismatch");
  std::size_t off = 0;
  each_param_block([&](const std::vector<double>& blk) {
    std::copy(blk.begin(), blk.end(), out.begin() + off);
    off += blk.size();
  });
}

void CaeModel::import_params(std::span<const double> in) {
  if (in.size() != param_count()) throw Error("import_params: buffer size mismatch");
  std::size_t off = 0;
  each_param_block([&](std::vector<double>& blk) {
    std::copy(in.begin() + off, in.begin() + off + blk.size(), blk.begin());
    off += blk.size();
  });
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw Error("model file truncated");
  return v;
}

}  // namespace

void CaeModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kFormatVersion);
  put<double>(out, grid_.bbox.lat_min);
  put<double>(out, grid_.bbox.lat_max);
  put<double>(out, grid_.bbox.lng_min);
  put<double>(out, grid_.bbox.lng_max);
  put<double>(out, grid_.delta);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid_.w));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid_.h));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid_.pad_w));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid_.pad_h));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(enc_dense_.out));
  for (const auto& c : conv_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.in_ch));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.out_ch));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.k));
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(enc_dense_.in));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(enc_dense_.out));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dec_dense_.in));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dec_dense_.out));
  for (const auto& d : deconv_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d.in_ch));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d.out_ch));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d.k));
  }
  std::vector<double> params(param_count());
  export_params(params);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(params.size()));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw Error("model file write failed: " + path);
}

CaeModel CaeModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error("corrupt model file (bad magic): " + path);
  auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion)
    throw Error("unsupported model format version " + std::to_string(version));

  BoundingBox bbox;
  bbox.lat_min = get<double>(in);
  bbox.lat_max = get<double>(in);
  bbox.lng_min = get<double>(in);
  bbox.lng_max = get<double>(in);
  double delta = get<double>(in);
  int w = static_cast<int>(get<std::uint32_t>(in));
  int h = static_cast<int>(get<std::uint32_t>(in));
  int pad_w = static_cast<int>(get<std::uint32_t>(in));
  int pad_h = static_cast<int>(get<std::uint32_t>(in));
  int L = static_cast<int>(get<std::uint32_t>(in));

  GridSpec grid = GridSpec::from_dims(bbox, w, h);
  grid.delta = delta;
  if (grid.pad_w != pad_w || grid.pad_h != pad_h)
    throw Error("model file grid padding inconsistent");

  CaeModel m = init(grid, L, 0);
  auto expect = [&](std::uint32_t got, int want, const char* what) {
    if (got != static_cast<std::uint32_t>(want))
      throw Error(std::string("model file layer table mismatch: ") + what);
  };
  for (const auto& c : m.conv_) {
    expect(get<std::uint32_t>(in), c.in_ch, "conv in");
    expect(get<std::uint32_t>(in), c.out_ch, "conv out");
    expect(get<std::uint32_t>(in), c.k, "conv k");
  }
  expect(get<std::uint32_t>(in), m.enc_dense_.in, "enc dense in");
  expect(get<std::uint32_t>(in), m.enc_dense_.out, "enc dense out");
  expect(get<std::uint32_t>(in), m.dec_dense_.in, "dec dense in");
  expect(get<std::uint32_t>(in), m.dec_dense_.out, "dec dense out");
  for (const auto& d : m.deconv_) {
    expect(get<std::uint32_t>(in), d.in_ch, "deconv in");
    expect(get<std::uint32_t>(in), d.out_ch, "deconv out");
    expect(get<std::uint32_t>(in), d.k, "deconv k");
  }

  auto count = get<std::uint64_t>(in);
  if (count != m.param_count()) throw Error("model file parameter count mismatch");
  std::vector<double> params(count);
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw Error("model file truncated");
  m.import_params(params);
  return m;
}

double loss_l1(std::span<const nn::Tensor> batch_x, std::span<const nn::Tensor> batch_xhat) {
  check_same_shape(batch_x, batch_xhat);
  double total = 0.0;
  for (std::size_t m = 0; m < batch_x.size(); ++m) {
    const auto& x = batch_x[m].v;
    const auto& y = batch_xhat[m].v;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    total += s / static_cast<double>(x.size());
  }
  return total / static_cast<double>(batch_x.size());
}

double loss_mse(std::span<const nn::Tensor> batch_x, std::span<const nn::Tensor> batch_xhat) {
  check_same_shape(batch_x, batch_xhat);
  double total = 0.0;
  for (std::size_t m = 0; m < batch_x.size(); ++m) {
    const auto& x = batch_x[m].v;
    const auto& y = batch_xhat[m].v;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double d = x[i] - y[i];
      s += d * d;
    }
    total += 0.5 * s;
  }
  return total / static_cast<double>(batch_x.size());
}

double ssim(std::span<const double> x, std::span<const double> y) { return ssim_parts(x, y).value; }

double ssim(const nn::Tensor& x, const nn::Tensor& y) {
  if (!x.same_shape(y)) throw Error("ssim: shape mismatch");
  return ssim(std::span<const double>(x.v), std::span<const double>(y.v));
}

double loss_hybrid(std::span<const nn::Tensor> batch_x, std::span<const nn::Tensor> batch_xhat,
                   double lambda1, double lambda2) {
  check_same_shape(batch_x, batch_xhat);
  double ssim_sum = 0.0;
  for (std::size_t m = 0; m < batch_x.size(); ++m) ssim_sum += ssim(batch_x[m], batch_xhat[m]);
  double f2 = 1.0 - ssim_sum / static_cast<double>(batch_x.size());
  return lambda1 * loss_l1(batch_x, batch_xhat) + lambda2 * f2;
}

std::pair<double, nn::Tensor> hybrid_with_grad(const nn::Tensor& x, const nn::Tensor& xhat,
                                               double lambda1, double lambda2) {
  if (!x.same_shape(xhat)) throw Error("loss: shape mismatch");
  const double n = static_cast<double>(x.size());
  nn::Tensor grad(xhat.c, xhat.h, xhat.w);

  double mae = 0.0;
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    double d = xhat.v[i] - x.v[i];
    mae += std::abs(d);
    grad.v[i] = lambda1 * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
  }
  mae /= n;

  SsimParts p = ssim_parts(x.v, xhat.v);
  const double denom_l = p.mx * p.mx + p.my * p.my + kSsimC1;
  const double denom_s = p.vx + p.vy + kSsimC2;
  const double da_dmy = (2.0 * p.mx * denom_l - (2.0 * p.mx * p.my + kSsimC1) * 2.0 * p.my) /
                        (denom_l * denom_l);
  const double db_dcxy = 2.0 / denom_s;
  const double db_dvy = -(2.0 * p.cxy + kSsimC2) / (denom_s * denom_s);
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    double dssim = p.bb * da_dmy / n +
                   p.a * (db_dcxy * (x.v[i] - p.mx) / n + db_dvy * 2.0 * (xhat.v[i] - p.my) / n);
    grad.v[i] -= lambda2 * dssim;  // d/dy of (1 - ssim)
  }
  return {lambda1 * mae + lambda2 * (1.0 - p.value), std::move(grad)};
}

TrainResult train(const std::vector<TrajectoryImage>& images, const GridSpec& grid,
                  const CaeConfig& config) {
  if (images.empty()) throw Error("train: need at least one image");
  for (const auto& img : images)
    if (!(img.grid == grid)) throw Error("train: images are not all on the training grid");
  if (config.lambda1 < 0.0 || config.lambda2 < 0.0 || config.lambda1 + config.lambda2 <= 0.0)
    throw Error("train: invalid loss weights");
  if (config.batch_size < 1) throw Error("train: batch size must be >= 1");
  if (!(config.lr > 0.0)) throw Error("train: learning rate must be > 0");
  if (config.optimizer != "adam" && config.optimizer != "sgd")
    throw Error("train: unknown optimizer '" + config.optimizer + "'");

  const std::size_t n = images.size();
  std::vector<nn::Tensor> tensors;
  tensors.reserve(n);
  for (const auto& img : images) tensors.push_back(to_tensor(img));

  TrainResult res;
  res.model = CaeModel::init(grid, config.embedding_dim, config.seed);
  CaeModel& model = res.model;

  const std::size_t pcount = model.param_count();
  std::vector<double> params(pcount);
  model.export_params(params);

  nn::Adam adam(pcount, config.lr);
  nn::Sgd sgd(config.lr);

  const int workers = effective_threads(config.threads);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> grad(pcount);
  const std::size_t max_batch = std::min<std::size_t>(config.batch_size, n);
  std::vector<std::vector<double>> slots;
  if (workers > 1) slots.assign(max_batch, std::vector<double>(pcount));
  std::vector<double> sample_loss(max_batch);

  res.epoch_loss.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < n; start += max_batch) {
      const std::size_t m = std::min(max_batch, n - start);
      std::fill(grad.begin(), grad.end(), 0.0);

      if (workers > 1) {
        parallel_for(m, workers, [&](std::size_t s) {
          std::fill(slots[s].begin(), slots[s].end(), 0.0);
          const nn::Tensor& x = tensors[order[start + s]];
          CaeModel::Cache cache = model.forward(x);
          auto [loss, gout] = hybrid_with_grad(x, cache.output(), config.lambda1, config.lambda2);
          model.backward(cache, gout, slots[s]);
          sample_loss[s] = loss;
        });
        for (std::size_t s = 0; s < m; ++s)
          for (std::size_t i = 0; i < pcount; ++i) grad[i] += slots[s][i];
      } else {
        for (std::size_t s = 0; s < m; ++s) {
          const nn::Tensor& x = tensors[order[start + s]];
          CaeModel::Cache cache = model.forward(x);
          auto [loss, gout] = hybrid_with_grad(x, cache.output(), config.lambda1, config.lambda2);
          model.backward(cache, gout, grad);
          sample_loss[s] = loss;
        }
      }

      double batch_loss = 0.0;
      for (std::size_t s = 0; s < m; ++s) batch_loss += sample_loss[s];
      batch_loss /= static_cast<double>(m);
      if (!std::isfinite(batch_loss)) throw Error("diverged; lower lr");
      for (auto& g : grad) g /= static_cast<double>(m);

      if (config.optimizer == "adam")
        adam.step(params, grad);
      else
        sgd.step(params, grad);
      model.import_params(params);
      epoch_sum += batch_loss * static_cast<double>(m);
    }
    res.epoch_loss.push_back(epoch_sum / static_cast<double>(n));
  }

  // Divergence telltale: mean loss across the last tenth of epochs should not rise.
  const std::size_t e = res.epoch_loss.size();
  const std::size_t k = std::max<std::size_t>(2, e / 10);
  if (e >= k) {
    auto tail = std::span<const double>(res.epoch_loss).last(k);
    const std::size_t half = k / 2;
    double first = std::accumulate(tail.begin(), tail.begin() + half, 0.0) / half;
    double second = std::accumulate(tail.end() - half, tail.end(), 0.0) / half;
    res.tail_rising = second > first;
  }
  return res;
}

void write_embeddings_csv(const std::string& path, const std::vector<Embedding>& embs) {
  if (embs.empty()) throw Error("write_embeddings_csv: empty embedding list");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embeddings CSV: " + path);
  out << "id";
  for (std::size_t l = 1; l <= embs.front().values.size(); ++l) out << ",y" << l;
  out << "\n";
  for (const auto& e : embs) {
    out << e.id;
    for (double v : e.values) out << ',' << fmt_g12(v);
    out << "\n";
  }
}

std::vector<Embedding> read_embeddings_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings CSV: " + path);
  std::vector<Embedding> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(sv);
    if (fields.size() < 2) throw Error("embeddings CSV: malformed row");
    Embedding e;
    e.id = std::string(trim(fields[0]));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto v = parse_double(fields[i]);
      if (!v) throw Error("embeddings CSV: bad number in row for id " + e.id);
      e.values.push_back(*v);
    }
    if (!out.empty() && out.front().values.size() != e.values.size())
      throw Error("embeddings CSV: inconsistent dimension");
    out.push_back(std::move(e));
  }
  if (out.empty()) throw Error("embeddings CSV: no rows");
  return out;
}

}  // namespace trajsim
