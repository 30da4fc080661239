#include "trajsim/config.hpp"

#include <fstream>
#include <sstream>

#include "trajsim/error.hpp"
#include "trajsim/format.hpp"

namespace trajsim {

CaeConfig PipelineConfig::cae_config() const {
  CaeConfig c;
  c.embedding_dim = embedding_dim;
  c.lambda1 = lambda1;
  c.lambda2 = lambda2;
  c.batch_size = batch_size;
  c.epochs = epochs;
  c.lr = lr;
  c.seed = seed;
  c.threads = threads;
  c.optimizer = optimizer;
  return c;
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  out << "lat_min = " << fmt_exact(bbox.lat_min) << "\n";
  out << "lat_max = " << fmt_exact(bbox.lat_max) << "\n";
  out << "lng_min = " << fmt_exact(bbox.lng_min) << "\n";
  out << "lng_max = " << fmt_exact(bbox.lng_max) << "\n";
  out << "delta = " << fmt_exact(delta) << "\n";
  out << "epsilon = " << epsilon << "\n";
  out << "interval = " << fmt_exact(interval) << "\n";
  out << "max_gap = " << fmt_exact(max_gap) << "\n";
  out << "min_points = " << min_points << "\n";
  out << "embedding_dim = " << embedding_dim << "\n";
  out << "lambda1 = " << fmt_exact(lambda1) << "\n";
  out << "lambda2 = " << fmt_exact(lambda2) << "\n";
  out << "batch_size = " << batch_size << "\n";
  out << "epochs = " << epochs << "\n";
  out << "lr = " << fmt_exact(lr) << "\n";
  out << "optimizer = " << optimizer << "\n";
  out << "linkage = " << linkage << "\n";
  out << "metric = " << metric << "\n";
  out << "z = " << z << "\n";
  out << "z_min = " << z_min << "\n";
  out << "z_max = " << z_max << "\n";
  out << "seed = " << seed << "\n";
  out << "threads = " << threads << "\n";
  out << "input = " << input << "\n";
  out << "output = " << output << "\n";
  return out.str();
}

namespace {

double need_num(const std::string& key, const std::string& value) {
  auto v = parse_double(value);
  if (!v) throw Error("config: bad numeric value for " + key);
  return *v;
}

long long need_int(const std::string& key, const std::string& value) {
  double v = need_num(key, value);
  auto i = static_cast<long long>(v);
  if (static_cast<double>(i) != v) throw Error("config: expected integer for " + key);
  return i;
}

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos) throw Error("config: missing '=' in line: " + line);
    std::string key(trim(sv.substr(0, eq)));
    std::string value(trim(sv.substr(eq + 1)));

    if (key == "lat_min") c.bbox.lat_min = need_num(key, value);
    else if (key == "lat_max") c.bbox.lat_max = need_num(key, value);
    else if (key == "lng_min") c.bbox.lng_min = need_num(key, value);
    else if (key == "lng_max") c.bbox.lng_max = need_num(key, value);
    else if (key == "delta") c.delta = need_num(key, value);
    else if (key == "epsilon") c.epsilon = static_cast<std::uint32_t>(need_int(key, value));
    else if (key == "interval") c.interval = need_num(key, value);
    else if (key == "max_gap") c.max_gap = need_num(key, value);
    else if (key == "min_points") c.min_points = static_cast<int>(need_int(key, value));
    else if (key == "embedding_dim") c.embedding_dim = static_cast<int>(need_int(key, value));
    else if (key == "lambda1") c.lambda1 = need_num(key, value);
    else if (key == "lambda2") c.lambda2 = need_num(key, value);
    else if (key == "batch_size") c.batch_size = static_cast<int>(need_int(key, value));
    else if (key == "epochs") c.epochs = static_cast<int>(need_int(key, value));
    else if (key == "lr") c.lr = need_num(key, value);
    else if (key == "optimizer") c.optimizer = value;
    else if (key == "linkage") c.linkage = value;
    else if (key == "metric") c.metric = value;
    else if (key == "z") c.z = static_cast<int>(need_int(key, value));
    else if (key == "z_min") c.z_min = static_cast<int>(need_int(key, value));
    else if (key == "z_max") c.z_max = static_cast<int>(need_int(key, value));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(need_int(key, value));
    else if (key == "threads") c.threads = static_cast<int>(need_int(key, value));
    else if (key == "input") c.input = value;
    else if (key == "output") c.output = value;
    else throw Error("config: unknown key '" + key + "'");
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void PipelineConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write config file: " + path);
  out << serialize();
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return a.bbox == b.bbox && a.delta == b.delta && a.epsilon == b.epsilon &&
         a.interval == b.interval && a.max_gap == b.max_gap && a.min_points == b.min_points &&
         a.embedding_dim == b.embedding_dim && a.lambda1 == b.lambda1 && a.lambda2 == b.lambda2 &&
         a.batch_size == b.batch_size && a.epochs == b.epochs && a.lr == b.lr &&
         a.optimizer == b.optimizer && a.linkage == b.linkage && a.metric == b.metric &&
         a.z == b.z && a.z_min == b.z_min && a.z_max == b.z_max && a.seed == b.seed &&
         a.threads == b.threads && a.input == b.input && a.output == b.output;
}

}  // namespace trajsim
