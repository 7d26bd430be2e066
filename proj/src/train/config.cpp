#include "kglit/train/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kglit/core/error.hpp"
#include "kglit/core/graph.hpp"
#include "kglit/core/hash.hpp"

namespace kglit {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw DomainError("label_smoothing must lie in [0, 1)");
  }
  if (eval_every_epochs < 1) throw DomainError("eval_every_epochs must be >= 1");
  if (!(input_dropout >= 0.0 && input_dropout < 1.0)) {
    throw DomainError("input_dropout must lie in [0, 1)");
  }
  if (batch_size == 0) throw DomainError("batch_size must be >= 1");
  if (embedding_dim == 0) throw DomainError("embedding_dim must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
}

TrainConfig default_config(ModelKind kind) {
  TrainConfig cfg;
  switch (kind) {
    case ModelKind::transe:
      cfg.input_dropout = 0.0;
      cfg.label_smoothing = 0.0;
      break;
    case ModelKind::transea:
      cfg.embedding_dim = 100;
      cfg.epochs = 500;
      cfg.input_dropout = 0.0;
      cfg.label_smoothing = 0.0;
      break;
    case ModelKind::mtkgnn:
      cfg.label_smoothing = 0.0;
      break;
    default:
      break;
  }
  return cfg;
}

namespace {

std::size_t parse_size(const std::string& v, const std::string& key) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw DomainError("bad integer for config key " + key + ": '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw DomainError("bad number for config key " + key + ": '" + v + "'");
  }
  return out;
}

}  // namespace

void apply_config_entry(TrainConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "embedding_dim") cfg.embedding_dim = parse_size(value, key);
  else if (key == "rel_dim") cfg.rel_dim = parse_size(value, key);
  else if (key == "epochs") cfg.epochs = parse_size(value, key);
  else if (key == "learning_rate") cfg.learning_rate = parse_double(value, key);
  else if (key == "batch_size") cfg.batch_size = parse_size(value, key);
  else if (key == "input_dropout") cfg.input_dropout = parse_double(value, key);
  else if (key == "label_smoothing") cfg.label_smoothing = parse_double(value, key);
  else if (key == "margin") cfg.margin = parse_double(value, key);
  else if (key == "alpha") cfg.alpha = parse_double(value, key);
  else if (key == "n_neg") cfg.n_neg = parse_size(value, key);
  else if (key == "eval_every_epochs") cfg.eval_every_epochs = parse_size(value, key);
  else if (key == "patience") cfg.patience = parse_size(value, key);
  else if (key == "seed") cfg.seed = parse_size(value, key);
  else throw DomainError("unknown config key: " + key);
}

TrainConfig parse_config_text(const std::string& text, ModelKind kind) {
  TrainConfig cfg = default_config(kind);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto sb = s.find_first_not_of(" \t");
      const auto se = s.find_last_not_of(" \t");
      return sb == std::string::npos ? std::string() : s.substr(sb, se - sb + 1);
    };
    apply_config_entry(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return cfg;
}

TrainConfig load_config_file(const std::string& path, ModelKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), kind);
}

std::string config_to_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "alpha=" << format_value(cfg.alpha) << '\n'
      << "batch_size=" << cfg.batch_size << '\n'
      << "embedding_dim=" << cfg.embedding_dim << '\n'
      << "epochs=" << cfg.epochs << '\n'
      << "eval_every_epochs=" << cfg.eval_every_epochs << '\n'
      << "input_dropout=" << format_value(cfg.input_dropout) << '\n'
      << "label_smoothing=" << format_value(cfg.label_smoothing) << '\n'
      << "learning_rate=" << format_value(cfg.learning_rate) << '\n'
      << "margin=" << format_value(cfg.margin) << '\n'
      << "n_neg=" << cfg.n_neg << '\n'
      << "patience=" << cfg.patience << '\n'
      << "rel_dim=" << cfg.rel_dim << '\n'
      << "seed=" << cfg.seed << '\n';
  return out.str();
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  return fnv1a64(config_to_text(cfg));
}

}  // namespace kglit
