// Copyright 2026 The hiif Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hiif/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hiif {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int64_t to_int(const std::string& key, const std::string& v) {
  int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key " + key + ": not an integer: '" + v + "'");
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key " + key + ": not a boolean: '" + v + "'");
}

std::string real_str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  encoder.validate();
  decoder.validate();
  train.validate();
  if (encoder.c_out != decoder.C)
    throw ConfigError("encoder.c_out (" + std::to_string(encoder.c_out) +
                      ") must equal decoder.C (" + std::to_string(decoder.C) + ")");
}

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  if (name == "desk") {
    cfg.decoder = DecoderConfig{6, 64, 2, 2, 4, Variant::kFull};
    cfg.encoder = EncoderConfig{32, 4, 64, false};
    cfg.train.patch = 24;
    cfg.train.batch = 2;
    cfg.train.epochs = 100;
    cfg.train.lr0 = 1e-3;
    cfg.train.decay_every = 40;
    // The desk run has ~800 optimizer steps, so the scale range is centered
    // on the x2 benchmark scale instead of spanning [1, 4]: near-1 scales
    // contribute all-zero residual targets whose L1 sign gradients are pure
    // noise at this budget, and scales past 3 dilute the few steps available.
    cfg.train.scale_min = 1.5;
    cfg.train.scale_max = 2.5;
  } else if (name == "paper") {
    cfg.decoder = DecoderConfig{6, 256, 2, 2, 16, Variant::kFull};
    cfg.encoder = EncoderConfig{64, 8, 256, false};
    cfg.train.patch = 48;
    cfg.train.batch = 16;
    cfg.train.epochs = 1000;
    cfg.train.lr0 = 1e-4;
    cfg.train.decay_every = 200;
  } else {
    throw ConfigError("unknown preset: " + name + " (expected desk or paper)");
  }
  return cfg;
}

std::map<std::string, std::string> parse_kv_text(const std::string& text,
                                                 const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                        t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return kv;
}

void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv,
              const std::string& origin) {
  for (const auto& [key, value] : kv) {
    if (key == "decoder.L") cfg.decoder.L = to_int(key, value);
    else if (key == "decoder.C") cfg.decoder.C = to_int(key, value);
    else if (key == "decoder.S") cfg.decoder.S = to_int(key, value);
    else if (key == "decoder.B") cfg.decoder.B = to_int(key, value);
    else if (key == "decoder.N") cfg.decoder.N = to_int(key, value);
    else if (key == "decoder.variant") cfg.decoder.variant = parse_variant(value);
    else if (key == "encoder.c_enc") cfg.encoder.c_enc = to_int(key, value);
    else if (key == "encoder.n_blocks") cfg.encoder.n_blocks = to_int(key, value);
    else if (key == "encoder.c_out") cfg.encoder.c_out = to_int(key, value);
    else if (key == "encoder.unfold") cfg.encoder.unfold = to_bool(key, value);
    else if (key == "train.patch") cfg.train.patch = to_int(key, value);
    else if (key == "train.batch") cfg.train.batch = to_int(key, value);
    else if (key == "train.epochs") cfg.train.epochs = to_int(key, value);
    else if (key == "train.lr0") cfg.train.lr0 = to_real(key, value);
    else if (key == "train.decay_every") cfg.train.decay_every = to_int(key, value);
    else if (key == "train.decay_factor") cfg.train.decay_factor = to_real(key, value);
    else if (key == "train.scale_min") cfg.train.scale_min = to_real(key, value);
    else if (key == "train.scale_max") cfg.train.scale_max = to_real(key, value);
    else if (key == "train.seed") cfg.train.seed = uint64_t(to_int(key, value));
    else if (key == "run.completed_epochs") cfg.completed_epochs = to_int(key, value);
    else
      throw ConfigError(origin + ": unknown config key '" + key + "'");
  }
  // Latent width follows the decoder unless explicitly overridden.
  if (kv.count("decoder.C") && !kv.count("encoder.c_out")) cfg.encoder.c_out = cfg.decoder.C;
  cfg.validate();
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  apply_kv(base, parse_kv_text(buf.str(), path), path);
  return base;
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "decoder.L = " << cfg.decoder.L << "\n";
  os << "decoder.C = " << cfg.decoder.C << "\n";
  os << "decoder.S = " << cfg.decoder.S << "\n";
  os << "decoder.B = " << cfg.decoder.B << "\n";
  os << "decoder.N = " << cfg.decoder.N << "\n";
  os << "decoder.variant = " << variant_name(cfg.decoder.variant) << "\n";
  os << "encoder.c_enc = " << cfg.encoder.c_enc << "\n";
  os << "encoder.n_blocks = " << cfg.encoder.n_blocks << "\n";
  os << "encoder.c_out = " << cfg.encoder.c_out << "\n";
  os << "encoder.unfold = " << (cfg.encoder.unfold ? "true" : "false") << "\n";
  os << "train.patch = " << cfg.train.patch << "\n";
  os << "train.batch = " << cfg.train.batch << "\n";
  os << "train.epochs = " << cfg.train.epochs << "\n";
  os << "train.lr0 = " << real_str(cfg.train.lr0) << "\n";
  os << "train.decay_every = " << cfg.train.decay_every << "\n";
  os << "train.decay_factor = " << real_str(cfg.train.decay_factor) << "\n";
  os << "train.scale_min = " << real_str(cfg.train.scale_min) << "\n";
  os << "train.scale_max = " << real_str(cfg.train.scale_max) << "\n";
  os << "train.seed = " << cfg.train.seed << "\n";
  os << "run.completed_epochs = " << cfg.completed_epochs << "\n";
  return os.str();
}

}  // namespace hiif
