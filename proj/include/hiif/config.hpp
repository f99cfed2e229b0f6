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

#ifndef HIIF_CONFIG_HPP_
#define HIIF_CONFIG_HPP_

#include <map>
#include <string>

#include "hiif/decoder.hpp"
#include "hiif/encoder.hpp"
#include "hiif/train.hpp"

namespace hiif {

// Complete run configuration. File format: flat UTF-8 `key = value` lines
// with `#` comments and dotted section keys (decoder.L = 6). Unknown keys
// are a hard error.
struct RunConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  TrainConfig train;
  int64_t completed_epochs = 0;  // set when loaded from a checkpoint

  void validate() const;
};

/// Named presets: "desk" (p=24, C=64, N=4, 100 epochs) and "paper"
/// (p=48, C=256, N=16, batch 16, lr 1e-4).
RunConfig preset_config(const std::string& name);

/// Parses `key = value` lines; throws ConfigError with a line number on
/// malformed input.
std::map<std::string, std::string> parse_kv_text(const std::string& text,
                                                 const std::string& origin);

/// Applies parsed keys onto a config. Unknown keys, bad values, and
/// out-of-range settings all throw ConfigError.
void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv,
              const std::string& origin);

/// Reads a config file on top of the given base (usually a preset).
RunConfig load_config_file(const std::string& path, RunConfig base);

/// Canonical `key = value` serialization; parsing it back reproduces the
/// config exactly.
std::string config_to_text(const RunConfig& cfg);

}  // namespace hiif

#endif  // HIIF_CONFIG_HPP_
