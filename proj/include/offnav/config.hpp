// Copyright 2026 Offnav Authors
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

#ifndef OFFNAV_CONFIG_HPP
#define OFFNAV_CONFIG_HPP

#include <cstdint>
#include <string>

#include "offnav/sim.hpp"

namespace offnav {

// Everything a batch run needs; file values override the defaults here and
// CLI flags override the file.
struct RunConfig {
  std::string scenario = "alleyway";  // alleyway | offroad
  std::string variant = "va";         // prescient | det | va | all
  int reps = 25;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  SimConfig sim;
};

// "section.key" form, e.g. set_config_value(cfg, "mppi.samples", "1000").
// Throws std::invalid_argument naming the key on unknown keys or unparsable
// values.
void set_config_value(RunConfig& cfg, const std::string& dotted_key,
                      const std::string& value);

// INI-style sections ([run], [mppi], [cost], [visibility], [vehicle],
// [sensor], [sim]) of key = value lines; # and ; comments. Throws with the
// offending line number.
RunConfig parse_config_file(const std::string& path);

// Full effective configuration, parseable by parse_config_file; written
// next to the outputs for provenance.
std::string serialize_config(const RunConfig& cfg);

Variant parse_variant(const std::string& name);  // throws on unknown

}  // namespace offnav

#endif  // OFFNAV_CONFIG_HPP
