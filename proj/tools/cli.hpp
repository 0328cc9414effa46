// Copyright 2026 The toral-decay Authors.
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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toral/analysis.hpp"
#include "toral/lattice.hpp"
#include "toral/spectral.hpp"

namespace toral::cli {

std::uint64_t Fnv1a(std::string_view bytes);

// Row-major "a,b;c,d". Rows may also be separated by newlines.
IntMatrix ParseMatrix(const std::string& text);
IntVector ParseVector(const std::string& text);

struct RunMeta {
  std::string subcommand;
  std::uint64_t config_hash = 0;
  std::optional<std::uint64_t> seed;

  std::string HashHex() const;
  // '#'-prefixed lines: version, subcommand, config hash, seed.
  std::string HeaderBlock() const;
  nlohmann::ordered_json ToJson() const;
};

// CSV of (log n, log value) over the positive rows, plus a JSON sidecar at
// path + ".json" with the fitted models. Throws before writing anything when
// the report has no rows.
void EmitPlotData(const DecayReport& report, const std::string& path,
                  const RunMeta& meta);
// CSV of (delta, omega) and a sidecar with the log-log slope.
void EmitPlotData(const ModulusCurve& curve, const std::string& path,
                  const RunMeta& meta);

// Full command line minus the program name. Returns the process exit code.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace toral::cli
