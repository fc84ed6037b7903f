// Copyright 2026 The robustdist Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text formats shared by the CLI and the experiment harness.
//
// Batch file:
//   # n=<n> k=<k>
//   <k space-separated 1-based indices>     (one batch per line)
//
// Provenance sidecar (<batch file>.provenance): one "good" or "bad" per line,
// in batch order. Kept in a separate file so estimators never see it.
//
// Distribution file: n lines, one probability per line, 17 significant
// digits.

#ifndef ROBUSTDIST_BATCH_IO_H_
#define ROBUSTDIST_BATCH_IO_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robustdist/core.h"

namespace robustdist {

// Filesystem failures; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents; the message names the path and line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip is not required; always 17 significant digits.
std::string format_real(double x);
// Strict: the whole string must be a finite real.
double parse_real(std::string_view text);

void write_batches(const std::filesystem::path& path, const BatchSet& batches);
BatchSet read_batches(const std::filesystem::path& path);

std::filesystem::path provenance_path(const std::filesystem::path& batches);
void write_provenance(const std::filesystem::path& path,
                      const std::vector<bool>& is_bad);
std::vector<bool> read_provenance(const std::filesystem::path& path);

void write_distribution(const std::filesystem::path& path,
                        const Distribution& p);
Distribution read_distribution(const std::filesystem::path& path);

}  // namespace robustdist

#endif  // ROBUSTDIST_BATCH_IO_H_
