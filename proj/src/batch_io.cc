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

#include "robustdist/batch_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace robustdist {
namespace {

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void CheckWritten(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw IoError("write failed for " + path.string());
}

[[noreturn]] void Fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

bool ParseInt(std::string_view text, int& out) {
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw ParseError("not a real number: '" + std::string(text) + "'");
  }
  return value;
}

void write_batches(const std::filesystem::path& path, const BatchSet& batches) {
  std::ofstream out = OpenForWrite(path);
  out << "# n=" << batches.n() << " k=" << batches.k() << '\n';
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto batch = batches[b];
    for (int j = 0; j < batches.k(); ++j) {
      if (j > 0) out << ' ';
      out << batch[j] + 1;
    }
    out << '\n';
  }
  CheckWritten(out, path);
}

BatchSet read_batches(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::string raw;
  if (!std::getline(in, raw)) Fail(path, 1, "missing header");
  int n = 0;
  int k = 0;
  {
    const auto tokens = SplitWhitespace(StripCr(raw));
    if (tokens.size() != 3 || tokens[0] != "#" ||
        !tokens[1].starts_with("n=") || !tokens[2].starts_with("k=") ||
        !ParseInt(tokens[1].substr(2), n) || !ParseInt(tokens[2].substr(2), k) ||
        n < 1 || k < 1) {
      Fail(path, 1, "expected header '# n=<n> k=<k>'");
    }
  }
  BatchSet batches(n, k);
  std::vector<int> batch(k);
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = SplitWhitespace(StripCr(raw));
    if (tokens.empty()) continue;
    if (static_cast<int>(tokens.size()) != k) {
      Fail(path, line_no,
           "expected " + std::to_string(k) + " indices, got " +
               std::to_string(tokens.size()));
    }
    for (int j = 0; j < k; ++j) {
      int value = 0;
      if (!ParseInt(tokens[j], value) || value < 1 || value > n) {
        Fail(path, line_no,
             "index '" + std::string(tokens[j]) + "' outside 1.." +
                 std::to_string(n));
      }
      batch[j] = value - 1;
    }
    batches.push_back(batch);
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  return batches;
}

std::filesystem::path provenance_path(const std::filesystem::path& batches) {
  std::filesystem::path out = batches;
  out += ".provenance";
  return out;
}

void write_provenance(const std::filesystem::path& path,
                      const std::vector<bool>& is_bad) {
  std::ofstream out = OpenForWrite(path);
  for (bool bad : is_bad) out << (bad ? "bad\n" : "good\n");
  CheckWritten(out, path);
}

std::vector<bool> read_provenance(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::vector<bool> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = StripCr(raw);
    if (line == "good") {
      out.push_back(false);
    } else if (line == "bad") {
      out.push_back(true);
    } else if (!line.empty()) {
      Fail(path, line_no, "expected 'good' or 'bad'");
    }
  }
  return out;
}

void write_distribution(const std::filesystem::path& path,
                        const Distribution& p) {
  std::ofstream out = OpenForWrite(path);
  for (double x : p.probs()) out << format_real(x) << '\n';
  CheckWritten(out, path);
}

Distribution read_distribution(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  std::vector<double> probs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto tokens = SplitWhitespace(StripCr(raw));
    if (tokens.empty()) continue;
    if (tokens.size() != 1) Fail(path, line_no, "expected one real per line");
    try {
      probs.push_back(parse_real(tokens[0]));
    } catch (const ParseError& e) {
      Fail(path, line_no, e.what());
    }
  }
  try {
    return Distribution(std::move(probs));
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace robustdist
