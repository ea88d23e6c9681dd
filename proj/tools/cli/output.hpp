/*
 * Copyright 2026 The lostpennies Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tlp::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kManifestSchemaVersion = 1;

// Reals are written with 17 significant digits, enough to round-trip a double.
std::string format_real(double v);

class Csv {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit Csv(std::vector<std::string> header);

  void row(std::initializer_list<Cell> cells);
  std::size_t rows() const noexcept { return rows_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

struct OutputFile {
  std::string name;
  std::string content;
};

// Everything a command produces. Files are digested in order.
struct Artifacts {
  std::string stem;
  std::vector<OutputFile> files;
  Json summary;
  Json tolerances = Json::object();
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string report;  // human-readable lines for stdout
};

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;
// FNV-1a over each file name, a NUL, the content and another NUL.
std::uint64_t digest(const std::vector<OutputFile>& files) noexcept;
std::string hex64(std::uint64_t v);

// Serializes the summary into `<stem>.summary.json` and appends it to files.
void finalize(Artifacts& a);

Json make_manifest(const std::string& command, const Json& params, const Artifacts& a,
                   const std::string& tool_version);

// Writes the files and `<stem>.manifest.json` under dir; returns written paths.
std::vector<std::filesystem::path> write_all(const std::filesystem::path& dir,
                                             const Artifacts& a, const Json& manifest);

}  // namespace tlp::cli
