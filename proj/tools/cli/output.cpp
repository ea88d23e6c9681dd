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

#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tlp/error.hpp"

namespace tlp::cli {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void Csv::row(std::initializer_list<Cell> cells) {
  if (cells.size() != width_) throw std::logic_error("Csv::row: wrong number of cells");
  bool first = true;
  for (const Cell& c : cells) {
    if (!first) text_ += ',';
    first = false;
    if (const double* d = std::get_if<double>(&c)) {
      text_ += format_real(*d);
    } else if (const long long* n = std::get_if<long long>(&c)) {
      text_ += std::to_string(*n);
    } else {
      text_ += std::get<std::string>(c);
    }
  }
  text_ += '\n';
  ++rows_;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t digest(const std::vector<OutputFile>& files) noexcept {
  std::uint64_t h = fnv1a64("");
  const char nul = '\0';
  for (const OutputFile& f : files) {
    h = fnv1a64(f.name, h);
    h = fnv1a64(std::string_view(&nul, 1), h);
    h = fnv1a64(f.content, h);
    h = fnv1a64(std::string_view(&nul, 1), h);
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void finalize(Artifacts& a) {
  a.files.push_back({a.stem + ".summary.json", a.summary.dump(2) + "\n"});
}

Json make_manifest(const std::string& command, const Json& params, const Artifacts& a,
                   const std::string& tool_version) {
  Json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["command"] = command;
  m["params"] = params;
  if (a.has_seed) {
    m["seed"] = a.seed;
  } else {
    m["seed"] = nullptr;
  }
  m["tool_version"] = tool_version;
  m["tolerances"] = a.tolerances;
  Json files = Json::array();
  for (const OutputFile& f : a.files) files.push_back(f.name);
  m["files"] = files;
  m["digest"] = {{"algorithm", "fnv1a64"}, {"value", hex64(digest(a.files))}};
  return m;
}

std::vector<std::filesystem::path> write_all(const std::filesystem::path& dir,
                                             const Artifacts& a, const Json& manifest) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const std::filesystem::path path = dir / name;
    std::ofstream os(path, std::ios::binary);
    os << content;
    if (!os) throw Error("cannot write " + path.string());
    written.push_back(path);
  };
  for (const OutputFile& f : a.files) put(f.name, f.content);
  put(a.stem + ".manifest.json", manifest.dump(2) + "\n");
  return written;
}

}  // namespace tlp::cli
