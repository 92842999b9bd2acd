// Copyright 2026 The ORL Authors.
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

#include "orl/stage_header.h"

#include <fstream>
#include <iterator>
#include <sstream>

#include "orl/error.h"

namespace orl {

std::string digest_hex(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) {
  return digest_hex(read_file(path));
}

Json StageHeader::to_json() const {
  Json j;
  j["orl_stage"] = stage;
  j["digest"] = digest;
  Json up = Json::object();
  for (const auto& [k, v] : upstream) up[k] = v;
  j["upstream"] = up;
  return j;
}

bool StageHeader::is_header(const Json& j) {
  return j.is_object() && j.contains("orl_stage");
}

StageHeader StageHeader::from_json(const Json& j) {
  StageHeader h;
  try {
    h.stage = j.at("orl_stage").get<std::string>();
    h.digest = j.at("digest").get<std::string>();
    for (const auto& [k, v] : j.at("upstream").items()) {
      h.upstream[k] = v.get<std::string>();
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed stage header: ") + e.what());
  }
  return h;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("failed writing file: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Json parse_json_line(const std::string& line, const std::filesystem::path& path,
                     size_t line_no) {
  try {
    return Json::parse(line);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                    e.what());
  }
}

std::optional<StageHeader> read_stage_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const Json j = parse_json_line(line, path, 1);
  if (!StageHeader::is_header(j)) return std::nullopt;
  return StageHeader::from_json(j);
}

}  // namespace orl
