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

#ifndef ORL_STAGE_HEADER_H_
#define ORL_STAGE_HEADER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace orl {

using Json = nlohmann::ordered_json;

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

// Provenance record written as the first line of every line-delimited stage
// output (and as the sidecar of binary stores). `digest` covers the stage's
// own configuration and the digests of everything upstream.
struct StageHeader {
  std::string stage;
  std::string digest;
  std::map<std::string, std::string> upstream;

  Json to_json() const;
  static bool is_header(const Json& j);
  static StageHeader from_json(const Json& j);
};

// Line-oriented text I/O shared by all stage files. Lines are LF-terminated.
std::vector<std::string> read_lines(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Parses one JSON line, reporting the path and line number on failure.
Json parse_json_line(const std::string& line, const std::filesystem::path& path,
                     size_t line_no);

// Header of a line-delimited stage file, if its first line is one.
std::optional<StageHeader> read_stage_header(const std::filesystem::path& path);

}  // namespace orl

#endif  // ORL_STAGE_HEADER_H_
