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

#ifndef ORL_LOG_H_
#define ORL_LOG_H_

#include <string_view>

namespace orl {

enum class LogLevel { kQuiet = 0, kWarning = 1, kInfo = 2 };

// Process-wide threshold; messages go to stderr.
void set_log_level(LogLevel level);
void log_info(std::string_view msg);
void log_warning(std::string_view msg);

}  // namespace orl

#endif  // ORL_LOG_H_
