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

#ifndef ORL_CONFIG_JSON_H_
#define ORL_CONFIG_JSON_H_

#include <set>
#include <string>

#include "orl/error.h"
#include "orl/stage_header.h"

namespace orl {

// Reads optional keys from one config object and rejects any key that was
// never asked for.
class ConfigSection {
 public:
  ConfigSection(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& value) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      value = j_.at(key).get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  // Sub-object, or an empty object when absent.
  Json child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? j_.at(key) : Json::object();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown config key '" + name_ + "." + key + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace orl

#endif  // ORL_CONFIG_JSON_H_
