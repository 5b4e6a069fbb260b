/*
   Copyright 2026 The mosauth Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace mosauth {

/// Precondition or argument violation on a public operation.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Rough edges of a MOM line pair touched (local gap <= 0).
class EdgeCollision : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The total-probability split produced P(Pass|C) outside [0, 1]: f_AC cannot contain P(A) f_AC|A.
class InconsistentMixture : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Config parse/validation failure. `key` is the dotted key path when known.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

namespace detail {
inline void require(bool cond, const char* msg)
{
    if (!cond)
        throw DomainError(msg);
}
} // namespace detail

} // namespace mosauth
