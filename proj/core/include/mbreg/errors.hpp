/*
 * Copyright (c) 2026, The mbreg Authors
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

#ifndef MBREG_ERRORS_HPP_
#define MBREG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mbreg {

/// Invalid system, workload or experiment configuration. Detected before
/// any round executes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A client operation invoked in violation of the one-operation-at-a-time
/// rule.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// History handed to the checker does not meet its input requirements
/// (duplicate written values, malformed records).
class CheckerInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbreg

#endif  // MBREG_ERRORS_HPP_
