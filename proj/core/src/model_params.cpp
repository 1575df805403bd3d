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

#include "mbreg/model_params.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "mbreg/errors.hpp"

namespace mbreg {

std::string_view ModelName(ModelId model) {
  switch (model) {
    case ModelId::kGaray:
      return "garay";
    case ModelId::kBonnet:
      return "bonnet";
    case ModelId::kSasaki:
      return "sasaki";
    case ModelId::kBuhrman:
      return "buhrman";
  }
  return "unknown";
}

std::string_view ModelLabel(ModelId model) {
  switch (model) {
    case ModelId::kGaray:
      return "M1";
    case ModelId::kBonnet:
      return "M2";
    case ModelId::kSasaki:
      return "M3";
    case ModelId::kBuhrman:
      return "M4";
  }
  return "M?";
}

std::optional<ModelId> ParseModel(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (ModelId m : kAllModels) {
    std::string label(ModelLabel(m));
    label[0] = 'm';
    if (lower == ModelName(m) || lower == label) return m;
  }
  return std::nullopt;
}

bool Admissible(int n, int f, const ModelParams& params) {
  return n > params.alpha * f;
}

int Threshold(int n, int f, const ModelParams& params) {
  if (!Admissible(n, f, params)) {
    throw ConfigError("inadmissible configuration for model " +
                      std::string(ModelName(params.model)) + ": n=" +
                      std::to_string(n) + " <= " + std::to_string(params.alpha) +
                      "*f=" + std::to_string(params.alpha * f));
  }
  return UncheckedThreshold(n, f, params);
}

void SystemConfig::Validate() const {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (f < 0) throw ConfigError("f must be non-negative");
  if (f > n) throw ConfigError("f cannot exceed n");
}

SystemConfig MakeConfig(ModelId model, int n, int f) {
  return SystemConfig{n, f, Lookup(model)};
}

}  // namespace mbreg
