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

#ifndef MBREG_MODEL_PARAMS_HPP_
#define MBREG_MODEL_PARAMS_HPP_

#include <array>
#include <optional>
#include <string_view>

namespace mbreg {

/// The four mobile Byzantine fault models.
///   M1 garay    agents move between rounds, cured servers know it
///   M2 bonnet   agents move between rounds, cured servers are unaware
///               but send one message content to everyone
///   M3 sasaki   like M2, but a cured server stays Byzantine for one round
///   M4 buhrman  agents travel with messages during the send phase, cured
///               servers know it
enum class ModelId { kGaray, kBonnet, kSasaki, kBuhrman };

inline constexpr std::array<ModelId, 4> kAllModels = {
    ModelId::kGaray, ModelId::kBonnet, ModelId::kSasaki, ModelId::kBuhrman};

/// Tuning of the generic register algorithm: resilience requires
/// n > alpha * f, and a value is selected once n - beta * f distinct servers
/// vouch for it.
struct ModelParams {
  ModelId model = ModelId::kGaray;
  int alpha = 0;
  int beta = 0;
  bool oracle_enabled = false;

  friend constexpr bool operator==(const ModelParams&,
                                   const ModelParams&) = default;
};

constexpr ModelParams Lookup(ModelId model) {
  switch (model) {
    case ModelId::kGaray:
      return {model, 3, 2, true};
    case ModelId::kBonnet:
      return {model, 4, 2, false};
    case ModelId::kSasaki:
      return {model, 4, 2, false};
    case ModelId::kBuhrman:
      return {model, 2, 1, true};
  }
  return {};
}

/// Serialized names: "garay", "bonnet", "sasaki", "buhrman".
std::string_view ModelName(ModelId model);
/// Short labels "M1".."M4".
std::string_view ModelLabel(ModelId model);
/// Accepts the serialized name or the M1..M4 label (case-insensitive).
std::optional<ModelId> ParseModel(std::string_view text);

bool Admissible(int n, int f, const ModelParams& params);

/// Selection threshold n - beta * f. Throws ConfigError when n <= alpha * f.
int Threshold(int n, int f, const ModelParams& params);

/// Same formula without the admissibility check; used for counterexample
/// runs at the resilience boundary.
constexpr int UncheckedThreshold(int n, int f, const ModelParams& params) {
  return n - params.beta * f;
}

struct SystemConfig {
  int n = 0;
  int f = 0;
  ModelParams params;

  bool admissible() const { return Admissible(n, f, params); }
  /// Checked threshold; throws ConfigError on inadmissible configs.
  int threshold() const { return Threshold(n, f, params); }
  /// Structural checks only (n >= 1, 0 <= f <= n).
  void Validate() const;
};

SystemConfig MakeConfig(ModelId model, int n, int f);

}  // namespace mbreg

#endif  // MBREG_MODEL_PARAMS_HPP_
