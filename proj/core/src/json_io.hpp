// Copyright 2026 The pecsim Authors
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

#pragma once

#include <string>

#include "json.hpp"
#include "pecsim/characterize.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/hubbard.hpp"
#include "pecsim/pec.hpp"
#include "pecsim/simulate.hpp"

namespace pecsim::detail {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigError, "field '" + path + "': " + what);
}

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Typed access to a JSON object with field-path diagnostics.
class JsonReader {
 public:
  JsonReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) field_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key) && !node_[key].is_null(); }
  const std::string& path() const { return path_; }

  const Json& at(const std::string& key) const {
    if (!node_.contains(key)) field_error(join_path(path_, key), "missing");
    return node_[key];
  }

  template <typename T>
  T get(const std::string& key) const {
    const Json& v = at(key);
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      field_error(join_path(path_, key), std::string("wrong type (") + v.type_name() + ")");
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  JsonReader object(const std::string& key) const { return {at(key), join_path(path_, key)}; }

  /// Rejects keys outside `allowed`.
  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& item : node_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || item.key() == a;
      if (!ok) field_error(join_path(path_, item.key()), "unknown field");
    }
  }

  const Json& node() const { return node_; }

 private:
  const Json& node_;
  std::string path_;
};

/// Parses text, reporting syntax errors with line and column.
Json parse_json(std::string_view text);

Json to_json_value(const Ptm& r);
Ptm ptm_from_json(const Json& j, const std::string& path);

Json to_json_value(const PauliChannel& ch);
PauliChannel channel_from_json(const Json& j, const std::string& path);

Json to_json_value(const EntanglingGate& g);
EntanglingGate entangler_from_json(const Json& j, const std::string& path);

Json to_json_value(const Circuit& c);
Circuit circuit_from_json(const Json& j, const std::string& path);

Json to_json_value(const ShotCounts& c);
ShotCounts counts_from_json(const Json& j, const std::string& path);

Json to_json_value(const GateCharacterization& ch);
GateCharacterization characterization_from_json(const Json& j, const std::string& path);

Json to_json_value(const QuasiProbDecomposition& d);
QuasiProbDecomposition decomposition_from_json(const Json& j, const std::string& path);

Json to_json_value(const PecEstimate& e);
PecEstimate estimate_from_json(const Json& j, const std::string& path);

Json to_json_value(const PecSample& s);
PecSample sample_from_json(const Json& j, const std::string& path);

Json to_json_value(const RealVector& v);
RealVector vector_from_json(const Json& j, const std::string& path);

}  // namespace pecsim::detail
