// Copyright 2026 The qchan Authors
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

#include "qchan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qchan {

namespace {

void write(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric arrays stay on one line; they hold flattened matrices.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_number(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        write(v, depth + 1, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += std::isnan(x) ? "\"nan\"" : (x > 0 ? "\"inf\"" : "\"-inf\"");
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dump_json(const Json& j) {
  std::string out;
  write(j, 0, out);
  out += "\n";
  return out;
}

Json matrix_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Json to_json(const ReductionReport& r) {
  Json j;
  j["kind"] = r.kind;
  Json inputs = Json::object();
  for (const auto& [role, d] : r.inputs) inputs[role] = d;
  j["inputs"] = inputs;
  Json params = Json::object();
  for (const auto& [name, v] : r.parameters) params[name] = v;
  j["parameters"] = params;
  Json predicted = Json::array();
  for (const auto& p : r.predicted) {
    Json e{{"quantity", p.quantity}, {"relation", p.relation}};
    e["lower"] = p.lower ? Json(*p.lower) : Json(nullptr);
    e["upper"] = p.upper ? Json(*p.upper) : Json(nullptr);
    predicted.push_back(e);
  }
  j["predicted"] = predicted;
  Json measured = Json::array();
  for (const auto& m : r.measured) measured.push_back(Json{{"quantity", m.quantity}, {"value", m.value}, {"seed", m.seed}});
  j["measured"] = measured;
  j["artifacts"] = r.artifacts;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const MeasureResult& r) {
  Json j;
  j["value"] = r.value;
  j["seed"] = r.seed;
  j["best_restart"] = r.best_restart;
  Json wit = Json::array();
  for (const auto& w : r.witness) wit.push_back(matrix_json(w));
  j["witness"] = wit;
  Json traces = Json::array();
  for (const auto& t : r.iterations) {
    traces.push_back(Json{{"iterations", t.size()}, {"final", t.empty() ? Json(nullptr) : Json(t.back())}});
  }
  j["restarts"] = traces;
  return j;
}

Json to_json(const ProtocolRun& run) {
  Json j;
  j["strategy"] = to_string(run.strategy);
  if (run.strategy == ProverStrategy::kGrid) j["resolution"] = run.resolution;
  j["trials"] = run.trials;
  j["seed"] = run.seed;
  j["acceptance"] = run.acceptance;
  j["distance"] = run.distance;
  j["sampled_acceptance"] = run.sampled_acceptance ? Json(*run.sampled_acceptance) : Json(nullptr);
  j["state"] = matrix_json(run.state);
  j["accept_first"] = matrix_json(run.accept_first);
  return j;
}

Json to_json(const SuiteResult& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"property", c.property}, {"value", c.value}, {"relation", c.relation}, {"bound", c.bound},
                          {"pass", c.pass}});
  }
  return Json{{"suite", r.suite}, {"seed", r.seed}, {"passed", r.passed()}, {"checks", checks}};
}

Json JsonReport::to_json() const {
  Json j;
  j["tool_version"] = std::string(kToolVersion);
  j["command"] = command;
  j["inputs"] = inputs;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["results"] = results;
  j["timings_ms"] = timings_ms;
  return j;
}

}  // namespace qchan
