// Copyright 2026 The CurveCloud Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CURVECLOUD_TOOLS_REPORT_HPP_
#define CURVECLOUD_TOOLS_REPORT_HPP_

#include <iosfwd>
#include <json.hpp>
#include <string>

namespace curvecloud::cli {

inline constexpr int kReportVersion = 1;

// Summary of one command. Printed as JSON with --json, else as
// "key: value" lines.
class Report {
 public:
  explicit Report(std::string command);

  nlohmann::json& fields() { return fields_; }
  void print(std::ostream& out, bool as_json) const;

 private:
  nlohmann::json fields_;
};

}  // namespace curvecloud::cli

#endif  // CURVECLOUD_TOOLS_REPORT_HPP_
