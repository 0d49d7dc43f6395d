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

#include "report.hpp"

#include <iomanip>
#include <ostream>

namespace curvecloud::cli {

Report::Report(std::string command) {
  fields_["version"] = kReportVersion;
  fields_["command"] = std::move(command);
}

void Report::print(std::ostream& out, bool as_json) const {
  if (as_json) {
    out << fields_.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : fields_.items()) {
    if (key == "version" || key == "command") continue;
    if (key == "results" && value.is_array()) {
      out << std::left << std::setw(12) << "size" << std::setw(16)
          << "median_s" << "samples\n";
      for (const auto& r : value) {
        out << std::left << std::setw(12) << r.at("size").get<std::uint64_t>()
            << std::setw(16) << r.at("median_seconds").get<double>()
            << r.at("samples").size() << '\n';
      }
      continue;
    }
    out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump())
        << '\n';
  }
}

}  // namespace curvecloud::cli
