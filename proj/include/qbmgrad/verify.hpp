// Copyright 2026 The qbmgrad Authors
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
#include <vector>

#include "json.hpp"

namespace qbm::verify {

struct Check {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool statistical = false;  // sampled statistic rather than a numerical residual
};

// matcalc, densities, gradients, estimator.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

// Runs one named suite, or every suite for "all". Seeds are fixed.
std::vector<Check> run_suite(const std::string& name, int threads = 1);

nlohmann::json report_json(const std::vector<Check>& checks);

}  // namespace qbm::verify
