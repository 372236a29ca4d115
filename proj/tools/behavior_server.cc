// Copyright 2026 The DiffABM Authors
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

// Serves the logistic stub over the behavior line protocol on stdin/stdout.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "diffabm/behavior/provider.h"

int main(int argc, char** argv) {
  CLI::App app{"Behavior provider speaking the line protocol"};
  diffabm::behavior::LogisticStubConfig config;
  app.add_option("--bias", config.bias, "Logit of the second option");
  app.add_option("--case-weight", config.case_weight,
                 "Weight on log1p(cases)");
  app.add_option("--noise", config.noise_scale, "Std of score noise");
  std::vector<std::string> feature_weights, flag_weights;
  app.add_option("--feature-weight", feature_weights, "name=weight");
  app.add_option("--flag-weight", flag_weights, "name=weight");
  CLI11_PARSE(app, argc, argv);
  for (auto [pairs, out] : {std::pair{&feature_weights, &config.feature_weights},
                            std::pair{&flag_weights, &config.flag_weights}}) {
    for (const std::string& pair : *pairs) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos) {
        std::cerr << "expected name=weight, got '" << pair << "'\n";
        return 2;
      }
      (*out)[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
    }
  }

  std::ios::sync_with_stdio(false);
  diffabm::behavior::LogisticStubProvider provider(config);
  diffabm::behavior::ServeLineProtocol(provider, std::cin, std::cout);
  return 0;
}
