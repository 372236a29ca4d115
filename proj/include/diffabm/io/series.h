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

#ifndef DIFFABM_IO_SERIES_H_
#define DIFFABM_IO_SERIES_H_

#include <istream>
#include <string>
#include <vector>

#include "diffabm/calibration/calibrator.h"
#include "diffabm/core/simulation.h"
#include "diffabm/sensitivity/sensitivity.h"

namespace diffabm::io {

struct ObservedSeries {
  std::string name;
  std::vector<double> values;  // values[t] is step t
};

// CSV with header "step,value" and steps 0, 1, 2, ... in order. Throws
// kIngestion naming the line for empty input, bad rows, duplicated, missing
// or out-of-order steps.
ObservedSeries ParseObserved(std::istream& in, std::string name);
// Also throws kIo when the file cannot be opened.
ObservedSeries IngestObserved(const std::string& path, std::string name);

// Writers throw kIo when the path cannot be written. Values are printed
// with 17 significant digits so they read back exactly.
void WriteObservedCsv(const std::string& path, const std::vector<double>& y);

// Long format: "step,metric,value", one row per step per metric.
void WriteTrajectoryCsv(const std::string& path,
                        const Trajectory<double>& trajectory);
Trajectory<double> ReadTrajectoryCsv(const std::string& path);

// Self-contained SVG line plot of the named metrics.
void WriteSvgPlot(const std::string& path, const Trajectory<double>& trajectory,
                  const std::vector<std::string>& metrics);

// "step,loss,accepted,<p>_mean,<p>_std,..." per calibration step.
void WriteCalibrationReport(const std::string& path,
                            const std::vector<std::string>& parameters,
                            const std::vector<calib::StepOutcome>& steps);
// One posterior draw per row.
void WritePosteriorSamples(const std::string& path,
                           const std::vector<std::string>& parameters,
                           const std::vector<std::vector<double>>& draws);
// "metric,parameter,partial".
void WriteSensitivities(const std::string& path,
                        const SensitivityReport& report);

}  // namespace diffabm::io

#endif  // DIFFABM_IO_SERIES_H_
