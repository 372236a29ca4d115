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

#include "diffabm/io/series.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace diffabm::io {
namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void BadLine(const std::string& source, int line,
                          const std::string& msg) {
  Fail(ErrorKind::kIngestion,
       source + ":" + std::to_string(line) + ": " + msg);
}

std::optional<int64_t> ParseInt(const std::string& s) {
  int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> ParseReal(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << std::setprecision(17);
  return out;
}

void Close(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) Fail(ErrorKind::kIo, "write to '" + path + "' failed");
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

ObservedSeries ParseObserved(std::istream& in, std::string name) {
  ObservedSeries series{std::move(name), {}};
  const std::string& src = series.name;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = Trim(line);
    if (row.empty()) continue;
    const auto fields = SplitFields(row);
    if (!header) {
      if (fields != std::vector<std::string>{"step", "value"}) {
        BadLine(src, line_no, "expected header 'step,value'");
      }
      header = true;
      continue;
    }
    if (fields.size() != 2) BadLine(src, line_no, "expected 2 fields");
    const auto step = ParseInt(fields[0]);
    if (!step) BadLine(src, line_no, "step '" + fields[0] + "' is not an integer");
    const auto value = ParseReal(fields[1]);
    if (!value) {
      BadLine(src, line_no, "value '" + fields[1] + "' is not a finite number");
    }
    const auto expected = static_cast<int64_t>(series.values.size());
    if (*step < expected) {
      BadLine(src, line_no, "duplicate or out-of-order step " + fields[0]);
    }
    if (*step > expected) {
      BadLine(src, line_no, "missing step " + std::to_string(expected));
    }
    series.values.push_back(*value);
  }
  if (!header) BadLine(src, std::max(line_no, 1), "empty file");
  if (series.values.empty()) BadLine(src, line_no, "no data rows");
  return series;
}

ObservedSeries IngestObserved(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot read '" + path + "'");
  try {
    return ParseObserved(in, std::move(name));
  } catch (const Error& e) {
    Fail(e.kind(), path + ": " + e.what());
  }
}

void WriteObservedCsv(const std::string& path, const std::vector<double>& y) {
  auto out = OpenForWrite(path);
  out << "step,value\n";
  for (std::size_t t = 0; t < y.size(); ++t) out << t << ',' << y[t] << '\n';
  Close(out, path);
}

void WriteTrajectoryCsv(const std::string& path,
                        const Trajectory<double>& trajectory) {
  auto out = OpenForWrite(path);
  out << "step,metric,value\n";
  const auto names = trajectory.metric_names();
  for (std::size_t t = 0; t < trajectory.steps(); ++t) {
    for (const auto& name : names) {
      out << t << ',' << name << ',' << trajectory.Series(name)[t] << '\n';
    }
  }
  Close(out, path);
}

Trajectory<double> ReadTrajectoryCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot read '" + path + "'");
  std::map<std::string, std::map<int64_t, double>> rows;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = Trim(line);
    if (row.empty()) continue;
    const auto fields = SplitFields(row);
    if (!header) {
      if (fields != std::vector<std::string>{"step", "metric", "value"}) {
        BadLine(path, line_no, "expected header 'step,metric,value'");
      }
      header = true;
      continue;
    }
    if (fields.size() != 3) BadLine(path, line_no, "expected 3 fields");
    const auto step = ParseInt(fields[0]);
    const auto value = ParseReal(fields[2]);
    if (!step || *step < 0 || !value || fields[1].empty()) {
      BadLine(path, line_no, "malformed row");
    }
    if (!rows[fields[1]].emplace(*step, *value).second) {
      BadLine(path, line_no, "duplicate step " + fields[0] + " for '" +
                                 fields[1] + "'");
    }
  }
  if (!header) BadLine(path, 1, "empty file");
  std::map<std::string, std::vector<double>> series;
  for (const auto& [metric, by_step] : rows) {
    auto& values = series[metric];
    for (const auto& [step, value] : by_step) {
      if (step != static_cast<int64_t>(values.size())) {
        Fail(ErrorKind::kIngestion, path + ": metric '" + metric +
                                        "' misses step " +
                                        std::to_string(values.size()));
      }
      values.push_back(value);
    }
  }
  try {
    return Trajectory<double>::FromSeries(std::move(series));
  } catch (const Error& e) {
    Fail(ErrorKind::kIngestion, path + ": " + e.what());
  }
}

void WriteSvgPlot(const std::string& path, const Trajectory<double>& trajectory,
                  const std::vector<std::string>& metrics) {
  constexpr double kWidth = 800, kHeight = 480, kMargin = 60;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  double top = 0.0;
  for (const auto& m : metrics) {
    for (double v : trajectory.Series(m)) top = std::max(top, v);
  }
  if (top <= 0.0) top = 1.0;
  const double steps = std::max<double>(1.0, trajectory.steps() - 1.0);
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;

  auto out = OpenForWrite(path);
  out << std::setprecision(6);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "  <g stroke=\"black\" stroke-width=\"1\">\n"
      << "    <line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin
      << "\" x2=\"" << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\"/>\n"
      << "    <line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
      << kMargin << "\" y2=\"" << kHeight - kMargin << "\"/>\n"
      << "  </g>\n"
      << "  <g font-family=\"sans-serif\" font-size=\"12\">\n"
      << "    <text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 20
      << "\" text-anchor=\"middle\">step</text>\n"
      << "    <text x=\"" << kMargin - 8 << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\">" << top << "</text>\n"
      << "    <text x=\"" << kMargin - 8 << "\" y=\"" << kHeight - kMargin
      << "\" text-anchor=\"end\">0</text>\n"
      << "    <text x=\"" << kWidth - kMargin << "\" y=\""
      << kHeight - kMargin + 16 << "\" text-anchor=\"end\">"
      << trajectory.steps() << "</text>\n"
      << "  </g>\n";
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    const auto& series = trajectory.Series(metrics[k]);
    out << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < series.size(); ++t) {
      out << (t ? " " : "") << kMargin + plot_w * t / steps << ','
          << kHeight - kMargin - plot_h * series[t] / top;
    }
    out << "\"/>\n"
        << "  <text x=\"" << kWidth - kMargin + 6 << "\" y=\""
        << kMargin + 16 * k << "\" font-family=\"sans-serif\" font-size=\"12\""
        << " fill=\"" << color << "\">" << XmlEscape(metrics[k]) << "</text>\n";
  }
  out << "</svg>\n";
  Close(out, path);
}

void WriteCalibrationReport(const std::string& path,
                            const std::vector<std::string>& parameters,
                            const std::vector<calib::StepOutcome>& steps) {
  auto out = OpenForWrite(path);
  out << "step,loss,accepted";
  for (const auto& p : parameters) out << ',' << p << "_mean," << p << "_std";
  out << '\n';
  for (const auto& s : steps) {
    out << s.step << ',' << s.loss << ',' << (s.accepted ? 1 : 0);
    for (std::size_t k = 0; k < parameters.size(); ++k) {
      out << ',' << (k < s.theta_mean.size() ? s.theta_mean[k] : NAN) << ','
          << (k < s.theta_std.size() ? s.theta_std[k] : NAN);
    }
    out << '\n';
  }
  Close(out, path);
}

void WritePosteriorSamples(const std::string& path,
                           const std::vector<std::string>& parameters,
                           const std::vector<std::vector<double>>& draws) {
  auto out = OpenForWrite(path);
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    out << (k ? "," : "") << parameters[k];
  }
  out << '\n';
  for (const auto& draw : draws) {
    for (std::size_t k = 0; k < draw.size(); ++k) {
      out << (k ? "," : "") << draw[k];
    }
    out << '\n';
  }
  Close(out, path);
}

void WriteSensitivities(const std::string& path,
                        const SensitivityReport& report) {
  auto out = OpenForWrite(path);
  out << "metric,parameter,partial\n";
  for (std::size_t m = 0; m < report.metrics.size(); ++m) {
    for (std::size_t p = 0; p < report.parameters.size(); ++p) {
      out << report.metrics[m] << ',' << report.parameters[p] << ','
          << report.partials[m][p] << '\n';
    }
  }
  Close(out, path);
}

}  // namespace diffabm::io
