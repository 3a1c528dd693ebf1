// Copyright 2026 The featpl Authors.
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
//
// Plain-text serialization. Numbers render with shortest-round-trip
// precision, so save/load is bit-exact for doubles. Formats:
//
//   features:  "m=<int> d=<int> n=<int>" header, then for each agent d
//              lines of m values (row r, column i holds feature r of
//              alternative i).
//   profile:   "kind=top-l m=<int>" or "kind=l-way m=<int>" header, then
//              one order per line, "agent: i1 > i2 > ... > il", 1-based.
//   params:    "k=<int>", "alpha: ...", k lines "beta: ...", and an
//              optional "phi: ..." line. k = 1 covers the plain model.
//   matrix:    "rows=<int> cols=<int>" header, then the grid (used for the
//              bilinear agent/alternative feature pair).
//   report:    CSV with header n,trial,estimator,metric,value,
//              ci_halfwidth,seconds.
//
// Parse failures throw ParseError naming the 1-based line.

#ifndef FEATPL_IO_H_
#define FEATPL_IO_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "featpl/identifiability.h"
#include "featpl/types.h"

namespace featpl {

// Shortest decimal form that parses back to exactly the same double.
std::string FormatDouble(double value);

void WriteFeatures(const FeatureTensor& features, std::ostream& out);
FeatureTensor ReadFeatures(std::istream& in);
void SaveFeatures(const FeatureTensor& features, const std::string& path);
FeatureTensor LoadFeatures(const std::string& path);

// num_agents >= 0 enables the per-line agent range check against a known
// feature tensor.
void WriteProfile(const Profile& profile, std::ostream& out);
Profile ReadProfile(std::istream& in, int num_agents = -1);
void SaveProfile(const Profile& profile, const std::string& path);
Profile LoadProfile(const std::string& path, int num_agents = -1);

void WriteParams(const MixtureParams& params, std::ostream& out);
MixtureParams ReadParams(std::istream& in);
void SaveParams(const MixtureParams& params, const std::string& path);
MixtureParams LoadParams(const std::string& path);

void WriteMatrix(const Eigen::MatrixXd& matrix, std::ostream& out);
Eigen::MatrixXd ReadMatrix(std::istream& in);
void SaveMatrix(const Eigen::MatrixXd& matrix, const std::string& path);
Eigen::MatrixXd LoadMatrix(const std::string& path);

// key=value lines: verdict, rank, full_row_rank, tolerance, notes.
std::string FormatIdReport(const IdReport& report);

struct ReportRow {
  int n = 0;
  std::string trial;  // per-trial index, or "all" for aggregate rows
  std::string estimator;
  std::string metric;
  double value = 0.0;
  std::optional<double> ci_halfwidth;  // aggregate rows only
  double seconds = 0.0;
};

void WriteReportCsv(const std::vector<ReportRow>& rows, std::ostream& out);
void SaveReportCsv(const std::vector<ReportRow>& rows,
                   const std::string& path);

}  // namespace featpl

#endif  // FEATPL_IO_H_
