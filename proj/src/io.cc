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

#include "featpl/io.h"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace featpl {
namespace {

// Tracks the 1-based line number for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line; false at end of input.
  bool Next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_number_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }

  std::string Require(const char* what) {
    std::string line;
    if (!Next(line)) {
      throw ParseError(std::string("expected ") + what +
                           " but reached end of input",
                       line_number_ + 1);
    }
    return line;
  }

  int line_number() const { return line_number_; }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

std::vector<std::string> Tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

double ParseDouble(const std::string& token, int line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("'" + token + "' is not a number", line);
  }
  return value;
}

int ParseInt(const std::string& token, int line) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("'" + token + "' is not an integer", line);
  }
  return value;
}

// Parses "key=value" and returns the value part, checking the key.
std::string KeyedValue(const std::string& token, const std::string& key,
                       int line) {
  const auto pos = token.find('=');
  if (pos == std::string::npos || token.substr(0, pos) != key) {
    throw ParseError("expected '" + key + "=<value>', got '" + token + "'",
                     line);
  }
  return token.substr(pos + 1);
}

Eigen::VectorXd ParseLabeledVector(const std::string& line,
                                   const std::string& label, int line_number) {
  std::vector<std::string> tokens = Tokenize(line);
  if (tokens.empty() || tokens[0] != label + ":") {
    throw ParseError("expected '" + label + ": <values>'", line_number);
  }
  Eigen::VectorXd v(tokens.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    v[i - 1] = ParseDouble(tokens[i], line_number);
  }
  return v;
}

void WriteVectorLine(std::ostream& out, const char* label,
                     const Eigen::VectorXd& v) {
  out << label << ":";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << ' ' << FormatDouble(v[i]);
  }
  out << '\n';
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  return out;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "' for reading");
  }
  return in;
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void WriteFeatures(const FeatureTensor& features, std::ostream& out) {
  out << "m=" << features.num_alternatives() << " d=" << features.num_features()
      << " n=" << features.num_agents() << '\n';
  for (int j = 0; j < features.num_agents(); ++j) {
    const Eigen::MatrixXd& x = features.agent(j);
    for (int r = 0; r < features.num_features(); ++r) {
      for (int i = 0; i < features.num_alternatives(); ++i) {
        if (i > 0) out << ' ';
        out << FormatDouble(x(r, i));
      }
      out << '\n';
    }
  }
}

FeatureTensor ReadFeatures(std::istream& in) {
  LineReader reader(in);
  const std::string header = reader.Require("features header");
  const std::vector<std::string> tokens = Tokenize(header);
  if (tokens.size() != 3) {
    throw ParseError("features header must be 'm=<int> d=<int> n=<int>'",
                     reader.line_number());
  }
  const int m = ParseInt(KeyedValue(tokens[0], "m", reader.line_number()),
                         reader.line_number());
  const int d = ParseInt(KeyedValue(tokens[1], "d", reader.line_number()),
                         reader.line_number());
  const int n = ParseInt(KeyedValue(tokens[2], "n", reader.line_number()),
                         reader.line_number());
  if (m < 2 || d < 1 || n < 1) {
    throw ParseError("need m >= 2, d >= 1, n >= 1", reader.line_number());
  }
  std::vector<Eigen::MatrixXd> agents(n, Eigen::MatrixXd(d, m));
  for (int j = 0; j < n; ++j) {
    for (int r = 0; r < d; ++r) {
      const std::string line = reader.Require("feature row");
      const std::vector<std::string> row = Tokenize(line);
      if (static_cast<int>(row.size()) != m) {
        throw ParseError("expected " + std::to_string(m) + " values, got " +
                             std::to_string(row.size()),
                         reader.line_number());
      }
      for (int i = 0; i < m; ++i) {
        agents[j](r, i) = ParseDouble(row[i], reader.line_number());
      }
    }
  }
  return FeatureTensor(std::move(agents));
}

void WriteProfile(const Profile& profile, std::ostream& out) {
  out << "kind=" << (profile.kind == OrderKind::kTopL ? "top-l" : "l-way")
      << " m=" << profile.num_alternatives << '\n';
  for (const Order& order : profile.orders) {
    out << (order.agent + 1) << ':';
    for (std::size_t p = 0; p < order.items.size(); ++p) {
      out << (p == 0 ? " " : " > ") << (order.items[p] + 1);
    }
    out << '\n';
  }
}

Profile ReadProfile(std::istream& in, int num_agents) {
  LineReader reader(in);
  const std::string header = reader.Require("profile header");
  const std::vector<std::string> tokens = Tokenize(header);
  if (tokens.size() != 2) {
    throw ParseError("profile header must be 'kind=<top-l|l-way> m=<int>'",
                     reader.line_number());
  }
  const std::string kind = KeyedValue(tokens[0], "kind", reader.line_number());
  Profile profile;
  if (kind == "top-l") {
    profile.kind = OrderKind::kTopL;
  } else if (kind == "l-way") {
    profile.kind = OrderKind::kLWay;
  } else {
    throw ParseError("unknown profile kind '" + kind + "'",
                     reader.line_number());
  }
  profile.num_alternatives = ParseInt(
      KeyedValue(tokens[1], "m", reader.line_number()), reader.line_number());
  if (profile.num_alternatives < 2) {
    throw ParseError("need m >= 2", reader.line_number());
  }

  std::string line;
  while (reader.Next(line)) {
    const int line_number = reader.line_number();
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError("expected 'agent: i1 > i2 > ...'", line_number);
    }
    Order order;
    const std::vector<std::string> agent_tokens =
        Tokenize(line.substr(0, colon));
    if (agent_tokens.size() != 1) {
      throw ParseError("expected a single agent id before ':'", line_number);
    }
    order.agent = ParseInt(agent_tokens[0], line_number) - 1;
    std::string rest = line.substr(colon + 1);
    for (std::string::size_type pos = rest.find('>');
         pos != std::string::npos; pos = rest.find('>')) {
      rest[pos] = ' ';
    }
    for (const std::string& token : Tokenize(rest)) {
      order.items.push_back(ParseInt(token, line_number) - 1);
    }
    try {
      ValidateOrder(order, profile.kind, profile.num_alternatives, num_agents);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_number);
    }
    profile.orders.push_back(std::move(order));
  }
  if (profile.orders.empty()) {
    throw ParseError("profile has no orders", reader.line_number() + 1);
  }
  return profile;
}

void WriteParams(const MixtureParams& params, std::ostream& out) {
  out << "k=" << params.num_components() << '\n';
  WriteVectorLine(out, "alpha", params.alpha);
  for (const Eigen::VectorXd& beta : params.betas) {
    WriteVectorLine(out, "beta", beta);
  }
  if (params.phi.size() > 0) {
    WriteVectorLine(out, "phi", params.phi);
  }
}

MixtureParams ReadParams(std::istream& in) {
  LineReader reader(in);
  const std::string header = reader.Require("params header");
  const std::vector<std::string> tokens = Tokenize(header);
  if (tokens.size() != 1) {
    throw ParseError("params header must be 'k=<int>'", reader.line_number());
  }
  const int k = ParseInt(KeyedValue(tokens[0], "k", reader.line_number()),
                         reader.line_number());
  if (k < 1) {
    throw ParseError("need k >= 1", reader.line_number());
  }
  MixtureParams params;
  params.alpha = ParseLabeledVector(reader.Require("alpha line"), "alpha",
                                    reader.line_number());
  if (params.alpha.size() != k) {
    throw ParseError("alpha has " + std::to_string(params.alpha.size()) +
                         " entries for k=" + std::to_string(k),
                     reader.line_number());
  }
  params.betas.resize(k);
  for (int r = 0; r < k; ++r) {
    params.betas[r] = ParseLabeledVector(reader.Require("beta line"), "beta",
                                         reader.line_number());
    if (params.betas[r].size() != params.betas[0].size()) {
      throw ParseError("beta lines disagree on dimension",
                       reader.line_number());
    }
  }
  std::string line;
  if (reader.Next(line)) {
    params.phi = ParseLabeledVector(line, "phi", reader.line_number());
  }
  return params;
}

void WriteMatrix(const Eigen::MatrixXd& matrix, std::ostream& out) {
  out << "rows=" << matrix.rows() << " cols=" << matrix.cols() << '\n';
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ' ';
      out << FormatDouble(matrix(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd ReadMatrix(std::istream& in) {
  LineReader reader(in);
  const std::string header = reader.Require("matrix header");
  const std::vector<std::string> tokens = Tokenize(header);
  if (tokens.size() != 2) {
    throw ParseError("matrix header must be 'rows=<int> cols=<int>'",
                     reader.line_number());
  }
  const int rows = ParseInt(KeyedValue(tokens[0], "rows", reader.line_number()),
                            reader.line_number());
  const int cols = ParseInt(KeyedValue(tokens[1], "cols", reader.line_number()),
                            reader.line_number());
  if (rows < 1 || cols < 1) {
    throw ParseError("matrix dimensions must be positive",
                     reader.line_number());
  }
  Eigen::MatrixXd matrix(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string line = reader.Require("matrix row");
    const std::vector<std::string> row = Tokenize(line);
    if (static_cast<int>(row.size()) != cols) {
      throw ParseError("expected " + std::to_string(cols) + " values, got " +
                           std::to_string(row.size()),
                       reader.line_number());
    }
    for (int c = 0; c < cols; ++c) {
      matrix(r, c) = ParseDouble(row[c], reader.line_number());
    }
  }
  return matrix;
}

std::string FormatIdReport(const IdReport& report) {
  std::ostringstream out;
  out << "verdict=" << ToString(report.verdict) << '\n'
      << "rank=" << report.rank << '\n'
      << "full_row_rank=" << (report.full_row_rank ? "true" : "false") << '\n'
      << "tolerance=" << FormatDouble(report.tolerance) << '\n'
      << "notes=" << report.notes << '\n';
  return out.str();
}

void WriteReportCsv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "n,trial,estimator,metric,value,ci_halfwidth,seconds\n";
  for (const ReportRow& row : rows) {
    out << row.n << ',' << row.trial << ',' << row.estimator << ','
        << row.metric << ',' << FormatDouble(row.value) << ',';
    if (row.ci_halfwidth.has_value()) out << FormatDouble(*row.ci_halfwidth);
    out << ',' << FormatDouble(row.seconds) << '\n';
  }
}

void SaveFeatures(const FeatureTensor& features, const std::string& path) {
  auto out = OpenForWrite(path);
  WriteFeatures(features, out);
}

FeatureTensor LoadFeatures(const std::string& path) {
  auto in = OpenForRead(path);
  return ReadFeatures(in);
}

void SaveProfile(const Profile& profile, const std::string& path) {
  auto out = OpenForWrite(path);
  WriteProfile(profile, out);
}

Profile LoadProfile(const std::string& path, int num_agents) {
  auto in = OpenForRead(path);
  return ReadProfile(in, num_agents);
}

void SaveParams(const MixtureParams& params, const std::string& path) {
  auto out = OpenForWrite(path);
  WriteParams(params, out);
}

MixtureParams LoadParams(const std::string& path) {
  auto in = OpenForRead(path);
  return ReadParams(in);
}

void SaveMatrix(const Eigen::MatrixXd& matrix, const std::string& path) {
  auto out = OpenForWrite(path);
  WriteMatrix(matrix, out);
}

Eigen::MatrixXd LoadMatrix(const std::string& path) {
  auto in = OpenForRead(path);
  return ReadMatrix(in);
}

void SaveReportCsv(const std::vector<ReportRow>& rows,
                   const std::string& path) {
  auto out = OpenForWrite(path);
  WriteReportCsv(rows, out);
}

}  // namespace featpl
