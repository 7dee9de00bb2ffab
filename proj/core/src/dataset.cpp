// Copyright 2026 The bicolor Authors. All Rights Reserved.
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
// =============================================================================
#include "bicolor/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

#include "bicolor/errors.hpp"

namespace bicolor {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  double v = 0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || first == ptr)
    throw ParseError(line, std::string("malformed ") + what + " '" +
                               std::string(tok) + "'");
  if (!std::isfinite(v))
    throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

SparseRow parse_line(std::string_view text, std::size_t line) {
  SparseRow row;
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') ++pos;
    return text.substr(start, pos - start);
  };

  const double label = parse_double(next_token(), line, "label");
  if (label == 1.0)
    row.label = 1.0;
  else if (label == -1.0 || label == 0.0)
    row.label = -1.0;
  else
    throw ParseError(line, "label must be -1, 0 or +1");

  std::uint64_t last = 0;
  for (auto tok = next_token(); !tok.empty(); tok = next_token()) {
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos)
      throw ParseError(line, "expected idx:val, got '" + std::string(tok) + "'");
    std::uint64_t idx = 0;
    const auto idx_tok = tok.substr(0, colon);
    const auto [ptr, ec] =
        std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
    if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0)
      throw ParseError(line, "malformed index '" + std::string(idx_tok) + "'");
    if (idx > 0xffffffffull) throw ParseError(line, "index too large");
    if (idx <= last) throw ParseError(line, "indices must be ascending");
    last = idx;
    row.indices.push_back(static_cast<std::uint32_t>(idx - 1));
    row.values.push_back(parse_double(tok.substr(colon + 1), line, "value"));
  }
  return row;
}

SparseDataset finish(SparseDataset data, std::size_t max_index,
                     std::optional<std::size_t> dimension) {
  data.d = max_index;
  if (dimension) {
    if (*dimension < max_index)
      throw ContractViolation("dimension override " +
                              std::to_string(*dimension) +
                              " is below the largest index " +
                              std::to_string(max_index));
    data.d = *dimension;
  }
  return data;
}

void add_line(SparseDataset& data, std::string_view raw, std::size_t line,
              std::size_t& max_index) {
  auto text = raw;
  if (const auto hash = text.find('#'); hash != std::string_view::npos)
    text = text.substr(0, hash);
  text = trim(text);
  if (text.empty()) return;
  SparseRow row = parse_line(text, line);
  if (!row.indices.empty())
    max_index = std::max<std::size_t>(max_index, row.indices.back() + 1);
  data.rows.push_back(std::move(row));
}

}  // namespace

Eigen::SparseMatrix<double, Eigen::RowMajor> SparseDataset::matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < rows[r].indices.size(); ++j)
      triplets.emplace_back(static_cast<int>(r),
                            static_cast<int>(rows[r].indices[j]),
                            rows[r].values[j]);
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::VectorXd SparseDataset::labels() const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) b[r] = rows[r].label;
  return b;
}

SparseDataset parse_libsvm(std::istream& in,
                           std::optional<std::size_t> dimension) {
  SparseDataset data;
  std::size_t max_index = 0;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) add_line(data, line, ++number, max_index);
  return finish(std::move(data), max_index, dimension);
}

SparseDataset load_libsvm(const std::string& path,
                          std::optional<std::size_t> dimension) {
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path);
  std::string content;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0)
    content.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw std::runtime_error("read error in " + path);
  std::istringstream in(std::move(content));
  return parse_libsvm(in, dimension);
}

void write_libsvm(std::ostream& out, const SparseDataset& data) {
  char buf[64];
  for (const auto& row : data.rows) {
    out << (row.label > 0 ? "+1" : "-1");
    for (std::size_t j = 0; j < row.indices.size(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), row.values[j]);
      out << ' ' << (row.indices[j] + 1) << ':'
          << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

Partition partition(const SparseDataset& data, std::size_t n, Rng& rng) {
  if (n == 0) throw ContractViolation("partition: n must be positive");
  if (n > data.size())
    throw ContractViolation("partition: n=" + std::to_string(n) +
                            " exceeds row count " +
                            std::to_string(data.size()));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);

  const std::size_t m = data.size() / n;
  Partition out;
  out.shards.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    out.shards[s].d = data.d;
    out.shards[s].rows.reserve(m);
    for (std::size_t r = 0; r < m; ++r)
      out.shards[s].rows.push_back(data.rows[order[s * m + r]]);
  }
  for (std::size_t r = n * m; r < order.size(); ++r)
    out.discarded.push_back(data.rows[order[r]]);
  return out;
}

double estimate_L(const SparseDataset& shard, double mu, double tol,
                  std::size_t max_iterations) {
  if (shard.size() == 0) throw ContractViolation("estimate_L: empty shard");
  const auto a = shard.matrix();
  const double scale = 1.0 / (4.0 * static_cast<double>(shard.size()));
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(shard.d));
  // A start vector orthogonal to the top eigenvector would stall; perturb
  // deterministically.
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] += 1e-3 * static_cast<double>(j % 7);
  if (v.size() == 0) return mu;
  v.normalize();
  double lambda = 0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0) return mu;
    v = w / norm;
    if (std::abs(next - lambda) <= tol * std::abs(next))
      return scale * next + mu;
    lambda = next;
  }
  throw NonConvergence("estimate_L: power iteration did not converge",
                       scale * lambda + mu);
}

double scale_mu_for_kappa(double L_data, double kappa) {
  if (!(kappa > 1.0)) throw ContractViolation("kappa must exceed 1");
  if (std::isinf(kappa)) return 0.0;
  return L_data / (kappa - 1.0);
}

SparseDataset make_synthetic_logistic(const SyntheticLogisticSpec& spec) {
  if (spec.rows == 0 || spec.d == 0)
    throw ContractViolation("synthetic logistic: rows and d must be positive");
  Rng rng(spec.seed);
  std::vector<double> w(spec.d);
  for (auto& v : w) v = rng.normal();
  const std::size_t nnz = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(spec.density * spec.d)));
  SparseDataset data;
  data.d = spec.d;
  data.rows.reserve(spec.rows);
  const double inv = 1.0 / std::sqrt(static_cast<double>(nnz));
  for (std::size_t r = 0; r < spec.rows; ++r) {
    SparseRow row;
    row.indices = sample_subset(rng, spec.d, std::min(nnz, spec.d));
    double margin = 0;
    for (const auto j : row.indices) {
      const double v = rng.normal() * inv;
      row.values.push_back(v);
      margin += v * w[j];
    }
    row.label = margin >= 0 ? 1.0 : -1.0;
    if (rng.bernoulli(spec.label_noise)) row.label = -row.label;
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace bicolor
