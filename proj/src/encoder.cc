#include "acesum/encoder.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "acesum/numeric_format.h"

namespace acesum {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: length mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  const double c = ab / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingTable::EmbeddingTable(std::size_t dimension)
    : dimension_(dimension), oov_(dimension, 0.0) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

void EmbeddingTable::add(std::string token, std::span<const double> vector) {
  if (vector.size() != dimension_) {
    throw std::invalid_argument("embedding for '" + token + "' has " +
                                std::to_string(vector.size()) + " values, expected " +
                                std::to_string(dimension_));
  }
  if (index_.contains(token)) throw std::invalid_argument("duplicate embedding for '" + token + "'");
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  storage_.insert(storage_.end(), vector.begin(), vector.end());
}

bool EmbeddingTable::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

std::span<const double> EmbeddingTable::lookup(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return oov_;
  return {storage_.data() + it->second * dimension_, dimension_};
}

Matrix EmbeddingTable::encode(std::span<const std::string> tokens) const {
  Matrix out(tokens.size(), dimension_);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto v = lookup(tokens[k]);
    std::copy(v.begin(), v.end(), out.row(k).begin());
  }
  return out;
}

EmbeddingTable EmbeddingTable::scaled(double factor) const {
  EmbeddingTable out(dimension_);
  std::vector<double> buffer(dimension_);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    for (std::size_t c = 0; c < dimension_; ++c) buffer[c] = storage_[i * dimension_ + c] * factor;
    out.add(tokens_[i], buffer);
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable load_embeddings_from_string(std::string_view content) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t pos = 0;
  std::size_t line_number = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_number;
    lines.emplace_back(line_number, content.substr(pos, end - pos));
    pos = end + 1;
  }

  std::size_t first = 0;
  while (first < lines.size() && split_fields(lines[first].second).empty()) ++first;
  if (first == lines.size()) throw std::runtime_error("empty embedding file");

  // word2vec header: two integer fields.
  {
    const auto fields = split_fields(lines[first].second);
    std::size_t count = 0, dim = 0;
    if (fields.size() == 2 && parse_size(fields[0], count) && parse_size(fields[1], dim)) ++first;
  }

  std::optional<EmbeddingTable> table;
  std::vector<double> values;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto [number, line] = lines[i];
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string where = "line " + std::to_string(number);
    if (fields.size() < 2) throw std::runtime_error(where + ": token without a vector");
    const std::size_t dim = fields.size() - 1;
    if (!table) table.emplace(dim);
    if (dim != table->dimension()) {
      throw std::runtime_error(where + ": dimension mismatch (" + std::to_string(dim) +
                               " values, expected " + std::to_string(table->dimension()) + ")");
    }
    values.assign(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
      if (!parse_double(fields[c + 1], values[c]) || !std::isfinite(values[c])) {
        throw std::runtime_error(where + ": bad number '" + std::string(fields[c + 1]) + "'");
      }
    }
    try {
      table->add(std::string(fields[0]), values);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  if (!table) throw std::runtime_error("empty embedding file");
  return std::move(*table);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_embeddings_from_string(buffer.str());
}

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out;
  for (const auto& token : table.tokens()) {
    out += token;
    for (double v : table.lookup(token)) {
      out.push_back(' ');
      out += format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

Vector sentence_repr(const Matrix& token_rows) {
  if (token_rows.rows() == 0) throw std::invalid_argument("sentence_repr: empty sentence");
  Vector mean(token_rows.cols(), 0.0);
  for (std::size_t k = 0; k < token_rows.rows(); ++k) {
    const auto row = token_rows.row(k);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  const double n = static_cast<double>(token_rows.rows());
  for (double& v : mean) v /= n;
  return mean;
}

}  // namespace acesum
