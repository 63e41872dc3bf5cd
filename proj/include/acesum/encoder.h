#ifndef ACESUM_ENCODER_H_
#define ACESUM_ENCODER_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acesum/matrix.h"

namespace acesum {

// Frozen token encoder: maps a token sequence to one row per token.
// Nothing in training writes through this interface.
class TokenEncoder {
 public:
  virtual ~TokenEncoder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Matrix encode(std::span<const std::string> tokens) const = 0;
};

// Static word vectors. Out-of-vocabulary tokens share the zero vector.
class EmbeddingTable final : public TokenEncoder {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  // Throws if the vector length differs from dimension() or the token exists.
  void add(std::string token, std::span<const double> vector);

  std::size_t dimension() const override { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  std::span<const double> lookup(std::string_view token) const;
  std::span<const double> oov_vector() const { return oov_; }

  // Tokens in insertion order.
  const std::vector<std::string>& tokens() const { return tokens_; }

  Matrix encode(std::span<const std::string> tokens) const override;

  // A copy with every vector multiplied by `factor`.
  EmbeddingTable scaled(double factor) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::size_t dimension_;
  std::vector<std::string> tokens_;
  std::vector<double> storage_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::vector<double> oov_;
};

// Text vector format: "token v1 ... vd" per line. The dimension comes from
// the first line. A leading word2vec "<count> <dim>" header is accepted.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable load_embeddings_from_string(std::string_view content);

// Writes the table in the text vector format with round-trip exact numbers.
std::string format_embeddings(const EmbeddingTable& table);

// Mean of the rows. Throws on an empty matrix.
Vector sentence_repr(const Matrix& token_rows);

}  // namespace acesum

#endif  // ACESUM_ENCODER_H_
