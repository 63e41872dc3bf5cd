#ifndef ACESUM_TESTS_FIXTURES_H_
#define ACESUM_TESTS_FIXTURES_H_

#include <filesystem>
#include <string>

#include "acesum/corpus.h"
#include "acesum/encoder.h"

namespace fixture {

inline std::filesystem::path dir() { return ACESUM_FIXTURE_DIR; }
inline std::filesystem::path data() { return ACESUM_DATA_DIR; }

inline std::filesystem::path reviews_path() { return dir() / "hotel_reviews.jsonl"; }
inline std::filesystem::path embeddings_path() { return dir() / "embeddings_d16.txt"; }
inline std::filesystem::path eval_path() { return dir() / "eval_small.jsonl"; }
inline std::filesystem::path hotel_aspects_path() { return data() / "aspects" / "hotels.jsonl"; }

inline std::vector<acesum::AspectSpec> hotel_aspects() {
  return acesum::load_aspects(hotel_aspects_path());
}
inline acesum::Corpus hotel_corpus() {
  return acesum::load_corpus(reviews_path(), hotel_aspects());
}
inline acesum::EmbeddingTable table() { return acesum::load_embeddings(embeddings_path()); }

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("acesum_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixture

#endif  // ACESUM_TESTS_FIXTURES_H_
