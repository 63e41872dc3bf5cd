#ifndef ACESUM_CORPUS_H_
#define ACESUM_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace acesum {

struct Sentence {
  std::size_t index = 0;            // ordinal within the review, dense from 0
  std::vector<std::string> tokens;  // lowercase, never empty
  std::string raw;                  // surface form
};

struct Review {
  std::string entity_id;
  std::string review_id;
  std::string text;  // whitespace-normalized
  std::vector<Sentence> sentences;

  // Normalizes whitespace and segments the text. Throws when the text is
  // empty after normalization.
  static Review make(std::string entity_id, std::string review_id, std::string_view text);

  std::size_t token_count() const;
};

struct AspectSpec {
  std::size_t aspect_id = 0;
  std::string name;
  std::vector<std::string> seeds;  // lowercase, sorted, unique
};

struct Entity {
  std::string id;
  std::vector<Review> reviews;  // ordered by review_id
};

struct Corpus {
  std::string domain;
  std::vector<Entity> entities;  // ordered by id
  std::vector<AspectSpec> aspects;

  const Entity* find_entity(std::string_view id) const;
  std::size_t review_count() const;
  std::size_t aspect_count() const { return aspects.size(); }
};

struct EvalExample {
  std::string entity_id;
  std::vector<Review> input_reviews;
  std::vector<std::string> general_refs;
  std::map<std::size_t, std::vector<std::string>> aspect_refs;  // aspect_id -> refs
};

// Silver document labels, entries +1 / -1, one per aspect.
using AspectLabels = std::vector<int>;

std::string normalize_whitespace(std::string_view text);

// Rule-based segmentation on '.', '!' or '?' followed by whitespace and an
// uppercase letter (or end of text). Known abbreviations never end a
// sentence. Pieces without tokens are dropped.
std::vector<Sentence> split_sentences(std::string_view text);

// Lowercases ASCII letters, splits on whitespace and ASCII punctuation and
// drops the punctuation. Digits and non-ASCII bytes are word characters.
std::vector<std::string> tokenize(std::string_view sentence_raw);

// The committed abbreviation guard list (lowercase, without the period).
const std::vector<std::string>& abbreviations();

AspectLabels silver_label(const Review& review, const std::vector<AspectSpec>& aspects);

std::vector<AspectSpec> make_aspects(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& named_seeds);

// Line-delimited JSON, one {"entity_id", "review_id", "text"} per line.
Corpus load_corpus(const std::filesystem::path& path, std::vector<AspectSpec> aspects,
                   std::string domain = "");
Corpus load_corpus_from_string(std::string_view content, std::vector<AspectSpec> aspects,
                               std::string domain = "");

// Line-delimited JSON, one {"name", "seeds": [...]} per line.
std::vector<AspectSpec> load_aspects(const std::filesystem::path& path);
std::vector<AspectSpec> load_aspects_from_string(std::string_view content);

// Line-delimited JSON, one entity per line:
// {"entity_id", "reviews": [{"review_id", "text"}],
//  "summaries": {"general": [...], "aspects": {"<name>": [...]}}}
std::vector<EvalExample> load_eval_set(const std::filesystem::path& path,
                                       const std::vector<AspectSpec>& aspects);
std::vector<EvalExample> load_eval_set_from_string(std::string_view content,
                                                   const std::vector<AspectSpec>& aspects);

// Builds a corpus from already constructed reviews, applying the loader's
// ordering and duplicate checks.
Corpus make_corpus(std::vector<Review> reviews, std::vector<AspectSpec> aspects,
                   std::string domain = "");

}  // namespace acesum

#endif  // ACESUM_CORPUS_H_
