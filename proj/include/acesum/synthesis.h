#ifndef ACESUM_SYNTHESIS_H_
#define ACESUM_SYNTHESIS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acesum/corpus.h"
#include "acesum/encoder.h"
#include "acesum/mil.h"

namespace acesum {

// Aspect controllers for one summary: document-level codes, keywords and
// aspect-relevant input sentences.
struct ControllerSet {
  std::vector<std::size_t> codes;  // ascending, unique
  std::vector<std::string> keywords;
  std::vector<std::string> sentences;

  bool operator==(const ControllerSet&) const = default;
};

// What rank_sentences / extract_keywords compare predictions against.
//   kSign        +1 on the summary's positive aspects, -1 elsewhere
//   kContinuous  the summary's raw document prediction
enum class TargetMode { kSign, kContinuous };

struct SynthConfig {
  std::size_t keyword_count = 10;
  std::size_t token_budget = 500;
  std::size_t max_examples_per_entity = 4;
  std::uint64_t seed = 0;
  TargetMode target_mode = TargetMode::kSign;
};

void validate(const SynthConfig& config);

// A sentence drawn from a list of reviews. `review` indexes that list.
struct RankedSentence {
  std::size_t review = 0;
  std::size_t sentence_index = 0;
  std::string review_id;
  std::string text;
  std::vector<std::string> tokens;
  double score = 0.0;
};

// Every sentence of every review, in review then sentence order, score 0.
std::vector<RankedSentence> collect_sentences(std::span<const Review> reviews);

// A pseudo-summary and its input reviews, as indices into the entity's
// review list.
struct PseudoSummary {
  std::size_t summary = 0;
  std::vector<std::size_t> inputs;
};

struct SyntheticExample {
  std::string entity_id;
  const Review* summary = nullptr;
  std::vector<const Review*> inputs;
  ControllerSet controllers;
};

class ControllerParseError : public std::runtime_error {
 public:
  ControllerParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Target vector: +1 for codes, -1 for every other aspect.
Vector code_target(std::span<const std::size_t> codes, std::size_t aspect_count);

// Soft-margin loss of a prediction against a target vector (lower = closer).
double match_score(std::span<const double> prediction, std::span<const double> target);
double aspect_match_score(std::span<const double> prediction,
                          std::span<const std::size_t> target_codes);

// Pseudo-summary candidates in seeded random order; a review qualifies when
// the model predicts at least one positive aspect for it. Requires at least
// two reviews.
std::vector<PseudoSummary> sample_pseudo_summaries(std::span<const Review> entity_reviews,
                                                   const MilModel& model,
                                                   const TokenEncoder& encoder,
                                                   const SynthConfig& config,
                                                   std::string_view entity_id = "");

// Sentences of `inputs` by ascending match score (ties keep input order),
// cut at the first sentence that would push the running token count past
// config.token_budget.
std::vector<RankedSentence> rank_sentences(std::span<const Review> inputs,
                                           std::span<const double> target,
                                           const MilModel& model, const TokenEncoder& encoder,
                                           const SynthConfig& config);
std::vector<RankedSentence> rank_sentences(std::span<const Review> inputs,
                                           std::span<const std::size_t> target_codes,
                                           const MilModel& model, const TokenEncoder& encoder,
                                           const SynthConfig& config);

// Best-scoring token types, at most config.keyword_count, ties by token.
std::vector<std::string> extract_keywords(std::span<const Review> inputs,
                                          std::span<const double> target, const MilModel& model,
                                          const TokenEncoder& encoder, const SynthConfig& config);
std::vector<std::string> extract_keywords(std::span<const Review> inputs,
                                          std::span<const std::size_t> target_codes,
                                          const MilModel& model, const TokenEncoder& encoder,
                                          const SynthConfig& config);

// "[CODE] [ASPECT_i] ... [KEY] k1 k2 ... [SNT] s1 [SNT] s2 ..."
std::string serialize_controllers(const ControllerSet& controllers, std::size_t aspect_count);
ControllerSet parse_controllers(std::string_view text, std::size_t aspect_count);

// Controllers for one pseudo-summary of an entity.
SyntheticExample make_example(const Entity& entity, const PseudoSummary& pick,
                              const MilModel& model, const TokenEncoder& encoder,
                              const SynthConfig& config);

struct DatasetStats {
  std::map<std::string, std::size_t> per_entity;
  std::size_t total = 0;
};

// Writes a header line, then one JSON record per example:
// {"entity_id", "summary_text", "controller_string", "input_review_ids"}.
DatasetStats build_dataset(const Corpus& corpus, const MilModel& model,
                           const TokenEncoder& encoder, const SynthConfig& config,
                           std::ostream& out);
DatasetStats build_dataset(const Corpus& corpus, const MilModel& model,
                           const TokenEncoder& encoder, const SynthConfig& config,
                           const std::filesystem::path& out_path);

}  // namespace acesum

#endif  // ACESUM_SYNTHESIS_H_
