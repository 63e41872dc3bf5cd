#ifndef ACESUM_SUMMARIZER_H_
#define ACESUM_SUMMARIZER_H_

#include <span>
#include <string>
#include <vector>

#include "acesum/corpus.h"
#include "acesum/encoder.h"
#include "acesum/mil.h"
#include "acesum/synthesis.h"

namespace acesum {

// Which aspects a summary should cover, one indicator per aspect.
class Query {
 public:
  explicit Query(std::vector<bool> indicators);

  static Query all(std::size_t aspect_count);
  static Query of(std::size_t aspect_count, std::span<const std::size_t> codes);

  const std::vector<bool>& indicators() const { return indicators_; }
  std::vector<std::size_t> codes() const;
  std::size_t aspect_count() const { return indicators_.size(); }
  bool is_general() const;
  // Bit string, aspect 0 first, e.g. "101".
  std::string bitmask() const;

 private:
  std::vector<bool> indicators_;
};

struct SummarySentence {
  std::string text;
  std::string review_id;
  std::size_t sentence_index = 0;
  double salience = 0.0;
};

struct Summary {
  std::vector<SummarySentence> sentences;
  std::size_t token_count = 0;
};

struct LexRankConfig {
  double damping = 0.85;
  double similarity_threshold = 0.1;
  std::size_t max_iterations = 100;
  double convergence_tol = 1e-6;
  std::size_t summary_token_budget = 75;
  double redundancy_threshold = 0.8;
};

void validate(const LexRankConfig& config);

struct SummarizerConfig {
  std::size_t pool_token_budget = 500;
  LexRankConfig lexrank;
};

// Controller-ranked sentence pool for the query's code set.
std::vector<RankedSentence> select_pool(std::span<const Review> entity_reviews,
                                        const Query& query, const MilModel& model,
                                        const TokenEncoder& encoder,
                                        std::size_t pool_token_budget = 500);

double sentence_similarity(std::span<const std::string> a, std::span<const std::string> b,
                           const TokenEncoder& encoder);

// Stationary distribution of the thresholded similarity graph (damped power
// iteration). Rows without edges spread their mass uniformly.
Vector lexrank(std::span<const Vector> representations, const LexRankConfig& config);
Vector lexrank(std::span<const RankedSentence> sentences, const TokenEncoder& encoder,
               const LexRankConfig& config);

// Greedy by descending salience with a redundancy filter; stops at the
// first sentence that would exceed the token budget. Chosen sentences are
// returned in document order.
Summary extract_summary(std::span<const RankedSentence> pool, std::span<const double> scores,
                        const TokenEncoder& encoder, const LexRankConfig& config);

// select_pool -> lexrank -> extract_summary.
Summary summarize(std::span<const Review> entity_reviews, const Query& query,
                  const MilModel& model, const TokenEncoder& encoder,
                  const SummarizerConfig& config);

// Plain LexRank over every input sentence, no controller ranking.
Summary lexrank_baseline(std::span<const Review> entity_reviews, const TokenEncoder& encoder,
                         const LexRankConfig& config);

// Sentences scored by the best token/seed cosine, descending (stable).
std::vector<RankedSentence> seed_filter_baseline(std::span<const RankedSentence> sentences,
                                                 const AspectSpec& aspect,
                                                 const TokenEncoder& encoder);

// Index of the review closest (cosine) to the centroid of all reviews.
// Ties go to the lowest review_id.
std::size_t centroid_baseline(std::span<const Review> entity_reviews, const TokenEncoder& encoder);

}  // namespace acesum

#endif  // ACESUM_SUMMARIZER_H_
