#ifndef ACESUM_EVAL_H_
#define ACESUM_EVAL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "acesum/corpus.h"
#include "acesum/encoder.h"
#include "acesum/mil.h"
#include "acesum/summarizer.h"

namespace acesum {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RougeScore {
  PrfScore r1;
  PrfScore r2;
  PrfScore rl;
};

// F1 = 2pr / (p + r), 0 when p + r = 0.
PrfScore make_prf(double precision, double recall);

// Clipped n-gram overlap. Empty candidate or reference scores all zeros.
PrfScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                 int n);
PrfScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

RougeScore rouge(std::span<const std::string> candidate, std::span<const std::string> reference);

enum class RefAggregation { kMean, kMax };

// Per-reference scores aggregated component-wise. Throws on no references.
RougeScore multi_ref_score(std::span<const std::string> candidate,
                           std::span<const std::vector<std::string>> references,
                           RefAggregation aggregation = RefAggregation::kMean);

// Tokens of every summary sentence, in order.
std::vector<std::string> summary_tokens(const Summary& summary);

// Synthetic corpus whose sentence aspects are known by construction. Each
// aspect owns a cluster of words in embedding space; every sentence mixes a
// few words of one aspect with generic filler words.
struct PlantedSpec {
  std::size_t aspect_count = 3;
  std::size_t dimension = 16;
  std::size_t words_per_aspect = 12;
  std::size_t seeds_per_aspect = 4;
  std::size_t generic_words = 40;
  std::size_t min_sentences = 1;
  std::size_t max_sentences = 4;
  std::size_t min_aspect_words = 1;
  std::size_t max_aspect_words = 2;
  std::size_t min_generic_words = 3;
  std::size_t max_generic_words = 7;
  double cluster_spread = 0.35;
  // Aspect word w is drawn with weight 1 / (w + 1)^zipf_exponent, so the
  // seeds (the first words of each cluster) are the most frequent ones.
  double zipf_exponent = 1.0;
  // Chance that a sentence also carries one word of a different aspect.
  double stray_probability = 0.0;
};

struct PlantedCorpus {
  Corpus corpus;
  EmbeddingTable table{1};
  std::map<std::string, std::vector<std::size_t>> sentence_gold;  // review_id -> aspect per sentence
  std::map<std::string, std::vector<std::size_t>> document_gold;  // review_id -> sorted aspects
  std::vector<std::vector<std::string>> aspect_words;              // aspect -> cluster words

  // Silver labels for every review in corpus order.
  std::vector<AspectLabels> silver_labels() const;
};

PlantedCorpus make_planted_corpus(std::uint64_t seed, std::size_t entity_count,
                                  std::size_t reviews_per_entity, const PlantedSpec& spec = {});

struct AspectF1 {
  double doc_f1 = 0.0;
  double sent_f1 = 0.0;
};

// Micro-averaged F1 of sign-binarized document and sentence predictions
// against the planted gold labels.
AspectF1 aspect_f1(const MilModel& model, const PlantedCorpus& planted);

// Micro F1 from parallel predicted / gold aspect sets.
double micro_f1(std::span<const std::vector<std::size_t>> predicted,
                std::span<const std::vector<std::size_t>> gold);

struct AblationRow {
  Pooling pooling = Pooling::kMip;
  AspectF1 scores;
};

// Trains one model per pooling variant on the same data and seed.
std::vector<AblationRow> run_ablation(const PlantedCorpus& planted, const TrainConfig& base,
                                      std::span<const Pooling> variants);

std::string format_ablation_table(std::span<const AblationRow> rows);
std::string ablation_records(std::span<const AblationRow> rows);

struct EvalRow {
  std::string system;
  std::string task;  // "general" or an aspect name
  std::size_t examples = 0;
  RougeScore score;
};

struct EvalOptions {
  SummarizerConfig summarizer;
  RefAggregation aggregation = RefAggregation::kMean;
};

// Scores AceSumExt and the extractive baselines on every populated slot of
// every example. Rows are means over the scored examples.
std::vector<EvalRow> evaluate(std::span<const EvalExample> examples,
                              const std::vector<AspectSpec>& aspects, const MilModel& model,
                              const TokenEncoder& encoder, const EvalOptions& options);

std::string format_eval_table(std::span<const EvalRow> rows);
std::string eval_records(std::span<const EvalRow> rows);

}  // namespace acesum

#endif  // ACESUM_EVAL_H_
