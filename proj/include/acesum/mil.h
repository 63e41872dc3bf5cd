#ifndef ACESUM_MIL_H_
#define ACESUM_MIL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acesum/corpus.h"
#include "acesum/encoder.h"
#include "acesum/matrix.h"

namespace acesum {

// How lower-level predictions are aggregated into a bag prediction.
//   kMip        per-head attention, then max over heads
//   kMax        per-aspect max over instances
//   kMean       per-aspect mean over instances
//   kAttention  a single attention head, no outer max
enum class Pooling { kMip, kMax, kMean, kAttention };

std::string_view pooling_name(Pooling pooling);
Pooling parse_pooling(std::string_view name);

struct AttentionHead {
  Matrix weight;  // d x d
  Vector bias;    // d
  Vector query;   // d

  bool operator==(const AttentionHead&) const = default;
};

struct PoolLevel {
  std::vector<AttentionHead> heads;

  bool operator==(const PoolLevel&) const = default;
};

// Controller induction model. Token head: z = tanh(W e + b) with W stored
// M x d. Two pooling levels (tokens -> sentence, sentences -> document)
// with independent parameters.
struct MilModel {
  std::size_t dimension = 0;
  std::size_t aspect_count = 0;
  std::size_t head_count = 0;
  Pooling pooling = Pooling::kMip;

  Matrix token_weight;  // M x d
  Vector token_bias;    // M
  PoolLevel token_to_sentence;
  PoolLevel sentence_to_document;

  static MilModel zeros(std::size_t dimension, std::size_t aspect_count, std::size_t head_count,
                        Pooling pooling = Pooling::kMip);

  // Every parameter uniform in [-1/sqrt(d), 1/sqrt(d)], drawn in
  // parameter_blocks() order.
  static MilModel initialize(std::size_t dimension, std::size_t aspect_count,
                             std::size_t head_count, Pooling pooling, std::uint64_t seed);

  // Parameter tensors in the canonical order used by the model file:
  // token_weight, token_bias, then for each level (token->sentence first)
  // and each head: weight, bias, query.
  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;
  std::size_t parameter_count() const;

  bool operator==(const MilModel&) const = default;
};

struct AspectPredictions {
  Matrix tokens;     // N_tokens x M, all sentences concatenated
  Matrix sentences;  // N_sentences x M
  Vector document;   // M
};

// Caps applied while training only. Zero means unlimited.
struct TruncationLimits {
  std::size_t max_sentences = 0;
  std::size_t max_tokens_per_sentence = 0;
};

// Row-wise tanh(W e_k + b).
Matrix token_predict(const Matrix& encodings, const MilModel& model);

// Multiple instance pooling over a bag of K instances.
Vector mip_pool(const Matrix& z_lower, const Matrix& keys_input, const PoolLevel& level);

Vector pool_variant(const Matrix& z_lower, const Matrix& keys_input, const PoolLevel& level,
                    Pooling variant);

AspectPredictions forward(const Review& review, const TokenEncoder& encoder, const MilModel& model,
                          TruncationLimits limits = {});

// sum_a log(1 + exp(-z[a] * label[a])), evaluated without overflow.
double soft_margin_loss(std::span<const double> z, std::span<const int> labels);

// Loss of the document prediction and its exact gradient with respect to
// every model parameter. `gradient` is resized and overwritten.
double loss_and_gradient(const Review& review, std::span<const int> labels,
                         const TokenEncoder& encoder, const MilModel& model, MilModel& gradient,
                         TruncationLimits limits = {});

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t steps = 100000;
  std::size_t heads = 12;
  std::size_t warmup_steps = 10000;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  Pooling pooling = Pooling::kMip;
  TruncationLimits limits{128, 128};
  std::size_t log_every = 1000;
};

void validate(const TrainConfig& config);

// Learning rate at 0-based step: linear warm-up, then constant.
double scheduled_learning_rate(const TrainConfig& config, std::size_t step);

using TrainLogger = std::function<void(std::size_t step, double mean_loss)>;

// One review per step, visiting reviews in a seeded shuffled order each
// epoch. `labels` has one entry per review in corpus order. Reviews without
// tokens are skipped. Throws on a non-finite loss, naming the step.
MilModel train(const Corpus& corpus, const std::vector<AspectLabels>& labels,
               const TokenEncoder& encoder, const TrainConfig& config,
               const TrainLogger& logger = {});

// Aspect ids with positive document prediction, ascending.
std::vector<std::size_t> predict_document_aspects(const Review& review,
                                                  const TokenEncoder& encoder,
                                                  const MilModel& model);

std::string serialize_model(const MilModel& model);
MilModel parse_model(std::string_view text);
void save_model(const MilModel& model, const std::filesystem::path& path);
MilModel load_model(const std::filesystem::path& path);

// Hex FNV-1a digest of the serialized model.
std::string model_fingerprint(const MilModel& model);

}  // namespace acesum

#endif  // ACESUM_MIL_H_
