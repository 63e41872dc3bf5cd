#include "acesum/mil.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "acesum/numeric_format.h"
#include "acesum/random.h"

namespace acesum {

namespace {

constexpr std::string_view kModelMagic = "acesum-mil-model";
constexpr int kModelVersion = 1;

// softplus(t) = log(1 + exp(t)) without overflow.
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

PoolLevel make_level(std::size_t dimension, std::size_t heads) {
  PoolLevel level;
  for (std::size_t h = 0; h < heads; ++h) {
    level.heads.push_back(AttentionHead{Matrix(dimension, dimension), Vector(dimension, 0.0),
                                        Vector(dimension, 0.0)});
  }
  return level;
}

void check_level(const PoolLevel& level, std::size_t dimension) {
  if (level.heads.empty()) throw std::invalid_argument("pooling level has no heads");
  for (const auto& head : level.heads) {
    if (head.weight.rows() != dimension || head.weight.cols() != dimension ||
        head.bias.size() != dimension || head.query.size() != dimension) {
      throw std::invalid_argument("attention head shape does not match key dimension");
    }
  }
}

// Forward state of one pooled bag, kept for the backward pass.
struct PoolCache {
  std::vector<Matrix> keys;       // per head: K x d, tanh outputs
  std::vector<Vector> attention;  // per head: K weights
  Matrix head_outputs;            // heads x M
  std::vector<std::size_t> winner;  // per aspect: head (mip) or instance (max)
};

void attend(const Matrix& z_lower, const Matrix& keys_input, const AttentionHead& head,
            Matrix& keys, Vector& attention, std::span<double> output) {
  const std::size_t bag = z_lower.rows();
  const std::size_t dim = keys_input.cols();
  keys = Matrix(bag, dim);
  attention.assign(bag, 0.0);
  for (std::size_t k = 0; k < bag; ++k) {
    const auto x = keys_input.row(k);
    auto key = keys.row(k);
    for (std::size_t i = 0; i < dim; ++i) {
      key[i] = std::tanh(dot(head.weight.row(i), x) + head.bias[i]);
    }
    attention[k] = dot(key, head.query);
  }
  const double top = *std::max_element(attention.begin(), attention.end());
  double total = 0.0;
  for (double& s : attention) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : attention) s /= total;

  std::fill(output.begin(), output.end(), 0.0);
  for (std::size_t k = 0; k < bag; ++k) {
    const auto z = z_lower.row(k);
    for (std::size_t m = 0; m < output.size(); ++m) output[m] += z[m] * attention[k];
  }
}

Vector pool_forward(const Matrix& z_lower, const Matrix& keys_input, const PoolLevel& level,
                    Pooling variant, PoolCache& cache) {
  const std::size_t bag = z_lower.rows();
  const std::size_t aspects = z_lower.cols();
  if (bag == 0) throw std::invalid_argument("empty bag");
  if (keys_input.rows() != bag) {
    throw std::invalid_argument("pooling keys and predictions disagree on bag size");
  }
  Vector out(aspects, 0.0);
  cache.winner.assign(aspects, 0);

  switch (variant) {
    case Pooling::kMax:
      for (std::size_t m = 0; m < aspects; ++m) {
        out[m] = z_lower(0, m);
        for (std::size_t k = 1; k < bag; ++k) {
          if (z_lower(k, m) > out[m]) {
            out[m] = z_lower(k, m);
            cache.winner[m] = k;
          }
        }
      }
      return out;
    case Pooling::kMean:
      for (std::size_t k = 0; k < bag; ++k) {
        for (std::size_t m = 0; m < aspects; ++m) out[m] += z_lower(k, m);
      }
      for (double& v : out) v /= static_cast<double>(bag);
      return out;
    case Pooling::kAttention:
    case Pooling::kMip: {
      const std::size_t heads = variant == Pooling::kAttention ? 1 : level.heads.size();
      if (level.heads.empty()) throw std::invalid_argument("pooling level has no heads");
      if (level.heads[0].weight.cols() != keys_input.cols()) {
        throw std::invalid_argument("pooling key dimension mismatch");
      }
      cache.keys.resize(heads);
      cache.attention.resize(heads);
      cache.head_outputs = Matrix(heads, aspects);
      for (std::size_t h = 0; h < heads; ++h) {
        attend(z_lower, keys_input, level.heads[h], cache.keys[h], cache.attention[h],
               cache.head_outputs.row(h));
      }
      // Max over heads; ties resolve to the lowest head index.
      for (std::size_t m = 0; m < aspects; ++m) {
        out[m] = cache.head_outputs(0, m);
        for (std::size_t h = 1; h < heads; ++h) {
          if (cache.head_outputs(h, m) > out[m]) {
            out[m] = cache.head_outputs(h, m);
            cache.winner[m] = h;
          }
        }
      }
      return out;
    }
  }
  throw std::logic_error("unknown pooling variant");
}

// Accumulates d(loss)/d(z_lower) into d_lower and parameter gradients into
// d_level, given d(loss)/d(output).
void pool_backward(const Matrix& z_lower, const Matrix& keys_input, const PoolLevel& level,
                   Pooling variant, const PoolCache& cache, std::span<const double> d_out,
                   Matrix& d_lower, PoolLevel& d_level) {
  const std::size_t bag = z_lower.rows();
  const std::size_t aspects = z_lower.cols();
  switch (variant) {
    case Pooling::kMax:
      for (std::size_t m = 0; m < aspects; ++m) d_lower(cache.winner[m], m) += d_out[m];
      return;
    case Pooling::kMean:
      for (std::size_t k = 0; k < bag; ++k) {
        for (std::size_t m = 0; m < aspects; ++m) {
          d_lower(k, m) += d_out[m] / static_cast<double>(bag);
        }
      }
      return;
    case Pooling::kAttention:
    case Pooling::kMip:
      break;
  }

  const std::size_t heads = cache.head_outputs.rows();
  const std::size_t dim = keys_input.cols();
  Vector d_head(aspects);
  Vector d_attention(bag);
  Vector d_pre(dim);
  for (std::size_t h = 0; h < heads; ++h) {
    bool used = false;
    for (std::size_t m = 0; m < aspects; ++m) {
      d_head[m] = cache.winner[m] == h ? d_out[m] : 0.0;
      used = used || d_head[m] != 0.0;
    }
    if (!used) continue;

    const auto& attention = cache.attention[h];
    const auto& keys = cache.keys[h];
    const auto& head = level.heads[h];
    auto& grad = d_level.heads[h];

    double expected = 0.0;
    for (std::size_t k = 0; k < bag; ++k) {
      const auto z = z_lower.row(k);
      auto dz = d_lower.row(k);
      double da = 0.0;
      for (std::size_t m = 0; m < aspects; ++m) {
        dz[m] += attention[k] * d_head[m];
        da += d_head[m] * z[m];
      }
      d_attention[k] = da;
      expected += attention[k] * da;
    }
    for (std::size_t k = 0; k < bag; ++k) {
      const double d_score = attention[k] * (d_attention[k] - expected);
      if (d_score == 0.0) continue;
      const auto key = keys.row(k);
      const auto x = keys_input.row(k);
      for (std::size_t i = 0; i < dim; ++i) {
        grad.query[i] += d_score * key[i];
        d_pre[i] = d_score * head.query[i] * (1.0 - key[i] * key[i]);
        grad.bias[i] += d_pre[i];
        auto w = grad.weight.row(i);
        for (std::size_t j = 0; j < dim; ++j) w[j] += d_pre[i] * x[j];
      }
    }
  }
}

struct SentenceState {
  Matrix encodings;  // K x d
  Matrix z_tokens;   // K x M
  PoolCache cache;
};

struct DocumentState {
  std::vector<SentenceState> sentences;
  Matrix sentence_keys;  // S x d
  Matrix z_sentences;    // S x M
  Vector z_document;
  PoolCache cache;
};

DocumentState run_forward(const Review& review, const TokenEncoder& encoder,
                          const MilModel& model, TruncationLimits limits) {
  if (encoder.dimension() != model.dimension) {
    throw std::invalid_argument("encoder dimension " + std::to_string(encoder.dimension()) +
                                " does not match model dimension " +
                                std::to_string(model.dimension));
  }
  std::size_t sentence_count = review.sentences.size();
  if (limits.max_sentences > 0) sentence_count = std::min(sentence_count, limits.max_sentences);

  DocumentState state;
  state.sentences.resize(sentence_count);
  state.sentence_keys = Matrix(sentence_count, model.dimension);
  state.z_sentences = Matrix(sentence_count, model.aspect_count);
  for (std::size_t s = 0; s < sentence_count; ++s) {
    std::span<const std::string> tokens = review.sentences[s].tokens;
    if (limits.max_tokens_per_sentence > 0 && tokens.size() > limits.max_tokens_per_sentence) {
      tokens = tokens.first(limits.max_tokens_per_sentence);
    }
    if (tokens.empty()) throw std::invalid_argument("sentence without tokens");
    auto& sentence = state.sentences[s];
    sentence.encodings = encoder.encode(tokens);
    sentence.z_tokens = token_predict(sentence.encodings, model);
    const auto z = pool_forward(sentence.z_tokens, sentence.encodings, model.token_to_sentence,
                                model.pooling, sentence.cache);
    std::copy(z.begin(), z.end(), state.z_sentences.row(s).begin());
    const auto key = sentence_repr(sentence.encodings);
    std::copy(key.begin(), key.end(), state.sentence_keys.row(s).begin());
  }
  if (sentence_count == 0) {
    throw std::invalid_argument("review " + review.review_id + " has no tokens");
  }
  state.z_document = pool_forward(state.z_sentences, state.sentence_keys,
                                  model.sentence_to_document, model.pooling, state.cache);
  return state;
}

void zero_like(const MilModel& model, MilModel& gradient) {
  if (gradient.dimension != model.dimension || gradient.aspect_count != model.aspect_count ||
      gradient.head_count != model.head_count || gradient.pooling != model.pooling) {
    gradient = MilModel::zeros(model.dimension, model.aspect_count, model.head_count,
                               model.pooling);
    return;
  }
  for (auto block : gradient.parameter_blocks()) std::fill(block.begin(), block.end(), 0.0);
}

}  // namespace

std::string_view pooling_name(Pooling pooling) {
  switch (pooling) {
    case Pooling::kMip: return "mip";
    case Pooling::kMax: return "max";
    case Pooling::kMean: return "mean";
    case Pooling::kAttention: return "attention";
  }
  return "unknown";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "mip") return Pooling::kMip;
  if (name == "max") return Pooling::kMax;
  if (name == "mean") return Pooling::kMean;
  if (name == "attention") return Pooling::kAttention;
  throw std::invalid_argument("unknown pooling variant '" + std::string(name) + "'");
}

MilModel MilModel::zeros(std::size_t dimension, std::size_t aspect_count, std::size_t head_count,
                         Pooling pooling) {
  if (dimension == 0 || aspect_count == 0 || head_count == 0) {
    throw std::invalid_argument("model dimension, aspect count and head count must be positive");
  }
  MilModel model;
  model.dimension = dimension;
  model.aspect_count = aspect_count;
  model.head_count = head_count;
  model.pooling = pooling;
  model.token_weight = Matrix(aspect_count, dimension);
  model.token_bias.assign(aspect_count, 0.0);
  model.token_to_sentence = make_level(dimension, head_count);
  model.sentence_to_document = make_level(dimension, head_count);
  return model;
}

MilModel MilModel::initialize(std::size_t dimension, std::size_t aspect_count,
                              std::size_t head_count, Pooling pooling, std::uint64_t seed) {
  MilModel model = zeros(dimension, aspect_count, head_count, pooling);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dimension));
  for (auto block : model.parameter_blocks()) {
    for (double& v : block) v = rng.uniform(-bound, bound);
  }
  return model;
}

std::vector<std::span<double>> MilModel::parameter_blocks() {
  std::vector<std::span<double>> blocks{token_weight.values(), token_bias};
  for (auto* level : {&token_to_sentence, &sentence_to_document}) {
    for (auto& head : level->heads) {
      blocks.emplace_back(head.weight.values());
      blocks.emplace_back(head.bias);
      blocks.emplace_back(head.query);
    }
  }
  return blocks;
}

std::vector<std::span<const double>> MilModel::parameter_blocks() const {
  std::vector<std::span<const double>> blocks{token_weight.values(), token_bias};
  for (const auto* level : {&token_to_sentence, &sentence_to_document}) {
    for (const auto& head : level->heads) {
      blocks.emplace_back(head.weight.values());
      blocks.emplace_back(head.bias);
      blocks.emplace_back(head.query);
    }
  }
  return blocks;
}

std::size_t MilModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto block : parameter_blocks()) n += block.size();
  return n;
}

Matrix token_predict(const Matrix& encodings, const MilModel& model) {
  if (encodings.cols() != model.dimension) {
    throw std::invalid_argument("token encodings have " + std::to_string(encodings.cols()) +
                                " columns, model expects " + std::to_string(model.dimension));
  }
  Matrix z(encodings.rows(), model.aspect_count);
  for (std::size_t k = 0; k < encodings.rows(); ++k) {
    const auto e = encodings.row(k);
    for (std::size_t m = 0; m < model.aspect_count; ++m) {
      z(k, m) = std::tanh(dot(model.token_weight.row(m), e) + model.token_bias[m]);
    }
  }
  return z;
}

Vector mip_pool(const Matrix& z_lower, const Matrix& keys_input, const PoolLevel& level) {
  return pool_variant(z_lower, keys_input, level, Pooling::kMip);
}

Vector pool_variant(const Matrix& z_lower, const Matrix& keys_input, const PoolLevel& level,
                    Pooling variant) {
  if (variant == Pooling::kMip || variant == Pooling::kAttention) {
    check_level(level, keys_input.cols());
  }
  PoolCache cache;
  return pool_forward(z_lower, keys_input, level, variant, cache);
}

AspectPredictions forward(const Review& review, const TokenEncoder& encoder, const MilModel& model,
                          TruncationLimits limits) {
  auto state = run_forward(review, encoder, model, limits);
  std::size_t token_count = 0;
  for (const auto& s : state.sentences) token_count += s.z_tokens.rows();
  AspectPredictions out;
  out.tokens = Matrix(token_count, model.aspect_count);
  std::size_t row = 0;
  for (const auto& s : state.sentences) {
    for (std::size_t k = 0; k < s.z_tokens.rows(); ++k, ++row) {
      std::copy(s.z_tokens.row(k).begin(), s.z_tokens.row(k).end(), out.tokens.row(row).begin());
    }
  }
  out.sentences = std::move(state.z_sentences);
  out.document = std::move(state.z_document);
  return out;
}

double soft_margin_loss(std::span<const double> z, std::span<const int> labels) {
  if (z.size() != labels.size()) throw std::invalid_argument("soft_margin_loss: shape mismatch");
  double loss = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) loss += softplus(-z[a] * labels[a]);
  return loss;
}

double loss_and_gradient(const Review& review, std::span<const int> labels,
                         const TokenEncoder& encoder, const MilModel& model, MilModel& gradient,
                         TruncationLimits limits) {
  if (labels.size() != model.aspect_count) {
    throw std::invalid_argument("label vector length does not match aspect count");
  }
  zero_like(model, gradient);
  const auto state = run_forward(review, encoder, model, limits);
  const std::size_t aspects = model.aspect_count;

  Vector d_document(aspects);
  for (std::size_t a = 0; a < aspects; ++a) {
    const double y = labels[a];
    d_document[a] = -y * sigmoid(-state.z_document[a] * y);
  }

  Matrix d_sentences(state.z_sentences.rows(), aspects);
  pool_backward(state.z_sentences, state.sentence_keys, model.sentence_to_document,
                model.pooling, state.cache, d_document, d_sentences,
                gradient.sentence_to_document);

  for (std::size_t s = 0; s < state.sentences.size(); ++s) {
    const auto& sentence = state.sentences[s];
    Matrix d_tokens(sentence.z_tokens.rows(), aspects);
    pool_backward(sentence.z_tokens, sentence.encodings, model.token_to_sentence, model.pooling,
                  sentence.cache, d_sentences.row(s), d_tokens, gradient.token_to_sentence);
    for (std::size_t k = 0; k < d_tokens.rows(); ++k) {
      const auto e = sentence.encodings.row(k);
      for (std::size_t m = 0; m < aspects; ++m) {
        const double z = sentence.z_tokens(k, m);
        const double d_pre = d_tokens(k, m) * (1.0 - z * z);
        if (d_pre == 0.0) continue;
        gradient.token_bias[m] += d_pre;
        auto w = gradient.token_weight.row(m);
        for (std::size_t c = 0; c < e.size(); ++c) w[c] += d_pre * e[c];
      }
    }
  }
  return soft_margin_loss(state.z_document, labels);
}

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0) || !std::isfinite(config.learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (config.heads == 0) throw std::invalid_argument("heads must be positive");
  if (config.steps > 0 && config.warmup_steps > config.steps) {
    throw std::invalid_argument("warmup_steps must not exceed steps");
  }
  if (config.weight_decay < 0) throw std::invalid_argument("weight_decay must be non-negative");
  if (!(config.beta1 >= 0 && config.beta1 < 1) || !(config.beta2 >= 0 && config.beta2 < 1)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (!(config.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
}

double scheduled_learning_rate(const TrainConfig& config, std::size_t step) {
  if (config.warmup_steps == 0 || step + 1 >= config.warmup_steps) return config.learning_rate;
  return config.learning_rate * static_cast<double>(step + 1) /
         static_cast<double>(config.warmup_steps);
}

MilModel train(const Corpus& corpus, const std::vector<AspectLabels>& labels,
               const TokenEncoder& encoder, const TrainConfig& config, const TrainLogger& logger) {
  validate(config);
  if (corpus.aspect_count() == 0) throw std::invalid_argument("corpus has no aspects");
  const std::size_t heads = config.pooling == Pooling::kAttention ? 1 : config.heads;
  MilModel model = MilModel::initialize(encoder.dimension(), corpus.aspect_count(), heads,
                                        config.pooling, config.seed);
  if (config.steps == 0) return model;

  std::vector<const Review*> reviews;
  for (const auto& entity : corpus.entities) {
    for (const auto& review : entity.reviews) reviews.push_back(&review);
  }
  if (labels.size() != reviews.size()) {
    throw std::invalid_argument("expected one label vector per review");
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    if (labels[i].size() != corpus.aspect_count()) {
      throw std::invalid_argument("label vector of review " + reviews[i]->review_id +
                                  " has the wrong length");
    }
    if (!reviews[i]->sentences.empty()) usable.push_back(i);
  }
  if (usable.empty()) throw std::invalid_argument("no review with tokens to train on");

  Rng order_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order;
  std::size_t cursor = 0;

  MilModel gradient;
  std::vector<Vector> first_moment, second_moment;
  for (const auto block : model.parameter_blocks()) {
    first_moment.emplace_back(block.size(), 0.0);
    second_moment.emplace_back(block.size(), 0.0);
  }
  double beta1_power = 1.0, beta2_power = 1.0;
  double window_loss = 0.0;
  std::size_t window = 0;

  for (std::size_t step = 0; step < config.steps; ++step) {
    if (cursor == order.size()) {
      order = usable;
      order_rng.shuffle(std::span<std::size_t>(order));
      cursor = 0;
    }
    const std::size_t index = order[cursor++];
    const double loss = loss_and_gradient(*reviews[index], labels[index], encoder, model,
                                          gradient, config.limits);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite loss at step " + std::to_string(step + 1));
    }

    beta1_power *= config.beta1;
    beta2_power *= config.beta2;
    const double lr = scheduled_learning_rate(config, step);
    auto params = model.parameter_blocks();
    const auto grads = gradient.parameter_blocks();
    for (std::size_t b = 0; b < params.size(); ++b) {
      auto& m1 = first_moment[b];
      auto& m2 = second_moment[b];
      for (std::size_t i = 0; i < params[b].size(); ++i) {
        const double g = grads[b][i];
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * g;
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * g * g;
        const double m_hat = m1[i] / (1.0 - beta1_power);
        const double v_hat = m2[i] / (1.0 - beta2_power);
        params[b][i] -= lr * (m_hat / (std::sqrt(v_hat) + config.epsilon) +
                              config.weight_decay * params[b][i]);
      }
    }

    window_loss += loss;
    ++window;
    if (logger && config.log_every > 0 &&
        ((step + 1) % config.log_every == 0 || step + 1 == config.steps)) {
      logger(step + 1, window_loss / static_cast<double>(window));
      window_loss = 0.0;
      window = 0;
    }
  }
  return model;
}

std::vector<std::size_t> predict_document_aspects(const Review& review,
                                                  const TokenEncoder& encoder,
                                                  const MilModel& model) {
  const auto predictions = forward(review, encoder, model);
  std::vector<std::size_t> positive;
  for (std::size_t a = 0; a < predictions.document.size(); ++a) {
    if (predictions.document[a] > 0) positive.push_back(a);
  }
  return positive;
}

std::string serialize_model(const MilModel& model) {
  std::string out;
  out += std::string(kModelMagic) + " " + std::to_string(kModelVersion) + "\n";
  out += "dimension " + std::to_string(model.dimension) + "\n";
  out += "aspects " + std::to_string(model.aspect_count) + "\n";
  out += "heads " + std::to_string(model.head_count) + "\n";
  out += "pooling " + std::string(pooling_name(model.pooling)) + "\n";
  for (const auto block : model.parameter_blocks()) {
    out += "tensor " + std::to_string(block.size()) + "\n";
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i > 0) out.push_back(' ');
      out += format_double(block[i]);
    }
    out.push_back('\n');
  }
  out += "end\n";
  return out;
}

MilModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect_word = [&](std::string_view word) {
    std::string got;
    if (!(in >> got) || got != word) {
      throw std::runtime_error("model file: expected '" + std::string(word) + "', got '" + got +
                               "'");
    }
  };
  auto read_size = [&](std::string_view key) {
    expect_word(key);
    long long v = -1;
    if (!(in >> v) || v < 0) {
      throw std::runtime_error("model file: bad value for '" + std::string(key) + "'");
    }
    return static_cast<std::size_t>(v);
  };

  expect_word(kModelMagic);
  int version = 0;
  if (!(in >> version) || version != kModelVersion) {
    throw std::runtime_error("model file: unsupported version");
  }
  const std::size_t dimension = read_size("dimension");
  const std::size_t aspects = read_size("aspects");
  const std::size_t heads = read_size("heads");
  expect_word("pooling");
  std::string pooling;
  in >> pooling;
  MilModel model = MilModel::zeros(dimension, aspects, heads, parse_pooling(pooling));
  for (auto block : model.parameter_blocks()) {
    if (read_size("tensor") != block.size()) {
      throw std::runtime_error("model file: tensor size does not match header");
    }
    for (double& v : block) {
      std::string token;
      if (!(in >> token) || !parse_double(token, v)) {
        throw std::runtime_error("model file: bad number '" + token + "'");
      }
    }
  }
  expect_word("end");
  return model;
}

void save_model(const MilModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

MilModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string model_fingerprint(const MilModel& model) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_model(model)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace acesum
