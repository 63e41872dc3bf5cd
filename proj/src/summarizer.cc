#include "acesum/summarizer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace acesum {

namespace {

Vector representation(std::span<const std::string> tokens, const TokenEncoder& encoder) {
  return sentence_repr(encoder.encode(tokens));
}

std::vector<Vector> representations(std::span<const RankedSentence> sentences,
                                    const TokenEncoder& encoder) {
  std::vector<Vector> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(representation(s.tokens, encoder));
  return out;
}

Summary select_greedy(std::span<const RankedSentence> pool, std::span<const double> scores,
                      std::span<const Vector> reprs, const LexRankConfig& config) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<std::size_t> chosen;
  std::size_t tokens = 0;
  for (const std::size_t i : order) {
    const bool redundant = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t j) {
      return cosine(reprs[i], reprs[j]) > config.redundancy_threshold;
    });
    if (redundant) continue;
    if (tokens + pool[i].tokens.size() > config.summary_token_budget) break;
    tokens += pool[i].tokens.size();
    chosen.push_back(i);
  }
  std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    if (pool[a].review != pool[b].review) return pool[a].review < pool[b].review;
    return pool[a].sentence_index < pool[b].sentence_index;
  });

  Summary summary;
  summary.token_count = tokens;
  for (const std::size_t i : chosen) {
    summary.sentences.push_back(
        SummarySentence{pool[i].text, pool[i].review_id, pool[i].sentence_index, scores[i]});
  }
  return summary;
}

}  // namespace

Query::Query(std::vector<bool> indicators) : indicators_(std::move(indicators)) {
  if (std::none_of(indicators_.begin(), indicators_.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("query selects no aspect");
  }
}

Query Query::all(std::size_t aspect_count) { return Query(std::vector<bool>(aspect_count, true)); }

Query Query::of(std::size_t aspect_count, std::span<const std::size_t> codes) {
  std::vector<bool> indicators(aspect_count, false);
  for (const std::size_t code : codes) {
    if (code >= aspect_count) throw std::invalid_argument("aspect code out of range");
    indicators[code] = true;
  }
  return Query(std::move(indicators));
}

std::vector<std::size_t> Query::codes() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < indicators_.size(); ++a) {
    if (indicators_[a]) out.push_back(a);
  }
  return out;
}

bool Query::is_general() const {
  return std::all_of(indicators_.begin(), indicators_.end(), [](bool b) { return b; });
}

std::string Query::bitmask() const {
  std::string out;
  for (bool b : indicators_) out.push_back(b ? '1' : '0');
  return out;
}

void validate(const LexRankConfig& config) {
  if (!(config.damping > 0 && config.damping < 1)) {
    throw std::invalid_argument("damping must lie in (0, 1)");
  }
  if (config.max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(config.convergence_tol > 0)) throw std::invalid_argument("convergence_tol must be positive");
  if (config.summary_token_budget == 0) {
    throw std::invalid_argument("summary_token_budget must be positive");
  }
}

std::vector<RankedSentence> select_pool(std::span<const Review> entity_reviews,
                                        const Query& query, const MilModel& model,
                                        const TokenEncoder& encoder,
                                        std::size_t pool_token_budget) {
  if (query.aspect_count() != model.aspect_count) {
    throw std::invalid_argument("query has " + std::to_string(query.aspect_count()) +
                                " indicators, model has " + std::to_string(model.aspect_count) +
                                " aspects");
  }
  SynthConfig config;
  config.token_budget = pool_token_budget;
  return rank_sentences(entity_reviews, query.codes(), model, encoder, config);
}

double sentence_similarity(std::span<const std::string> a, std::span<const std::string> b,
                           const TokenEncoder& encoder) {
  return cosine(representation(a, encoder), representation(b, encoder));
}

Vector lexrank(std::span<const Vector> reprs, const LexRankConfig& config) {
  validate(config);
  const std::size_t n = reprs.size();
  if (n == 0) return {};

  // Row-normalized transition matrix of the thresholded similarity graph.
  Matrix transition(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t degree = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (cosine(reprs[i], reprs[j]) >= config.similarity_threshold) {
        transition(i, j) = 1.0;
        ++degree;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      transition(i, j) = degree == 0 ? 1.0 / static_cast<double>(n)
                                     : transition(i, j) / static_cast<double>(degree);
    }
  }

  const double teleport = (1.0 - config.damping) / static_cast<double>(n);
  Vector p(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    std::fill(next.begin(), next.end(), teleport);
    for (std::size_t i = 0; i < n; ++i) {
      const double mass = config.damping * p[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += mass * transition(i, j);
    }
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change += std::abs(next[j] - p[j]);
    std::swap(p, next);
    if (change < config.convergence_tol) break;
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

Vector lexrank(std::span<const RankedSentence> sentences, const TokenEncoder& encoder,
               const LexRankConfig& config) {
  const auto reprs = representations(sentences, encoder);
  return lexrank(reprs, config);
}

Summary extract_summary(std::span<const RankedSentence> pool, std::span<const double> scores,
                        const TokenEncoder& encoder, const LexRankConfig& config) {
  if (pool.size() != scores.size()) {
    throw std::invalid_argument("extract_summary: pool and scores differ in length");
  }
  if (pool.empty()) return {};
  const auto reprs = representations(pool, encoder);
  return select_greedy(pool, scores, reprs, config);
}

Summary summarize(std::span<const Review> entity_reviews, const Query& query,
                  const MilModel& model, const TokenEncoder& encoder,
                  const SummarizerConfig& config) {
  validate(config.lexrank);
  const auto pool = select_pool(entity_reviews, query, model, encoder, config.pool_token_budget);
  if (pool.empty()) return {};
  const auto reprs = representations(pool, encoder);
  const auto scores = lexrank(reprs, config.lexrank);
  return select_greedy(pool, scores, reprs, config.lexrank);
}

Summary lexrank_baseline(std::span<const Review> entity_reviews, const TokenEncoder& encoder,
                         const LexRankConfig& config) {
  const auto pool = collect_sentences(entity_reviews);
  if (pool.empty()) return {};
  const auto reprs = representations(pool, encoder);
  const auto scores = lexrank(reprs, config);
  return select_greedy(pool, scores, reprs, config);
}

std::vector<RankedSentence> seed_filter_baseline(std::span<const RankedSentence> sentences,
                                                 const AspectSpec& aspect,
                                                 const TokenEncoder& encoder) {
  const Matrix seeds = encoder.encode(aspect.seeds);
  std::vector<RankedSentence> out(sentences.begin(), sentences.end());
  for (auto& sentence : out) {
    const Matrix tokens = encoder.encode(sentence.tokens);
    double best = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < tokens.rows(); ++k) {
      for (std::size_t s = 0; s < seeds.rows(); ++s) {
        const double c = cosine(tokens.row(k), seeds.row(s));
        if (!any || c > best) best = c;
        any = true;
      }
    }
    sentence.score = best;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedSentence& a, const RankedSentence& b) { return a.score > b.score; });
  return out;
}

std::size_t centroid_baseline(std::span<const Review> entity_reviews,
                              const TokenEncoder& encoder) {
  if (entity_reviews.empty()) throw std::invalid_argument("centroid_baseline: no reviews");
  std::vector<Vector> docs;
  for (const auto& review : entity_reviews) {
    Vector doc(encoder.dimension(), 0.0);
    for (const auto& sentence : review.sentences) {
      const auto r = representation(sentence.tokens, encoder);
      for (std::size_t c = 0; c < doc.size(); ++c) doc[c] += r[c];
    }
    if (!review.sentences.empty()) {
      for (double& v : doc) v /= static_cast<double>(review.sentences.size());
    }
    docs.push_back(std::move(doc));
  }
  Vector centroid(encoder.dimension(), 0.0);
  for (const auto& doc : docs) {
    for (std::size_t c = 0; c < centroid.size(); ++c) centroid[c] += doc[c];
  }
  for (double& v : centroid) v /= static_cast<double>(docs.size());

  std::size_t best = 0;
  double best_distance = 0.0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const double distance = 1.0 - cosine(docs[i], centroid);
    const bool better = i == 0 || distance < best_distance ||
                        (distance == best_distance &&
                         entity_reviews[i].review_id < entity_reviews[best].review_id);
    if (better) {
      best = i;
      best_distance = distance;
    }
  }
  return best;
}

}  // namespace acesum
