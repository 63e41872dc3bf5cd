#include "acesum/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "acesum/random.h"
#include "json.hpp"

namespace acesum {

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

double gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument positive.
  const double u = 1.0 - rng.uniform();
  const double v = rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Vector random_direction(Rng& rng, std::size_t dim) {
  Vector v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = gaussian(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + rng.index(hi - lo + 1);
}

// Index drawn from cumulative weights.
std::size_t draw_weighted(Rng& rng, std::span<const double> cumulative) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

void accumulate(RougeScore& total, const RougeScore& s) {
  for (auto [t, x] : {std::pair{&total.r1, &s.r1}, {&total.r2, &s.r2}, {&total.rl, &s.rl}}) {
    t->precision += x->precision;
    t->recall += x->recall;
    t->f1 += x->f1;
  }
}

void divide(RougeScore& s, double n) {
  for (auto* t : {&s.r1, &s.r2, &s.rl}) {
    t->precision /= n;
    t->recall /= n;
    t->f1 /= n;
  }
}

std::string fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

PrfScore make_prf(double precision, double recall) {
  const double sum = precision + recall;
  return {precision, recall, sum > 0 ? 2.0 * precision * recall / sum : 0.0};
}

PrfScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                 int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be positive");
  const auto size = static_cast<std::size_t>(n);
  if (candidate.size() < size || reference.size() < size) return {};
  const auto cand = count_ngrams(candidate, size);
  const auto ref = count_ngrams(reference, size);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const double cand_total = static_cast<double>(candidate.size() - size + 1);
  const double ref_total = static_cast<double>(reference.size() - size + 1);
  return make_prf(overlap / cand_total, overlap / ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

PrfScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return make_prf(lcs / static_cast<double>(candidate.size()),
                  lcs / static_cast<double>(reference.size()));
}

RougeScore rouge(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2),
          rouge_l(candidate, reference)};
}

RougeScore multi_ref_score(std::span<const std::string> candidate,
                           std::span<const std::vector<std::string>> references,
                           RefAggregation aggregation) {
  if (references.empty()) throw std::invalid_argument("multi_ref_score: no references");
  RougeScore out;
  if (aggregation == RefAggregation::kMean) {
    for (const auto& ref : references) accumulate(out, rouge(candidate, ref));
    divide(out, static_cast<double>(references.size()));
    return out;
  }
  // Max: per metric, the reference with the best F1.
  bool first = true;
  for (const auto& ref : references) {
    const auto s = rouge(candidate, ref);
    if (first || s.r1.f1 > out.r1.f1) out.r1 = s.r1;
    if (first || s.r2.f1 > out.r2.f1) out.r2 = s.r2;
    if (first || s.rl.f1 > out.rl.f1) out.rl = s.rl;
    first = false;
  }
  return out;
}

std::vector<std::string> summary_tokens(const Summary& summary) {
  std::vector<std::string> tokens;
  for (const auto& sentence : summary.sentences) {
    for (auto& t : tokenize(sentence.text)) tokens.push_back(std::move(t));
  }
  return tokens;
}

std::vector<AspectLabels> PlantedCorpus::silver_labels() const {
  std::vector<AspectLabels> labels;
  for (const auto& entity : corpus.entities) {
    for (const auto& review : entity.reviews) labels.push_back(silver_label(review, corpus.aspects));
  }
  return labels;
}

PlantedCorpus make_planted_corpus(std::uint64_t seed, std::size_t entity_count,
                                  std::size_t reviews_per_entity, const PlantedSpec& spec) {
  if (spec.aspect_count == 0 || spec.words_per_aspect == 0 || spec.seeds_per_aspect == 0 ||
      spec.seeds_per_aspect > spec.words_per_aspect || spec.generic_words == 0 ||
      spec.min_sentences == 0 || spec.min_sentences > spec.max_sentences ||
      spec.min_aspect_words == 0 || spec.min_aspect_words > spec.max_aspect_words ||
      spec.min_generic_words > spec.max_generic_words) {
    throw std::invalid_argument("inconsistent planted corpus spec");
  }
  Rng rng(seed);
  const std::size_t dim = spec.dimension;
  const double noise = spec.cluster_spread / std::sqrt(static_cast<double>(dim));

  PlantedCorpus planted;
  planted.table = EmbeddingTable(dim);
  std::vector<std::pair<std::string, std::vector<std::string>>> named;
  for (std::size_t a = 0; a < spec.aspect_count; ++a) {
    const Vector center = random_direction(rng, dim);
    std::vector<std::string> words;
    for (std::size_t w = 0; w < spec.words_per_aspect; ++w) {
      Vector v = center;
      for (double& x : v) x += noise * gaussian(rng);
      words.push_back("a" + std::to_string(a) + "w" + std::to_string(w));
      planted.table.add(words.back(), v);
    }
    named.emplace_back("aspect" + std::to_string(a),
                       std::vector<std::string>(words.begin(),
                                                words.begin() + static_cast<std::ptrdiff_t>(
                                                                    spec.seeds_per_aspect)));
    planted.aspect_words.push_back(std::move(words));
  }
  std::vector<std::string> generic;
  for (std::size_t g = 0; g < spec.generic_words; ++g) {
    generic.push_back("g" + std::to_string(g));
    planted.table.add(generic.back(), random_direction(rng, dim));
  }

  std::vector<double> word_weights;
  for (std::size_t w = 0; w < spec.words_per_aspect; ++w) {
    const double weight = std::pow(static_cast<double>(w + 1), -spec.zipf_exponent);
    word_weights.push_back((word_weights.empty() ? 0.0 : word_weights.back()) + weight);
  }

  std::vector<Review> reviews;
  const std::size_t entity_digits = std::to_string(std::max<std::size_t>(entity_count, 1) - 1).size();
  const std::size_t review_digits =
      std::to_string(std::max<std::size_t>(reviews_per_entity, 1) - 1).size();
  auto padded = [](std::size_t v, std::size_t width) {
    std::string s = std::to_string(v);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
  };
  for (std::size_t e = 0; e < entity_count; ++e) {
    const std::string entity_id = "e" + padded(e, entity_digits);
    for (std::size_t r = 0; r < reviews_per_entity; ++r) {
      const std::string review_id = entity_id + "-r" + padded(r, review_digits);
      const std::size_t sentence_count = draw_between(rng, spec.min_sentences, spec.max_sentences);
      std::vector<std::size_t> gold;
      std::string text;
      for (std::size_t s = 0; s < sentence_count; ++s) {
        const std::size_t aspect = rng.index(spec.aspect_count);
        gold.push_back(aspect);
        std::vector<std::string> words;
        const std::size_t aspect_words = draw_between(rng, spec.min_aspect_words, spec.max_aspect_words);
        for (std::size_t i = 0; i < aspect_words; ++i) {
          words.push_back(planted.aspect_words[aspect][draw_weighted(rng, word_weights)]);
        }
        const std::size_t filler = draw_between(rng, spec.min_generic_words, spec.max_generic_words);
        for (std::size_t i = 0; i < filler; ++i) words.push_back(generic[rng.index(generic.size())]);
        if (spec.aspect_count > 1 && rng.bernoulli(spec.stray_probability)) {
          std::size_t other = rng.index(spec.aspect_count - 1);
          if (other >= aspect) ++other;
          words.push_back(planted.aspect_words[other][draw_weighted(rng, word_weights)]);
        }
        rng.shuffle(std::span<std::string>(words));
        std::string sentence;
        for (const auto& w : words) {
          if (!sentence.empty()) sentence.push_back(' ');
          sentence += w;
        }
        sentence[0] = static_cast<char>(sentence[0] - 'a' + 'A');
        sentence.push_back('.');
        if (!text.empty()) text.push_back(' ');
        text += sentence;
      }
      auto review = Review::make(entity_id, review_id, text);
      if (review.sentences.size() != gold.size()) {
        throw std::logic_error("planted review segmented unexpectedly");
      }
      planted.sentence_gold[review_id] = gold;
      std::set<std::size_t> doc(gold.begin(), gold.end());
      planted.document_gold[review_id] = std::vector<std::size_t>(doc.begin(), doc.end());
      reviews.push_back(std::move(review));
    }
  }
  planted.corpus = make_corpus(std::move(reviews), make_aspects(named), "planted");
  return planted;
}

double micro_f1(std::span<const std::vector<std::size_t>> predicted,
                std::span<const std::vector<std::size_t>> gold) {
  if (predicted.size() != gold.size()) throw std::invalid_argument("micro_f1: length mismatch");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const std::set<std::size_t> p(predicted[i].begin(), predicted[i].end());
    const std::set<std::size_t> g(gold[i].begin(), gold[i].end());
    for (auto a : p) (g.contains(a) ? tp : fp) += 1;
    for (auto a : g) {
      if (!p.contains(a)) fn += 1;
    }
  }
  return make_prf(tp + fp > 0 ? tp / (tp + fp) : 0.0, tp + fn > 0 ? tp / (tp + fn) : 0.0).f1;
}

AspectF1 aspect_f1(const MilModel& model, const PlantedCorpus& planted) {
  std::vector<std::vector<std::size_t>> doc_pred, doc_gold, sent_pred, sent_gold;
  for (const auto& entity : planted.corpus.entities) {
    for (const auto& review : entity.reviews) {
      const auto z = forward(review, planted.table, model);
      std::vector<std::size_t> doc;
      for (std::size_t a = 0; a < z.document.size(); ++a) {
        if (z.document[a] > 0) doc.push_back(a);
      }
      doc_pred.push_back(std::move(doc));
      doc_gold.push_back(planted.document_gold.at(review.review_id));
      const auto& gold = planted.sentence_gold.at(review.review_id);
      for (std::size_t s = 0; s < z.sentences.rows(); ++s) {
        std::vector<std::size_t> sent;
        for (std::size_t a = 0; a < z.sentences.cols(); ++a) {
          if (z.sentences(s, a) > 0) sent.push_back(a);
        }
        sent_pred.push_back(std::move(sent));
        sent_gold.push_back({gold.at(s)});
      }
    }
  }
  return {micro_f1(doc_pred, doc_gold), micro_f1(sent_pred, sent_gold)};
}

std::vector<AblationRow> run_ablation(const PlantedCorpus& planted, const TrainConfig& base,
                                      std::span<const Pooling> variants) {
  const auto labels = planted.silver_labels();
  std::vector<AblationRow> rows;
  for (const Pooling variant : variants) {
    TrainConfig config = base;
    config.pooling = variant;
    const auto model = train(planted.corpus, labels, planted.table, config);
    rows.push_back({variant, aspect_f1(model, planted)});
  }
  return rows;
}

std::string format_ablation_table(std::span<const AblationRow> rows) {
  std::string out = pad("Model", 12) + pad_left("Doc F1", 8) + pad_left("Sent F1", 9) + "\n";
  for (const auto& row : rows) {
    out += pad(std::string(pooling_name(row.pooling)), 12) +
           pad_left(fixed(100.0 * row.scores.doc_f1), 8) +
           pad_left(fixed(100.0 * row.scores.sent_f1), 9) + "\n";
  }
  return out;
}

std::string ablation_records(std::span<const AblationRow> rows) {
  std::string out;
  for (const auto& row : rows) {
    nlohmann::json record = {{"Model", pooling_name(row.pooling)},
                             {"Doc F1", row.scores.doc_f1},
                             {"Sent F1", row.scores.sent_f1}};
    out += record.dump() + "\n";
  }
  return out;
}

std::vector<EvalRow> evaluate(std::span<const EvalExample> examples,
                              const std::vector<AspectSpec>& aspects, const MilModel& model,
                              const TokenEncoder& encoder, const EvalOptions& options) {
  // (system, task) -> running totals, in first-seen order.
  std::vector<EvalRow> rows;
  auto add = [&](const std::string& system, const std::string& task, const RougeScore& s) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const EvalRow& r) {
      return r.system == system && r.task == task;
    });
    if (it == rows.end()) {
      rows.push_back({system, task, 0, {}});
      it = rows.end() - 1;
    }
    ++it->examples;
    accumulate(it->score, s);
  };
  auto tokenized = [](const std::vector<std::string>& refs) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : refs) out.push_back(tokenize(r));
    return out;
  };
  const auto& lex = options.summarizer.lexrank;

  for (const auto& example : examples) {
    const std::span<const Review> reviews = example.input_reviews;
    if (!example.general_refs.empty()) {
      const auto refs = tokenized(example.general_refs);
      const auto acesum = summarize(reviews, Query::all(model.aspect_count), model, encoder,
                                    options.summarizer);
      add("AceSumExt", "general", multi_ref_score(summary_tokens(acesum), refs, options.aggregation));
      add("LexRank", "general",
          multi_ref_score(summary_tokens(lexrank_baseline(reviews, encoder, lex)), refs,
                          options.aggregation));
      const auto& centroid = reviews[centroid_baseline(reviews, encoder)];
      add("Centroid", "general",
          multi_ref_score(tokenize(centroid.text), refs, options.aggregation));
    }
    for (const auto& [aspect_id, aspect_refs] : example.aspect_refs) {
      const auto refs = tokenized(aspect_refs);
      const auto& name = aspects.at(aspect_id).name;
      const std::vector<std::size_t> code{aspect_id};
      const auto acesum = summarize(reviews, Query::of(model.aspect_count, code), model, encoder,
                                    options.summarizer);
      add("AceSumExt", name, multi_ref_score(summary_tokens(acesum), refs, options.aggregation));

      // Seed-similarity filtered pool, then LexRank.
      auto ranked = seed_filter_baseline(collect_sentences(reviews), aspects.at(aspect_id), encoder);
      std::vector<RankedSentence> pool;
      std::size_t used = 0;
      for (auto& s : ranked) {
        if (used + s.tokens.size() > options.summarizer.pool_token_budget) break;
        used += s.tokens.size();
        pool.push_back(std::move(s));
      }
      Summary seeded;
      if (!pool.empty()) seeded = extract_summary(pool, lexrank(pool, encoder, lex), encoder, lex);
      add("LexRank", name, multi_ref_score(summary_tokens(seeded), refs, options.aggregation));
    }
  }
  for (auto& row : rows) divide(row.score, static_cast<double>(row.examples));
  // General first, then aspects by id; systems keep their first-seen order.
  auto rank = [&](const EvalRow& row) -> std::size_t {
    if (row.task == "general") return 0;
    for (const auto& a : aspects) {
      if (a.name == row.task) return 1 + a.aspect_id;
    }
    return aspects.size() + 1;
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const EvalRow& a, const EvalRow& b) { return rank(a) < rank(b); });
  return rows;
}

std::string format_eval_table(std::span<const EvalRow> rows) {
  std::string out = pad("System", 12) + pad("Task", 16) + pad_left("N", 5) + pad_left("R1", 8) +
                    pad_left("R2", 8) + pad_left("RL", 8) + "\n";
  for (const auto& row : rows) {
    out += pad(row.system, 12) + pad(row.task, 16) + pad_left(std::to_string(row.examples), 5) +
           pad_left(fixed(100.0 * row.score.r1.f1), 8) + pad_left(fixed(100.0 * row.score.r2.f1), 8) +
           pad_left(fixed(100.0 * row.score.rl.f1), 8) + "\n";
  }
  return out;
}

std::string eval_records(std::span<const EvalRow> rows) {
  std::string out;
  for (const auto& row : rows) {
    nlohmann::json record = {{"System", row.system}, {"Task", row.task},
                             {"N", row.examples},    {"R1", row.score.r1.f1},
                             {"R2", row.score.r2.f1}, {"RL", row.score.rl.f1}};
    out += record.dump() + "\n";
  }
  return out;
}

}  // namespace acesum
