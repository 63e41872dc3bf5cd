#include "acesum/synthesis.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "acesum/random.h"
#include "json.hpp"

namespace acesum {

namespace {

constexpr std::string_view kCodeMarker = "[CODE]";
constexpr std::string_view kKeyMarker = "[KEY]";
constexpr std::string_view kSentenceMarker = "[SNT]";
constexpr std::string_view kAspectPrefix = "[ASPECT_";

struct Input {
  const Review* review;
  const AspectPredictions* predictions;
};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

bool looks_like_marker(std::string_view word) {
  if (word.size() < 3 || word.front() != '[' || word.back() != ']') return false;
  for (char c : word.substr(1, word.size() - 2)) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(' ', start);
    if (end == std::string_view::npos) {
      words.push_back(s.substr(start));
      return words;
    }
    words.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<RankedSentence> rank_inputs(std::span<const Input> inputs,
                                        std::span<const double> target, std::size_t budget) {
  std::vector<RankedSentence> ranked;
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    const auto& review = *inputs[r].review;
    const auto& z_sentences = inputs[r].predictions->sentences;
    for (std::size_t s = 0; s < review.sentences.size(); ++s) {
      const auto& sentence = review.sentences[s];
      ranked.push_back(RankedSentence{r, sentence.index, review.review_id, sentence.raw,
                                      sentence.tokens, match_score(z_sentences.row(s), target)});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSentence& a, const RankedSentence& b) { return a.score < b.score; });
  std::size_t used = 0;
  std::size_t keep = 0;
  while (keep < ranked.size() && used + ranked[keep].tokens.size() <= budget) {
    used += ranked[keep].tokens.size();
    ++keep;
  }
  ranked.resize(keep);
  return ranked;
}

std::vector<std::string> keywords_from_inputs(std::span<const Input> inputs,
                                              std::span<const double> target, std::size_t count) {
  std::map<std::string_view, double> best;
  for (const auto& input : inputs) {
    const auto& z_tokens = input.predictions->tokens;
    std::size_t row = 0;
    for (const auto& sentence : input.review->sentences) {
      for (const auto& token : sentence.tokens) {
        const double score = match_score(z_tokens.row(row++), target);
        const auto [it, inserted] = best.emplace(token, score);
        if (!inserted && score < it->second) it->second = score;
      }
    }
  }
  std::vector<std::pair<double, std::string_view>> order;
  for (const auto& [token, score] : best) order.emplace_back(score, token);
  std::sort(order.begin(), order.end());
  if (order.size() > count) order.resize(count);
  std::vector<std::string> keywords;
  for (const auto& [score, token] : order) keywords.emplace_back(token);
  return keywords;
}

std::vector<AspectPredictions> predict_all(std::span<const Review> reviews,
                                           const MilModel& model, const TokenEncoder& encoder) {
  std::vector<AspectPredictions> out;
  out.reserve(reviews.size());
  for (const auto& review : reviews) out.push_back(forward(review, encoder, model));
  return out;
}

std::vector<Input> as_inputs(std::span<const Review> reviews,
                             const std::vector<AspectPredictions>& predictions) {
  std::vector<Input> inputs;
  for (std::size_t i = 0; i < reviews.size(); ++i) inputs.push_back({&reviews[i], &predictions[i]});
  return inputs;
}

std::vector<std::size_t> positive_aspects(std::span<const double> z) {
  std::vector<std::size_t> codes;
  for (std::size_t a = 0; a < z.size(); ++a) {
    if (z[a] > 0) codes.push_back(a);
  }
  return codes;
}

std::vector<PseudoSummary> pick_summaries(std::size_t review_count,
                                          const std::vector<AspectPredictions>& predictions,
                                          const SynthConfig& config, std::string_view entity_id) {
  std::vector<std::size_t> order(review_count);
  for (std::size_t i = 0; i < review_count; ++i) order[i] = i;
  Rng rng(config.seed ^ fnv1a(entity_id));
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<PseudoSummary> picks;
  for (const std::size_t candidate : order) {
    if (picks.size() >= config.max_examples_per_entity) break;
    if (positive_aspects(predictions[candidate].document).empty()) continue;
    PseudoSummary pick{candidate, {}};
    for (std::size_t i = 0; i < review_count; ++i) {
      if (i != candidate) pick.inputs.push_back(i);
    }
    picks.push_back(std::move(pick));
  }
  return picks;
}

SyntheticExample example_from(const Entity& entity, const PseudoSummary& pick,
                              const std::vector<AspectPredictions>& predictions,
                              const SynthConfig& config) {
  SyntheticExample example;
  example.entity_id = entity.id;
  example.summary = &entity.reviews.at(pick.summary);
  const auto& z_summary = predictions.at(pick.summary).document;
  example.controllers.codes = positive_aspects(z_summary);
  const Vector target = config.target_mode == TargetMode::kSign
                            ? code_target(example.controllers.codes, z_summary.size())
                            : z_summary;
  std::vector<Input> inputs;
  for (const std::size_t i : pick.inputs) {
    if (i == pick.summary) throw std::invalid_argument("pseudo-summary listed among its inputs");
    example.inputs.push_back(&entity.reviews.at(i));
    inputs.push_back({&entity.reviews[i], &predictions[i]});
  }
  for (auto& sentence : rank_inputs(inputs, target, config.token_budget)) {
    example.controllers.sentences.push_back(std::move(sentence.text));
  }
  example.controllers.keywords = keywords_from_inputs(inputs, target, config.keyword_count);
  return example;
}

nlohmann::json example_record(const SyntheticExample& example, std::size_t aspect_count) {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto* review : example.inputs) ids.push_back(review->review_id);
  return {{"entity_id", example.entity_id},
          {"summary_text", example.summary->text},
          {"controller_string", serialize_controllers(example.controllers, aspect_count)},
          {"input_review_ids", std::move(ids)}};
}

}  // namespace

void validate(const SynthConfig& config) {
  if (config.keyword_count == 0) throw std::invalid_argument("keyword_count must be positive");
  if (config.token_budget == 0) throw std::invalid_argument("token_budget must be positive");
  if (config.max_examples_per_entity == 0) {
    throw std::invalid_argument("max_examples_per_entity must be positive");
  }
}

std::vector<RankedSentence> collect_sentences(std::span<const Review> reviews) {
  std::vector<RankedSentence> out;
  for (std::size_t r = 0; r < reviews.size(); ++r) {
    for (const auto& sentence : reviews[r].sentences) {
      out.push_back(RankedSentence{r, sentence.index, reviews[r].review_id, sentence.raw,
                                   sentence.tokens, 0.0});
    }
  }
  return out;
}

Vector code_target(std::span<const std::size_t> codes, std::size_t aspect_count) {
  Vector target(aspect_count, -1.0);
  for (const std::size_t a : codes) {
    if (a >= aspect_count) throw std::invalid_argument("aspect code out of range");
    target[a] = 1.0;
  }
  return target;
}

double match_score(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) {
    throw std::invalid_argument("match_score: shape mismatch");
  }
  double score = 0.0;
  for (std::size_t a = 0; a < prediction.size(); ++a) {
    const double t = -prediction[a] * target[a];
    score += std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
  }
  return score;
}

double aspect_match_score(std::span<const double> prediction,
                          std::span<const std::size_t> target_codes) {
  return match_score(prediction, code_target(target_codes, prediction.size()));
}

std::vector<PseudoSummary> sample_pseudo_summaries(std::span<const Review> entity_reviews,
                                                   const MilModel& model,
                                                   const TokenEncoder& encoder,
                                                   const SynthConfig& config,
                                                   std::string_view entity_id) {
  if (entity_reviews.size() < 2) {
    throw std::invalid_argument("pseudo-summary sampling needs at least two reviews");
  }
  const auto predictions = predict_all(entity_reviews, model, encoder);
  return pick_summaries(entity_reviews.size(), predictions, config, entity_id);
}

std::vector<RankedSentence> rank_sentences(std::span<const Review> inputs,
                                           std::span<const double> target,
                                           const MilModel& model, const TokenEncoder& encoder,
                                           const SynthConfig& config) {
  const auto predictions = predict_all(inputs, model, encoder);
  return rank_inputs(as_inputs(inputs, predictions), target, config.token_budget);
}

std::vector<RankedSentence> rank_sentences(std::span<const Review> inputs,
                                           std::span<const std::size_t> target_codes,
                                           const MilModel& model, const TokenEncoder& encoder,
                                           const SynthConfig& config) {
  return rank_sentences(inputs, code_target(target_codes, model.aspect_count), model, encoder,
                        config);
}

std::vector<std::string> extract_keywords(std::span<const Review> inputs,
                                          std::span<const double> target, const MilModel& model,
                                          const TokenEncoder& encoder, const SynthConfig& config) {
  const auto predictions = predict_all(inputs, model, encoder);
  return keywords_from_inputs(as_inputs(inputs, predictions), target, config.keyword_count);
}

std::vector<std::string> extract_keywords(std::span<const Review> inputs,
                                          std::span<const std::size_t> target_codes,
                                          const MilModel& model, const TokenEncoder& encoder,
                                          const SynthConfig& config) {
  return extract_keywords(inputs, code_target(target_codes, model.aspect_count), model, encoder,
                          config);
}

std::string serialize_controllers(const ControllerSet& controllers, std::size_t aspect_count) {
  if (controllers.codes.empty()) throw std::invalid_argument("controller set has no aspect codes");
  std::string out(kCodeMarker);
  for (std::size_t i = 0; i < controllers.codes.size(); ++i) {
    const std::size_t code = controllers.codes[i];
    if (code >= aspect_count) throw std::invalid_argument("aspect code out of range");
    if (i > 0 && code <= controllers.codes[i - 1]) {
      throw std::invalid_argument("aspect codes must be ascending and unique");
    }
    out += " ";
    out += kAspectPrefix;
    out += std::to_string(code) + "]";
  }
  out += " ";
  out += kKeyMarker;
  std::set<std::string_view> seen;
  for (const auto& keyword : controllers.keywords) {
    if (keyword.empty() || keyword.find_first_of(" \t\n\r") != std::string::npos ||
        looks_like_marker(keyword)) {
      throw std::invalid_argument("keyword '" + keyword + "' cannot be serialized");
    }
    if (!seen.insert(keyword).second) throw std::invalid_argument("duplicate keyword '" + keyword + "'");
    out += " " + keyword;
  }
  for (const auto& sentence : controllers.sentences) {
    const auto words = split_words(sentence);
    if (sentence.empty() || words.front().empty() || words.back().empty() ||
        sentence.find('\n') != std::string::npos) {
      throw std::invalid_argument("sentence '" + sentence + "' cannot be serialized");
    }
    for (const auto word : words) {
      if (looks_like_marker(word)) {
        throw std::invalid_argument("sentence contains marker-like word '" + std::string(word) +
                                    "'");
      }
    }
    out += " ";
    out += kSentenceMarker;
    out += " " + sentence;
  }
  return out;
}

ControllerSet parse_controllers(std::string_view text, std::size_t aspect_count) {
  const auto words = split_words(text);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto word : words) {
    offsets.push_back(offset);
    offset += word.size() + 1;
  }

  if (words.front() != kCodeMarker) throw ControllerParseError("missing [CODE] header", 0);
  ControllerSet out;
  std::size_t i = 1;
  for (; i < words.size() && words[i].starts_with(kAspectPrefix); ++i) {
    const auto word = words[i];
    const auto digits = word.substr(kAspectPrefix.size(),
                                    word.size() - kAspectPrefix.size() - 1);
    std::size_t code = 0;
    bool ok = word.back() == ']' && !digits.empty() && digits.size() <= 9;
    for (char c : digits) {
      ok = ok && c >= '0' && c <= '9';
      if (ok) code = code * 10 + static_cast<std::size_t>(c - '0');
    }
    if (!ok) throw ControllerParseError("malformed aspect marker '" + std::string(word) + "'", offsets[i]);
    if (code >= aspect_count) {
      throw ControllerParseError("aspect code " + std::to_string(code) + " out of range (" +
                                     std::to_string(aspect_count) + " aspects)",
                                 offsets[i]);
    }
    if (!out.codes.empty() && code <= out.codes.back()) {
      throw ControllerParseError("aspect codes must be ascending and unique", offsets[i]);
    }
    out.codes.push_back(code);
  }
  if (out.codes.empty()) {
    throw ControllerParseError("no aspect codes after [CODE]", i < words.size() ? offsets[i] : text.size());
  }
  if (i >= words.size() || words[i] != kKeyMarker) {
    throw ControllerParseError("expected [KEY]", i < words.size() ? offsets[i] : text.size());
  }
  ++i;

  for (; i < words.size() && words[i] != kSentenceMarker; ++i) {
    if (words[i].empty()) throw ControllerParseError("empty keyword", offsets[i]);
    if (looks_like_marker(words[i])) {
      throw ControllerParseError("unexpected marker '" + std::string(words[i]) + "'", offsets[i]);
    }
    if (std::find(out.keywords.begin(), out.keywords.end(), words[i]) != out.keywords.end()) {
      throw ControllerParseError("duplicate keyword '" + std::string(words[i]) + "'", offsets[i]);
    }
    out.keywords.emplace_back(words[i]);
  }

  while (i < words.size()) {
    const std::size_t marker = i++;
    const std::size_t first = i;
    while (i < words.size() && words[i] != kSentenceMarker) {
      if (looks_like_marker(words[i])) {
        throw ControllerParseError("unexpected marker '" + std::string(words[i]) + "'", offsets[i]);
      }
      ++i;
    }
    if (first == i || words[first].empty() || words[i - 1].empty()) {
      throw ControllerParseError("empty or padded sentence after [SNT]", offsets[marker]);
    }
    const std::size_t begin = offsets[first];
    const std::size_t end = offsets[i - 1] + words[i - 1].size();
    out.sentences.emplace_back(text.substr(begin, end - begin));
  }
  return out;
}

SyntheticExample make_example(const Entity& entity, const PseudoSummary& pick,
                              const MilModel& model, const TokenEncoder& encoder,
                              const SynthConfig& config) {
  const auto predictions = predict_all(entity.reviews, model, encoder);
  return example_from(entity, pick, predictions, config);
}

DatasetStats build_dataset(const Corpus& corpus, const MilModel& model,
                           const TokenEncoder& encoder, const SynthConfig& config,
                           std::ostream& out) {
  validate(config);
  nlohmann::json header = {{"format", "acesum-synthetic"}, {"version", 1}};
  nlohmann::json names = nlohmann::json::array();
  for (const auto& aspect : corpus.aspects) names.push_back(aspect.name);
  header["aspects"] = std::move(names);
  out << header.dump() << '\n';

  // Entities are processed in parallel chunks; records are written in
  // entity order by this thread only.
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunk = 16 * workers;
  DatasetStats stats;
  for (std::size_t begin = 0; begin < corpus.entities.size(); begin += chunk) {
    const std::size_t end = std::min(corpus.entities.size(), begin + chunk);
    std::vector<std::vector<std::string>> lines(end - begin);
    std::vector<std::exception_ptr> errors(workers);
    auto run_chunk = [&](std::size_t worker) {
      for (std::size_t e = begin + worker; e < end; e += workers) {
        const auto& entity = corpus.entities[e];
        if (entity.reviews.size() < 2) continue;
        const auto predictions = predict_all(entity.reviews, model, encoder);
        for (const auto& pick : pick_summaries(entity.reviews.size(), predictions, config, entity.id)) {
          const auto example = example_from(entity, pick, predictions, config);
          lines[e - begin].push_back(example_record(example, corpus.aspect_count()).dump());
        }
      }
    };
    auto work = [&](std::size_t worker) {
      try {
        run_chunk(worker);
      } catch (...) {
        errors[worker] = std::current_exception();
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> threads;
      for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    }
    for (const auto& error : errors) {
      if (error) std::rethrow_exception(error);
    }
    for (std::size_t e = begin; e < end; ++e) {
      stats.per_entity[corpus.entities[e].id] = lines[e - begin].size();
      stats.total += lines[e - begin].size();
      for (const auto& line : lines[e - begin]) out << line << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing synthetic dataset");
  return stats;
}

DatasetStats build_dataset(const Corpus& corpus, const MilModel& model,
                           const TokenEncoder& encoder, const SynthConfig& config,
                           const std::filesystem::path& out_path) {
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  return build_dataset(corpus, model, encoder, config, out);
}

}  // namespace acesum
