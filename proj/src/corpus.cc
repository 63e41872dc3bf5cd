#include "acesum/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace acesum {

namespace {

using nlohmann::json;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z');
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Word (letters, digits and inner periods) that ends right before `pos`.
std::string word_before(std::string_view text, std::size_t pos) {
  std::size_t start = pos;
  while (start > 0 && (is_word_byte(text[start - 1]) || text[start - 1] == '.')) --start;
  return lowercase(text.substr(start, pos - start));
}

bool is_abbreviation(std::string_view word) {
  const auto& list = abbreviations();
  return std::binary_search(list.begin(), list.end(), std::string(word));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Calls fn(line_number, parsed_record) for every non-blank line.
template <typename Fn>
void for_each_record(std::string_view content, Fn&& fn) {
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_number;
    const std::string_view line = trim(content.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(line_number) +
                               ": malformed record: " + e.what());
    }
    if (!record.is_object()) {
      throw std::runtime_error("line " + std::to_string(line_number) +
                               ": record is not an object");
    }
    fn(line_number, record);
  }
}

std::string required_string(const json& record, const char* field, std::size_t line_number) {
  const auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw std::runtime_error("line " + std::to_string(line_number) + ": missing string field '" +
                             field + "'");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_array(const json& value, const std::string& what,
                                      std::size_t line_number) {
  if (!value.is_array()) {
    throw std::runtime_error("line " + std::to_string(line_number) + ": '" + what +
                             "' is not an array");
  }
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": '" + what +
                               "' holds a non-string entry");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> words = {
        "approx", "apt", "ave", "blvd", "co", "corp", "dept", "dr", "e.g", "est", "etc",
        "fig", "hr", "hrs", "i.e", "inc", "jr", "lt", "ltd", "min", "mins", "mr", "mrs",
        "ms", "mt", "no", "prof", "rd", "sr", "st", "vs"};
    std::sort(words.begin(), words.end());
    return words;
  }();
  return list;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence_raw) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : sentence_raw) {
    if (is_word_byte(c)) {
      current.push_back(to_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  auto emit = [&](std::string_view piece) {
    piece = trim(piece);
    auto tokens = tokenize(piece);
    if (tokens.empty()) return;
    sentences.push_back(Sentence{sentences.size(), std::move(tokens), std::string(piece)});
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first_terminator = i;
    std::size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    const bool single_period = (j - i == 1) && text[i] == '.';
    while (j < text.size() && is_closer(text[j])) ++j;

    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;
    bool boundary = false;
    if (k == text.size()) {
      boundary = true;
    } else if (k > j && is_upper(text[k])) {
      boundary = !(single_period && is_abbreviation(word_before(text, first_terminator)));
    }
    if (boundary) {
      emit(text.substr(start, j - start));
      start = k;
    }
    i = j;
  }
  if (start < text.size()) emit(text.substr(start));
  return sentences;
}

Review Review::make(std::string entity_id, std::string review_id, std::string_view text) {
  Review review;
  review.entity_id = std::move(entity_id);
  review.review_id = std::move(review_id);
  review.text = normalize_whitespace(text);
  if (review.text.empty()) {
    throw std::invalid_argument("review " + review.review_id + ": empty text");
  }
  review.sentences = split_sentences(review.text);
  return review;
}

std::size_t Review::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

AspectLabels silver_label(const Review& review, const std::vector<AspectSpec>& aspects) {
  std::unordered_set<std::string_view> present;
  for (const auto& sentence : review.sentences) {
    for (const auto& token : sentence.tokens) present.insert(token);
  }
  AspectLabels labels(aspects.size(), -1);
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    for (const auto& seed : aspects[a].seeds) {
      if (present.contains(seed)) {
        labels[a] = 1;
        break;
      }
    }
  }
  return labels;
}

std::vector<AspectSpec> make_aspects(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& named_seeds) {
  std::vector<AspectSpec> aspects;
  std::set<std::string> names;
  for (const auto& [name, seeds] : named_seeds) {
    if (name.empty()) throw std::invalid_argument("aspect with empty name");
    if (!names.insert(name).second) {
      throw std::invalid_argument("duplicate aspect name '" + name + "'");
    }
    AspectSpec spec{aspects.size(), name, {}};
    for (const auto& seed : seeds) {
      for (auto& token : tokenize(seed)) spec.seeds.push_back(std::move(token));
    }
    std::sort(spec.seeds.begin(), spec.seeds.end());
    spec.seeds.erase(std::unique(spec.seeds.begin(), spec.seeds.end()), spec.seeds.end());
    if (spec.seeds.empty()) {
      throw std::invalid_argument("aspect '" + name + "' has no seed words");
    }
    aspects.push_back(std::move(spec));
  }
  return aspects;
}

const Entity* Corpus::find_entity(std::string_view id) const {
  const auto it = std::lower_bound(entities.begin(), entities.end(), id,
                                   [](const Entity& e, std::string_view key) { return e.id < key; });
  if (it == entities.end() || it->id != id) return nullptr;
  return &*it;
}

std::size_t Corpus::review_count() const {
  std::size_t n = 0;
  for (const auto& e : entities) n += e.reviews.size();
  return n;
}

Corpus make_corpus(std::vector<Review> reviews, std::vector<AspectSpec> aspects,
                   std::string domain) {
  std::map<std::string, std::vector<Review>> grouped;
  std::set<std::string> review_ids;
  for (auto& review : reviews) {
    if (!review_ids.insert(review.review_id).second) {
      throw std::runtime_error("duplicate review_id '" + review.review_id + "'");
    }
    grouped[review.entity_id].push_back(std::move(review));
  }
  Corpus corpus;
  corpus.domain = std::move(domain);
  corpus.aspects = std::move(aspects);
  for (auto& [id, group] : grouped) {
    std::sort(group.begin(), group.end(),
              [](const Review& a, const Review& b) { return a.review_id < b.review_id; });
    corpus.entities.push_back(Entity{id, std::move(group)});
  }
  return corpus;
}

Corpus load_corpus_from_string(std::string_view content, std::vector<AspectSpec> aspects,
                               std::string domain) {
  std::vector<Review> reviews;
  std::set<std::string> review_ids;
  for_each_record(content, [&](std::size_t line_number, const json& record) {
    auto entity_id = required_string(record, "entity_id", line_number);
    auto review_id = required_string(record, "review_id", line_number);
    const auto text = required_string(record, "text", line_number);
    if (!review_ids.insert(review_id).second) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": duplicate review_id '" +
                               review_id + "'");
    }
    try {
      reviews.push_back(Review::make(std::move(entity_id), std::move(review_id), text));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": " + e.what());
    }
  });
  if (reviews.empty()) throw std::runtime_error("empty corpus");
  return make_corpus(std::move(reviews), std::move(aspects), std::move(domain));
}

Corpus load_corpus(const std::filesystem::path& path, std::vector<AspectSpec> aspects,
                   std::string domain) {
  if (domain.empty()) domain = path.stem().string();
  return load_corpus_from_string(read_file(path), std::move(aspects), std::move(domain));
}

std::vector<AspectSpec> load_aspects_from_string(std::string_view content) {
  std::vector<std::pair<std::string, std::vector<std::string>>> named;
  for_each_record(content, [&](std::size_t line_number, const json& record) {
    auto name = required_string(record, "name", line_number);
    const auto it = record.find("seeds");
    if (it == record.end()) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": missing 'seeds'");
    }
    named.emplace_back(std::move(name), string_array(*it, "seeds", line_number));
    try {
      make_aspects(named);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": " + e.what());
    }
  });
  if (named.empty()) throw std::runtime_error("aspect file lists no aspects");
  return make_aspects(named);
}

std::vector<AspectSpec> load_aspects(const std::filesystem::path& path) {
  return load_aspects_from_string(read_file(path));
}

std::vector<EvalExample> load_eval_set_from_string(std::string_view content,
                                                   const std::vector<AspectSpec>& aspects) {
  std::vector<EvalExample> examples;
  for_each_record(content, [&](std::size_t line_number, const json& record) {
    EvalExample example;
    example.entity_id = required_string(record, "entity_id", line_number);
    const auto reviews = record.find("reviews");
    if (reviews == record.end() || !reviews->is_array() || reviews->empty()) {
      throw std::runtime_error("line " + std::to_string(line_number) +
                               ": example needs a non-empty 'reviews' array");
    }
    for (const auto& r : *reviews) {
      example.input_reviews.push_back(Review::make(example.entity_id,
                                                   required_string(r, "review_id", line_number),
                                                   required_string(r, "text", line_number)));
    }
    const auto summaries = record.find("summaries");
    if (summaries == record.end() || !summaries->is_object()) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": missing 'summaries'");
    }
    if (const auto general = summaries->find("general"); general != summaries->end()) {
      example.general_refs = string_array(*general, "general", line_number);
    }
    if (const auto per_aspect = summaries->find("aspects"); per_aspect != summaries->end()) {
      for (const auto& [name, refs] : per_aspect->items()) {
        const auto spec = std::find_if(aspects.begin(), aspects.end(),
                                       [&](const AspectSpec& a) { return a.name == name; });
        if (spec == aspects.end()) {
          throw std::runtime_error("line " + std::to_string(line_number) + ": unknown aspect '" +
                                   name + "'");
        }
        auto list = string_array(refs, name, line_number);
        if (!list.empty()) example.aspect_refs[spec->aspect_id] = std::move(list);
      }
    }
    if (example.general_refs.empty() && example.aspect_refs.empty()) {
      throw std::runtime_error("line " + std::to_string(line_number) +
                               ": example has no reference summaries");
    }
    examples.push_back(std::move(example));
  });
  return examples;
}

std::vector<EvalExample> load_eval_set(const std::filesystem::path& path,
                                       const std::vector<AspectSpec>& aspects) {
  return load_eval_set_from_string(read_file(path), aspects);
}

}  // namespace acesum
