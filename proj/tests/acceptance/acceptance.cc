// Exit-gate checks. One PASS/FAIL line per criterion; nonzero exit if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "acesum/app.h"
#include "acesum/eval.h"
#include "acesum/synthesis.h"
#include "fixtures.h"
#include "json.hpp"
#include "oracles.h"

using namespace acesum;

namespace {

using Clock = std::chrono::steady_clock;
using Tokens = std::vector<std::string>;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct Criterion {
  std::string name;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

EmbeddingTable random_table(std::mt19937_64& gen, std::size_t dim, std::size_t words) {
  std::normal_distribution<double> dist;
  EmbeddingTable table(dim);
  for (std::size_t i = 0; i < words; ++i) {
    Vector v(dim);
    for (auto& x : v) x = dist(gen);
    table.add("w" + std::to_string(i), v);
  }
  return table;
}

Review random_review(std::mt19937_64& gen, std::size_t words, std::size_t sentences, std::size_t max_len) {
  std::string text;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t len = 1 + gen() % max_len;
    std::string sentence = "W" + std::to_string(gen() % words);
    for (std::size_t t = 1; t < len; ++t) sentence += " w" + std::to_string(gen() % words);
    text += (text.empty() ? "" : " ") + sentence + ".";
  }
  return Review::make("e", "r", text);
}

// Training setup shared by the planted-corpus criteria.
TrainConfig planted_training(std::uint64_t seed) {
  TrainConfig config;
  config.learning_rate = 1e-2;
  config.steps = 2000;
  config.warmup_steps = 100;
  config.heads = 12;
  config.seed = seed;
  return config;
}

Outcome gradient_check() {
  Outcome out;
  std::mt19937_64 gen(2024);
  const Pooling variants[] = {Pooling::kMip, Pooling::kMax, Pooling::kMean, Pooling::kAttention};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 2 + gen() % 7, aspects = 1 + gen() % 3, heads = 1 + gen() % 2;
    const auto variant = variants[trial % 4];
    const auto table = random_table(gen, dim, 10);
    auto model = MilModel::initialize(dim, aspects, heads, variant, 100 + static_cast<std::uint64_t>(trial));
    const auto review = random_review(gen, 10, 1 + gen() % 3, 5);
    std::vector<int> labels(aspects);
    for (auto& y : labels) y = gen() % 2 ? 1 : -1;
    MilModel grad;
    loss_and_gradient(review, labels, table, model, grad);
    auto blocks = model.parameter_blocks();
    const auto gblocks = std::as_const(grad).parameter_blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t i = 0; i < blocks[b].size(); ++i) {
        const double saved = blocks[b][i];
        blocks[b][i] = saved + 1e-5;
        const double up = soft_margin_loss(forward(review, table, model).document, labels);
        blocks[b][i] = saved - 1e-5;
        const double down = soft_margin_loss(forward(review, table, model).document, labels);
        blocks[b][i] = saved;
        const double numeric = (up - down) / 2e-5;
        const double analytic = gblocks[b][i];
        const double err = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-4});
        worst = std::max(worst, err);
      }
    }
  }
  out.detail = fmt("worst relative error %.2e over 20 configurations", worst);
  if (!(worst < 1e-4)) out.fail(out.detail);
  return out;
}

Outcome pooling_oracle() {
  Outcome out;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> dist(-1, 1);
  double worst = 0.0;
  for (int bag = 0; bag < 100; ++bag) {
    const std::size_t dim = 1 + gen() % 8, aspects = 1 + gen() % 4, k = 1 + gen() % 12, heads = 1 + gen() % 4;
    const auto model = MilModel::initialize(dim, aspects, heads, Pooling::kMip, 300 + static_cast<std::uint64_t>(bag));
    Matrix z(k, aspects), x(k, dim);
    for (auto& v : z.values()) v = dist(gen);
    for (auto& v : x.values()) v = 2 * dist(gen);
    for (auto variant : {Pooling::kMip, Pooling::kMax, Pooling::kMean, Pooling::kAttention}) {
      const auto got = pool_variant(z, x, model.token_to_sentence, variant);
      const auto want = oracle::pool(oracle::rows_of(z), oracle::rows_of(x), model.token_to_sentence, variant);
      for (std::size_t m = 0; m < aspects; ++m) worst = std::max(worst, std::abs(got[m] - want[m]));
    }
  }
  out.detail = fmt("100 bags x 4 variants, max deviation %.2e", worst);
  if (!(worst <= 1e-12)) out.fail(out.detail);
  return out;
}

Outcome table4_direction() {
  Outcome out;
  const Pooling variants[] = {Pooling::kMip, Pooling::kMax, Pooling::kMean};
  double mean_f1[3] = {0, 0, 0};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto planted = make_planted_corpus(seed, 20, 10);
    const auto rows = run_ablation(planted, planted_training(seed), variants);
    for (int i = 0; i < 3; ++i) mean_f1[i] += rows[static_cast<std::size_t>(i)].scores.doc_f1 / 5;
  }
  out.detail = fmt("doc F1 over 5 seeds: mip %.4f, max %.4f, mean %.4f", mean_f1[0], mean_f1[1], mean_f1[2]);
  if (!(mean_f1[0] - mean_f1[2] >= 0.20)) out.fail(out.detail + "; mip-mean gap below 0.20");
  if (!(mean_f1[0] >= mean_f1[1])) out.fail(out.detail + "; mip below max");
  return out;
}

Outcome silver_labels() {
  Outcome out;
  const auto aspects = fixture::hotel_aspects();
  std::vector<std::string> vocab = {"the", "was", "and", "rooms", "cleaned", "walking", "Staff", "BED",
                                    "great", "ok", "stained", "buses", "friendly!", "desk,", "wi-fi"};
  for (const auto& a : aspects) vocab.insert(vocab.end(), a.seeds.begin(), a.seeds.end());
  std::mt19937_64 gen(5);
  std::size_t positives = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    const std::size_t sentences = 1 + gen() % 4;
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t len = 1 + gen() % 9;
      std::string sentence = "Well";
      for (std::size_t t = 0; t < len; ++t) sentence += " " + vocab[gen() % vocab.size()];
      text += (text.empty() ? "" : " ") + sentence + ".";
    }
    const auto review = Review::make("e", "r" + std::to_string(i), text);
    const auto got = silver_label(review, aspects);
    if (got != oracle::silver(review, aspects)) {
      out.fail("mismatch on review " + std::to_string(i));
      break;
    }
    positives += static_cast<std::size_t>(std::count(got.begin(), got.end(), 1));
  }
  if (out.pass) out.detail = "1000 reviews identical, " + std::to_string(positives) + " positive labels";
  return out;
}

Outcome controller_round_trip() {
  Outcome out;
  const std::string layout = "[CODE] [ASPECT_2] [ASPECT_3] [KEY] k1 k2 [SNT] s1 [SNT] s2";
  const ControllerSet example{{2, 3}, {"k1", "k2"}, {"s1", "s2"}};
  if (serialize_controllers(example, 6) != layout || !(parse_controllers(layout, 6) == example)) {
    out.fail("layout example does not round-trip");
  }
  std::mt19937_64 gen(11);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz0123456789'-,.!?";
  auto word = [&] {
    std::string w;
    for (std::size_t i = 0, n = 1 + gen() % 8; i < n; ++i) w += letters[gen() % letters.size()];
    return w;
  };
  for (int i = 0; i < 1000 && out.pass; ++i) {
    const std::size_t aspects = 1 + gen() % 10;
    ControllerSet c;
    for (std::size_t a = 0; a < aspects; ++a)
      if (gen() % 2) c.codes.push_back(a);
    if (c.codes.empty()) c.codes.push_back(gen() % aspects);
    std::set<std::string> seen;
    for (std::size_t k = 0, n = gen() % 11; k < n;) {
      auto w = word();
      if (seen.insert(w).second) c.keywords.push_back(w), ++k;
    }
    for (std::size_t s = 0, n = gen() % 6; s < n; ++s) {
      std::string text = word();
      for (std::size_t w = 0, m = gen() % 15; w < m; ++w) text += " " + word();
      c.sentences.push_back(text);
    }
    if (!(parse_controllers(serialize_controllers(c, aspects), aspects) == c)) {
      out.fail("random set " + std::to_string(i) + " does not round-trip");
    }
  }

  // Budgets on built datasets, with entities large enough to hit them.
  const SynthConfig defaults;
  if (defaults.token_budget != 500 || defaults.keyword_count != 10) out.fail("unexpected synthesis defaults");
  std::size_t examples = 0, max_tokens = 0, max_keywords = 0;
  for (std::uint64_t seed = 1; seed <= 3 && out.pass; ++seed) {
    const auto planted = make_planted_corpus(seed, 2, 150);
    const auto model = MilModel::initialize(planted.table.dimension(), 3, 2, Pooling::kMip, seed);
    std::ostringstream data;
    build_dataset(planted.corpus, model, planted.table, defaults, data);
    std::istringstream lines(data.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      const auto record = nlohmann::json::parse(line);
      const auto c = parse_controllers(record["controller_string"].get<std::string>(), 3);
      std::size_t tokens = 0;
      for (const auto& s : c.sentences) tokens += tokenize(s).size();
      max_tokens = std::max(max_tokens, tokens);
      max_keywords = std::max(max_keywords, c.keywords.size());
      ++examples;
    }
  }
  if (max_tokens > 500) out.fail("controller sentences use " + std::to_string(max_tokens) + " tokens");
  if (max_keywords > 10) out.fail(std::to_string(max_keywords) + " keywords");
  if (examples == 0) out.fail("no dataset examples built");
  if (out.pass) {
    out.detail = "1000 random sets + layout example; " + std::to_string(examples) +
                 " built examples, max " + std::to_string(max_tokens) + " sentence tokens, max " +
                 std::to_string(max_keywords) + " keywords";
  }
  return out;
}

double f1_of(std::size_t overlap, std::size_t cand, std::size_t ref) {
  if (cand == 0 || ref == 0 || overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(cand);
  const double r = static_cast<double>(overlap) / static_cast<double>(ref);
  return 2 * p * r / (p + r);
}

bool rouge_matches(const Tokens& c, const Tokens& r) {
  const auto s = rouge(c, r);
  const auto o1 = oracle::ngram_overlap(c, r, 1);
  const auto o2 = oracle::ngram_overlap(c, r, 2);
  const auto lcs = oracle::lcs_enumerate(c, r);
  return s.r1.f1 == f1_of(o1.overlap, o1.cand, o1.ref) && s.r2.f1 == f1_of(o2.overlap, o2.cand, o2.ref) &&
         s.rl.f1 == f1_of(lcs, c.size(), r.size()) && lcs_length(c, r) == lcs;
}

Outcome rouge_oracle() {
  Outcome out;
  std::size_t pairs = 0;
  // Every split of every binary string up to total length 12.
  for (std::size_t total = 0; total <= 12 && out.pass; ++total) {
    for (std::uint32_t bits = 0; bits < (1u << total) && out.pass; ++bits) {
      Tokens all;
      for (std::size_t i = 0; i < total; ++i) all.push_back((bits >> i & 1u) ? "b" : "a");
      for (std::size_t split = 0; split <= total; ++split, ++pairs) {
        const Tokens c(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(split));
        const Tokens r(all.begin() + static_cast<std::ptrdiff_t>(split), all.end());
        if (!rouge_matches(c, r)) out.fail("mismatch at length " + std::to_string(total));
      }
    }
  }
  // Every length split up to 24, random contents over small vocabularies.
  std::mt19937_64 gen(21);
  for (std::size_t lc = 0; lc <= 24 && out.pass; ++lc) {
    for (std::size_t lr = 0; lc + lr <= 24 && out.pass; ++lr) {
      for (int t = 0; t < 30; ++t, ++pairs) {
        const std::size_t alphabet = 2 + gen() % 5;
        Tokens c, r;
        for (std::size_t i = 0; i < lc; ++i) c.push_back(std::string(1, static_cast<char>('a' + gen() % alphabet)));
        for (std::size_t i = 0; i < lr; ++i) r.push_back(std::string(1, static_cast<char>('a' + gen() % alphabet)));
        if (!rouge_matches(c, r)) out.fail("mismatch at lengths " + std::to_string(lc) + "/" + std::to_string(lr));
      }
    }
  }
  const Tokens text = tokenize("the room was spotless and the staff were friendly");
  const auto same = rouge(text, text);
  if (same.r1.f1 != 1.0 || same.r2.f1 != 1.0 || same.rl.f1 != 1.0) out.fail("identity does not score 1.0");
  if (out.pass) out.detail = std::to_string(pairs) + " pairs exact, identity scores 1.0";
  return out;
}

Outcome lexrank_checks() {
  Outcome out;
  LexRankConfig config;
  std::mt19937_64 gen(31);
  std::normal_distribution<double> dist;
  double worst_sum = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    std::vector<Vector> reprs(n, Vector(6));
    for (auto& v : reprs)
      for (auto& x : v) x = dist(gen);
    auto cfg = config;
    cfg.similarity_threshold = static_cast<double>(gen() % 21) / 10.0 - 1.0;
    const auto p = lexrank(reprs, cfg);
    double total = 0;
    for (double x : p) {
      if (x < 0) out.fail("negative score");
      total += x;
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  if (!(worst_sum <= 1e-9)) out.fail(fmt("sum off by %.2e", worst_sum));

  const std::vector<Vector> twins = {Vector{0.3, 0.1}, Vector{0.3, 0.1}};
  const auto p2 = lexrank(twins, config);
  if (std::abs(p2[0] - 0.5) > 1e-12 || std::abs(p2[1] - 0.5) > 1e-12) out.fail("twin scores not 0.5/0.5");

  const auto table = fixture::table();
  const auto corpus = fixture::hotel_corpus();
  double worst = 0.0;
  for (const auto& entity : corpus.entities) {
    const auto sentences = collect_sentences(entity.reviews);
    oracle::Rows reprs;
    for (const auto& s : sentences) {
      std::vector<double> m(16, 0.0);
      for (const auto& t : s.tokens) {
        const auto v = table.lookup(t);
        for (std::size_t j = 0; j < 16; ++j) m[j] += v[j] / static_cast<double>(s.tokens.size());
      }
      reprs.push_back(m);
    }
    const auto want = oracle::lexrank_dense(reprs, config.similarity_threshold, config.damping);
    const auto got = lexrank(sentences, table, config);
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  if (!(worst <= 1e-6)) out.fail(fmt("fixture graphs deviate by %.2e", worst));
  if (out.pass) {
    out.detail = fmt("200 random graphs sum to 1 within %.1e; twins 0.5/0.5; fixture graphs within %.1e",
                     worst_sum, worst);
  }
  return out;
}

Outcome exclusivity() {
  Outcome out;
  double lowest = 1.0;
  std::size_t summaries = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto planted = make_planted_corpus(seed, 1, 200);
    const auto model = train(planted.corpus, planted.silver_labels(), planted.table, planted_training(seed));
    const auto& reviews = planted.corpus.entities[0].reviews;
    for (std::size_t a = 0; a < 3; ++a) {
      const std::vector<std::size_t> code = {a};
      const auto summary = summarize(reviews, Query::of(3, code), model, planted.table, {});
      if (summary.sentences.empty()) {
        out.fail("empty summary for seed " + std::to_string(seed));
        continue;
      }
      std::size_t hits = 0;
      for (const auto& s : summary.sentences)
        hits += planted.sentence_gold.at(s.review_id)[s.sentence_index] == a;
      const double share = static_cast<double>(hits) / static_cast<double>(summary.sentences.size());
      lowest = std::min(lowest, share);
      ++summaries;
    }
  }
  out.detail = fmt("lowest on-aspect share %.3f over %.0f summaries", lowest, static_cast<double>(summaries));
  if (!(lowest >= 0.9)) out.fail(out.detail);
  return out;
}

Outcome faithfulness() {
  Outcome out;
  const auto corpus = fixture::hotel_corpus();
  const auto table = fixture::table();
  TrainConfig quick;
  quick.learning_rate = 1e-2;
  quick.steps = 300;
  quick.warmup_steps = 30;
  quick.heads = 4;
  std::vector<AspectLabels> labels;
  for (const auto& e : corpus.entities)
    for (const auto& r : e.reviews) labels.push_back(silver_label(r, corpus.aspects));
  const auto hotel_model = train(corpus, labels, table, quick);
  const auto planted = make_planted_corpus(9, 6, 15);
  const auto planted_model = train(planted.corpus, planted.silver_labels(), planted.table, quick);

  std::mt19937_64 gen(41);
  std::size_t sentences = 0;
  for (int call = 0; call < 100; ++call) {
    const bool hotel = call % 2 == 0;
    const auto& c = hotel ? corpus : planted.corpus;
    const auto& model = hotel ? hotel_model : planted_model;
    const TokenEncoder& encoder = hotel ? static_cast<const TokenEncoder&>(table) : planted.table;
    const auto& entity = c.entities[gen() % c.entities.size()];
    std::vector<bool> q(c.aspect_count());
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = gen() % 2;
    q[gen() % q.size()] = true;
    SummarizerConfig config;
    config.lexrank.summary_token_budget = 10 + gen() % 100;
    config.pool_token_budget = 20 + gen() % 500;
    const auto summary = summarize(entity.reviews, Query(q), model, encoder, config);
    for (const auto& s : summary.sentences) {
      bool found = false;
      for (const auto& r : entity.reviews) {
        if (r.review_id != s.review_id) continue;
        found = s.sentence_index < r.sentences.size() && r.sentences[s.sentence_index].raw == s.text &&
                r.text.find(s.text) != std::string::npos;
      }
      if (!found) out.fail("sentence not in its source review: " + s.text);
      ++sentences;
    }
  }
  if (sentences == 0) out.fail("no sentences produced");
  if (out.pass) out.detail = "100 calls, " + std::to_string(sentences) + " sentences all verbatim";
  return out;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome out;
  const auto dir = fixture::scratch("acceptance_determinism");
  AppConfig config;
  config.corpus = fixture::reviews_path();
  config.aspects = fixture::hotel_aspects_path();
  config.embeddings = fixture::embeddings_path();
  config.train.steps = 200;
  config.train.warmup_steps = 20;
  config.train.learning_rate = 1e-2;
  config.train.seed = 7;
  std::ostringstream log;
  config.model = dir / "a.txt";
  cmd_train(config, log);
  config.model = dir / "b.txt";
  cmd_train(config, log);
  const auto a = read_all(dir / "a.txt"), b = read_all(dir / "b.txt");
  if (a.empty() || a != b) out.fail("model files differ");
  std::ostringstream s1, s2;
  for (const auto& entity : {"h1", "h3", "h5"}) {
    cmd_summarize(config, entity, {}, s1);
    cmd_summarize(config, entity, {"rooms"}, s1);
    cmd_summarize(config, entity, {}, s2);
    cmd_summarize(config, entity, {"rooms"}, s2);
  }
  if (s1.str() != s2.str()) out.fail("summaries differ");
  if (out.pass) out.detail = std::to_string(a.size()) + "-byte model files identical; 6 summaries identical";
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"gradient check", 10, gradient_check},
      {"pooling oracle equivalence", 5, pooling_oracle},
      {"pooling ablation direction", 300, table4_direction},
      {"silver labels", 5, silver_labels},
      {"controller round-trip and budgets", 0, controller_round_trip},
      {"ROUGE oracle", 30, rouge_oracle},
      {"LexRank", 0, lexrank_checks},
      {"aspect exclusivity", 0, exclusivity},
      {"extractive faithfulness", 0, faithfulness},
      {"determinism", 0, determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.time_limit > 0 && seconds > c.time_limit) {
      outcome.fail(outcome.detail + fmt("; took %.1fs, limit %.0fs", seconds, c.time_limit));
    }
    failures += !outcome.pass;
    std::printf("%s  %2zu %-36s %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", i + 1, c.name.c_str(),
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
