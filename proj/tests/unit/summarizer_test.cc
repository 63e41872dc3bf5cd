#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "acesum/eval.h"
#include "acesum/summarizer.h"
#include "doctest.h"
#include "fixtures.h"
#include "oracles.h"

using namespace acesum;

namespace {

std::vector<RankedSentence> fixture_sentences(std::size_t entity) {
  static const auto corpus = fixture::hotel_corpus();
  return collect_sentences(corpus.entities[entity].reviews);
}

std::vector<double> mean_of(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
  std::vector<double> out(table.dimension(), 0.0);
  for (const auto& t : tokens) {
    const auto v = table.lookup(t);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[j];
  }
  for (auto& x : out) x /= static_cast<double>(tokens.size());
  return out;
}

// Greedy selection restated: walk a descending order, skip near-duplicates,
// stop at the first overflow, then present in review/sentence order.
std::vector<std::size_t> greedy_oracle(const std::vector<RankedSentence>& pool,
                                       const std::vector<double>& scores,
                                       const EmbeddingTable& table, const LexRankConfig& config) {
  std::vector<std::size_t> order;
  std::vector<bool> used(pool.size(), false);
  for (std::size_t step = 0; step < pool.size(); ++step) {
    std::size_t best = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!used[i] && (best == pool.size() || scores[i] > scores[best])) best = i;
    used[best] = true;
    order.push_back(best);
  }
  std::vector<std::size_t> chosen;
  std::size_t tokens = 0;
  for (auto i : order) {
    bool redundant = false;
    for (auto j : chosen)
      if (oracle::cos(mean_of(pool[i].tokens, table), mean_of(pool[j].tokens, table)) >
          config.redundancy_threshold)
        redundant = true;
    if (redundant) continue;
    if (tokens + pool[i].tokens.size() > config.summary_token_budget) break;
    tokens += pool[i].tokens.size();
    chosen.push_back(i);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

EmbeddingTable scaled(const EmbeddingTable& table, double factor) {
  EmbeddingTable out(table.dimension());
  for (const auto& t : table.tokens()) {
    const auto v = table.lookup(t);
    Vector w(v.begin(), v.end());
    for (auto& x : w) x *= factor;
    out.add(t, w);
  }
  return out;
}

std::vector<std::string> texts(const Summary& s) {
  std::vector<std::string> out;
  for (const auto& x : s.sentences) out.push_back(x.review_id + "|" + x.text);
  return out;
}

}  // namespace

TEST_CASE("Query") {
  CHECK_THROWS(Query(std::vector<bool>{false, false}));
  const auto all = Query::all(3);
  CHECK(all.is_general());
  CHECK(all.bitmask() == "111");
  const std::vector<std::size_t> codes = {2, 0, 2};
  const auto q = Query::of(4, codes);
  CHECK(q.bitmask() == "1010");
  CHECK(q.codes() == std::vector<std::size_t>{0, 2});
  CHECK_FALSE(q.is_general());
  const std::vector<std::size_t> bad = {4};
  CHECK_THROWS(Query::of(4, bad));
}

TEST_CASE("select_pool") {
  const auto corpus = fixture::hotel_corpus();
  const auto table = fixture::table();
  const auto model = MilModel::initialize(16, 6, 2, Pooling::kMip, 4);
  const auto& reviews = corpus.entities[0].reviews;

  const auto general = select_pool(reviews, Query::all(6), model, table);
  SynthConfig config;
  const std::vector<std::size_t> every = {0, 1, 2, 3, 4, 5};
  const auto direct = rank_sentences(reviews, every, model, table, config);
  REQUIRE(general.size() == direct.size());
  for (std::size_t i = 0; i < general.size(); ++i) CHECK(general[i].text == direct[i].text);

  // Location and rooms: scores are the loss against targets +1 on both.
  const std::vector<std::size_t> two = {0, 4};
  const auto pool = select_pool(reviews, Query::of(6, two), model, table);
  std::vector<oracle::Forward> forwards;
  for (const auto& r : reviews) forwards.push_back(oracle::forward(r, table, model));
  for (const auto& s : pool) {
    std::vector<int> y(6, -1);
    y[0] = y[4] = 1;
    const double expected = static_cast<double>(oracle::loss(forwards[s.review].sentences[s.sentence_index], y));
    CHECK(std::abs(s.score - expected) < 1e-10);
  }
  // Only the code set matters.
  const std::vector<std::size_t> swapped = {4, 0};
  const auto again = select_pool(reviews, Query::of(6, swapped), model, table);
  REQUIRE(again.size() == pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) CHECK(again[i].score == pool[i].score);

  CHECK_THROWS(select_pool(reviews, Query::all(5), model, table));
  const auto tight = select_pool(reviews, Query::all(6), model, table, 20);
  std::size_t tokens = 0;
  for (const auto& s : tight) tokens += s.tokens.size();
  CHECK(tokens <= 20);
}

TEST_CASE("single-aspect pool on planted data leads with that aspect") {
  const auto planted = make_planted_corpus(17, 8, 8);
  TrainConfig config;
  config.learning_rate = 1e-2;
  config.steps = 800;
  config.warmup_steps = 40;
  config.heads = 4;
  const auto model = train(planted.corpus, planted.silver_labels(), planted.table, config);
  for (const auto& entity : planted.corpus.entities) {
    for (std::size_t a = 0; a < 3; ++a) {
      const std::vector<std::size_t> code = {a};
      const auto pool = select_pool(entity.reviews, Query::of(3, code), model, planted.table);
      std::size_t available = 0;
      for (const auto& r : entity.reviews) {
        const auto& gold = planted.sentence_gold.at(r.review_id);
        available += static_cast<std::size_t>(std::count(gold.begin(), gold.end(), a));
      }
      const std::size_t top = std::min<std::size_t>(3, available);
      REQUIRE(pool.size() >= top);
      for (std::size_t i = 0; i < top; ++i)
        CHECK(planted.sentence_gold.at(pool[i].review_id)[pool[i].sentence_index] == a);
    }
  }
}

TEST_CASE("sentence_similarity") {
  const auto table = fixture::table();
  const std::vector<std::string> a = {"the", "room", "was", "clean"};
  CHECK(sentence_similarity(a, a, table) == doctest::Approx(1.0));
  const std::vector<std::string> b = {"staff", "were", "helpful"};
  CHECK(std::abs(sentence_similarity(a, b, table) - oracle::cos(mean_of(a, table), mean_of(b, table))) < 1e-12);
  const std::vector<std::string> oov = {"zebra"};
  CHECK(sentence_similarity(a, oov, table) == 0.0);

  EmbeddingTable axes(2);
  axes.add("x", Vector{1, 0});
  axes.add("y", Vector{0, 3});
  const std::vector<std::string> x = {"x"}, y = {"y"};
  CHECK(sentence_similarity(x, y, axes) == 0.0);
}

TEST_CASE("lexrank") {
  const auto table = fixture::table();
  LexRankConfig config;
  const std::vector<Vector> one = {Vector{1, 2, 3}};
  CHECK(lexrank(one, config) == Vector{1.0});
  const std::vector<Vector> twins = {Vector{1, 2}, Vector{1, 2}};
  const auto p2 = lexrank(twins, config);
  CHECK(p2[0] == doctest::Approx(0.5));
  CHECK(p2[1] == doctest::Approx(0.5));
  CHECK(lexrank(std::vector<Vector>{}, config).empty());

  auto bad = config;
  bad.damping = 1.0;
  CHECK_THROWS(lexrank(one, bad));

  const auto sentences = fixture_sentences(0);
  const std::vector<RankedSentence> five(sentences.begin(), sentences.begin() + 5);
  oracle::Rows reprs;
  for (const auto& s : five) reprs.push_back(mean_of(s.tokens, table));
  const auto expected = oracle::lexrank_dense(reprs, config.similarity_threshold, config.damping);
  auto tight = config;
  tight.convergence_tol = 1e-12;
  tight.max_iterations = 10000;
  for (const auto& cfg : {config, tight}) {
    const auto got = lexrank(five, table, cfg);
    REQUIRE(got.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-6);
  }

  // Probability vector on random graphs and thresholds.
  std::mt19937_64 gen(9);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 20;
    std::vector<Vector> vs(n, Vector(4));
    for (auto& v : vs)
      for (auto& x : v) x = dist(gen);
    auto cfg = config;
    cfg.similarity_threshold = static_cast<double>(gen() % 21) / 10.0 - 1.0;
    const auto p = lexrank(vs, cfg);
    double total = 0;
    for (double x : p) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("extract_summary") {
  const auto table = fixture::table();
  LexRankConfig config;
  CHECK(extract_summary({}, {}, table, config).sentences.empty());

  const auto one = collect_sentences(std::vector<Review>{Review::make("e", "r", "Room was clean.")});
  const std::vector<double> s1 = {1.0};
  const auto single = extract_summary(one, s1, table, config);
  REQUIRE(single.sentences.size() == 1);
  CHECK(single.sentences[0].text == "Room was clean.");
  CHECK(single.token_count == 3);

  const auto dup = collect_sentences(std::vector<Review>{Review::make("e", "r", "Room was clean. Room was clean.")});
  const std::vector<double> s2 = {0.5, 0.5};
  CHECK(extract_summary(dup, s2, table, config).sentences.size() == 1);
  CHECK_THROWS(extract_summary(dup, s1, table, config));

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> dist(0, 1);
  for (std::size_t entity = 0; entity < 5; ++entity) {
    const auto pool = fixture_sentences(entity);
    for (std::size_t budget : {5u, 20u, 40u, 75u, 400u}) {
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> scores(pool.size());
        for (auto& x : scores) x = static_cast<double>(gen() % 6) / 5.0 + (trial == 0 ? 0.0 : dist(gen));
        auto cfg = config;
        cfg.summary_token_budget = budget;
        const auto got = extract_summary(pool, scores, table, cfg);
        const auto expected = greedy_oracle(pool, scores, table, cfg);
        REQUIRE(got.sentences.size() == expected.size());
        std::size_t tokens = 0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
          CHECK(got.sentences[i].review_id == pool[expected[i]].review_id);
          CHECK(got.sentences[i].sentence_index == pool[expected[i]].sentence_index);
          CHECK(got.sentences[i].salience == scores[expected[i]]);
          tokens += pool[expected[i]].tokens.size();
        }
        CHECK(got.token_count == tokens);
        CHECK(tokens <= budget);
      }
    }
  }
}

TEST_CASE("summarize is the composition and is faithful") {
  const auto corpus = fixture::hotel_corpus();
  const auto table = fixture::table();
  const auto model = MilModel::initialize(16, 6, 2, Pooling::kMip, 6);
  SummarizerConfig config;
  for (const auto& entity : corpus.entities) {
    for (std::size_t a = 0; a <= 6; ++a) {
      const std::vector<std::size_t> code = {a};
      const auto query = a == 6 ? Query::all(6) : Query::of(6, code);
      const auto summary = summarize(entity.reviews, query, model, table, config);
      const auto pool = select_pool(entity.reviews, query, model, table);
      const auto scores = lexrank(pool, table, config.lexrank);
      const auto composed = extract_summary(pool, scores, table, config.lexrank);
      CHECK(texts(summary) == texts(composed));
      CHECK(summary.token_count <= config.lexrank.summary_token_budget);
      for (const auto& s : summary.sentences) {
        bool found = false;
        for (const auto& r : entity.reviews)
          if (r.review_id == s.review_id && r.text.find(s.text) != std::string::npos) found = true;
        CHECK(found);
      }
      CHECK(texts(summarize(entity.reviews, query, model, table, config)) == texts(summary));
    }
  }
}

TEST_CASE("scale invariance of extraction") {
  const auto corpus = fixture::hotel_corpus();
  const auto table = fixture::table();
  LexRankConfig config;
  for (double factor : {0.01, 3.0, 250.0}) {
    const auto big = scaled(table, factor);
    for (const auto& entity : corpus.entities) {
      CHECK(texts(lexrank_baseline(entity.reviews, big, config)) ==
            texts(lexrank_baseline(entity.reviews, table, config)));
    }
  }
}

TEST_CASE("seed_filter_baseline") {
  const auto table = fixture::table();
  const auto aspects = fixture::hotel_aspects();
  const auto& rooms = aspects[4];
  const auto withseed = collect_sentences(std::vector<Review>{Review::make("e", "r", "The bed.")});
  CHECK(seed_filter_baseline(withseed, rooms, table)[0].score == doctest::Approx(1.0));
  const auto unknown = collect_sentences(std::vector<Review>{Review::make("e", "r", "Zebra quokka.")});
  CHECK(seed_filter_baseline(unknown, rooms, table)[0].score == 0.0);

  for (std::size_t e = 0; e < 5; ++e) {
    const auto sentences = fixture_sentences(e);
    for (const auto& aspect : aspects) {
      std::vector<double> best;
      for (const auto& s : sentences) {
        double b = -2;
        for (const auto& t : s.tokens) {
          for (const auto& seed : aspect.seeds) {
            const auto u = table.lookup(t), v = table.lookup(seed);
            b = std::max(b, oracle::cos({u.begin(), u.end()}, {v.begin(), v.end()}));
          }
        }
        best.push_back(b);
      }
      const auto got = seed_filter_baseline(sentences, aspect, table);
      REQUIRE(got.size() == sentences.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        const auto it = std::find_if(sentences.begin(), sentences.end(), [&](const RankedSentence& s) {
          return s.review == got[i].review && s.sentence_index == got[i].sentence_index;
        });
        CHECK(std::abs(got[i].score - best[it - sentences.begin()]) < 1e-12);
        if (i > 0) CHECK(got[i - 1].score >= got[i].score);
      }
    }
  }
}

TEST_CASE("centroid_baseline") {
  const auto table = fixture::table();
  const std::vector<Review> one = {Review::make("e", "a", "Nice room.")};
  CHECK(centroid_baseline(one, table) == 0);
  CHECK_THROWS(centroid_baseline(std::vector<Review>{}, table));

  EmbeddingTable sym(2);
  sym.add("up", Vector{1, 0});
  sym.add("down", Vector{-1, 0});
  std::vector<Review> pair = {Review::make("e", "b", "Up."), Review::make("e", "a", "Down.")};
  CHECK(centroid_baseline(pair, sym) == 1);

  const auto corpus = fixture::hotel_corpus();
  for (const auto& entity : corpus.entities) {
    oracle::Rows docs;
    for (const auto& r : entity.reviews) {
      std::vector<double> doc(16, 0.0);
      for (const auto& s : r.sentences) {
        const auto m = mean_of(s.tokens, table);
        for (std::size_t j = 0; j < 16; ++j) doc[j] += m[j] / static_cast<double>(r.sentences.size());
      }
      docs.push_back(doc);
    }
    std::vector<double> centre(16, 0.0);
    for (const auto& d : docs)
      for (std::size_t j = 0; j < 16; ++j) centre[j] += d[j] / static_cast<double>(docs.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < docs.size(); ++i)
      if (1 - oracle::cos(docs[i], centre) < 1 - oracle::cos(docs[best], centre)) best = i;
    CHECK(centroid_baseline(entity.reviews, table) == best);
  }
}
