#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "mtdiag/corpus.hpp"
#include "mtdiag/error.hpp"

using namespace mtdiag;
using testutil::TempDir;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("language pair validation") {
  auto p = LanguagePair::parse("ar-he");
  CHECK(p.src == "ar");
  CHECK(p.tgt == "he");
  CHECK(p.str() == "ar-he");
  CHECK(LanguagePair::parse("de-fr") != LanguagePair::parse("fr-de"));
  CHECK_THROWS_AS(LanguagePair::parse("de-de"), Error);
  CHECK_THROWS_AS(LanguagePair::parse("DE-fr"), Error);
  CHECK_THROWS_AS(LanguagePair::parse("deu-fr"), Error);
  CHECK_THROWS_AS(LanguagePair::parse("defr"), Error);
}

TEST_CASE("jsonl load preserves order") {
  TempDir tmp;
  auto path = tmp.file("c.jsonl", testutil::jsonl_corpus({{{"a", "one", "eins"}},
                                                          {{"b", "two", "zwei"}},
                                                          {{"c", "three", "drei"}}}));
  auto corpus = load_corpus(path, CorpusFormat::jsonl, LanguagePair::parse("en-de"));
  REQUIRE(corpus.size() == 3);
  CHECK(corpus.instances[0].id == "a");
  CHECK(corpus.instances[1].id == "b");
  CHECK(corpus.instances[2].id == "c");
  CHECK(corpus.instances[0].src_text == "one");
  CHECK(*corpus.instances[2].ref_text == "drei");
}

TEST_CASE("jsonl validation collects line numbers") {
  TempDir tmp;
  std::string content =
      "{\"id\": \"a\", \"src\": \"x\"}\n"
      "{\"id\": \"a\", \"src\": \"y\"}\n"
      "{\"id\": \"b\", \"src\": \"\"}\n"
      "{\"src\": \"z\"}\n"
      "not json\n";
  auto path = tmp.file("bad.jsonl", content);
  try {
    load_corpus(path, CorpusFormat::jsonl, LanguagePair::parse("en-de"));
    FAIL("expected load to fail");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(e.details().size() == 4);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("duplicate id") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("line 5") != std::string::npos);
  }
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/x.jsonl", CorpusFormat::jsonl,
                              LanguagePair::parse("en-de")),
                  Error);
}

TEST_CASE("tsv missing src column names the column") {
  TempDir tmp;
  auto path = tmp.file("c.tsv", "id\tref\n1\tfoo\n");
  try {
    load_corpus(path, CorpusFormat::tsv, LanguagePair::parse("en-de"));
    FAIL("expected load to fail");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'src'") != std::string::npos);
  }
}

TEST_CASE("tsv header-driven columns") {
  TempDir tmp;
  auto path = tmp.file("c.tsv", "ref\tid\tsrc\nr1\ta\ts1\nr2\tb\ts2\n");
  auto corpus = load_corpus(path, CorpusFormat::tsv, LanguagePair::parse("en-de"));
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.instances[0].id == "a");
  CHECK(corpus.instances[0].src_text == "s1");
  CHECK(*corpus.instances[1].ref_text == "r2");
}

TEST_CASE("3000-line corpus loads completely") {
  TempDir tmp;
  std::string content;
  for (int i = 0; i < 3000; ++i) {
    content += "{\"id\": \"i" + std::to_string(i) + "\", \"src\": \"s" + std::to_string(i) +
               "\"}\n";
  }
  auto path = tmp.file("big.jsonl", content);
  auto corpus = load_corpus(path, CorpusFormat::jsonl, LanguagePair::parse("ar-he"));
  CHECK(corpus.size() == 3000);
}

TEST_CASE("serialize round-trips byte-identically") {
  TempDir tmp;
  auto path = tmp.file("c.jsonl", testutil::jsonl_corpus({{{"a", "one", "eins"}},
                                                          {{"b", "two", ""}},
                                                          {{"c", "Grüße \"quoted\"", "x"}}}));
  auto corpus = load_corpus(path, CorpusFormat::jsonl, LanguagePair::parse("en-de"));
  std::string once = serialize_corpus_jsonl(corpus);
  auto again_path = tmp.file("c2.jsonl", once);
  auto corpus2 = load_corpus(again_path, CorpusFormat::jsonl, LanguagePair::parse("en-de"));
  CHECK(serialize_corpus_jsonl(corpus2) == once);
}

namespace {

Corpus numbered_corpus(size_t n) {
  Corpus c;
  c.pair = LanguagePair::parse("en-de");
  for (size_t i = 0; i < n; ++i) {
    c.instances.push_back({std::to_string(i), "text " + std::to_string(i), "ref", {}, {}});
  }
  return c;
}

}  // namespace

TEST_CASE("sample determinism and membership") {
  auto corpus = numbered_corpus(10);

  auto full = sample(corpus, 10, 7);
  std::set<std::string> ids;
  for (const auto& inst : full.instances) ids.insert(inst.id);
  CHECK(ids.size() == 10);  // same membership as the corpus

  auto a = sample(corpus, 3, 42);
  auto b = sample(corpus, 3, 42);
  REQUIRE(a.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(a.instances[i].id == b.instances[i].id);

  auto c = sample(corpus, 3, 43);
  bool different = false;
  for (size_t i = 0; i < 3; ++i) {
    if (a.instances[i].id != c.instances[i].id) different = true;
  }
  CHECK(different);

  std::set<std::string> seen;
  for (const auto& inst : a.instances) {
    CHECK(seen.insert(inst.id).second);
    CHECK(std::stoi(inst.id) < 10);
  }
}

TEST_CASE("sample size errors state both numbers") {
  auto corpus = numbered_corpus(5);
  try {
    sample(corpus, 9, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("9") != std::string::npos);
    CHECK(msg.find("5") != std::string::npos);
  }
}

TEST_CASE("sample membership is uniform across seeds") {
  auto corpus = numbered_corpus(10);
  std::map<std::string, int> counts;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    for (const auto& inst : sample(corpus, 3, static_cast<uint64_t>(seed)).instances) {
      counts[inst.id]++;
    }
  }
  // each id ~ Binomial(10000, 0.3): mean 3000, sigma ~ 45.8
  const double mean = trials * 0.3;
  const double sigma = std::sqrt(trials * 0.3 * 0.7);
  for (const auto& [id, count] : counts) {
    CHECK(std::fabs(count - mean) <= 3.0 * sigma);
  }
}

TEST_CASE("demonstration sampling") {
  auto pool = numbered_corpus(100);

  auto demos = sample_demonstrations(pool, 5, 11);
  auto again = sample_demonstrations(pool, 5, 11);
  REQUIRE(demos.size() == 5);
  for (size_t i = 0; i < 5; ++i) CHECK(demos[i].id == again[i].id);

  CHECK(sample_demonstrations(pool, 0, 1).empty());
  CHECK_THROWS_AS(sample_demonstrations(numbered_corpus(3), 4, 1), Error);
}

TEST_CASE("demonstration overlap matches the hypergeometric mean") {
  auto pool = numbered_corpus(100);
  // overlap of two independent 5-draws from 100: mean k^2/N = 0.25
  double total_overlap = 0.0;
  const int pairs = 2000;
  for (int i = 0; i < pairs; ++i) {
    auto a = sample_demonstrations(pool, 5, static_cast<uint64_t>(2 * i));
    auto b = sample_demonstrations(pool, 5, static_cast<uint64_t>(2 * i + 1));
    std::set<std::string> ids;
    for (const auto& inst : a) ids.insert(inst.id);
    for (const auto& inst : b) {
      if (ids.count(inst.id)) total_overlap += 1.0;
    }
  }
  const double mean_overlap = total_overlap / pairs;
  CHECK(std::fabs(mean_overlap - 0.25) < 0.05);
}

TEST_CASE("prompt templates") {
  auto en_de = LanguagePair::parse("en-de");
  CHECK(render_prompt(PromptTemplate::p2, en_de, "Hello", {}) ==
        "Translate the following English into German and only output the target text: Hello");
  CHECK(render_prompt(PromptTemplate::p0, en_de, "Hi", {}) == "English: Hi\nGerman:");
  CHECK(render_prompt(PromptTemplate::p1, en_de, "Hi", {}) ==
        "Translate the following English into German: Hi");
}

TEST_CASE("prompt demonstrations render one filled template each") {
  auto en_de = LanguagePair::parse("en-de");
  std::vector<Instance> demos;
  for (int i = 0; i < 5; ++i) {
    demos.push_back({"d" + std::to_string(i), "src" + std::to_string(i),
                     "ref" + std::to_string(i), {}, {}});
  }
  std::string prompt = render_prompt(PromptTemplate::p2, en_de, "query", demos);

  size_t count = 0, pos = 0;
  const std::string marker = "Translate the following English into German";
  while ((pos = prompt.find(marker, pos)) != std::string::npos) {
    ++count;
    pos += marker.size();
  }
  CHECK(count == 6);  // 5 demonstrations + the query

  for (const auto& demo : demos) {
    size_t first = prompt.find(demo.src_text);
    REQUIRE(first != std::string::npos);
    CHECK(prompt.find(demo.src_text, first + 1) == std::string::npos);
    CHECK(prompt.find(*demo.ref_text) != std::string::npos);
  }
  CHECK(prompt.find("query") != std::string::npos);
}

TEST_CASE("prompt rendering rejects unknown codes and ref-less demos") {
  CHECK_THROWS_AS(render_prompt(PromptTemplate::p1, LanguagePair{"qq", "de"}, "x", {}), Error);
  std::vector<Instance> demos{{"d0", "src", {}, {}, {}}};
  CHECK_THROWS_AS(render_prompt(PromptTemplate::p1, LanguagePair::parse("en-de"), "x", demos),
                  Error);
}

TEST_CASE("language name table from csv") {
  TempDir tmp;
  auto path = tmp.file("names.csv", "code,name\nen,English\nqq,Martian\n");
  auto names = LanguageNames::load_csv(path);
  CHECK(names.name("qq") == "Martian");
  CHECK(LanguageNames::builtin().name("km") == "Khmer");
  CHECK_FALSE(names.knows("zz"));
}

TEST_SUITE_END();
