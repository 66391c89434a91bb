#include "doctest.h"

#include "clwe/dictionary.hpp"
#include "support/synthetic.hpp"

#include <fstream>

using namespace clwe;

TEST_CASE("parse_dictionary splits on tabs or spaces") {
  auto tab = parse_dictionary_text("the\tle\ngood\tbon\n");
  CHECK(tab == WordPairList{{"the", "le"}, {"good", "bon"}});
  CHECK(parse_dictionary_text("the le") == WordPairList{{"the", "le"}});
  CHECK(parse_dictionary_text("a \t  b\r\n\n   \nc d") == WordPairList{{"a", "b"}, {"c", "d"}});

  auto multi = parse_dictionary_text("good bon\ngood bien\n");
  REQUIRE(multi.size() == 2);
  CHECK(multi[0].source == multi[1].source);
}

TEST_CASE("parse_dictionary reports the offending line") {
  try {
    parse_dictionary_text("a b\nc\n", "d.txt");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("d.txt:2:") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dictionary_text("a b c\n"), DataError);
  CHECK_THROWS_AS(parse_dictionary("/nonexistent/dict.txt"), DataError);
}

TEST_CASE("index_dictionary filters OOV and collapses repeats") {
  Vocabulary src({"the", "good"});
  Vocabulary tgt({"le", "bon", "bien"});

  auto one = index_dictionary({{"the", "le"}}, src, tgt);
  CHECK(one.dictionary.pairs() == std::vector<IndexPair>{{0, 0}});
  CHECK(one.dropped == 0);

  auto oov = index_dictionary({{"qqq", "le"}}, src, tgt);
  CHECK(oov.dictionary.empty());
  CHECK(oov.dropped == 1);

  auto dup = index_dictionary({{"the", "le"}, {"the", "le"}}, src, tgt);
  CHECK(dup.dictionary.pairs() == std::vector<IndexPair>{{0, 0}});
  CHECK(dup.dropped == 1);

  auto multi = index_dictionary({{"good", "bien"}, {"the", "le"}, {"good", "bon"}}, src, tgt);
  CHECK(multi.dictionary.pairs() == std::vector<IndexPair>{{1, 2}, {0, 0}, {1, 1}});
  CHECK(multi.dictionary.source_words() == std::vector<Index>{1, 0});
}

TEST_CASE("count_oov_sources counts words with no surviving pair") {
  Vocabulary src({"the", "good"});
  Vocabulary tgt({"le"});
  WordPairList raw{{"the", "le"}, {"good", "bon"}, {"zzz", "le"}, {"the", "xx"}};
  CHECK(count_oov_sources(raw, src, tgt) == 2);
}

TEST_CASE("IndexedDictionary validates pairs") {
  CHECK_THROWS_AS(IndexedDictionary(2, 2, {{0, 2}}), ArgumentError);
  CHECK_THROWS_AS(IndexedDictionary(2, 2, {{0, 0}, {0, 0}}), ArgumentError);
  IndexedDictionary d(2, 2, {{0, 0}, {0, 1}});
  CHECK(d.contains({0, 1}));
  CHECK_FALSE(d.contains({1, 1}));
}

TEST_CASE("merge_dictionaries is a stable set union") {
  IndexedDictionary a(3, 3, {{0, 0}});
  IndexedDictionary b(3, 3, {{1, 1}});
  CHECK(merge_dictionaries(a, b).pairs() == std::vector<IndexPair>{{0, 0}, {1, 1}});
  CHECK(merge_dictionaries(a, a) == a);
  IndexedDictionary empty(3, 3);
  CHECK(merge_dictionaries(empty, b) == b);
  CHECK_THROWS_AS(merge_dictionaries(a, IndexedDictionary(4, 3)), ArgumentError);
}

TEST_CASE("merge properties on random dictionaries") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<Index> pick(0, 9);
  for (int trial = 0; trial < 100; ++trial) {
    IndexedDictionary a(10, 10), b(10, 10), c(10, 10);
    for (int k = 0; k < 8; ++k) {
      a.insert({pick(rng), pick(rng)});
      b.insert({pick(rng), pick(rng)});
      c.insert({pick(rng), pick(rng)});
    }
    auto ab = merge_dictionaries(a, b);
    CHECK(ab.size() <= a.size() + b.size());
    CHECK(merge_dictionaries(a, a) == a);
    auto left = merge_dictionaries(ab, c);
    auto right = merge_dictionaries(a, merge_dictionaries(b, c));
    auto sorted = [](std::vector<IndexPair> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    CHECK(sorted(left.pairs()) == sorted(right.pairs()));
  }
}

TEST_CASE("save, parse and index reproduce an indexed dictionary") {
  testing::TempDir dir;
  Vocabulary src({"a", "b", "c"});
  Vocabulary tgt({"x", "y"});
  IndexedDictionary d(3, 2, {{2, 1}, {0, 0}, {0, 1}});
  save_dictionary(to_word_pairs(d, src, tgt), dir / "d.tsv");
  std::ifstream in(dir / "d.tsv");
  std::string first;
  std::getline(in, first);
  CHECK(first == "c\ty");
  auto back = index_dictionary(parse_dictionary(dir / "d.tsv"), src, tgt);
  CHECK(back.dictionary == d);
  CHECK(back.dropped == 0);
}
