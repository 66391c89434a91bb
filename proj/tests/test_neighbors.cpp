#include "doctest.h"

#include "clwe/neighbors.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <cstdlib>
#include <numeric>

using namespace clwe;
namespace t = clwe::testing;

namespace {

EmbeddingMatrix rows(std::initializer_list<std::initializer_list<double>> values, const std::string& prefix) {
  const auto n = static_cast<Index>(values.size());
  const auto d = static_cast<Index>(values.begin()->size());
  Matrix m(n, d);
  Index i = 0;
  for (const auto& r : values) {
    Index k = 0;
    for (double v : r) m(i, k++) = v;
    ++i;
  }
  return t::make_embeddings(m, prefix);
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

}  // namespace

TEST_CASE("topk_cosine on the standard basis") {
  auto e = rows({{1, 0}, {0, 1}}, "e");
  auto lists = topk_cosine(e, e, 1);
  CHECK(lists[0] == std::vector<Neighbor>{{0, 1.0}});
  CHECK(lists[1] == std::vector<Neighbor>{{1, 1.0}});

  auto q = rows({{0, 0, 1}}, "q");
  auto keys = rows({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, "k");
  const auto orthogonal = topk_cosine(q, keys, 3);
  for (const auto& nb : orthogonal[0]) CHECK(nb.score == 0.0);
}

TEST_CASE("topk_cosine breaks ties by lower index and validates input") {
  auto q = rows({{1, 0}}, "q");
  auto keys = rows({{0, 1}, {2, 0}, {1, 0}, {5, 0}}, "k");
  auto top = topk_cosine(q, keys, 3)[0];
  CHECK(top[0].index == 1);
  CHECK(top[1].index == 2);
  CHECK(top[2].index == 3);

  CHECK_THROWS_AS(topk_cosine(q, keys, 0), ArgumentError);
  CHECK_THROWS_AS(topk_cosine(q, keys, 5), ArgumentError);
  CHECK_THROWS_AS(topk_cosine(rows({{0, 0}}, "z"), keys, 1), DataError);
}

TEST_CASE("topk_cosine equals the full-sort oracle") {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<Index> size(1, 64);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = size(rng), m = size(rng), d = 1 + trial % 7;
    Matrix a = t::gaussian(n, d, rng), b = t::gaussian(m, d, rng);
    const int k = 1 + static_cast<int>(trial % std::min<Index>(m, 9));
    auto got = topk_cosine(t::make_embeddings(a, "a"), t::make_embeddings(b, "b"), k);
    auto expected = oracle::full_ranking(oracle::cosine_matrix(a, b));
    for (Index i = 0; i < n; ++i) {
      for (int r = 0; r < k; ++r) {
        const auto& g = got[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
        const auto& e = expected[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
        CHECK(g.index == e.first);
        CHECK(g.score == doctest::Approx(e.second).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("CSLS index values") {
  SUBCASE("identical unit spaces, k = 1") {
    auto e = rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.6, 0.8, 0}}, "w");
    auto index = build_csls_index(e, e, 1);
    CHECK(index.r_src.isApproxToConstant(1.0, 1e-15));
    CHECK(index.r_tgt.isApproxToConstant(1.0, 1e-15));
  }
  SUBCASE("mutually orthogonal vectors") {
    auto src = rows({{1, 0, 0, 0}, {0, 1, 0, 0}}, "s");
    auto tgt = rows({{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 2, 2}}, "t");
    auto index = build_csls_index(src, tgt, 1);
    CHECK(index.r_src.cwiseAbs().maxCoeff() == 0.0);
    CHECK(index.r_tgt.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("4x4 instance against the oracle") {
    auto src = rows({{1, 2, 0, -1}, {0.5, -1, 3, 0}, {-2, 0, 1, 1}, {1, 1, 1, 1}}, "s");
    auto tgt = rows({{2, 1, 0, 0}, {0, -1, 2, 1}, {-1, 1, 1, 0}, {0, 0, 1, -3}}, "t");
    for (int k : {1, 2, 3}) {
      auto index = build_csls_index(src, tgt, k);
      auto o = oracle::csls(src.vectors(), tgt.vectors(), k);
      for (Index i = 0; i < 4; ++i) {
        CHECK(std::abs(index.r_src(i) - o.r_src[static_cast<std::size_t>(i)]) <= 1e-12);
        CHECK(std::abs(index.r_tgt(i) - o.r_tgt[static_cast<std::size_t>(i)]) <= 1e-12);
      }
    }
  }
  SUBCASE("k must be below both vocabulary sizes") {
    auto e = rows({{1, 0}, {0, 1}}, "w");
    CHECK_THROWS_AS(build_csls_index(e, e, 2), ArgumentError);
    CHECK_THROWS_AS(build_csls_index(e, e, 0), ArgumentError);
  }
}

TEST_CASE("csls_translate on identical spaces is the identity") {
  std::mt19937_64 rng(41);
  auto e = t::make_embeddings(t::gaussian(30, 8, rng), "w");
  auto index = build_csls_index(e, e, 5);
  CHECK(csls_translate(index, e, e, all_indices(30)) == all_indices(30));
  CHECK_THROWS_AS(csls_translate(index, e, e, {30}), ArgumentError);
}

TEST_CASE("CSLS demotes a hub that raw cosine prefers") {
  // Target 2 is the cosine nearest neighbour of every source word; source 0's
  // gold translation is target 0. Scores below come from enumerating the
  // full 3x3 CSLS matrix with k = 1.
  auto src = rows({{-3, 2, -1}, {-3, -2, 3}, {0, 0, 1}}, "s");
  auto tgt = rows({{0, 1, -2}, {3, 3, -2}, {-2, 1, 2}}, "t");
  auto index = build_csls_index(src, tgt, 1);

  CHECK(cosine_translate(src, tgt, {0, 1, 2}) == std::vector<Index>{2, 2, 2});
  CHECK(csls_translate(index, src, tgt, {0}) == std::vector<Index>{0});

  auto o = oracle::csls(src.vectors(), tgt.vectors(), 1);
  const double expected[] = {-0.05643104, -0.59150277, -0.17614657};
  for (std::size_t j = 0; j < 3; ++j) {
    const double score = 2 * o.cos[0][j] - o.r_src[0] - o.r_tgt[j];
    CHECK(score == doctest::Approx(expected[j]).epsilon(1e-7));
  }
  CHECK(o.r_tgt[2] > o.r_tgt[0]);
}

TEST_CASE("dropping r_src does not change CSLS decisions") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = t::gaussian(25, 5, rng), b = t::gaussian(30, 5, rng);
    auto src = t::make_embeddings(a, "s");
    auto tgt = t::make_embeddings(b, "t");
    auto index = build_csls_index(src, tgt, 3);
    auto got = csls_translate(index, src, tgt, all_indices(25));
    auto o = oracle::csls(a, b, 3);
    for (std::size_t i = 0; i < 25; ++i) {
      Index best = 0;
      for (std::size_t j = 1; j < 30; ++j) {
        if (2 * o.cos[i][j] - o.r_tgt[j] > 2 * o.cos[i][static_cast<std::size_t>(best)] - o.r_tgt[static_cast<std::size_t>(best)]) best = static_cast<Index>(j);
      }
      CHECK(got[i] == best);
    }
  }
}

TEST_CASE("translations ignore positive row scaling") {
  std::mt19937_64 rng(43);
  Matrix a = t::gaussian(20, 4, rng), b = t::gaussian(20, 4, rng);
  auto src = t::make_embeddings(a, "s");
  auto tgt = t::make_embeddings(b, "t");
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  Matrix a2 = a, b2 = b;
  for (Index i = 0; i < 20; ++i) {
    a2.row(i) *= scale(rng);
    b2.row(i) *= scale(rng);
  }
  auto src2 = src.with_vectors(a2), tgt2 = tgt.with_vectors(b2);
  CHECK(csls_translate(build_csls_index(src, tgt, 3), src, tgt, all_indices(20)) ==
        csls_translate(build_csls_index(src2, tgt2, 3), src2, tgt2, all_indices(20)));
}

TEST_CASE("synthetic dictionary from identical spaces pairs every word with itself") {
  std::mt19937_64 rng(44);
  auto e = t::make_embeddings(t::gaussian(25, 6, rng), "w");
  auto d = induce_synthetic_dictionary(build_csls_index(e, e, 3), e, e);
  CHECK(d == t::identity_pairs(25, 25, 0, 25));
}

TEST_CASE("a one-sided best match is not induced") {
  // Enumerated with k = 1: forward bests are (0->0, 1->0, 2->2) and backward
  // bests (0->1, 1->2, 2->2), so only (1,0) and (2,2) are mutual.
  auto src = rows({{-2, 2}, {-2, -1}, {1, 0}}, "s");
  auto tgt = rows({{-3, -3}, {3, 2}, {2, 0}}, "t");
  auto index = build_csls_index(src, tgt, 1);
  CHECK(csls_translate(index, src, tgt, {0, 1, 2}) == std::vector<Index>{0, 0, 2});
  CHECK(csls_translate_reverse(index, src, tgt, {0, 1, 2}) == std::vector<Index>{1, 2, 2});
  auto d = induce_synthetic_dictionary(index, src, tgt);
  CHECK(d.pairs() == std::vector<IndexPair>{{1, 0}, {2, 2}});
}

TEST_CASE("induced pairs are mutual under the brute-force oracle") {
  std::mt19937_64 rng(45);
  std::uniform_int_distribution<Index> size(4, 50);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = size(rng), m = size(rng);
    auto data = t::make_bilingual(std::max(n, m), 6, 1.0, 500 + static_cast<std::uint64_t>(trial));
    auto src = t::make_embeddings(data.src.vectors().topRows(n), "s");
    auto tgt = t::make_embeddings(data.tgt.vectors().topRows(m), "t");
    const int k = 1 + trial % 3;
    auto d = induce_synthetic_dictionary(build_csls_index(src, tgt, k), src, tgt);
    auto expected = oracle::mutual_pairs(oracle::csls(src.vectors(), tgt.vectors(), k));
    REQUIRE(d.size() == expected.size());
    std::vector<int> src_seen(static_cast<std::size_t>(n)), tgt_seen(static_cast<std::size_t>(m));
    for (std::size_t p = 0; p < d.size(); ++p) {
      CHECK(d.pairs()[p].source == expected[p].first);
      CHECK(d.pairs()[p].target == expected[p].second);
      ++src_seen[static_cast<std::size_t>(d.pairs()[p].source)];
      ++tgt_seen[static_cast<std::size_t>(d.pairs()[p].target)];
    }
    CHECK(*std::max_element(src_seen.begin(), src_seen.end()) <= 1);
    CHECK(*std::max_element(tgt_seen.begin(), tgt_seen.end()) <= 1);
  }
}

TEST_CASE("induction candidates can be capped by frequency rank") {
  std::mt19937_64 rng(46);
  auto e = t::make_embeddings(t::gaussian(30, 6, rng), "w");
  auto d = induce_synthetic_dictionary(build_csls_index(e, e, 3), e, e, 10);
  CHECK(d == t::identity_pairs(30, 30, 0, 10));
}

TEST_CASE("evaluate_bli") {
  std::mt19937_64 rng(47);
  auto e = t::make_embeddings(t::gaussian(20, 5, rng), "w");
  auto index = build_csls_index(e, e, 3);

  auto perfect = evaluate_bli(index, e, e, t::identity_pairs(20, 20, 0, 20), 4);
  CHECK(perfect.p_at_1 == 1.0);
  CHECK(perfect.evaluated_words == 20);
  CHECK(perfect.oov_words == 4);
  CHECK(perfect.per_word[3].frequency_rank == 4);

  SUBCASE("any gold target counts") {
    IndexedDictionary gold(20, 20, {{0, 5}, {0, 0}, {1, 7}});
    auto r = evaluate_bli(index, e, e, gold);
    CHECK(r.evaluated_words == 2);
    CHECK(r.per_word[0].correct);
    CHECK(r.per_word[0].gold == std::vector<std::string>{"w5", "w0"});
    CHECK_FALSE(r.per_word[1].correct);
    CHECK(r.p_at_1 == 0.5);
  }
  SUBCASE("permuting gold pairs keeps P@1") {
    auto data = t::make_bilingual(60, 5, 0.8, 48);
    auto idx = build_csls_index(data.src, data.tgt, 5);
    auto gold = t::identity_pairs(60, 60, 0, 60);
    auto shuffled = gold.pairs();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(evaluate_bli(idx, data.src, data.tgt, gold).p_at_1 ==
          evaluate_bli(idx, data.src, data.tgt, IndexedDictionary(60, 60, shuffled)).p_at_1);
  }
  SUBCASE("empty gold") {
    auto r = evaluate_bli(index, e, e, IndexedDictionary(20, 20));
    CHECK(r.evaluated_words == 0);
    CHECK(r.p_at_1 == 0.0);
  }
}

TEST_CASE("BLI report TSV layout") {
  BliReport r;
  r.per_word.push_back({"good", "bon", {"bon", "bien"}, true, 3});
  r.per_word.push_back({"cat", "chien", {"chat"}, false, 9});
  r.correct_words = 1;
  r.evaluated_words = 2;
  r.oov_words = 1;
  r.p_at_1 = 0.5;
  CHECK(format_bli_report(r) ==
        "source\tprediction\tgold\tcorrect\tfrequency_rank\n"
        "good\tbon\tbon,bien\t1\t3\n"
        "cat\tchien\tchat\t0\t9\n"
        "# p_at_1=0.500000 correct=1 evaluated=2 oov=1\n");
}

TEST_CASE("results do not depend on the worker count") {
  auto data = t::make_bilingual(700, 8, 0.7, 49);
  auto run = [&] {
    auto index = build_csls_index(data.src, data.tgt, 10);
    return std::make_pair(index.r_src, induce_synthetic_dictionary(index, data.src, data.tgt));
  };
  setenv("CLWE_THREADS", "1", 1);
  auto one = run();
  setenv("CLWE_THREADS", "4", 1);
  auto four = run();
  unsetenv("CLWE_THREADS");
  CHECK(one.first == four.first);
  CHECK(one.second == four.second);
}
