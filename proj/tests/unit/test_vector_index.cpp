#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "pvrag/core/errors.hpp"
#include "pvrag/index/vector_index.hpp"
#include "test_support.hpp"

using namespace pvrag;
using namespace pvrag::index;
using pvrag::testkit::make_entry;
using pvrag::testkit::random_unit;

namespace {

// Exhaustive scan: distances in long double, then a full stable sort.
std::vector<std::string> brute_force(const VectorIndex& idx, const std::vector<float>& q, std::size_t k,
                                     const std::string& skip_city = {}) {
  struct Row {
    long double d;
    std::string id;
  };
  std::vector<Row> rows;
  for (const auto& e : idx.entries()) {
    if (!skip_city.empty() && e.city == skip_city) continue;
    long double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const long double diff = static_cast<long double>(q[i]) - e.embedding.values()[i];
      s += diff * diff;
    }
    rows.push_back({std::sqrt(s), e.id});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.d != b.d ? a.d < b.d : a.id < b.id;
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < std::min(k, rows.size()); ++i) ids.push_back(rows[i].id);
  return ids;
}

VectorIndex random_index(std::size_t n, std::size_t dim, std::uint64_t seed, int cities = 3) {
  std::mt19937_64 gen(seed);
  VectorIndex idx(dim);
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "e%04zu", i);
    idx.add(make_entry(id, "city" + std::to_string(i % cities), random_unit(gen, dim)));
  }
  return idx;
}

std::vector<std::string> ids_of(const std::vector<RetrievalHit>& hits) {
  std::vector<std::string> ids;
  for (const auto& h : hits) ids.push_back(h.entry.id);
  return ids;
}

}  // namespace

TEST(VectorIndex, StoredEmbeddingIsItsOwnNearestNeighbour) {
  const auto idx = random_index(50, 64, 1);
  const auto& target = idx.entries()[17];
  const auto hits = idx.search_topk(target.embedding.values(), 1);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].entry.id, target.id);
  EXPECT_EQ(hits[0].distance, 0.0);
  EXPECT_EQ(hits[0].similarity, 1.0);
}

TEST(VectorIndex, MatchesExhaustiveScan) {
  const auto idx = random_index(1000, 512, 2);
  std::mt19937_64 gen(99);
  for (int q = 0; q < 30; ++q) {
    const auto query = random_unit(gen, 512);
    for (std::size_t k : {1u, 3u, 5u, 10u}) {
      EXPECT_EQ(ids_of(idx.search_topk(query, k)), brute_force(idx, query, k));
    }
  }
}

TEST(VectorIndex, HitsAreSortedAndSimilarityConsistent) {
  const auto idx = random_index(200, 32, 3);
  std::mt19937_64 gen(4);
  const auto hits = idx.search_topk(random_unit(gen, 32), 200);
  ASSERT_EQ(hits.size(), 200u);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    EXPECT_NEAR(hits[i].similarity, 1.0 / (1.0 + hits[i].distance), 1e-12);
    if (i) {
      EXPECT_LE(hits[i - 1].distance, hits[i].distance);
    }
  }
}

TEST(VectorIndex, RankingAgreesWithCosine) {
  const auto idx = random_index(300, 48, 5);
  std::mt19937_64 gen(6);
  for (int t = 0; t < 20; ++t) {
    const auto q = random_unit(gen, 48);
    const auto best = idx.search_topk(q, 1)[0].entry.id;
    std::string by_cos;
    double max_cos = -2.0;
    for (const auto& e : idx.entries()) {
      const double c = cosine(q, e.embedding.values());
      if (c > max_cos) {
        max_cos = c;
        by_cos = e.id;
      }
    }
    EXPECT_EQ(best, by_cos);
  }
}

TEST(VectorIndex, TiesBreakByIdRegardlessOfInsertionOrder) {
  std::vector<float> v(8, 0.0f);
  v[0] = 1.0f;
  VectorIndex a(8), b(8);
  for (const char* id : {"c", "a", "b"}) a.add(make_entry(id, "x", v));
  for (const char* id : {"b", "c", "a"}) b.add(make_entry(id, "x", v));
  EXPECT_EQ(ids_of(a.search_topk(v, 3)), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(ids_of(a.search_topk(v, 2)), ids_of(b.search_topk(v, 2)));
}

TEST(VectorIndex, LeaveOneOutFilterExcludesCity) {
  const auto idx = random_index(300, 32, 7);
  std::mt19937_64 gen(8);
  const auto q = random_unit(gen, 32);
  const auto hits = idx.search_topk(q, 10, exclude_city("city1"));
  ASSERT_EQ(hits.size(), 10u);
  for (const auto& h : hits) EXPECT_NE(h.entry.city, "city1");
  EXPECT_EQ(ids_of(hits), brute_force(idx, q, 10, "city1"));
}

TEST(VectorIndex, KLargerThanIndexReturnsEverything) {
  const auto idx = random_index(7, 16, 9);
  std::mt19937_64 gen(1);
  EXPECT_EQ(idx.search_topk(random_unit(gen, 16), 50).size(), 7u);
}

TEST(VectorIndex, SearchErrors) {
  const auto idx = random_index(5, 16, 10, 1);
  std::mt19937_64 gen(1);
  const auto q = random_unit(gen, 16);
  EXPECT_THROW(idx.search_topk(q, 0), Error);
  try {
    idx.search_topk(q, 3, exclude_city("city0"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no reference entries match filter");
  }
  EXPECT_THROW(idx.search_topk(random_unit(gen, 8), 1), Error);
}

TEST(VectorIndex, AddValidatesEntries) {
  VectorIndex idx(4);
  EXPECT_THROW(idx.add(make_entry("a", "x", {1, 0, 0})), Error);
  EXPECT_THROW(idx.add(make_entry("a", "x", {1, 1, 0, 0})), Error);
  EXPECT_THROW(idx.add(make_entry("a", "x", {1, 0, 0, 0}, {true, QuantityInterval::NA, LocationLabel::Top, ""})),
               ConsistencyError);
  idx.add(make_entry("a", "x", {1, 0, 0, 0}));
  EXPECT_THROW(idx.add(make_entry("a", "y", {0, 1, 0, 0})), Error);
}

TEST(VectorIndex, RandomSampleIsReproducible) {
  const auto idx = random_index(40, 8, 11);
  const auto a = idx.random_sample(5, 123);
  const auto b = idx.random_sample(5, 123);
  EXPECT_EQ(a, b);
  std::set<std::string> ids;
  for (const auto& e : a) ids.insert(e.id);
  EXPECT_EQ(ids.size(), 5u);
}

TEST(VectorIndex, FullSampleIsPermutation) {
  const auto idx = random_index(12, 8, 12);
  auto s = idx.random_sample(12, 5);
  std::vector<std::string> got, want;
  for (const auto& e : s) got.push_back(e.id);
  for (const auto& e : idx.entries()) want.push_back(e.id);
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
  EXPECT_THROW(idx.random_sample(13, 5), Error);
  EXPECT_THROW(idx.random_sample(0, 5), Error);
}

TEST(VectorIndex, RandomSampleFrequenciesAreUniform) {
  const auto idx = random_index(10, 8, 13);
  std::map<std::string, int> counts;
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) counts[idx.random_sample(1, static_cast<std::uint64_t>(s))[0].id]++;
  const double p = 0.1;
  const double sigma = std::sqrt(draws * p * (1 - p));
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [id, c] : counts) EXPECT_LE(std::abs(c - draws * p), 3 * sigma) << id;
}

TEST(VectorIndex, SaveLoadRoundTrip) {
  testkit::TempDir dir("index");
  auto idx = random_index(240, 512, 14);
  idx.save(dir / "ref.pvix");
  const auto back = VectorIndex::load(dir / "ref.pvix");
  EXPECT_EQ(back.dimension(), 512u);
  EXPECT_EQ(back.entries(), idx.entries());
  std::mt19937_64 gen(15);
  for (int q = 0; q < 100; ++q) {
    const auto v = random_unit(gen, 512);
    const auto a = idx.search_topk(v, 5);
    const auto b = back.search_topk(v, 5);
    EXPECT_EQ(ids_of(a), ids_of(b));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].distance, b[i].distance);
  }
}

TEST(VectorIndex, EmptyIndexRoundTrip) {
  testkit::TempDir dir("index");
  VectorIndex idx(16);
  idx.save(dir / "empty.pvix");
  const auto back = VectorIndex::load(dir / "empty.pvix");
  EXPECT_TRUE(back.empty());
  EXPECT_EQ(back.dimension(), 16u);
}

TEST(VectorIndex, LabelsSurviveRoundTrip) {
  testkit::TempDir dir("index");
  VectorIndex idx(4);
  idx.add(make_entry("p", "x", {0, 1, 0, 0}, {true, QuantityInterval::TenPlus, LocationLabel::BottomLeft, "big"}));
  idx.save(dir / "l.pvix");
  EXPECT_EQ(VectorIndex::load(dir / "l.pvix").entries()[0].label.quantity, QuantityInterval::TenPlus);
}

TEST(VectorIndex, TruncatedFileReportsByteOffset) {
  testkit::TempDir dir("index");
  random_index(3, 16, 16).save(dir / "t.pvix");
  const auto size = std::filesystem::file_size(dir / "t.pvix");
  std::filesystem::resize_file(dir / "t.pvix", size - 10);
  try {
    VectorIndex::load(dir / "t.pvix");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos) << e.what();
  }
}

TEST(VectorIndex, RejectsBadMagicVersionAndTrailingBytes) {
  testkit::TempDir dir("index");
  random_index(2, 4, 17).save(dir / "a.pvix");
  std::string bytes;
  {
    std::ifstream in(dir / "a.pvix", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& b) {
    std::ofstream(dir / "b.pvix", std::ios::binary) << b;
    return dir / "b.pvix";
  };
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(VectorIndex::load(write(bad)), FormatError);
  bad = bytes;
  bad[4] = 9;
  EXPECT_THROW(VectorIndex::load(write(bad)), FormatError);
  EXPECT_THROW(VectorIndex::load(write(bytes + "x")), FormatError);
  EXPECT_NO_THROW(VectorIndex::load(write(bytes)));
}
