#include <gtest/gtest.h>

#include <fstream>

#include "covercert/tablefile.hpp"

using namespace covercert;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("covercert-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(TableFile, RoundTrip) {
  const TableFile t{"g", 13, {{1, 4}, {3, 9}, {5, 12}}};
  EXPECT_EQ(parse_table(serialize_table(t), "g", 2), t);
}

TEST(TableFile, StrictParser) {
  EXPECT_THROW(parse_table("", "g", 2), MalformedTable);
  EXPECT_THROW(parse_table("covercert-table g v2 p=13\n", "g", 2), MalformedTable);
  EXPECT_THROW(parse_table("covercert-table badbad v1 p=13\n", "g", 2), MalformedTable);
  EXPECT_THROW(parse_table("covercert-table g v1 p=13\n1 2 3\n", "g", 2), MalformedTable);
  EXPECT_THROW(parse_table("covercert-table g v1 p=13\n3 4\n1 2\n", "g", 2), MalformedTable);
  EXPECT_THROW(parse_table("covercert-table g v1 p=13\n1  2\n", "g", 2), MalformedTable);
  try {
    parse_table("covercert-table g v1 p=13\n1 2\nx 3\n", "g", 2);
    FAIL();
  } catch (const MalformedTable& e) {
    EXPECT_EQ(e.line(), 3U);
  }
}

TEST(TableFile, LoadingReverifiesRecords) {
  GTable g = compute_G(641);
  TableFile t = to_table_file(g);
  EXPECT_EQ(g_table_from(t).members, g.members);
  t.rows[7][1] = (t.rows[7][1] + 1) % 641;
  EXPECT_THROW(g_table_from(t), CorruptTable);
}

TEST(TableFile, CacheStoresAndReuses) {
  const fs::path dir = fresh_dir("cache");
  const TableCache cache(dir);
  int computed = 0;
  auto compute = [&] {
    ++computed;
    return to_table_file(compute_G(101));
  };
  const TableFile first = cache.fetch("g", 101, "", 2, compute);
  const TableFile second = cache.fetch("g", 101, "", 2, compute);
  EXPECT_EQ(computed, 1);
  EXPECT_EQ(first, second);
  EXPECT_TRUE(fs::exists(cache.path_for("g", 101, "")));
  EXPECT_NE(cache.path_for("g", 101, ""), cache.path_for("g", 103, ""));
  TableCache(dir, true).fetch("g", 101, "", 2, compute);
  EXPECT_EQ(computed, 2);
  fs::remove_all(dir);
}

TEST(TableFile, CorruptCacheIsReported) {
  const fs::path dir = fresh_dir("corrupt");
  const TableCache cache(dir);
  const GTable g = cached_G(&cache, 641);
  const fs::path path = cache.path_for("g", 641, "");
  {
    std::ofstream out(path, std::ios::app);
    out << "garbage\n";
  }
  EXPECT_THROW(cached_G(&cache, 641), MalformedTable);
  // swap one kappa value for a wrong one that still parses
  TableFile t = to_table_file(g);
  t.rows[0][1] = (t.rows[0][1] + 5) % 641;
  {
    std::ofstream out(path, std::ios::trunc);
    out << serialize_table(t);
  }
  EXPECT_THROW(cached_G(&cache, 641), CorruptTable);
  fs::remove_all(dir);
}

TEST(TableFile, PairsAndTenPrimesThroughCache) {
  const fs::path dir = fresh_dir("pairs");
  const TableCache cache(dir);
  const GTable g = cached_G(&cache, 641);
  const PairTable a = cached_pairs(&cache, g);
  const PairTable b = cached_pairs(&cache, g);
  EXPECT_EQ(a.badbad, b.badbad);
  EXPECT_EQ(a.kappa2, b.kappa2);
  const TenPrimesWitness w = cached_ten_primes(&cache, {}, [](u64) {});
  const TenPrimesWitness w2 = cached_ten_primes(&cache, {}, [](u64) {});
  EXPECT_EQ(w.assignments, w2.assignments);
  EXPECT_EQ(w.assignments.size(), 640U);
  fs::remove_all(dir);
}
