#pragma once

// Versioned text files for the digit tables, and a content-addressed cache
// directory so the tables are computed once.
//
//   covercert-table <name> v1 p=<p>
//   <field> <field> ...        one record per line, decimal, sorted ascending

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "covercert/tables.hpp"

namespace covercert {

struct TableFile {
  std::string name;
  u64 p = 0;
  std::vector<std::vector<u64>> rows;

  friend bool operator==(const TableFile&, const TableFile&) = default;
};

inline std::string table_header(std::string_view name, u64 p) {
  return "covercert-table " + std::string(name) + " v1 p=" + std::to_string(p);
}

inline std::string serialize_table(const TableFile& t) {
  std::string out = table_header(t.name, t.p) + "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) out += ' ';
      out += std::to_string(row[i]);
    }
    out += '\n';
  }
  return out;
}

/// Strict reader: exact header, `columns` fields per record, rows strictly
/// ascending. Throws MalformedTable with the offending line.
inline TableFile parse_table(std::string_view text, std::string_view name, std::size_t columns) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw MalformedTable(0, "empty table");
  const std::string prefix = "covercert-table " + std::string(name) + " v1 p=";
  if (line.rfind(prefix, 0) != 0) throw MalformedTable(1, "expected header '" + prefix + "<p>'");
  TableFile t;
  t.name = std::string(name);
  try {
    const Int p = parse_int(std::string_view(line).substr(prefix.size()));
    if (!fits_u64(p)) throw InvalidArgument("p out of range");
    t.p = to_u64(p);
  } catch (const InvalidArgument& e) {
    throw MalformedTable(1, e.what());
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<u64> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(' ', start), line.size());
      try {
        const Int v = parse_int(std::string_view(line).substr(start, end - start));
        if (!fits_u64(v)) throw InvalidArgument("value out of range");
        row.push_back(to_u64(v));
      } catch (const InvalidArgument& e) {
        throw MalformedTable(lineno, e.what());
      }
      start = end + 1;
    }
    if (row.size() != columns) throw MalformedTable(lineno, "expected " + std::to_string(columns) + " fields");
    if (!t.rows.empty() && !(t.rows.back() < row)) throw MalformedTable(lineno, "records must be strictly ascending");
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Conversions. Loading re-verifies every record.

inline TableFile to_table_file(const GTable& g) {
  TableFile t{"g", g.p, {}};
  for (u64 gamma : g.members) t.rows.push_back({gamma, g.kappa(gamma)});
  return t;
}

inline GTable g_table_from(const TableFile& t) {
  check_table_prime(t.p);
  GTable g;
  g.p = t.p;
  g.kappa_by_residue.assign(t.p, -1);
  for (const auto& row : t.rows) {
    if (row[0] < 1 || row[0] >= t.p || row[1] >= t.p) throw CorruptTable("g table: record out of range");
    g.kappa_by_residue[row[0]] = static_cast<std::int64_t>(row[1]);
    g.members.push_back(row[0]);
  }
  verify_g_table(g);
  return g;
}

inline TableFile badbad_table_file(const PairTable& pt) {
  TableFile t{"badbad", pt.p, {}};
  for (const auto& [a, b] : pt.badbad) t.rows.push_back({a, b});
  return t;
}

inline TableFile kappa2_table_file(const PairTable& pt) {
  TableFile t{"kappa2", pt.p, {}};
  for (u64 r1 = 1; r1 <= pt.limit; ++r1)
    for (u64 r2 = 1; r2 <= pt.limit; ++r2)
      if (const auto& e = pt.kappa2_at(r1, r2)) t.rows.push_back({r1, r2, e->first, e->second});
  return t;
}

inline PairTable pair_table_from(const GTable& g, const TableFile& badbad, const TableFile& kappa2, u64 limit) {
  if (badbad.p != g.p || kappa2.p != g.p) throw CorruptTable("pair tables for a different prime");
  PairTable pt;
  pt.p = g.p;
  pt.limit = limit;
  pt.bad = g.bad();
  for (const auto& row : badbad.rows) pt.badbad.emplace_back(row[0], row[1]);
  pt.kappa2.assign(limit * limit, std::nullopt);
  for (const auto& row : kappa2.rows) {
    if (row[0] < 1 || row[1] < 1 || row[0] > limit || row[1] > limit || row[2] >= g.p || row[3] >= g.p)
      throw CorruptTable("kappa2 table: record out of range");
    pt.kappa2[(row[0] - 1) * limit + (row[1] - 1)] = std::pair{row[2], row[3]};
  }
  verify_pair_table(pt);
  return pt;
}

inline TableFile to_table_file(const TenPrimesWitness& w) {
  TableFile t{"tenprimes", kBasePrime, {}};
  for (const auto& a : w.assignments) t.rows.push_back({a.r, a.p, a.k});
  return t;
}

inline TenPrimesWitness ten_primes_from(const TableFile& t) {
  TenPrimesWitness w;
  for (const auto& row : t.rows) w.assignments.push_back({row[0], row[1], row[2]});
  if (w.assignments.size() != kBasePrime - 1) throw CorruptTable("tenprimes table: expected 640 records");
  verify_ten_primes_witness(w);
  return w;
}

// ---------------------------------------------------------------------------
// Cache.

/// 64-bit FNV-1a; stable across platforms, used only to name cache files.
inline u64 fnv1a64(std::string_view data) {
  u64 h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class TableCache {
 public:
  explicit TableCache(std::filesystem::path dir, bool recompute = false) : dir_(std::move(dir)), recompute_(recompute) {}

  /// $COVERCERT_CACHE, else ./.covercert-cache.
  static std::filesystem::path default_directory() {
    if (const char* env = std::getenv("COVERCERT_CACHE"); env != nullptr && *env != '\0') return env;
    return ".covercert-cache";
  }

  const std::filesystem::path& directory() const { return dir_; }

  std::filesystem::path path_for(std::string_view name, u64 p, std::string_view params) const {
    const std::string key = table_header(name, p) + "|" + std::string(params);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
    return dir_ / (std::string(name) + "-" + std::to_string(p) + "-" + hex + ".tbl");
  }

  /// Cached table text, or the result of `compute` (then stored).
  template <class Compute>
  TableFile fetch(std::string_view name, u64 p, std::string_view params, std::size_t columns, Compute&& compute) const {
    const auto path = path_for(name, p, params);
    if (!recompute_ && std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream text;
      text << in.rdbuf();
      return parse_table(text.str(), name, columns);
    }
    TableFile t = compute();
    std::filesystem::create_directories(dir_);
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << serialize_table(t);
      if (!out) throw std::runtime_error("cannot write cache file " + tmp);
    }
    std::filesystem::rename(tmp, path);
    return t;
  }

 private:
  std::filesystem::path dir_;
  bool recompute_;
};

/// Tables through an optional cache; without one they are computed.
inline GTable cached_G(const TableCache* cache, u64 p, const TableOptions& options = {}) {
  auto compute = [&] { return to_table_file(compute_G(p, options)); };
  return g_table_from(cache ? cache->fetch("g", p, "", 2, compute) : compute());
}

inline PairTable cached_pairs(const TableCache* cache, const GTable& g, u64 limit = kPairLimit,
                              const TableOptions& options = {}) {
  if (!cache) return compute_pair_table(g, limit, options);
  std::optional<PairTable> fresh;
  auto compute = [&] {
    if (!fresh) fresh = compute_pair_table(g, limit, options);
  };
  const std::string params = "limit=" + std::to_string(limit);
  const TableFile badbad = cache->fetch("badbad", g.p, params, 2, [&] {
    compute();
    return badbad_table_file(*fresh);
  });
  const TableFile kappa2 = cache->fetch("kappa2", g.p, params, 4, [&] {
    compute();
    return kappa2_table_file(*fresh);
  });
  return pair_table_from(g, badbad, kappa2, limit);
}

template <class Progress>
TenPrimesWitness cached_ten_primes(const TableCache* cache, const TableOptions& options, Progress&& progress) {
  auto compute = [&] { return to_table_file(verify_ten_primes(options, progress)); };
  std::string params;
  for (u64 q : kTenPrimes) params += std::to_string(q) + ",";
  return ten_primes_from(cache ? cache->fetch("tenprimes", kBasePrime, params, 3, compute) : compute());
}

}  // namespace covercert
