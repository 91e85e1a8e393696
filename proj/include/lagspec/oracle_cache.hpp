#pragma once

// On-disk cache for extended-precision reference values.
//
// Each entry is a CSV file with header `alpha,N,kind,index,value_decimal`
// plus a `.meta.json` sidecar recording format version, precision and the
// Newton tolerance used for nodes. An entry whose metadata does not match the
// request is treated as a miss and rewritten.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lagspec {

inline constexpr int kOracleCacheVersion = 1;

struct OracleKey {
  std::string kind;  // e.g. "gauss_nodes", "poly_at_nodes"
  double alpha{0.0};
  int N{0};
  int digits{24};
};

class OracleCache {
 public:
  explicit OracleCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// Cache rooted at $LAGSPEC_ORACLE_CACHE, if set and non-empty.
  static std::optional<OracleCache> from_env() {
    const char* v = std::getenv("LAGSPEC_ORACLE_CACHE");
    if (!v || !*v) return std::nullopt;
    return OracleCache(v);
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path data_path(const OracleKey& k) const {
    char alpha[64];
    std::snprintf(alpha, sizeof alpha, "%.17g", k.alpha);
    return dir_ / ("v" + std::to_string(kOracleCacheVersion) + "_" + k.kind + "_d" + std::to_string(k.digits) +
                   "_a" + alpha + "_N" + std::to_string(k.N) + ".csv");
  }

  std::filesystem::path meta_path(const OracleKey& k) const {
    auto p = data_path(k);
    p.replace_extension(".meta.json");
    return p;
  }

  std::optional<std::vector<std::string>> load(const OracleKey& k) const {
    std::ifstream meta(meta_path(k));
    if (!meta) return std::nullopt;
    const auto m = nlohmann::json::parse(meta, nullptr, false);
    if (m.is_discarded() || m.value("version", -1) != kOracleCacheVersion || m.value("digits", -1) != k.digits ||
        m.value("kind", std::string{}) != k.kind || m.value("N", -1) != k.N) {
      return std::nullopt;
    }
    std::ifstream in(data_path(k));
    if (!in) return std::nullopt;
    std::string line;
    if (!std::getline(in, line) || line != "alpha,N,kind,index,value_decimal") return std::nullopt;
    std::vector<std::string> values;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto pos = line.rfind(',');
      if (pos == std::string::npos) return std::nullopt;
      values.push_back(line.substr(pos + 1));
    }
    if (values.size() != m.value("count", std::size_t{0})) return std::nullopt;
    return values;
  }

  /// Writes through a temporary file so readers never see a partial entry.
  void store(const OracleKey& k, const std::vector<std::string>& values) const {
    std::filesystem::create_directories(dir_);
    const auto data = data_path(k);
    const auto tmp = data.string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << "alpha,N,kind,index,value_decimal\n";
      char alpha[64];
      std::snprintf(alpha, sizeof alpha, "%.17g", k.alpha);
      for (std::size_t i = 0; i < values.size(); ++i) {
        out << alpha << ',' << k.N << ',' << k.kind << ',' << i << ',' << values[i] << '\n';
      }
      if (!out) throw std::runtime_error("oracle cache: cannot write " + tmp);
    }
    std::filesystem::rename(tmp, data);
    nlohmann::json m{{"version", kOracleCacheVersion},
                     {"kind", k.kind},
                     {"alpha", k.alpha},
                     {"N", k.N},
                     {"digits", k.digits},
                     {"count", values.size()},
                     {"newton_tolerance", "1e" + std::to_string(2 - k.digits)}};
    std::ofstream(meta_path(k)) << m.dump(2) << '\n';
  }

  std::vector<std::string> fetch(const OracleKey& k, const std::function<std::vector<std::string>()>& compute) const {
    if (auto hit = load(k)) return *hit;
    auto values = compute();
    store(k, values);
    return values;
  }

 private:
  std::filesystem::path dir_;
};

/// compute() directly, or through `cache` when one is given.
inline std::vector<std::string> cached_oracle(const std::optional<OracleCache>& cache, const OracleKey& k,
                                              const std::function<std::vector<std::string>()>& compute) {
  return cache ? cache->fetch(k, compute) : compute();
}

}  // namespace lagspec
