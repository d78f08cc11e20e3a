#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "motion_insight/analysis.hpp"
#include "motion_insight/error.hpp"

namespace motion_insight {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

using QueryParams = std::multimap<std::string, std::string>;

/// Maps a decoded request path and query to a JSON response. Transport
/// agnostic; the HTTP server and tests both call `handle`.
///
/// Series bodies are kept in a byte-bounded LRU cache; the analysis is
/// immutable, so a cached body is always current. Safe for concurrent use.
class Api {
 public:
  static constexpr std::string_view kPrefix = "/api/v1";
  static constexpr std::size_t kDefaultCacheBytes = std::size_t{256} << 20;

  explicit Api(const Analysis& analysis, std::size_t cache_bytes = kDefaultCacheBytes);
  ~Api();
  Api(const Api&) = delete;
  Api& operator=(const Api&) = delete;

  ApiResponse handle(std::string_view path, const QueryParams& params) const;

  const Analysis& analysis() const noexcept { return analysis_; }

 private:
  class SeriesCache;

  const Analysis& analysis_;
  std::unique_ptr<SeriesCache> cache_;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);

}  // namespace motion_insight
