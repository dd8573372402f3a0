#ifndef SQUADPORT_BACKENDS_HPP
#define SQUADPORT_BACKENDS_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "squadport/languages.hpp"

namespace squadport {

struct BackendConfig {
  std::string endpoint;                 // remote backends only
  std::filesystem::path cache_path;     // empty = no persistent cache
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{250};
  double rate_limit = 0.0;              // requests per second; 0 = unlimited
  std::size_t batch_size = 16;
  std::chrono::milliseconds timeout{10'000};
};

/// Text-to-text translation. Batched calls keep positional alignment between
/// inputs and outputs; an empty output string means the service returned an
/// empty translation and the caller decides whether to drop. Implementations
/// must be safe for concurrent calls; identical inputs yield identical
/// outputs within one run.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  virtual std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                                   const LanguageSpec& src,
                                                   const LanguageSpec& tgt) = 0;
  std::string translate(const std::string& text, const LanguageSpec& src,
                        const LanguageSpec& tgt);
  virtual std::string name() const = 0;
};

class IdentityTranslator : public TranslationBackend {
 public:
  std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                           const LanguageSpec& src,
                                           const LanguageSpec& tgt) override;
  std::string name() const override { return "identity"; }
};

/// Deterministic mock: prefixes every whitespace token with a marker and
/// joins with single spaces, so "one two" becomes "§one §two".
/// Injective per token and order-preserving; token count is preserved. This
/// is the translator the span-recovery oracle tests run against.
class MarkerMockTranslator : public TranslationBackend {
 public:
  explicit MarkerMockTranslator(std::string marker = "§") : marker_(std::move(marker)) {}
  std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                           const LanguageSpec& src,
                                           const LanguageSpec& tgt) override;
  std::string name() const override { return "mock"; }

 private:
  std::string marker_;
};

/// Persistent request cache keyed by (source, target, text). On disk it is an
/// append-only JSONL record log replayable across runs; a trailing partial
/// record (torn write) is tolerated by truncation on load.
class TranslationCache {
 public:
  TranslationCache() = default;                          // in-memory only
  explicit TranslationCache(std::filesystem::path path); // loads existing records

  std::optional<std::string> lookup(const std::string& src, const std::string& tgt,
                                    const std::string& text) const;
  /// Returns the stored value, which is the first insert's when two callers
  /// race on the same key; callers must use it instead of their own copy so
  /// one run never sees two translations for one input.
  const std::string& insert(const std::string& src, const std::string& tgt,
                            const std::string& text, const std::string& translation);
  std::size_t size() const;

  static std::uint64_t key_hash(const std::string& src, const std::string& tgt,
                                const std::string& text);

 private:
  mutable std::mutex mutex_;
  std::filesystem::path path_;
  std::unordered_map<std::string, std::string> entries_;
};

/// Wraps any translator with a TranslationCache: hits never reach the inner
/// backend, so a warm cache replays a whole run with zero remote requests.
class CachingTranslator : public TranslationBackend {
 public:
  CachingTranslator(std::unique_ptr<TranslationBackend> inner, std::filesystem::path cache_path);
  std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                           const LanguageSpec& src,
                                           const LanguageSpec& tgt) override;
  std::string name() const override;
  const TranslationCache& cache() const { return cache_; }

 private:
  std::unique_ptr<TranslationBackend> inner_;
  TranslationCache cache_;
};

/// Remote service speaking the wire contract: one POST per batch with body
/// {"texts": [...], "source": code, "target": code} answered by
/// {"translations": [...]} positionally aligned. Retries with exponential
/// backoff on 5xx/transport errors, honors Retry-After on 429, optionally
/// rate-limits, and throws BackendUnavailable when retries are exhausted.
class HttpTranslationBackend : public TranslationBackend {
 public:
  explicit HttpTranslationBackend(BackendConfig config);
  ~HttpTranslationBackend() override;
  std::vector<std::string> translate_batch(const std::vector<std::string>& texts,
                                           const LanguageSpec& src,
                                           const LanguageSpec& tgt) override;
  std::string name() const override { return "http"; }

  /// Number of HTTP requests issued so far (cache-hit tests instrument this).
  std::uint64_t requests_issued() const { return requests_.load(); }

 private:
  std::vector<std::string> post_batch(const std::vector<std::string>& texts,
                                      const std::string& src, const std::string& tgt);
  void rate_limit_wait();

  BackendConfig config_;
  std::string host_;
  std::string path_;
  std::atomic<std::uint64_t> requests_{0};
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

/// Script transliteration for the aligned answer text (step 6). Digits-only
/// input short-circuits through convert_digits without a remote call.
class TransliterationBackend {
 public:
  virtual ~TransliterationBackend() = default;
  virtual std::string transliterate(const std::string& text, const LanguageSpec& tgt) = 0;
  virtual std::string name() const = 0;
};

class IdentityTransliterator : public TransliterationBackend {
 public:
  std::string transliterate(const std::string& text, const LanguageSpec& tgt) override;
  std::string name() const override { return "identity"; }
};

/// Remote transliteration over the same wire contract as translation, with
/// the same cache/retry machinery (source code fixed to "en").
class HttpTransliterator : public TransliterationBackend {
 public:
  explicit HttpTransliterator(BackendConfig config);
  std::string transliterate(const std::string& text, const LanguageSpec& tgt) override;
  std::string name() const override { return "http"; }
  std::uint64_t requests_issued() const;

 private:
  std::unique_ptr<CachingTranslator> cached_;
  HttpTranslationBackend* http_;  // owned by cached_
  LanguageSpec en_;
};

/// Routes digit-only strings through convert_digits locally; everything else
/// goes to the backend (or passes through unchanged when backend is null).
std::string transliterate_text(const std::string& text, const LanguageSpec& tgt,
                               TransliterationBackend* backend);

std::unique_ptr<TranslationBackend> make_translator(std::string_view name,
                                                    const BackendConfig& config);

}  // namespace squadport

#endif  // SQUADPORT_BACKENDS_HPP
