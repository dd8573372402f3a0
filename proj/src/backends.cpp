#include "squadport/backends.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "squadport/errors.hpp"
#include "squadport/unicode.hpp"

namespace squadport {

using nlohmann::json;

std::string TranslationBackend::translate(const std::string& text, const LanguageSpec& src,
                                          const LanguageSpec& tgt) {
  return translate_batch({text}, src, tgt).front();
}

std::vector<std::string> IdentityTranslator::translate_batch(
    const std::vector<std::string>& texts, const LanguageSpec&, const LanguageSpec&) {
  return texts;
}

std::vector<std::string> MarkerMockTranslator::translate_batch(
    const std::vector<std::string>& texts, const LanguageSpec&, const LanguageSpec&) {
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    const std::u32string cps = uni::decode_utf8(text);
    std::u32string marked;
    bool at_token_start = true;
    const std::u32string marker = uni::decode_utf8(marker_);
    for (char32_t c : cps) {
      if (uni::is_space(c)) {
        at_token_start = true;
        continue;
      }
      if (at_token_start) {
        if (!marked.empty()) marked.push_back(U' ');
        marked += marker;
        at_token_start = false;
      }
      marked.push_back(c);
    }
    out.push_back(uni::encode_utf8(marked));
  }
  return out;
}

// ---------------------------------------------------------------------------
// cache

namespace {

std::string cache_map_key(const std::string& src, const std::string& tgt,
                          const std::string& text) {
  std::string key;
  key.reserve(src.size() + tgt.size() + text.size() + 2);
  key += src;
  key.push_back('\x1f');
  key += tgt;
  key.push_back('\x1f');
  key += text;
  return key;
}

}  // namespace

std::uint64_t TranslationCache::key_hash(const std::string& src, const std::string& tgt,
                                         const std::string& text) {
  // FNV-1a: stable across runs and platforms, unlike std::hash
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  mix(src);
  mix(tgt);
  mix(text);
  return h;
}

TranslationCache::TranslationCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // no cache yet
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      break;  // torn trailing record from a crashed writer; ignore the rest
    }
    if (!rec.contains("src") || !rec.contains("tgt") || !rec.contains("text") ||
        !rec.contains("out")) {
      break;
    }
    entries_[cache_map_key(rec["src"], rec["tgt"], rec["text"])] = rec["out"];
  }
}

std::optional<std::string> TranslationCache::lookup(const std::string& src,
                                                    const std::string& tgt,
                                                    const std::string& text) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(cache_map_key(src, tgt, text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::string& TranslationCache::insert(const std::string& src, const std::string& tgt,
                                            const std::string& text,
                                            const std::string& translation) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.emplace(cache_map_key(src, tgt, text), translation);
  if (!inserted || path_.empty()) return it->second;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (out) {  // cache write failure is not fatal to the run
    json rec{{"h", key_hash(src, tgt, text)},
             {"src", src},
             {"tgt", tgt},
             {"text", text},
             {"out", translation}};
    out << rec.dump() << '\n';
    out.flush();
  }
  return it->second;
}

std::size_t TranslationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

CachingTranslator::CachingTranslator(std::unique_ptr<TranslationBackend> inner,
                                     std::filesystem::path cache_path)
    : inner_(std::move(inner)), cache_(std::move(cache_path)) {}

std::vector<std::string> CachingTranslator::translate_batch(const std::vector<std::string>& texts,
                                                            const LanguageSpec& src,
                                                            const LanguageSpec& tgt) {
  std::vector<std::string> out(texts.size());
  std::vector<std::size_t> miss_positions;
  std::vector<std::string> miss_texts;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = cache_.lookup(src.code, tgt.code, texts[i])) {
      out[i] = std::move(*hit);
    } else {
      miss_positions.push_back(i);
      miss_texts.push_back(texts[i]);
    }
  }
  if (!miss_texts.empty()) {
    const std::vector<std::string> fresh = inner_->translate_batch(miss_texts, src, tgt);
    for (std::size_t k = 0; k < miss_positions.size(); ++k) {
      out[miss_positions[k]] = cache_.insert(src.code, tgt.code, miss_texts[k], fresh[k]);
    }
  }
  return out;
}

std::string CachingTranslator::name() const { return inner_->name() + "+cache"; }

// ---------------------------------------------------------------------------
// remote HTTP backend

namespace {

// "http://host:port/some/path" -> ("http://host:port", "/some/path")
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error("endpoint '" + endpoint + "' must include a scheme");
  }
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace

HttpTranslationBackend::HttpTranslationBackend(BackendConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw Error("http backend requires an endpoint");
  std::tie(host_, path_) = split_endpoint(config_.endpoint);
}

HttpTranslationBackend::~HttpTranslationBackend() = default;

void HttpTranslationBackend::rate_limit_wait() {
  if (config_.rate_limit <= 0.0) return;
  const auto interval =
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / config_.rate_limit));
  std::chrono::steady_clock::time_point my_slot;
  {
    std::lock_guard lock(rate_mutex_);
    const auto now = std::chrono::steady_clock::now();
    my_slot = std::max(now, next_slot_);
    next_slot_ = my_slot + interval;
  }
  std::this_thread::sleep_until(my_slot);
}

std::vector<std::string> HttpTranslationBackend::post_batch(
    const std::vector<std::string>& texts, const std::string& src, const std::string& tgt) {
  const json body{{"texts", texts}, {"source", src}, {"target", tgt}};
  const std::string payload = body.dump();

  std::chrono::milliseconds backoff = config_.backoff_base;
  std::string last_error = "no attempts made";

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    rate_limit_wait();

    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    ++requests_;
    auto res = client.Post(path_, payload, "application/json");

    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429) {
      auto retry_after = std::chrono::milliseconds(1000);
      if (res->has_header("Retry-After")) {
        try {
          retry_after = std::chrono::seconds(std::stol(res->get_header_value("Retry-After")));
        } catch (const std::exception&) {
          // unparseable header: keep the default
        }
      }
      if (attempt == config_.max_retries) {
        throw RateLimited("translation service rate limited", retry_after);
      }
      std::this_thread::sleep_for(retry_after);
      last_error = "rate limited";
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendUnavailable("translation service returned status " +
                               std::to_string(res->status));
    }

    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::parse_error& e) {
      last_error = std::string("unparseable response: ") + e.what();
      continue;
    }
    if (!parsed.contains("translations") || !parsed["translations"].is_array() ||
        parsed["translations"].size() != texts.size()) {
      throw BackendUnavailable("translation response is not positionally aligned with request");
    }
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& t : parsed["translations"]) out.push_back(t.get<std::string>());
    return out;
  }
  throw BackendUnavailable("translation service unavailable after " +
                           std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

std::vector<std::string> HttpTranslationBackend::translate_batch(
    const std::vector<std::string>& texts, const LanguageSpec& src, const LanguageSpec& tgt) {
  std::vector<std::string> out;
  out.reserve(texts.size());
  const std::size_t batch = std::max<std::size_t>(1, config_.batch_size);
  for (std::size_t i = 0; i < texts.size(); i += batch) {
    const std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(i),
                                         texts.begin() + static_cast<std::ptrdiff_t>(
                                                             std::min(i + batch, texts.size())));
    auto translated = post_batch(chunk, src.code, tgt.code);
    out.insert(out.end(), std::make_move_iterator(translated.begin()),
               std::make_move_iterator(translated.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// transliteration

std::string IdentityTransliterator::transliterate(const std::string& text, const LanguageSpec&) {
  return text;
}

HttpTransliterator::HttpTransliterator(BackendConfig config) {
  auto cache_path = config.cache_path;
  auto http = std::make_unique<HttpTranslationBackend>(std::move(config));
  http_ = http.get();
  cached_ = std::make_unique<CachingTranslator>(std::move(http), std::move(cache_path));
  en_ = LanguageRegistry::builtin().lookup("en");
}

std::string HttpTransliterator::transliterate(const std::string& text, const LanguageSpec& tgt) {
  return cached_->translate(text, en_, tgt);
}

std::uint64_t HttpTransliterator::requests_issued() const { return http_->requests_issued(); }

std::string transliterate_text(const std::string& text, const LanguageSpec& tgt,
                               TransliterationBackend* backend) {
  const std::u32string cps = uni::decode_utf8(text);
  bool digits_only = !cps.empty();
  for (char32_t c : cps) {
    if (!uni::is_ascii_digit(c) && !uni::is_space(c)) {
      digits_only = false;
      break;
    }
  }
  if (digits_only) return convert_digits_utf8(text, tgt);
  if (backend == nullptr) return text;  // pass-through when not configured
  return backend->transliterate(text, tgt);
}

std::unique_ptr<TranslationBackend> make_translator(std::string_view name,
                                                    const BackendConfig& config) {
  std::unique_ptr<TranslationBackend> base;
  if (name == "identity") {
    base = std::make_unique<IdentityTranslator>();
  } else if (name == "mock") {
    base = std::make_unique<MarkerMockTranslator>();
  } else if (name == "http") {
    base = std::make_unique<HttpTranslationBackend>(config);
  } else {
    throw Error("unknown translation backend '" + std::string(name) + "'");
  }
  if (!config.cache_path.empty()) {
    base = std::make_unique<CachingTranslator>(std::move(base), config.cache_path);
  }
  return base;
}

}  // namespace squadport
