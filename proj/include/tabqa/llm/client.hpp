#pragma once

// Chat-completion client with three backends:
//   - HTTP: OpenAI-compatible wire format, retry with exponential backoff
//   - Mock: deterministic rule over the request (tests and offline runs)
//   - Replay: cached transcript file keyed by a content hash of the messages
// A shared in-flight cap bounds concurrency across all backends.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tabqa/errors.hpp"

namespace tabqa::llm {

struct Message {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model = "default";
    std::vector<Message> messages;
    double temperature = 0.0;
    int max_tokens = 2048;
    std::string request_id;  // caller-assigned; carries the pipeline stage
};

// Stable content hash (FNV-1a 64) of the serialized messages.
inline std::string request_hash(const ChatRequest& req) {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0x1F;
        h *= 1099511628211ULL;
    };
    mix(req.model);
    for (const auto& m : req.messages) {
        mix(m.role);
        mix(m.content);
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
};

// Deterministic rule backend. The rule sees the whole request and may
// dispatch on request_id (pipeline stage) or message content.
class MockBackend : public Backend {
public:
    using Rule = std::function<std::string(const ChatRequest&)>;
    explicit MockBackend(Rule rule) : rule_(std::move(rule)) {}

    // Echoes the last user message.
    static MockBackend echo() {
        return MockBackend([](const ChatRequest& req) {
            for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it)
                if (it->role == "user") return it->content;
            return std::string();
        });
    }

    std::string complete(const ChatRequest& req) override { return rule_(req); }

private:
    Rule rule_;
};

class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::string& transcript_path) {
        std::ifstream in(transcript_path);
        if (!in) throw NotFound("cannot open transcript: " + transcript_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            cache_[j.at("hash").get<std::string>()] = j.at("response").get<std::string>();
        }
    }

    std::string complete(const ChatRequest& req) override {
        auto it = cache_.find(request_hash(req));
        if (it == cache_.end()) throw ReplayMiss("no cached response for request " + request_hash(req));
        return it->second;
    }

private:
    std::map<std::string, std::string> cache_;
};

struct HttpConfig {
    std::string base_url;  // e.g. http://localhost:8000
    std::string api_key;
    std::string path = "/v1/chat/completions";
    int max_attempts = 5;
    double backoff_initial_ms = 250;
    double timeout_s = 120;
};

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpConfig cfg) : cfg_(std::move(cfg)) {}
    std::string complete(const ChatRequest& req) override;

private:
    HttpConfig cfg_;
};

// Transcript recorder; appends are serialized and flushed per entry.
class Recorder {
public:
    explicit Recorder(const std::string& path) : path_(path) {}

    void record(const ChatRequest& req, const std::string& response) {
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream out(path_, std::ios::app);
        if (!out) throw RecordError("cannot append to transcript: " + path_);
        nlohmann::json j{{"hash", request_hash(req)}, {"response", response}, {"model", req.model}};
        out << j.dump() << "\n";
        out.flush();
        if (!out) throw RecordError("transcript write failed: " + path_);
    }

private:
    std::string path_;
    std::mutex mu_;
};

// Shared client: backend + in-flight cap + optional recorder.
class LlmClient {
public:
    explicit LlmClient(std::shared_ptr<Backend> backend, int in_flight_cap = 4)
        : backend_(std::move(backend)), cap_(in_flight_cap) {}

    void set_recorder(std::shared_ptr<Recorder> rec) { recorder_ = std::move(rec); }

    std::string complete(const ChatRequest& req) {
        Slot slot(*this);
        std::string response = backend_->complete(req);
        if (recorder_) recorder_->record(req, response);
        return response;
    }

    int observed_max_in_flight() const { return max_seen_; }

private:
    struct Slot {
        LlmClient& c;
        explicit Slot(LlmClient& client) : c(client) {
            std::unique_lock<std::mutex> lock(c.mu_);
            c.cv_.wait(lock, [&] { return c.in_flight_ < c.cap_; });
            ++c.in_flight_;
            c.max_seen_ = std::max(c.max_seen_, c.in_flight_);
        }
        ~Slot() {
            {
                std::lock_guard<std::mutex> lock(c.mu_);
                --c.in_flight_;
            }
            c.cv_.notify_one();
        }
    };

    std::shared_ptr<Backend> backend_;
    std::shared_ptr<Recorder> recorder_;
    int cap_;
    int in_flight_ = 0;
    int max_seen_ = 0;
    std::mutex mu_;
    std::condition_variable cv_;
};

}  // namespace tabqa::llm

// ---- HTTP backend implementation (kept out of line for readability) ----

#include <httplib.h>

namespace tabqa::llm {

inline std::string HttpBackend::complete(const ChatRequest& req) {
    nlohmann::json body{{"model", req.model},
                        {"temperature", req.temperature},
                        {"max_tokens", req.max_tokens}};
    body["messages"] = nlohmann::json::array();
    for (const auto& m : req.messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg_.timeout_s));
    double backoff = cfg_.backoff_initial_ms;
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
        if (std::chrono::steady_clock::now() >= deadline)
            throw Timeout("request deadline exceeded before attempt " + std::to_string(attempt + 1));
        httplib::Client cli(cfg_.base_url);
        cli.set_read_timeout(static_cast<time_t>(cfg_.timeout_s), 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        auto res = cli.Post(cfg_.path, headers, body.dump(), "application/json");
        if (res && res->status == 200) {
            nlohmann::json j = nlohmann::json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        }
        bool retryable = !res || res->status == 429 || res->status >= 500;
        last_error = res ? "HTTP " + std::to_string(res->status) : "connection failed";
        if (!retryable) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<int64_t>(backoff)));
        backoff *= 2;
    }
    throw TransportError("chat completion failed: " + last_error);
}

}  // namespace tabqa::llm
