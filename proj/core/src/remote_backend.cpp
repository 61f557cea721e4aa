#include "council/remote_backend.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace council {

using nlohmann::json;

namespace {

constexpr std::string_view kBase64Chars =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string mime_for_path(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "png") return "image/png";
    if (ext == "webp") return "image/webp";
    return "application/octet-stream";
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendError("cannot read frame image: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

PromptKind prompt_kind_for(RequestKind kind) {
    switch (kind) {
        case RequestKind::decide_watch: return PromptKind::decide_watch;
        case RequestKind::key_info:     return PromptKind::key_info;
        case RequestKind::answer:       return PromptKind::answer;
        case RequestKind::reason:       return PromptKind::reason;
        case RequestKind::judge:        return PromptKind::judge;
        case RequestKind::summarize:    return PromptKind::key_info_history;
        case RequestKind::final_answer: return PromptKind::final_answer;
        case RequestKind::rewrite:      return PromptKind::caption_rewrite;
    }
    throw BackendError("no prompt template for request kind");
}

class HttplibTransport : public HttpTransport {
  public:
    HttpResponse post(const std::string& base_url, const std::string& path,
                      const std::string& body, const HttpHeaders& headers) override {
        httplib::Client client(base_url);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);
        httplib::Headers hl(headers.begin(), headers.end());
        auto res = client.Post(path, hl, body, "application/json");
        if (!res) {
            throw TransportError("endpoint unreachable: " + base_url + path +
                                 " (" + httplib::to_string(res.error()) + ")");
        }
        return HttpResponse{res->status, res->body};
    }
};

}  // namespace

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        out += kBase64Chars[(v >> 18) & 63];
        out += kBase64Chars[(v >> 12) & 63];
        out += kBase64Chars[(v >> 6) & 63];
        out += kBase64Chars[v & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += kBase64Chars[(v >> 18) & 63];
        out += kBase64Chars[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += kBase64Chars[(v >> 18) & 63];
        out += kBase64Chars[(v >> 12) & 63];
        out += kBase64Chars[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::unique_ptr<HttpTransport> make_httplib_transport() {
    return std::make_unique<HttplibTransport>();
}

RemoteBackend::RemoteBackend(std::unique_ptr<HttpTransport> transport, int max_inflight)
    : transport_(transport ? std::move(transport) : make_httplib_transport()),
      inflight_(std::max(1, std::min(max_inflight, 256))) {}

std::string RemoteBackend::prompt_text(const AgentRequest& request) {
    if (request.kind == RequestKind::judge) {
        std::vector<AgentSlot> slots;
        slots.reserve(request.judge_subjects.size());
        for (const auto& s : request.judge_subjects) {
            slots.push_back({s.label, s.shown_answer, s.reason});
        }
        auto it = request.bindings.find("Question");
        return build_judge_prompt(it == request.bindings.end() ? std::string() : it->second, slots);
    }
    return render_prompt(prompt_kind_for(request.kind), request.bindings);
}

std::string RemoteBackend::request_body(const AgentProfile& profile, const AgentRequest& request) {
    if (!profile.endpoint) throw BackendError("remote agent without endpoint config: " + profile.agent_id);
    const EndpointConfig& ep = *profile.endpoint;

    json content = json::array();
    if (request.frames && request.task) {
        for (int index : request.frames->indices) {
            std::string path = resolve_frame_path(request.task->video, index);
            std::string data = read_file_bytes(path);
            content.push_back({{"type", "image_url"},
                               {"image_url", {{"url", "data:" + mime_for_path(path) + ";base64," +
                                                          base64_encode(data)}}}});
        }
    }
    content.push_back({{"type", "text"}, {"text", prompt_text(request)}});

    json body = {
        {"model", ep.model},
        {"messages", json::array({json{{"role", "user"}, {"content", content}}})},
        {"temperature", ep.temperature},
        {"max_tokens", ep.max_new_tokens},
    };
    return body.dump();
}

std::string RemoteBackend::invoke(const AgentProfile& profile, const AgentRequest& request) {
    if (!profile.endpoint) throw BackendError("remote agent without endpoint config: " + profile.agent_id);
    const EndpointConfig& ep = *profile.endpoint;

    HttpHeaders headers;
    if (!ep.api_key_env.empty()) {
        if (const char* key = std::getenv(ep.api_key_env.c_str())) {
            headers.emplace_back("Authorization", std::string("Bearer ") + key);
        }
    }
    const std::string body = request_body(profile, request);

    inflight_.acquire();
    struct Release {
        std::counting_semaphore<256>& s;
        ~Release() { s.release(); }
    } release{inflight_};

    std::string last_error;
    int attempts = std::max(1, ep.retry_attempts);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(ep.retry_backoff_ms * (1 << (attempt - 1))));
        }
        try {
            HttpResponse res = transport_->post(ep.base_url, "/chat/completions", body, headers);
            if (res.status >= 500) {
                last_error = "server error " + std::to_string(res.status);
                continue;
            }
            if (res.status != 200) {
                throw BackendError("endpoint rejected request (" + std::to_string(res.status) +
                                   "): " + res.body.substr(0, 200));
            }
            json parsed = json::parse(res.body, nullptr, false);
            if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
                throw BackendError("malformed endpoint response: " + res.body.substr(0, 200));
            }
            const json& choice = parsed["choices"][0];
            if (choice.contains("message") && choice["message"].contains("content")) {
                return choice["message"]["content"].get<std::string>();
            }
            if (choice.contains("text")) return choice["text"].get<std::string>();
            throw BackendError("endpoint response has no completion text");
        } catch (const TransportError& e) {
            last_error = e.what();
        }
    }
    throw TransportExhausted("agent " + profile.agent_id + ": transport failed after " +
                             std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace council
