#pragma once
// Chat-completion client. Requests carry the model name, a user message whose
// content parts are the frame images (in frame-index order, base64 data URLs)
// followed by the rendered prompt text, plus temperature and max token count.
// Transport failures are retried with exponential backoff; when the budget is
// exhausted a TransportExhausted escapes and the caller drops the agent for
// the current question.

#include <memory>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "council/agents.hpp"

namespace council {

struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    // Throws TransportError when the endpoint is unreachable.
    virtual HttpResponse post(const std::string& base_url, const std::string& path,
                              const std::string& body, const HttpHeaders& headers) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport();

std::string base64_encode(std::string_view bytes);

class RemoteBackend : public AgentBackend {
  public:
    explicit RemoteBackend(std::unique_ptr<HttpTransport> transport = nullptr, int max_inflight = 4);

    std::string invoke(const AgentProfile& profile, const AgentRequest& request) override;

    // Rendered prompt text for a request; judge prompts are assembled from the
    // listed subjects so any committee size works.
    static std::string prompt_text(const AgentRequest& request);

    // Request body as it goes on the wire (exposed for tests and transcripts).
    static std::string request_body(const AgentProfile& profile, const AgentRequest& request);

  private:
    std::unique_ptr<HttpTransport> transport_;
    std::counting_semaphore<256> inflight_;
};

}  // namespace council
