#pragma once
// Agent behavior contract: who an agent is (profile) and how it is asked
// (request kinds mapping onto the prompt templates). Three backends implement
// the contract: remote chat endpoint, scripted replay, seeded stochastic
// simulator. Backends must tolerate concurrent invoke calls; all randomness
// comes from the per-call seed in the request.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "council/domain.hpp"
#include "council/prompts.hpp"

namespace council {

enum class BackendKind { remote, scripted, stochastic };

std::string_view backend_kind_name(BackendKind kind);
std::optional<BackendKind> backend_kind_from_string(std::string_view name);

struct EndpointConfig {
    std::string base_url;      // e.g. http://localhost:8000
    std::string model;
    std::string api_key_env;   // name of the env var holding the credential
    double temperature = 0.01;
    int max_new_tokens = 168;
    int retry_attempts = 3;
    int retry_backoff_ms = 200;
    int max_inflight = 4;
};

struct AgentProfile {
    std::string agent_id;
    BackendKind backend_kind = BackendKind::scripted;
    std::optional<EndpointConfig> endpoint;           // present iff remote
    std::optional<double> selection_accuracy;         // recorded by the selection phase
};

enum class RequestKind {
    decide_watch,
    key_info,      // round 1, from rough frames
    answer,
    reason,
    judge,
    summarize,     // later rounds: regenerate key info from discussion history
    final_answer,  // referee call after the round cap
    rewrite,       // caption compression for corpus preparation
};

std::string_view request_kind_name(RequestKind kind);

// One agent as presented inside a judge request: display label, its answer
// (letter or raw invalid text) and its stated reason. Judges see text only,
// no frames.
struct JudgeSubject {
    std::string label;
    Answer answer;       // parsed answer; nullopt when the reply had none
    std::string shown_answer;  // what the judge prompt displays
    std::string reason;
};

struct AgentRequest {
    RequestKind kind = RequestKind::answer;
    const QaTask* task = nullptr;       // not owned; immutable for the call
    std::optional<FrameSet> frames;     // required for decide_watch, key_info, answer, final_answer
    Bindings bindings;                  // fills the prompt template for this kind
    std::vector<JudgeSubject> judge_subjects;  // judge requests only
    int round = 1;
    std::uint64_t seed = 0;             // per-call seed, derived, never shared
};

struct BackendError : std::runtime_error {
    explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

// Transient transport problem; retried by the remote backend. When the retry
// budget is exhausted a TransportExhausted escapes and the orchestrator drops
// the agent from the current question.
struct TransportError : BackendError {
    using BackendError::BackendError;
};

struct TransportExhausted : BackendError {
    using BackendError::BackendError;
};

// A scripted run asked for a reply that the fixture file does not contain.
struct FixtureMissError : BackendError {
    using BackendError::BackendError;
};

class AgentBackend {
  public:
    virtual ~AgentBackend() = default;
    // Returns the raw reply text. Throws BackendError subclasses on failure.
    virtual std::string invoke(const AgentProfile& profile, const AgentRequest& request) = 0;
};

struct JudgeScores {
    std::vector<int> scores;  // aligned with the labels passed to the parser, each in [1,10]
};

// Extracts one integer per listed label from lines of the form
// "<label>'s Score: <n>", clamping to [1,10]. Returns nullopt when any listed
// label has no score line; the caller substitutes the neutral score.
std::optional<JudgeScores> parse_judge_scores(std::string_view raw,
                                              const std::vector<std::string>& labels);

constexpr int kNeutralJudgeScore = 5;  // midpoint substituted for unparseable judgments

// Case-insensitive standalone "yes"/"no"; first match wins; anything else is
// No (conservative: proceed to retrieval).
bool parse_watch_decision(std::string_view raw);

// Per-call seed for a backend invocation, stable across agents, rounds and
// request kinds for a given master seed.
std::uint64_t request_seed(std::uint64_t master, const std::string& task_id,
                           const std::string& agent_id, RequestKind kind, int round);

// Textual stand-in for attached frames, e.g. "[4 frames: 0, 151, 302, 453]".
std::string frame_tokens_text(const FrameSet& frames);

// "A. ...\nB. ...\nC. ...\nD. ..." in option order.
std::string options_text(const QaTask& task);

// The bindings every template shares: Question, Options, Subtitles (withheld
// when subtitles are off), Frame tokens, and empty completion slots. Call
// sites add kind-specific bindings on top.
Bindings standard_bindings(const QaTask& task, const std::optional<FrameSet>& frames,
                           bool subtitles_on);

}  // namespace council
