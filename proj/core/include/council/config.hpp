#pragma once
// Run configuration and the agent library. Everything that affects a run
// lives in files so runs can be replayed; environment variables are used for
// credentials only.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "council/agents.hpp"
#include "council/perception.hpp"
#include "council/remote_backend.hpp"
#include "council/scripted_backend.hpp"
#include "council/stochastic_backend.hpp"

namespace council {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TerminalPolicy { dynamic, best_score, decide_by_agent };

std::string_view terminal_policy_name(TerminalPolicy policy);
std::optional<TerminalPolicy> terminal_policy_from_string(std::string_view name);

// Whether reflection removes the lowest-scoring agent under this policy. The
// two static policies keep the full team and only differ in how the final
// answer is picked.
constexpr bool policy_eliminates(TerminalPolicy policy) {
    return policy == TerminalPolicy::dynamic;
}

struct ScorerConfig {
    std::string kind = "hash_mock";  // hash_mock | keyword_mock | remote
    std::uint64_t seed = 0;
    std::string base_url;  // remote only
    struct KeywordEntry {
        std::string video_id;
        int chunk_index = 0;
        std::string text;
    };
    std::vector<KeywordEntry> keywords;  // keyword_mock only
};

struct RunConfig {
    int max_rounds = 3;
    PerceptionParams perception;
    TerminalPolicy terminal_policy = TerminalPolicy::dynamic;
    int retry_attempts = 3;
    int retry_backoff_ms = 200;
    std::uint64_t seed = 0;
    bool subtitles = true;
    int parallel_agents = 1;
    int parallel_sessions = 1;
    // Deterministic runs use logical timestamps and report zero wall times so
    // two identical runs produce byte-identical files.
    bool deterministic = true;
    ScorerConfig scorer;
};

// Parses a JSON config file; absent fields keep their defaults, unknown fields
// are rejected so typos cannot silently change a run.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text, const std::string& origin);

std::unique_ptr<SimilarityScorer> make_scorer(const ScorerConfig& config);

// The pool of configured agents plus the backends that serve them. Backends
// are owned here; AgentRuntime instances reference them.
class AgentLibrary {
  public:
    static AgentLibrary load(const std::string& path);
    static AgentLibrary from_json_text(const std::string& text, const std::string& origin,
                                       const std::string& base_dir);

    const std::vector<AgentProfile>& profiles() const { return profiles_; }
    const AgentProfile* find(const std::string& agent_id) const;
    AgentBackend* backend_for(const AgentProfile& profile);

    StochasticBackend* stochastic() { return stochastic_.get(); }

    // Applies run-level retry defaults to remote profiles that did not set
    // their own values.
    void apply_retry_defaults(int attempts, int backoff_ms);

  private:
    std::vector<AgentProfile> profiles_;
    std::unique_ptr<ScriptedBackend> scripted_;
    std::unique_ptr<StochasticBackend> stochastic_;
    // one client per remote profile so each honors its own in-flight cap
    std::vector<std::pair<std::string, std::unique_ptr<RemoteBackend>>> remotes_;
    // which endpoints set retry values explicitly (those win over run defaults)
    std::map<std::string, std::pair<bool, bool>> retry_explicit_;
};

}  // namespace council
