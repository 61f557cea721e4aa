#pragma once
// Replay backend: replies come from a fixture file of line-delimited JSON
// records keyed by (agent_id, task_id, kind, round). Two runs over the same
// fixtures produce identical transcripts. A missing key is fatal — a scripted
// run must never improvise.

#include <map>
#include <string>

#include "council/agents.hpp"

namespace council {

class ScriptedBackend : public AgentBackend {
  public:
    ScriptedBackend() = default;

    // Each line: {"agent_id":..,"task_id":..,"kind":..,"round":..,"reply":..}
    static ScriptedBackend from_file(const std::string& path);
    static ScriptedBackend from_jsonl(std::string_view jsonl, const std::string& origin);

    void add_reply(const std::string& agent_id, const std::string& task_id,
                   RequestKind kind, int round, std::string reply);

    std::size_t size() const { return replies_.size(); }

    std::string invoke(const AgentProfile& profile, const AgentRequest& request) override;

  private:
    static std::string key(const std::string& agent_id, const std::string& task_id,
                           std::string_view kind, int round);

    std::map<std::string, std::string> replies_;
};

}  // namespace council
