#include "council/scripted_backend.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace council {

using nlohmann::json;

std::string ScriptedBackend::key(const std::string& agent_id, const std::string& task_id,
                                 std::string_view kind, int round) {
    std::string k;
    k.reserve(agent_id.size() + task_id.size() + kind.size() + 8);
    k += agent_id;
    k += '\x1f';
    k += task_id;
    k += '\x1f';
    k += kind;
    k += '\x1f';
    k += std::to_string(round);
    return k;
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendError("cannot open fixture file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_jsonl(buffer.str(), path);
}

ScriptedBackend ScriptedBackend::from_jsonl(std::string_view jsonl, const std::string& origin) {
    ScriptedBackend backend;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= jsonl.size()) {
        std::size_t eol = jsonl.find('\n', pos);
        std::string_view line = jsonl.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                                : eol - pos);
        pos = eol == std::string_view::npos ? jsonl.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            throw BackendError(origin + ":" + std::to_string(line_no) + ": malformed fixture line");
        }
        for (const char* field : {"agent_id", "task_id", "kind", "round", "reply"}) {
            if (!record.contains(field)) {
                throw BackendError(origin + ":" + std::to_string(line_no) +
                                   ": fixture line missing field '" + field + "'");
            }
        }
        backend.replies_[key(record["agent_id"].get<std::string>(),
                             record["task_id"].get<std::string>(),
                             record["kind"].get<std::string>(),
                             record["round"].get<int>())] = record["reply"].get<std::string>();
    }
    return backend;
}

void ScriptedBackend::add_reply(const std::string& agent_id, const std::string& task_id,
                                RequestKind kind, int round, std::string reply) {
    replies_[key(agent_id, task_id, request_kind_name(kind), round)] = std::move(reply);
}

std::string ScriptedBackend::invoke(const AgentProfile& profile, const AgentRequest& request) {
    const std::string task_id = request.task ? request.task->task_id : std::string();
    auto it = replies_.find(key(profile.agent_id, task_id,
                                request_kind_name(request.kind), request.round));
    if (it == replies_.end()) {
        throw FixtureMissError("no fixture reply for (" + profile.agent_id + ", " + task_id +
                               ", " + std::string(request_kind_name(request.kind)) + ", round " +
                               std::to_string(request.round) + ")");
    }
    return it->second;
}

}  // namespace council
