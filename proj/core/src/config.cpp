#include "council/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace council {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_object(const std::string& text, const std::string& origin) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ConfigError(origin + ": not a JSON object");
    }
    return parsed;
}

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& origin) {
    for (auto it = object.begin(); it != object.end(); ++it) {
        if (known.count(it.key()) == 0) {
            throw ConfigError(origin + ": unknown field '" + it.key() + "'");
        }
    }
}

}  // namespace

std::string_view terminal_policy_name(TerminalPolicy policy) {
    switch (policy) {
        case TerminalPolicy::dynamic:         return "dynamic";
        case TerminalPolicy::best_score:      return "best_score";
        case TerminalPolicy::decide_by_agent: return "decide_by_agent";
    }
    return "unknown";
}

std::optional<TerminalPolicy> terminal_policy_from_string(std::string_view name) {
    if (name == "dynamic") return TerminalPolicy::dynamic;
    if (name == "best_score") return TerminalPolicy::best_score;
    if (name == "decide_by_agent") return TerminalPolicy::decide_by_agent;
    return std::nullopt;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_json_text(slurp(path), path);
}

RunConfig run_config_from_json_text(const std::string& text, const std::string& origin) {
    json root = parse_object(text, origin);
    reject_unknown_keys(root,
                        {"max_rounds", "perception", "terminal_policy", "retry", "seed",
                         "subtitles", "parallel_agents", "parallel_sessions", "deterministic",
                         "scorer"},
                        origin);
    RunConfig config;
    config.max_rounds = root.value("max_rounds", config.max_rounds);
    if (config.max_rounds < 1) throw ConfigError(origin + ": max_rounds must be >= 1");
    config.seed = root.value("seed", config.seed);
    config.subtitles = root.value("subtitles", config.subtitles);
    config.parallel_agents = root.value("parallel_agents", config.parallel_agents);
    config.parallel_sessions = root.value("parallel_sessions", config.parallel_sessions);
    config.deterministic = root.value("deterministic", config.deterministic);

    if (root.contains("terminal_policy")) {
        auto policy = terminal_policy_from_string(root["terminal_policy"].get<std::string>());
        if (!policy) {
            throw ConfigError(origin + ": unknown terminal_policy '" +
                              root["terminal_policy"].get<std::string>() + "'");
        }
        config.terminal_policy = *policy;
    }

    if (root.contains("perception")) {
        const json& p = root["perception"];
        reject_unknown_keys(p,
                            {"rough_sample_size", "global_sample_size", "chunk_count",
                             "chunk_sample_size", "threshold", "frame_cap"},
                            origin + ".perception");
        config.perception.rough_sample_size = p.value("rough_sample_size", config.perception.rough_sample_size);
        config.perception.global_sample_size = p.value("global_sample_size", config.perception.global_sample_size);
        config.perception.chunk_count = p.value("chunk_count", config.perception.chunk_count);
        config.perception.chunk_sample_size = p.value("chunk_sample_size", config.perception.chunk_sample_size);
        config.perception.threshold = p.value("threshold", config.perception.threshold);
        config.perception.frame_cap = p.value("frame_cap", config.perception.frame_cap);
        if (config.perception.chunk_count < 1) throw ConfigError(origin + ": chunk_count must be >= 1");
    }

    if (root.contains("retry")) {
        const json& r = root["retry"];
        reject_unknown_keys(r, {"attempts", "backoff_ms"}, origin + ".retry");
        config.retry_attempts = r.value("attempts", config.retry_attempts);
        config.retry_backoff_ms = r.value("backoff_ms", config.retry_backoff_ms);
    }

    if (root.contains("scorer")) {
        const json& s = root["scorer"];
        reject_unknown_keys(s, {"kind", "seed", "base_url", "keywords"}, origin + ".scorer");
        config.scorer.kind = s.value("kind", config.scorer.kind);
        config.scorer.seed = s.value("seed", config.scorer.seed);
        config.scorer.base_url = s.value("base_url", config.scorer.base_url);
        if (s.contains("keywords")) {
            for (const auto& entry : s["keywords"]) {
                config.scorer.keywords.push_back({entry.at("video_id").get<std::string>(),
                                                  entry.at("chunk_index").get<int>(),
                                                  entry.at("text").get<std::string>()});
            }
        }
    }
    return config;
}

std::unique_ptr<SimilarityScorer> make_scorer(const ScorerConfig& config) {
    if (config.kind == "hash_mock") {
        return std::make_unique<HashMockScorer>(config.seed);
    }
    if (config.kind == "keyword_mock") {
        auto scorer = std::make_unique<KeywordMockScorer>();
        for (const auto& entry : config.keywords) {
            scorer->set_chunk_text(entry.video_id, entry.chunk_index, entry.text);
        }
        return scorer;
    }
    if (config.kind == "remote") {
        if (config.base_url.empty()) throw ConfigError("remote scorer needs base_url");
        return std::make_unique<RemoteScorer>(config.base_url);
    }
    throw ConfigError("unknown scorer kind '" + config.kind + "'");
}

AgentLibrary AgentLibrary::load(const std::string& path) {
    std::string base_dir = std::filesystem::path(path).parent_path().string();
    return from_json_text(slurp(path), path, base_dir);
}

AgentLibrary AgentLibrary::from_json_text(const std::string& text, const std::string& origin,
                                          const std::string& base_dir) {
    json root = parse_object(text, origin);
    reject_unknown_keys(root, {"agents", "fixtures", "stochastic"}, origin);
    if (!root.contains("agents") || !root["agents"].is_array() || root["agents"].empty()) {
        throw ConfigError(origin + ": 'agents' must be a non-empty array");
    }

    AgentLibrary library;

    StochasticParams stoch;
    if (root.contains("stochastic")) {
        const json& s = root["stochastic"];
        reject_unknown_keys(s,
                            {"default_accuracy", "watch_whole_prob", "judge_mode", "high_lo",
                             "high_hi", "low_lo", "low_hi"},
                            origin + ".stochastic");
        stoch.default_accuracy = s.value("default_accuracy", stoch.default_accuracy);
        stoch.watch_whole_prob = s.value("watch_whole_prob", stoch.watch_whole_prob);
        if (s.contains("judge_mode")) {
            std::string mode = s["judge_mode"].get<std::string>();
            if (mode == "oracle") {
                stoch.judge_mode = JudgeMode::oracle;
            } else if (mode == "banded") {
                stoch.judge_mode = JudgeMode::banded;
            } else {
                throw ConfigError(origin + ": unknown judge_mode '" + mode + "'");
            }
        }
        stoch.high_lo = s.value("high_lo", stoch.high_lo);
        stoch.high_hi = s.value("high_hi", stoch.high_hi);
        stoch.low_lo = s.value("low_lo", stoch.low_lo);
        stoch.low_hi = s.value("low_hi", stoch.low_hi);
    }
    library.stochastic_ = std::make_unique<StochasticBackend>(stoch);

    std::set<std::string> seen_ids;
    bool wants_scripted = false;
    for (const auto& a : root["agents"]) {
        reject_unknown_keys(a, {"agent_id", "backend", "accuracy", "selection_accuracy", "endpoint"},
                            origin + ".agents[]");
        AgentProfile profile;
        profile.agent_id = a.at("agent_id").get<std::string>();
        if (!seen_ids.insert(profile.agent_id).second) {
            throw ConfigError(origin + ": duplicate agent_id '" + profile.agent_id + "'");
        }
        auto kind = backend_kind_from_string(a.value("backend", "scripted"));
        if (!kind) {
            throw ConfigError(origin + ": unknown backend '" + a.value("backend", "") + "' for " +
                              profile.agent_id);
        }
        profile.backend_kind = *kind;
        if (a.contains("selection_accuracy")) {
            profile.selection_accuracy = a["selection_accuracy"].get<double>();
        }

        if (profile.backend_kind == BackendKind::remote) {
            if (!a.contains("endpoint")) {
                throw ConfigError(origin + ": remote agent '" + profile.agent_id +
                                  "' needs an endpoint");
            }
            const json& e = a["endpoint"];
            reject_unknown_keys(e,
                                {"base_url", "model", "api_key_env", "temperature",
                                 "max_new_tokens", "retry_attempts", "retry_backoff_ms",
                                 "max_inflight"},
                                origin + ".endpoint");
            EndpointConfig endpoint;
            endpoint.base_url = e.at("base_url").get<std::string>();
            endpoint.model = e.value("model", endpoint.model);
            endpoint.api_key_env = e.value("api_key_env", endpoint.api_key_env);
            endpoint.temperature = e.value("temperature", endpoint.temperature);
            endpoint.max_new_tokens = e.value("max_new_tokens", endpoint.max_new_tokens);
            endpoint.retry_attempts = e.value("retry_attempts", endpoint.retry_attempts);
            endpoint.retry_backoff_ms = e.value("retry_backoff_ms", endpoint.retry_backoff_ms);
            endpoint.max_inflight = e.value("max_inflight", endpoint.max_inflight);
            library.retry_explicit_[profile.agent_id] = {e.contains("retry_attempts"),
                                                         e.contains("retry_backoff_ms")};
            profile.endpoint = endpoint;
            library.remotes_.emplace_back(
                profile.agent_id,
                std::make_unique<RemoteBackend>(nullptr, endpoint.max_inflight));
        } else if (a.contains("endpoint")) {
            throw ConfigError(origin + ": agent '" + profile.agent_id +
                              "' is not remote but has an endpoint");
        }

        if (profile.backend_kind == BackendKind::scripted) wants_scripted = true;
        if (profile.backend_kind == BackendKind::stochastic && a.contains("accuracy")) {
            library.stochastic_->set_accuracy(profile.agent_id, a["accuracy"].get<double>());
        }
        library.profiles_.push_back(std::move(profile));
    }

    if (root.contains("fixtures")) {
        std::filesystem::path fixtures(root["fixtures"].get<std::string>());
        if (fixtures.is_relative() && !base_dir.empty()) {
            fixtures = std::filesystem::path(base_dir) / fixtures;
        }
        library.scripted_ =
            std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(fixtures.string()));
    } else if (wants_scripted) {
        throw ConfigError(origin + ": scripted agents configured but no 'fixtures' file given");
    }
    return library;
}

const AgentProfile* AgentLibrary::find(const std::string& agent_id) const {
    for (const auto& p : profiles_) {
        if (p.agent_id == agent_id) return &p;
    }
    return nullptr;
}

AgentBackend* AgentLibrary::backend_for(const AgentProfile& profile) {
    switch (profile.backend_kind) {
        case BackendKind::scripted:
            return scripted_.get();
        case BackendKind::stochastic:
            return stochastic_.get();
        case BackendKind::remote:
            for (auto& [id, backend] : remotes_) {
                if (id == profile.agent_id) return backend.get();
            }
            return nullptr;
    }
    return nullptr;
}

void AgentLibrary::apply_retry_defaults(int attempts, int backoff_ms) {
    for (auto& profile : profiles_) {
        if (!profile.endpoint) continue;
        auto it = retry_explicit_.find(profile.agent_id);
        bool attempts_explicit = it != retry_explicit_.end() && it->second.first;
        bool backoff_explicit = it != retry_explicit_.end() && it->second.second;
        if (!attempts_explicit) profile.endpoint->retry_attempts = attempts;
        if (!backoff_explicit) profile.endpoint->retry_backoff_ms = backoff_ms;
    }
}

}  // namespace council
