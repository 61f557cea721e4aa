#include "council/agents.hpp"

#include <algorithm>
#include <cctype>

#include "council/rng.hpp"

namespace council {

std::string_view backend_kind_name(BackendKind kind) {
    switch (kind) {
        case BackendKind::remote:     return "remote";
        case BackendKind::scripted:   return "scripted";
        case BackendKind::stochastic: return "stochastic";
    }
    return "unknown";
}

std::optional<BackendKind> backend_kind_from_string(std::string_view name) {
    if (name == "remote") return BackendKind::remote;
    if (name == "scripted") return BackendKind::scripted;
    if (name == "stochastic") return BackendKind::stochastic;
    return std::nullopt;
}

std::string_view request_kind_name(RequestKind kind) {
    switch (kind) {
        case RequestKind::decide_watch: return "decide_watch";
        case RequestKind::key_info:     return "key_info";
        case RequestKind::answer:       return "answer";
        case RequestKind::reason:       return "reason";
        case RequestKind::judge:        return "judge";
        case RequestKind::summarize:    return "summarize";
        case RequestKind::final_answer: return "final_answer";
        case RequestKind::rewrite:      return "rewrite";
    }
    return "unknown";
}

namespace {

std::optional<int> parse_int_after(std::string_view text, std::size_t pos) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
        return std::nullopt;
    }
    long value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        value = value * 10 + (text[pos] - '0');
        if (value > 1000000) break;  // scores are tiny; avoid overflow on garbage
        ++pos;
    }
    return static_cast<int>(negative ? -value : value);
}

}  // namespace

std::optional<JudgeScores> parse_judge_scores(std::string_view raw,
                                              const std::vector<std::string>& labels) {
    JudgeScores out;
    out.scores.reserve(labels.size());
    for (const auto& label : labels) {
        std::string needle = label + "'s Score";
        std::size_t pos = raw.find(needle);
        std::optional<int> value;
        while (pos != std::string_view::npos) {
            std::size_t after = pos + needle.size();
            while (after < raw.size() && (raw[after] == ' ' || raw[after] == '\t')) ++after;
            if (after < raw.size() && raw[after] == ':') {
                value = parse_int_after(raw, after + 1);
                if (value) break;
            }
            pos = raw.find(needle, pos + 1);
        }
        if (!value) return std::nullopt;
        out.scores.push_back(std::clamp(*value, 1, 10));
    }
    return out;
}

bool parse_watch_decision(std::string_view raw) {
    auto is_word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    std::size_t i = 0;
    while (i < raw.size()) {
        if (!is_word_char(raw[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < raw.size() && is_word_char(raw[i])) ++i;
        std::string token;
        token.reserve(i - start);
        for (std::size_t k = start; k < i; ++k) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[k]))));
        }
        if (token == "yes") return true;
        if (token == "no") return false;
    }
    return false;
}

std::uint64_t request_seed(std::uint64_t master, const std::string& task_id,
                           const std::string& agent_id, RequestKind kind, int round) {
    return derive_seed(master, {task_id, agent_id, request_kind_name(kind),
                                std::to_string(round)});
}

std::string frame_tokens_text(const FrameSet& frames) {
    std::string out = "[" + std::to_string(frames.indices.size()) + " frames";
    if (!frames.indices.empty()) {
        out += ": ";
        for (std::size_t i = 0; i < frames.indices.size(); ++i) {
            if (i > 0) out += ", ";
            out += std::to_string(frames.indices[i]);
        }
    }
    out += "]";
    return out;
}

std::string options_text(const QaTask& task) {
    std::string out;
    for (Option o : kAllOptions) {
        if (!out.empty()) out += '\n';
        out += option_char(o);
        out += ". ";
        out += task.option_text(o);
    }
    return out;
}

Bindings standard_bindings(const QaTask& task, const std::optional<FrameSet>& frames,
                           bool subtitles_on) {
    std::string subtitles = subtitles_on && task.subtitles ? *task.subtitles : std::string();
    Bindings b = {
        {"Question", task.question},
        {"Options", options_text(task)},
        {"Subtitles", subtitles},
        {"Subtitiles", subtitles},  // the decide_watch template spells it this way
        {"Frame tokens", frames ? frame_tokens_text(*frames) : std::string()},
        {"Yes/No", ""},  // completion slot
    };
    return b;
}

}  // namespace council
