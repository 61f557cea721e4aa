#include "council/domain.hpp"

#include <cctype>

namespace council {

std::string option_string(Option o) { return std::string(1, option_char(o)); }

std::optional<Option> option_from_char(char c) {
    char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u < 'A' || u > 'D') return std::nullopt;
    return static_cast<Option>(u);
}

std::string answer_string(const Answer& a) { return a ? option_string(*a) : "Invalid"; }

std::string resolve_frame_path(const VideoRef& video, int index) {
    std::string out = video.frame_locator;
    auto replace_all = [&out](std::string_view from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = out.find(from, pos)) != std::string::npos) {
            out.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace_all("{video_id}", video.video_id);
    replace_all("{index}", std::to_string(index));
    return out;
}

const std::string& QaTask::option_text(Option o) const {
    static const std::string empty;
    for (const auto& opt : options) {
        if (opt.key == option_char(o)) return opt.text;
    }
    return empty;
}

std::string frame_origin_string(const FrameOrigin& origin) {
    switch (origin.kind) {
        case FrameOriginKind::rough:     return "rough";
        case FrameOriginKind::global:    return "global";
        case FrameOriginKind::chunk:     return "chunk(" + std::to_string(origin.chunk_index) + ")";
        case FrameOriginKind::assembled: return "assembled";
    }
    return "unknown";
}

Answer parse_answer_letter(std::string_view raw) {
    auto is_word_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0;
    };
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto opt = option_from_char(raw[i]);
        if (!opt) continue;
        bool left_ok = i == 0 || !is_word_char(raw[i - 1]);
        bool right_ok = i + 1 == raw.size() || !is_word_char(raw[i + 1]);
        if (left_ok && right_ok) return opt;
    }
    return std::nullopt;
}

std::vector<std::string> validate_task(const QaTask& task) {
    std::vector<std::string> violations;
    if (task.task_id.empty()) violations.push_back("task_id empty");
    if (task.question.empty()) violations.push_back("question text empty");
    if (task.options.size() != 4) {
        violations.push_back("options != 4 (got " + std::to_string(task.options.size()) + ")");
    }
    bool seen[4] = {false, false, false, false};
    for (const auto& opt : task.options) {
        if (opt.key < 'A' || opt.key > 'D') {
            violations.push_back(std::string("option key not in A-D: '") + opt.key + "'");
            continue;
        }
        int slot = opt.key - 'A';
        if (seen[slot]) {
            violations.push_back(std::string("duplicate option key ") + opt.key);
        }
        seen[slot] = true;
    }
    if (task.options.size() == 4) {
        for (int i = 0; i < 4; ++i) {
            if (!seen[i]) violations.push_back(std::string("missing option key ") + static_cast<char>('A' + i));
        }
    }
    if (task.video.video_id.empty()) violations.push_back("video_id empty");
    if (task.video.frame_count < 1) violations.push_back("frame_count < 1");
    if (!(task.video.duration_s > 0.0)) violations.push_back("duration_s <= 0");
    return violations;
}

}  // namespace council
