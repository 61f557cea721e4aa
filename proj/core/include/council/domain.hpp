#pragma once
// Shared data model: tasks, options, frame sets, replies, round records.
// All values here are immutable after construction and safe to share across
// concurrent protocol stages.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace council {

enum class Option : char { A = 'A', B = 'B', C = 'C', D = 'D' };

constexpr std::array<Option, 4> kAllOptions = {Option::A, Option::B, Option::C, Option::D};

constexpr char option_char(Option o) { return static_cast<char>(o); }
std::string option_string(Option o);

// 'A'..'D' (either case) to Option; anything else is nullopt.
std::optional<Option> option_from_char(char c);

// A parsed answer. nullopt means the reply contained no usable option letter;
// downstream voting treats that as a non-vote rather than a failure.
using Answer = std::optional<Option>;

std::string answer_string(const Answer& a);  // "A".."D" or "Invalid"

struct VideoRef {
    std::string video_id;
    int frame_count = 0;      // pre-extracted frames, indexed [0, frame_count)
    double duration_s = 0.0;
    // Path template for one frame image; "{video_id}" and "{index}" are
    // substituted. Example: "frames/{video_id}/{index}.jpg".
    std::string frame_locator;
};

std::string resolve_frame_path(const VideoRef& video, int index);

struct OptionText {
    char key = 0;  // expected 'A'..'D'; kept raw so validation can report bad keys
    std::string text;
};

struct QaTask {
    std::string task_id;
    VideoRef video;
    std::string question;
    std::vector<OptionText> options;
    std::optional<std::string> subtitles;
    std::optional<Option> gold_answer;

    // Text of a given option on a validated task; empty string if absent.
    const std::string& option_text(Option o) const;
};

// Where a frame set came from.
enum class FrameOriginKind { rough, global, chunk, assembled };

struct FrameOrigin {
    FrameOriginKind kind = FrameOriginKind::rough;
    int chunk_index = -1;  // meaningful only for kind == chunk

    static FrameOrigin rough() { return {FrameOriginKind::rough, -1}; }
    static FrameOrigin global() { return {FrameOriginKind::global, -1}; }
    static FrameOrigin chunk(int index) { return {FrameOriginKind::chunk, index}; }
    static FrameOrigin assembled() { return {FrameOriginKind::assembled, -1}; }
};

std::string frame_origin_string(const FrameOrigin& origin);

struct FrameSet {
    std::string video_id;
    std::vector<int> indices;  // strictly increasing, each in [0, frame_count)
    FrameOrigin origin;
};

struct AgentReply {
    std::string agent_id;
    Answer answer;         // nullopt = invalid / non-vote
    std::string reason;
    std::string raw_text;  // retained verbatim for audit, especially when invalid
    bool backend_failed = false;
    std::string failure_note;
};

struct RoundRecord {
    int round = 0;  // 1-based
    std::vector<AgentReply> replies;
    // Present iff the round reached the scoring step.
    std::optional<std::vector<int>> totals;  // aligned with replies
    std::optional<std::string> removed_agent_id;
};

// First standalone option letter A-D (case-insensitive, punctuation and
// parentheses around it are fine); nullopt when the text contains none.
Answer parse_answer_letter(std::string_view raw);

// Every invariant violation of the task; empty list means valid. Never mutates.
std::vector<std::string> validate_task(const QaTask& task);

}  // namespace council
