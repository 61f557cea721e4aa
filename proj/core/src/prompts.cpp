#include "council/prompts.hpp"

#include <array>

namespace council {

namespace {

// NOTE: these constants must stay byte-identical to the files under
// templates/; a golden test compares them.

constexpr std::string_view kDecideWatch =
    "You are given a single-choice question, options, subtitles, and some frames of the long video. You should not only look at the textual information but also consider the input visual information, taking everything into account. If you can answer the question accurately and comprehensively based on the existing information, especially the visual information, and further watching the entire video will not significantly improve the quality of the answer, then you don't need to watch the entire video and can answer 'No.'. However, if the existing information is not sufficient to fully answer the question, and watching the entire video may obtain information crucial for answering the question, please reply 'Yes'\n"
    "The frame tokens: {Frame tokens}\n"
    "{Question}\n"
    "{Options}\n"
    "{Subtitiles}(If have)\n"
    "Output:{Yes/No}";

constexpr std::string_view kKeyInfo =
    "Given four randomly sampled frames from a long video, subtitles, a question, and multiple-choice options, identify the key information needed to answer the question. Focus on visual cues, context, and temporal relationships within the frames. Limit your response to 50 words.\n"
    "The frame tokens: {Frame tokens}\n"
    "{Question}\n"
    "{Options}\n"
    "{Subtitles}(If have)\n";

constexpr std::string_view kKeyInfoHistory =
    "Given the discussion history from the previous round of a long-video question, the subtitles, the question, and multiple-choice options, identify the key information needed to answer the question. Focus on visual cues, context, and temporal relationships mentioned in the discussion. Limit your response to 50 words.\n"
    "The discussion history: {History}\n"
    "{Question}\n"
    "{Options}\n"
    "{Subtitles}(If have)\n";

constexpr std::string_view kAnswer =
    "Select the best answer to the following multiple-choice question based on the video and the subtitles. Respond with only the letter (A, B, C, or D) of the correct option.\n"
    "The frame tokens: {Frame tokens}\n"
    "{Question}\n"
    "{Options}\n"
    "{Subtitles} (If have)\n"
    "The best answer is:";

constexpr std::string_view kFinalAnswer =
    "Select the best answer to the following multiple-choice question based on the video, the subtitles, and the full discussion history below. Respond with only the letter (A, B, C, or D) of the correct option.\n"
    "The frame tokens: {Frame tokens}\n"
    "The discussion history: {History}\n"
    "{Question}\n"
    "{Options}\n"
    "{Subtitles} (If have)\n"
    "The best answer is:";

constexpr std::string_view kReason =
    "Given the video frames you've seen, and the question along with your answer, deeply analyze the logical steps and evidence from the frames that led you to provide this particular answer.\n"
    "The Question is:  {Question}\n"
    "The predict answer is {Predict answer}";

constexpr std::string_view kJudge =
    "You are given the answers and the reasoning for judgment from this model and two other models.\n"
    "The question is: {Question}\n"
    "The answer of {Agent 1} is {Agent 1's Answer}\n"
    "the reason is {Agent 1's Reason}\n"
    "The answer of {Agent 2} is {Agent 2's Answer}\n"
    "the reason is {Agent 2's Reason}\n"
    "The answer of {Agent 3} is {Agent 3's Answer}\n"
    "the reason is {Agent 3's Reason}\n"
    "Please score the performance of these three agents based on their reasoning. The score ranges from 1 to 10.\n"
    "Please strictly follow the answer format! The answer format is:\n"
    "{Agent 1's Score}: 1-10\n"
    "{Agent 2's Score}: 1-10\n"
    "{Agent 3's Score}: 1-10\n"
    "The reason is: {Reason}";

constexpr std::string_view kHistory =
    "Agent 1's answer is: {Agent 1's Answer}.\n"
    "Reason: {Agent 1's Reason}.\n"
    "The final score is : {Agent 1's Score}.\n"
    "Agent 2's answer is: {Agent 2's Answer}.\n"
    "Reason: {Agent 2's Reason}.\n"
    "The final score is : {Agent 2's Score}.\n"
    "Removed {Agent 3} Answer\n"
    "Answer: {Agent 3's Answer}\n"
    "Reason {Agent 2's Reason}\n"
    "However, this reason was deemed unconvincing, so this answer was removed from the discussion.";

constexpr std::string_view kCaptionRewrite =
    "Rewrite the following video caption so that it is at most {Limit} words long while keeping every concrete detail useful for retrieving the clip: objects, actions, people, places, and their order.\n"
    "Caption: {Caption}\n"
    "Rewritten caption:";

}  // namespace

std::string_view prompt_kind_name(PromptKind kind) {
    switch (kind) {
        case PromptKind::decide_watch:     return "decide_watch";
        case PromptKind::key_info:         return "key_info";
        case PromptKind::key_info_history: return "key_info_history";
        case PromptKind::answer:           return "answer";
        case PromptKind::final_answer:     return "final_answer";
        case PromptKind::reason:           return "reason";
        case PromptKind::judge:            return "judge";
        case PromptKind::history:          return "history";
        case PromptKind::caption_rewrite:  return "caption_rewrite";
    }
    return "unknown";
}

std::string_view template_text(PromptKind kind) {
    switch (kind) {
        case PromptKind::decide_watch:     return kDecideWatch;
        case PromptKind::key_info:         return kKeyInfo;
        case PromptKind::key_info_history: return kKeyInfoHistory;
        case PromptKind::answer:           return kAnswer;
        case PromptKind::final_answer:     return kFinalAnswer;
        case PromptKind::reason:           return kReason;
        case PromptKind::judge:            return kJudge;
        case PromptKind::history:          return kHistory;
        case PromptKind::caption_rewrite:  return kCaptionRewrite;
    }
    return {};
}

const std::vector<PromptKind>& all_prompt_kinds() {
    static const std::vector<PromptKind> kinds = {
        PromptKind::decide_watch, PromptKind::key_info,     PromptKind::answer,
        PromptKind::reason,       PromptKind::judge,        PromptKind::history,
        PromptKind::key_info_history, PromptKind::final_answer, PromptKind::caption_rewrite,
    };
    return kinds;
}

std::vector<std::string> template_placeholders(std::string_view text) {
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find('{', pos);
        if (open == std::string_view::npos) break;
        std::size_t close = text.find('}', open + 1);
        if (close == std::string_view::npos) break;
        std::string name(text.substr(open + 1, close - open - 1));
        bool seen = false;
        for (const auto& n : names) {
            if (n == name) { seen = true; break; }
        }
        if (!seen) names.push_back(std::move(name));
        pos = close + 1;
    }
    return names;
}

std::string render_template(std::string_view text, const Bindings& bindings) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        std::size_t close = text.find('}', open + 1);
        if (close == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        out.append(text.substr(pos, open - pos));
        std::string name(text.substr(open + 1, close - open - 1));
        auto it = bindings.find(name);
        if (it == bindings.end()) throw MissingPlaceholderError(name);
        out.append(it->second);
        pos = close + 1;
    }
    return out;
}

std::string render_prompt(PromptKind kind, const Bindings& bindings) {
    return render_template(template_text(kind), bindings);
}

std::string count_word(int n) {
    static const std::array<const char*, 11> words = {
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
    if (n >= 0 && n <= 10) return words[static_cast<std::size_t>(n)];
    return std::to_string(n);
}

std::string build_judge_prompt(const std::string& question, const std::vector<AgentSlot>& agents) {
    if (agents.size() < 2) {
        throw std::invalid_argument("judge prompt needs at least two agents");
    }
    int others = static_cast<int>(agents.size()) - 1;
    std::string out = "You are given the answers and the reasoning for judgment from this model and " +
                      count_word(others) + " other model" + (others == 1 ? "" : "s") + ".\n";
    out += "The question is: " + question + "\n";
    for (const auto& a : agents) {
        out += "The answer of " + a.label + " is " + a.answer + "\n";
        out += "the reason is " + a.reason + "\n";
    }
    out += "Please score the performance of these " + count_word(static_cast<int>(agents.size())) +
           " agents based on their reasoning. The score ranges from 1 to 10.\n";
    out += "Please strictly follow the answer format! The answer format is:\n";
    for (const auto& a : agents) {
        out += a.label + "'s Score: 1-10\n";
    }
    out += "The reason is: ";
    return out;
}

std::string build_history_text(const std::vector<HistoryEntry>& survivors,
                               const std::optional<RemovedEntry>& removed) {
    std::string out;
    for (const auto& s : survivors) {
        out += s.label + "'s answer is: " + s.answer + ".\n";
        out += "Reason: " + s.reason + ".\n";
        out += "The final score is : " + std::to_string(s.score) + ".\n";
    }
    if (removed) {
        out += "Removed " + removed->label + " Answer\n";
        out += "Answer: " + removed->answer + "\n";
        out += "Reason " + removed->reason + "\n";
        out += "However, this reason was deemed unconvincing, so this answer was removed from the discussion.";
    } else if (!out.empty()) {
        out.pop_back();  // no removed block: drop the trailing newline
    }
    return out;
}

}  // namespace council
