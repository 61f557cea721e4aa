#pragma once
// Prompt templates and rendering. Templates are embedded as string constants
// and also shipped as plain-text goldens under templates/; placeholders are
// written {Name}. Rendering is a pure single-pass substitution: equal inputs
// give byte-equal outputs.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace council {

enum class PromptKind {
    decide_watch,      // watch the whole video, or retrieve?
    key_info,          // round-1 key information from rough frames
    key_info_history,  // later-round key information from discussion history
    answer,
    final_answer,      // referee call when the round cap ends without consensus
    reason,
    judge,
    history,           // rendered discussion digest fed into the next round
    caption_rewrite,   // corpus preparation: caption compression
};

struct MissingPlaceholderError : std::runtime_error {
    explicit MissingPlaceholderError(const std::string& placeholder)
        : std::runtime_error("prompt rendering: no binding for placeholder {" + placeholder + "}"),
          placeholder(placeholder) {}
    std::string placeholder;
};

using Bindings = std::map<std::string, std::string>;

std::string_view prompt_kind_name(PromptKind kind);
std::string_view template_text(PromptKind kind);

// Every PromptKind in a stable order (the order used by the render-prompts command).
const std::vector<PromptKind>& all_prompt_kinds();

// Placeholder names in order of first appearance.
std::vector<std::string> template_placeholders(std::string_view text);

// Substitutes every {Name} with bindings.at(Name), verbatim and non-recursive.
// Throws MissingPlaceholderError naming the first absent binding.
std::string render_template(std::string_view text, const Bindings& bindings);
std::string render_prompt(PromptKind kind, const Bindings& bindings);

// One agent's slot in a judge or history prompt. The label is the agent's
// display name in the discussion ("Agent 1", "Agent 2", ...).
struct AgentSlot {
    std::string label;
    std::string answer;
    std::string reason;
};

// Judge prompt for any committee size >= 2. For three agents the output is
// byte-identical to the canonical judge template with its bindings applied.
std::string build_judge_prompt(const std::string& question, const std::vector<AgentSlot>& agents);

struct HistoryEntry {
    std::string label;
    std::string answer;
    std::string reason;
    int score = 0;
};

struct RemovedEntry {
    std::string label;
    std::string answer;
    std::string reason;
};

// Discussion digest for one round: surviving agents' answers, reasons and
// final scores, then the removed agent's entry with the removal sentence.
// For two survivors plus one removed agent this follows the canonical history
// template line for line.
std::string build_history_text(const std::vector<HistoryEntry>& survivors,
                               const std::optional<RemovedEntry>& removed);

// "one", "two", ... "ten"; digits beyond that.
std::string count_word(int n);

}  // namespace council
