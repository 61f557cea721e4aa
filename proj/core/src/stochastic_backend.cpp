#include "council/stochastic_backend.hpp"

#include "council/rng.hpp"

namespace council {

double StochasticBackend::accuracy(const std::string& agent_id) const {
    auto it = accuracy_.find(agent_id);
    return it == accuracy_.end() ? params_.default_accuracy : it->second;
}

namespace {

Option draw_answer(std::optional<Option> gold, double p, SplitMix64& rng) {
    if (gold && rng.next_bool(p)) return *gold;
    if (!gold) return kAllOptions[rng.next_below(4)];
    // uniformly random wrong option
    int skip = static_cast<int>(rng.next_below(3));
    int slot = 0;
    for (Option o : kAllOptions) {
        if (o == *gold) continue;
        if (slot == skip) return o;
        ++slot;
    }
    return *gold;  // unreachable
}

std::string first_words(const std::string& text, int n) {
    std::string out;
    int words = 0;
    bool in_word = false;
    for (char c : text) {
        bool word_char = c != ' ' && c != '\t' && c != '\n';
        if (word_char && !in_word) {
            if (words == n) break;
            ++words;
            if (!out.empty()) out += ' ';
        }
        if (word_char) out += c;
        in_word = word_char;
    }
    return out;
}

}  // namespace

std::string StochasticBackend::invoke(const AgentProfile& profile, const AgentRequest& request) {
    SplitMix64 rng(request.seed);
    const QaTask* task = request.task;
    const std::optional<Option> gold = task ? task->gold_answer : std::nullopt;

    switch (request.kind) {
        case RequestKind::decide_watch:
            return rng.next_bool(params_.watch_whole_prob) ? "Yes." : "No.";

        case RequestKind::answer:
        case RequestKind::final_answer: {
            Option pick = draw_answer(gold, accuracy(profile.agent_id), rng);
            return "The best answer is: " + option_string(pick);
        }

        case RequestKind::reason:
            return "The sampled frames are consistent with this option for question " +
                   (task ? task->task_id : std::string("?")) + ".";

        case RequestKind::key_info:
        case RequestKind::summarize:
            return "Find the moments relevant to: " +
                   first_words(task ? task->question : std::string(), 8);

        case RequestKind::judge: {
            std::string out;
            for (const auto& subject : request.judge_subjects) {
                bool matches_gold = subject.answer && gold && *subject.answer == *gold;
                int score;
                if (params_.judge_mode == JudgeMode::oracle) {
                    score = matches_gold ? 10 : 1;
                } else {
                    score = matches_gold ? rng.next_int(params_.high_lo, params_.high_hi)
                                         : rng.next_int(params_.low_lo, params_.low_hi);
                }
                out += subject.label + "'s Score: " + std::to_string(score) + "\n";
            }
            out += "The reason is: scores reflect whether each stated chain of evidence holds up.";
            return out;
        }

        case RequestKind::rewrite: {
            auto it = request.bindings.find("Caption");
            return first_words(it == request.bindings.end() ? std::string() : it->second, 60);
        }
    }
    throw BackendError("stochastic backend: unsupported request kind");
}

}  // namespace council
