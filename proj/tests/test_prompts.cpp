#include "doctest.h"

#include "council/prompts.hpp"
#include "test_support.hpp"

using namespace council;

TEST_SUITE_BEGIN("prompts");

TEST_CASE("every embedded template matches its golden file byte for byte") {
    for (PromptKind kind : all_prompt_kinds()) {
        std::string name(prompt_kind_name(kind));
        std::string golden =
            test_support::slurp(test_support::repo_path("templates/" + name + ".txt"));
        CHECK_MESSAGE(golden == template_text(kind), "template mismatch: " << name);
    }
}

TEST_CASE("render substitutes placeholders verbatim and is pure") {
    Bindings b = {{"Question", "Q?"}, {"Predict answer", "B"}};
    std::string once = render_prompt(PromptKind::reason, b);
    std::string twice = render_prompt(PromptKind::reason, b);
    CHECK(once == twice);
    CHECK(once.find("The Question is:  Q?") != std::string::npos);
    CHECK(once.find("The predict answer is B") != std::string::npos);
    // substitution is single-pass: braces inside values survive untouched
    Bindings tricky = {{"Question", "{Predict answer}"}, {"Predict answer", "B"}};
    CHECK(render_prompt(PromptKind::reason, tricky).find("The Question is:  {Predict answer}") !=
          std::string::npos);
}

TEST_CASE("missing placeholder reports the absent binding by name") {
    Bindings b = {{"Question", "Q?"}, {"Subtitles", ""}, {"Subtitiles", ""},
                  {"Frame tokens", "[4 frames]"}, {"Yes/No", ""}};
    // no Options binding
    try {
        render_prompt(PromptKind::answer, b);
        FAIL("expected MissingPlaceholderError");
    } catch (const MissingPlaceholderError& e) {
        CHECK(e.placeholder == "Options");
    }
}

TEST_CASE("answer template renders to text ending with the completion cue") {
    Bindings b = {{"Question", "Q?"},
                  {"Options", "A. one\nB. two\nC. three\nD. four"},
                  {"Subtitles", ""},
                  {"Frame tokens", "[16 frames]"}};
    std::string text = render_prompt(PromptKind::answer, b);
    const std::string tail = "The best answer is:";
    REQUIRE(text.size() >= tail.size());
    CHECK(text.substr(text.size() - tail.size()) == tail);
}

TEST_CASE("template placeholder scan keeps first-appearance order") {
    auto names = template_placeholders(template_text(PromptKind::answer));
    REQUIRE(names.size() == 4);
    CHECK(names[0] == "Frame tokens");
    CHECK(names[1] == "Question");
    CHECK(names[2] == "Options");
    CHECK(names[3] == "Subtitles");
}

TEST_CASE("three-agent judge prompt is byte-identical to the canonical template") {
    std::vector<AgentSlot> agents = {
        {"Agent 1", "A", "the first scene shows it"},
        {"Agent 2", "B", "the subtitles mention it"},
        {"Agent 3", "C", "the ending implies it"},
    };
    std::string built = build_judge_prompt("Which outcome happens?", agents);

    Bindings b = {
        {"Question", "Which outcome happens?"},
        {"Agent 1", "Agent 1"}, {"Agent 1's Answer", "A"}, {"Agent 1's Reason", "the first scene shows it"},
        {"Agent 2", "Agent 2"}, {"Agent 2's Answer", "B"}, {"Agent 2's Reason", "the subtitles mention it"},
        {"Agent 3", "Agent 3"}, {"Agent 3's Answer", "C"}, {"Agent 3's Reason", "the ending implies it"},
        {"Agent 1's Score", "Agent 1's Score"},
        {"Agent 2's Score", "Agent 2's Score"},
        {"Agent 3's Score", "Agent 3's Score"},
        {"Reason", ""},
    };
    CHECK(built == render_prompt(PromptKind::judge, b));
    CHECK(built.find("The score ranges from 1 to 10.") != std::string::npos);
}

TEST_CASE("judge prompt generalizes to other committee sizes") {
    std::vector<AgentSlot> two = {
        {"Agent 1", "A", "r1"},
        {"Agent 3", "B", "r3"},
    };
    std::string text = build_judge_prompt("Q?", two);
    CHECK(text.find("this model and one other model.") != std::string::npos);
    CHECK(text.find("these two agents") != std::string::npos);
    CHECK(text.find("Agent 3's Score: 1-10") != std::string::npos);

    std::vector<AgentSlot> four = {
        {"Agent 1", "A", "r"}, {"Agent 2", "B", "r"}, {"Agent 3", "C", "r"}, {"Agent 4", "D", "r"}};
    std::string text4 = build_judge_prompt("Q?", four);
    CHECK(text4.find("this model and three other models.") != std::string::npos);
    CHECK(text4.find("these four agents") != std::string::npos);
    CHECK_THROWS_AS(build_judge_prompt("Q?", {{"Agent 1", "A", "r"}}), std::invalid_argument);
}

TEST_CASE("history text follows the canonical layout and removal sentence") {
    std::vector<HistoryEntry> survivors = {
        {"Agent 1", "B", "the frames show the event", 24},
        {"Agent 2", "B", "subtitles agree", 26},
    };
    RemovedEntry removed{"Agent 3", "C", "guessing from the thumbnail"};
    std::string text = build_history_text(survivors, removed);

    CHECK(text ==
          "Agent 1's answer is: B.\n"
          "Reason: the frames show the event.\n"
          "The final score is : 24.\n"
          "Agent 2's answer is: B.\n"
          "Reason: subtitles agree.\n"
          "The final score is : 26.\n"
          "Removed Agent 3 Answer\n"
          "Answer: C\n"
          "Reason guessing from the thumbnail\n"
          "However, this reason was deemed unconvincing, so this answer was removed from the discussion.");

    // identical inputs render byte-identically
    CHECK(text == build_history_text(survivors, removed));

    // an empty reason leaves an empty slot and nothing breaks
    std::vector<HistoryEntry> quiet = {{"Agent 1", "A", "", 12}};
    std::string no_removal = build_history_text(quiet, std::nullopt);
    CHECK(no_removal == "Agent 1's answer is: A.\nReason: .\nThe final score is : 12.");
}

TEST_SUITE_END();
