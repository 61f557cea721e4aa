#include "doctest.h"

#include "council/agents.hpp"
#include "council/rng.hpp"
#include "council/scripted_backend.hpp"
#include "council/stochastic_backend.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace council;

TEST_SUITE_BEGIN("agents");

TEST_CASE("parse_judge_scores reads the template format") {
    std::vector<std::string> labels = {"Agent 1", "Agent 2", "Agent 3"};
    auto scores = parse_judge_scores("Agent 1's Score: 8\nAgent 2's Score: 6\nAgent 3's Score: 9",
                                     labels);
    REQUIRE(scores.has_value());
    CHECK(scores->scores == std::vector<int>{8, 6, 9});
}

TEST_CASE("parse_judge_scores clamps out-of-range scores to [1,10]") {
    std::vector<std::string> labels = {"Agent 1", "Agent 2"};
    auto scores = parse_judge_scores("Agent 1's Score: 12\nAgent 2's Score: 0", labels);
    REQUIRE(scores.has_value());
    CHECK(scores->scores == std::vector<int>{10, 1});
    auto negative = parse_judge_scores("Agent 1's Score: -3\nAgent 2's Score: 5", labels);
    REQUIRE(negative.has_value());
    CHECK(negative->scores[0] == 1);
}

TEST_CASE("parse_judge_scores fails when any listed agent has no score line") {
    std::vector<std::string> labels = {"Agent 1", "Agent 2"};
    CHECK_FALSE(parse_judge_scores("no scores here", labels).has_value());
    CHECK_FALSE(parse_judge_scores("Agent 1's Score: 7", labels).has_value());
    CHECK_FALSE(parse_judge_scores("Agent 1's Score: seven\nAgent 2's Score: 5", labels).has_value());
}

TEST_CASE("formatting scores per the template then parsing is the identity") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        int k = rng.next_int(2, 5);
        std::vector<std::string> labels;
        std::vector<int> expected;
        std::string text;
        for (int i = 0; i < k; ++i) {
            labels.push_back("Agent " + std::to_string(i + 1));
            expected.push_back(rng.next_int(1, 10));
            text += labels.back() + "'s Score: " + std::to_string(expected.back()) + "\n";
        }
        text += "The reason is: consistency of the cited evidence.";
        auto parsed = parse_judge_scores(text, labels);
        REQUIRE(parsed.has_value());
        CHECK(parsed->scores == expected);
    }
}

TEST_CASE("parse_watch_decision matches standalone yes/no, first wins, default No") {
    CHECK(parse_watch_decision("Yes."));
    CHECK(parse_watch_decision("yes, the frames are not enough"));
    CHECK_FALSE(parse_watch_decision("No, the frames suffice"));
    CHECK_FALSE(parse_watch_decision("unclear"));
    CHECK_FALSE(parse_watch_decision(""));
    CHECK_FALSE(parse_watch_decision("noyes"));       // neither token standalone
    CHECK(parse_watch_decision("I say yes and no"));  // first match wins
    CHECK_FALSE(parse_watch_decision("no... well, yes"));
}

TEST_CASE("scripted backend replays fixtures and fails hard on misses") {
    ScriptedBackend backend;
    QaTask task = test_support::make_task("t7");
    backend.add_reply("a1", "t7", RequestKind::answer, 1, "The best answer is: B");

    AgentProfile a1{"a1", BackendKind::scripted, std::nullopt, std::nullopt};
    AgentRequest req;
    req.kind = RequestKind::answer;
    req.task = &task;
    req.round = 1;
    CHECK(backend.invoke(a1, req) == "The best answer is: B");

    req.round = 2;
    CHECK_THROWS_AS(backend.invoke(a1, req), FixtureMissError);
}

TEST_CASE("scripted fixture files parse and reject malformed lines") {
    ScriptedBackend backend = ScriptedBackend::from_jsonl(
        R"({"agent_id":"a1","task_id":"t1","kind":"answer","round":1,"reply":"C."})"
        "\n\n"
        R"({"agent_id":"a2","task_id":"t1","kind":"answer","round":1,"reply":"D."})",
        "inline");
    CHECK(backend.size() == 2);
    CHECK_THROWS_WITH_AS(ScriptedBackend::from_jsonl("not json", "inline"),
                         doctest::Contains("inline:1"), BackendError);
    CHECK_THROWS_WITH_AS(
        ScriptedBackend::from_jsonl(R"({"agent_id":"a1","task_id":"t1","kind":"answer"})", "inline"),
        doctest::Contains("missing field"), BackendError);
}

TEST_CASE("stochastic answers hit the gold letter at the configured rate") {
    StochasticBackend backend;
    backend.set_accuracy("s1", 0.7);
    AgentProfile profile{"s1", BackendKind::stochastic, std::nullopt, std::nullopt};
    QaTask task = test_support::make_task("sim", 480, Option::C);

    const int n = 100000;
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        AgentRequest req;
        req.kind = RequestKind::answer;
        req.task = &task;
        req.round = 1;
        req.seed = derive_seed(1234, {"freq", std::to_string(i)});
        auto parsed = parse_answer_letter(backend.invoke(profile, req));
        REQUIRE(parsed.has_value());
        if (*parsed == Option::C) ++correct;
    }
    double p = 0.7;
    double rate = static_cast<double>(correct) / n;
    double bound = 3.0 * std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(rate - p) < bound);
}

TEST_CASE("stochastic replies replay exactly for a fixed seed") {
    StochasticBackend backend;
    AgentProfile profile{"s1", BackendKind::stochastic, std::nullopt, std::nullopt};
    QaTask task = test_support::make_task("replay");
    for (RequestKind kind : {RequestKind::answer, RequestKind::decide_watch, RequestKind::key_info,
                             RequestKind::reason}) {
        AgentRequest req;
        req.kind = kind;
        req.task = &task;
        req.round = 1;
        req.seed = request_seed(7, task.task_id, profile.agent_id, kind, 1);
        CHECK(backend.invoke(profile, req) == backend.invoke(profile, req));
    }
}

TEST_CASE("stochastic accuracy 1.0 always answers gold") {
    StochasticBackend backend;
    backend.set_accuracy("s1", 1.0);
    AgentProfile profile{"s1", BackendKind::stochastic, std::nullopt, std::nullopt};
    QaTask task = test_support::make_task("forced", 480, Option::C);
    for (int i = 0; i < 200; ++i) {
        AgentRequest req;
        req.kind = RequestKind::answer;
        req.task = &task;
        req.round = 1;
        req.seed = derive_seed(5, {std::to_string(i)});
        CHECK(parse_answer_letter(backend.invoke(profile, req)) == Option::C);
    }
}

TEST_CASE("stochastic judge scores gold-matching answers from the high band") {
    StochasticBackend banded;
    AgentProfile judge{"s1", BackendKind::stochastic, std::nullopt, std::nullopt};
    QaTask task = test_support::make_task("bands", 480, Option::A);

    AgentRequest req;
    req.kind = RequestKind::judge;
    req.task = &task;
    req.round = 1;
    req.judge_subjects = {
        {"Agent 1", Option::A, "A", "right"},
        {"Agent 2", Option::B, "B", "wrong"},
        {"Agent 3", std::nullopt, "no idea", "invalid"},
    };
    std::vector<std::string> labels = {"Agent 1", "Agent 2", "Agent 3"};

    for (int i = 0; i < 300; ++i) {
        req.seed = derive_seed(11, {std::to_string(i)});
        auto scores = parse_judge_scores(banded.invoke(judge, req), labels);
        REQUIRE(scores.has_value());
        CHECK(scores->scores[0] >= 7);
        CHECK(scores->scores[1] <= 4);
        CHECK(scores->scores[2] <= 4);  // invalid answers sit in the low band
    }

    StochasticParams oracle_params;
    oracle_params.judge_mode = JudgeMode::oracle;
    StochasticBackend oracle(oracle_params);
    req.seed = 1;
    auto scores = parse_judge_scores(oracle.invoke(judge, req), labels);
    REQUIRE(scores.has_value());
    CHECK(scores->scores == std::vector<int>{10, 1, 1});
}

TEST_CASE("standard bindings withhold subtitles when they are switched off") {
    QaTask task = test_support::make_task("t-subs");
    FrameSet frames{"v", {1, 2, 3}, FrameOrigin::rough()};

    Bindings with = standard_bindings(task, frames, true);
    CHECK(with.at("Subtitles") == *task.subtitles);
    CHECK(with.at("Subtitiles") == *task.subtitles);
    CHECK(with.at("Question") == task.question);
    CHECK(with.at("Options") == "A. Outcome A\nB. Outcome B\nC. Outcome C\nD. Outcome D");
    CHECK(with.at("Frame tokens") == "[3 frames: 1, 2, 3]");

    Bindings without = standard_bindings(task, frames, false);
    CHECK(without.at("Subtitles").empty());
    CHECK(without.at("Subtitiles").empty());

    QaTask silent = task;
    silent.subtitles.reset();
    CHECK(standard_bindings(silent, frames, true).at("Subtitles").empty());
}

TEST_CASE("request seeds differ across agents, rounds and kinds") {
    auto s = request_seed(42, "t1", "a1", RequestKind::answer, 1);
    CHECK(s == request_seed(42, "t1", "a1", RequestKind::answer, 1));
    CHECK(s != request_seed(42, "t1", "a2", RequestKind::answer, 1));
    CHECK(s != request_seed(42, "t1", "a1", RequestKind::answer, 2));
    CHECK(s != request_seed(42, "t1", "a1", RequestKind::reason, 1));
    CHECK(s != request_seed(43, "t1", "a1", RequestKind::answer, 1));
}

TEST_SUITE_END();
