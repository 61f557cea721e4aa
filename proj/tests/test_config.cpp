#include "doctest.h"

#include "council/config.hpp"
#include "test_support.hpp"

using namespace council;
using test_support::fixture_path;

TEST_SUITE_BEGIN("config");

TEST_CASE("run config defaults and overrides") {
    RunConfig defaults = run_config_from_json_text("{}", "inline");
    CHECK(defaults.max_rounds == 3);
    CHECK(defaults.perception.chunk_count == 6);
    CHECK(defaults.perception.rough_sample_size == 4);
    CHECK(defaults.perception.global_sample_size == 16);
    CHECK(defaults.perception.chunk_sample_size == 16);
    CHECK(defaults.perception.threshold == doctest::Approx(0.8));
    CHECK(defaults.perception.frame_cap == 96);
    CHECK(defaults.terminal_policy == TerminalPolicy::dynamic);
    CHECK(defaults.subtitles);
    CHECK(defaults.deterministic);

    RunConfig custom = run_config_from_json_text(
        R"({"max_rounds":1,"terminal_policy":"best_score","seed":7,
            "perception":{"threshold":0.5,"chunk_count":4},
            "retry":{"attempts":5,"backoff_ms":10},
            "scorer":{"kind":"keyword_mock","keywords":[
              {"video_id":"v1","chunk_index":2,"text":"a dog"}]}})",
        "inline");
    CHECK(custom.max_rounds == 1);
    CHECK(custom.terminal_policy == TerminalPolicy::best_score);
    CHECK(custom.perception.threshold == doctest::Approx(0.5));
    CHECK(custom.perception.chunk_count == 4);
    CHECK(custom.perception.frame_cap == 96);  // untouched fields keep defaults
    CHECK(custom.retry_attempts == 5);
    CHECK(custom.scorer.kind == "keyword_mock");
    REQUIRE(custom.scorer.keywords.size() == 1);
    CHECK(custom.scorer.keywords[0].chunk_index == 2);
}

TEST_CASE("run config rejects typos and bad values") {
    CHECK_THROWS_WITH_AS(run_config_from_json_text(R"({"max_round":1})", "inline"),
                         doctest::Contains("unknown field 'max_round'"), ConfigError);
    CHECK_THROWS_AS(run_config_from_json_text(R"({"max_rounds":0})", "inline"), ConfigError);
    CHECK_THROWS_AS(run_config_from_json_text(R"({"terminal_policy":"vote"})", "inline"),
                    ConfigError);
    CHECK_THROWS_AS(run_config_from_json_text("[1,2]", "inline"), ConfigError);
}

TEST_CASE("agent library loads the committed fixture config") {
    AgentLibrary library = AgentLibrary::load(fixture_path("scripted20/agents_scripted.json"));
    REQUIRE(library.profiles().size() == 3);
    CHECK(library.find("a1") != nullptr);
    CHECK(library.find("missing") == nullptr);
    AgentBackend* backend = library.backend_for(*library.find("a2"));
    REQUIRE(backend != nullptr);

    QaTask task = test_support::make_task("t01");
    AgentRequest req;
    req.kind = RequestKind::decide_watch;
    req.task = &task;
    req.round = 1;
    CHECK(backend->invoke(*library.find("a2"), req) == "No.");
}

TEST_CASE("agent library validates its shape") {
    CHECK_THROWS_AS(AgentLibrary::from_json_text(R"({"agents":[]})", "inline", ""), ConfigError);
    CHECK_THROWS_WITH_AS(
        AgentLibrary::from_json_text(
            R"({"agents":[{"agent_id":"x"},{"agent_id":"x"}],"fixtures":"f"})", "inline", ""),
        doctest::Contains("duplicate agent_id"), ConfigError);
    CHECK_THROWS_WITH_AS(
        AgentLibrary::from_json_text(R"({"agents":[{"agent_id":"r","backend":"remote"}]})",
                                     "inline", ""),
        doctest::Contains("needs an endpoint"), ConfigError);
    CHECK_THROWS_WITH_AS(
        AgentLibrary::from_json_text(
            R"({"agents":[{"agent_id":"s","backend":"stochastic",
                           "endpoint":{"base_url":"http://x"}}]})",
            "inline", ""),
        doctest::Contains("not remote"), ConfigError);
    CHECK_THROWS_WITH_AS(
        AgentLibrary::from_json_text(R"({"agents":[{"agent_id":"s","backend":"scripted"}]})",
                                     "inline", ""),
        doctest::Contains("fixtures"), ConfigError);
}

TEST_CASE("library-level retry defaults respect per-endpoint overrides") {
    AgentLibrary library = AgentLibrary::from_json_text(
        R"({"agents":[
             {"agent_id":"r1","backend":"remote",
              "endpoint":{"base_url":"http://a","retry_attempts":7}},
             {"agent_id":"r2","backend":"remote","endpoint":{"base_url":"http://b"}}]})",
        "inline", "");
    library.apply_retry_defaults(5, 33);
    CHECK(library.find("r1")->endpoint->retry_attempts == 7);    // explicit wins
    CHECK(library.find("r1")->endpoint->retry_backoff_ms == 33);  // default applied
    CHECK(library.find("r2")->endpoint->retry_attempts == 5);
    CHECK(library.find("r2")->endpoint->retry_backoff_ms == 33);
}

TEST_CASE("stochastic library settings reach the backend") {
    AgentLibrary library = AgentLibrary::from_json_text(
        R"({"agents":[{"agent_id":"s1","backend":"stochastic","accuracy":0.9}],
            "stochastic":{"judge_mode":"oracle","watch_whole_prob":0.0}})",
        "inline", "");
    REQUIRE(library.stochastic() != nullptr);
    CHECK(library.stochastic()->accuracy("s1") == doctest::Approx(0.9));
    CHECK(library.stochastic()->params().judge_mode == JudgeMode::oracle);
    CHECK(library.stochastic()->params().watch_whole_prob == doctest::Approx(0.0));
}

TEST_CASE("make_scorer builds every configured kind") {
    ScorerConfig hash;
    CHECK(make_scorer(hash) != nullptr);

    ScorerConfig keyword;
    keyword.kind = "keyword_mock";
    keyword.keywords.push_back({"v1", 0, "a red car"});
    auto scorer = make_scorer(keyword);
    FrameSet chunk{"v1", {1, 2}, FrameOrigin::chunk(0)};
    CHECK(scorer->score(chunk, "red car") == doctest::Approx(1.0));
    CHECK(scorer->score(chunk, "blue boat") < 0.5);

    ScorerConfig remote;
    remote.kind = "remote";
    CHECK_THROWS_AS(make_scorer(remote), ConfigError);  // needs base_url
    remote.base_url = "http://localhost:1";
    CHECK(make_scorer(remote) != nullptr);

    ScorerConfig unknown;
    unknown.kind = "nope";
    CHECK_THROWS_AS(make_scorer(unknown), ConfigError);
}

TEST_SUITE_END();
