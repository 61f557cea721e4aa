#include "doctest.h"

#include "council/perception.hpp"
#include "council/rng.hpp"
#include "council/scripted_backend.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <set>

using namespace council;

namespace {

VideoRef video_of(int frames) { return {"v-test", frames, 480.0, "frames/{video_id}/{index}.jpg"}; }

// Independent statement of the selection rule: everything strictly above the
// threshold, else the single argmax with ties to the smallest index.
std::vector<int> brute_force_select(const std::vector<ChunkScore>& scores, double threshold) {
    std::vector<int> above;
    for (const auto& s : scores) {
        if (s.total > threshold) above.push_back(s.chunk_index);
    }
    if (!above.empty()) {
        std::sort(above.begin(), above.end());
        return above;
    }
    int best = scores.front().chunk_index;
    double best_total = scores.front().total;
    for (const auto& s : scores) {
        if (s.total > best_total) {
            best_total = s.total;
            best = s.chunk_index;
        }
    }
    return {best};
}

std::vector<ChunkScore> scores_from_totals(const std::vector<double>& totals) {
    std::vector<ChunkScore> scores;
    for (std::size_t i = 0; i < totals.size(); ++i) {
        scores.push_back({static_cast<int>(i), totals[i] / 2, totals[i] / 2, totals[i]});
    }
    return scores;
}

class ConstantScorer : public SimilarityScorer {
  public:
    explicit ConstantScorer(double value) : value_(value) {}
    double score(const FrameSet&, std::string_view) override { return value_; }

  private:
    double value_;
};

// Scores chunks from a fixed per-chunk table, independent of the query.
class TableScorer : public SimilarityScorer {
  public:
    explicit TableScorer(std::vector<double> half_totals) : half_(std::move(half_totals)) {}
    double score(const FrameSet& frames, std::string_view) override {
        REQUIRE(frames.origin.kind == FrameOriginKind::chunk);
        return half_[static_cast<std::size_t>(frames.origin.chunk_index)];
    }

  private:
    std::vector<double> half_;
};

class ThrowingScorer : public SimilarityScorer {
  public:
    double score(const FrameSet& frames, std::string_view) override {
        if (frames.origin.chunk_index == 2) throw std::runtime_error("backend offline");
        return 0.1;
    }
};

}  // namespace

TEST_SUITE_BEGIN("perception");

TEST_CASE("rough_sample draws distinct sorted indices, deterministic per seed") {
    FrameSet tiny = rough_sample(video_of(4), 4, 1);
    CHECK(tiny.indices == std::vector<int>{0, 1, 2, 3});
    CHECK(rough_sample(video_of(2), 4, 1).indices == std::vector<int>{0, 1});

    FrameSet a = rough_sample(video_of(1000), 4, 7);
    FrameSet b = rough_sample(video_of(1000), 4, 7);
    CHECK(a.indices == b.indices);
    CHECK(a.indices.size() == 4);
    CHECK(std::is_sorted(a.indices.begin(), a.indices.end()));
    CHECK(std::set<int>(a.indices.begin(), a.indices.end()).size() == 4);
    for (int idx : a.indices) CHECK((idx >= 0 && idx < 1000));
    CHECK(a.indices != rough_sample(video_of(1000), 4, 8).indices);
    CHECK(a.origin.kind == FrameOriginKind::rough);
}

TEST_CASE("global_sample spaces indices evenly") {
    CHECK(global_sample(video_of(16), 16).indices ==
          std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
    std::vector<int> expected;
    for (int j = 0; j < 16; ++j) expected.push_back(j * 10);
    CHECK(global_sample(video_of(160), 16).indices == expected);
    CHECK(global_sample(video_of(8), 16).indices == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(global_sample(video_of(160), 16).origin.kind == FrameOriginKind::global);
}

TEST_CASE("make_chunks partitions contiguously with near-equal sizes") {
    auto chunks = make_chunks(video_of(600), 6, 16, 3);
    REQUIRE(chunks.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(chunks[static_cast<std::size_t>(i)].begin == i * 100);
        CHECK(chunks[static_cast<std::size_t>(i)].end == (i + 1) * 100);
        CHECK(chunks[static_cast<std::size_t>(i)].sampled.indices.size() == 16);
        for (int idx : chunks[static_cast<std::size_t>(i)].sampled.indices) {
            CHECK(idx >= chunks[static_cast<std::size_t>(i)].begin);
            CHECK(idx < chunks[static_cast<std::size_t>(i)].end);
        }
    }

    auto uneven = make_chunks(video_of(601), 6, 16, 3);
    std::vector<int> sizes;
    for (const auto& c : uneven) sizes.push_back(c.end - c.begin);
    CHECK(std::count(sizes.begin(), sizes.end(), 101) == 1);
    CHECK(std::count(sizes.begin(), sizes.end(), 100) == 5);
    CHECK(uneven.front().begin == 0);
    CHECK(uneven.back().end == 601);

    auto again = make_chunks(video_of(600), 6, 16, 3);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(chunks[i].sampled.indices == again[i].sampled.indices);
    }

    auto small = make_chunks(video_of(30), 6, 16, 3);
    for (const auto& c : small) {
        CHECK(c.sampled.indices.size() == static_cast<std::size_t>(c.end - c.begin));
    }
}

TEST_CASE("score_chunks sums the two similarities per chunk, order preserved") {
    auto chunks = make_chunks(video_of(600), 6, 4, 1);

    class TwoValueScorer : public SimilarityScorer {
      public:
        double score(const FrameSet& frames, std::string_view text) override {
            if (frames.origin.chunk_index == 2) return text == "key" ? 0.4 : 0.5;
            return 0.0;
        }
    } scorer;

    auto scores = score_chunks(chunks, "key", "question", scorer);
    REQUIRE(scores.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(scores[static_cast<std::size_t>(i)].chunk_index == i);
    CHECK(scores[2].key_sim == doctest::Approx(0.4));
    CHECK(scores[2].question_sim == doctest::Approx(0.5));
    CHECK(scores[2].total == doctest::Approx(0.9));

    ConstantScorer zero(0.0);
    for (const auto& s : score_chunks(chunks, "k", "q", zero)) CHECK(s.total == 0.0);
}

TEST_CASE("scorer failures surface with the chunk index") {
    auto chunks = make_chunks(video_of(600), 6, 4, 1);
    ThrowingScorer scorer;
    try {
        score_chunks(chunks, "k", "q", scorer);
        FAIL("expected ScorerError");
    } catch (const ScorerError& e) {
        CHECK(e.chunk_index == 2);
        CHECK(std::string(e.what()).find("chunk 2") != std::string::npos);
    }
}

TEST_CASE("select_chunks examples: threshold, argmax fallback, multi-select") {
    CHECK(select_chunks(scores_from_totals({0.81, 0.2, 0.2, 0.2, 0.2, 0.2}), 0.8) ==
          std::vector<int>{0});
    CHECK(select_chunks(scores_from_totals({0.5, 0.6, 0.7, 0.79, 0.3, 0.1}), 0.8) ==
          std::vector<int>{3});
    CHECK(select_chunks(scores_from_totals({0.9, 0.85, 0.2, 0.2, 0.2, 0.2}), 0.8) ==
          std::vector<int>{0, 1});
    // argmax ties break to the smallest index
    CHECK(select_chunks(scores_from_totals({0.3, 0.7, 0.7, 0.1}), 0.8) == std::vector<int>{1});
    CHECK_THROWS_AS(select_chunks({}, 0.8), std::invalid_argument);
}

TEST_CASE("select_chunks equals the brute-force rule over randomized vectors") {
    SplitMix64 rng(20250809);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> totals;
        for (int i = 0; i < 6; ++i) totals.push_back(rng.next_double() * 1.6);
        auto scores = scores_from_totals(totals);
        CHECK(select_chunks(scores, 0.8) == brute_force_select(scores, 0.8));
    }
}

TEST_CASE("selection is never empty and shifting every total preserves the argmax fallback") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> totals;
        for (int i = 0; i < 6; ++i) totals.push_back(rng.next_double() * 0.5);  // all below 0.8
        auto base = select_chunks(scores_from_totals(totals), 0.8);
        REQUIRE(base.size() == 1);
        std::vector<double> shifted = totals;
        for (auto& t : shifted) t -= 0.3;  // still below threshold, argmax unchanged
        CHECK(select_chunks(scores_from_totals(shifted), 0.8) == base);
    }
}

TEST_CASE("perceive: a Yes decision yields the globally sampled whole-video view") {
    QaTask task = test_support::make_task("t-watch");
    ScriptedBackend backend;
    backend.add_reply("a1", task.task_id, RequestKind::decide_watch, 1, "Yes.");
    AgentProfile profile{"a1", BackendKind::scripted, std::nullopt, std::nullopt};
    ConstantScorer scorer(0.0);

    PerceptionOutcome outcome =
        perceive(profile, backend, task, 1, std::nullopt, scorer, PerceptionParams{}, true, 11);
    CHECK(outcome.mode == PerceptionOutcome::Mode::whole_video);
    CHECK(outcome.decided_watch_whole);
    CHECK(outcome.frames.indices.size() == 16);
    CHECK(outcome.frames.origin.kind == FrameOriginKind::global);
    CHECK_FALSE(outcome.key_info.has_value());
}

TEST_CASE("perceive: a No decision retrieves the chunks above threshold") {
    QaTask task = test_support::make_task("t-retrieve");
    ScriptedBackend backend;
    backend.add_reply("a1", task.task_id, RequestKind::decide_watch, 1, "No.");
    backend.add_reply("a1", task.task_id, RequestKind::key_info, 1, "the red car near the bridge");
    AgentProfile profile{"a1", BackendKind::scripted, std::nullopt, std::nullopt};

    TableScorer scorer({0.45, 0.1, 0.42, 0.1, 0.1, 0.1});  // totals 0.9, 0.2, 0.84, ...

    PerceptionOutcome outcome =
        perceive(profile, backend, task, 1, std::nullopt, scorer, PerceptionParams{}, true, 11);
    CHECK(outcome.mode == PerceptionOutcome::Mode::retrieved);
    REQUIRE(outcome.selected_chunks.has_value());
    CHECK(*outcome.selected_chunks == std::vector<int>{0, 2});
    CHECK(outcome.frames.indices.size() == 32);  // two chunks of 16
    CHECK(outcome.frames.origin.kind == FrameOriginKind::assembled);
    CHECK(outcome.key_info == "the red car near the bridge");

    // frames must come from the selected chunks' ranges
    auto chunks = make_chunks(task.video, 6, 16, derive_seed(11, {task.task_id, "chunks"}));
    for (int idx : outcome.frames.indices) {
        bool inside = false;
        for (int c : *outcome.selected_chunks) {
            if (idx >= chunks[static_cast<std::size_t>(c)].begin &&
                idx < chunks[static_cast<std::size_t>(c)].end) {
                inside = true;
            }
        }
        CHECK(inside);
    }
}

TEST_CASE("perceive round 2 regenerates key info from history and always retrieves") {
    QaTask task = test_support::make_task("t-round2");
    ScriptedBackend backend;
    backend.add_reply("a1", task.task_id, RequestKind::summarize, 2, "look near the end");
    AgentProfile profile{"a1", BackendKind::scripted, std::nullopt, std::nullopt};
    ConstantScorer scorer(0.3);  // below threshold: argmax fallback, single chunk

    PerceptionOutcome outcome = perceive(profile, backend, task, 2,
                                         std::optional<std::string>("Agent 1's answer is: A."),
                                         scorer, PerceptionParams{}, true, 11);
    CHECK(outcome.mode == PerceptionOutcome::Mode::retrieved);
    CHECK(outcome.key_info == "look near the end");
    REQUIRE(outcome.selected_chunks.has_value());
    CHECK(outcome.selected_chunks->size() == 1);
    CHECK(outcome.frames.indices.size() == 16);
}

TEST_CASE("two agents with different key info can retrieve different chunks") {
    QaTask task = test_support::make_task("t-differ");
    ScriptedBackend backend;
    backend.add_reply("a1", task.task_id, RequestKind::decide_watch, 1, "No.");
    backend.add_reply("a2", task.task_id, RequestKind::decide_watch, 1, "No.");
    backend.add_reply("a1", task.task_id, RequestKind::key_info, 1, "the dog in the garden");
    backend.add_reply("a2", task.task_id, RequestKind::key_info, 1, "the cake in the kitchen");
    AgentProfile a1{"a1", BackendKind::scripted, std::nullopt, std::nullopt};
    AgentProfile a2{"a2", BackendKind::scripted, std::nullopt, std::nullopt};

    KeywordMockScorer scorer;
    scorer.set_chunk_text(task.video.video_id, 1, "a dog runs through the garden");
    scorer.set_chunk_text(task.video.video_id, 4, "a cake sits in the kitchen");

    PerceptionOutcome o1 =
        perceive(a1, backend, task, 1, std::nullopt, scorer, PerceptionParams{}, true, 11);
    PerceptionOutcome o2 =
        perceive(a2, backend, task, 1, std::nullopt, scorer, PerceptionParams{}, true, 11);
    REQUIRE(o1.selected_chunks.has_value());
    REQUIRE(o2.selected_chunks.has_value());
    CHECK(*o1.selected_chunks != *o2.selected_chunks);
}

TEST_CASE("frame cap trims the lowest-scoring selected chunks first") {
    auto chunks = make_chunks(video_of(600), 6, 16, 5);
    auto scores = scores_from_totals({1.2, 0.9, 1.5, 0.85, 0.2, 0.2});
    std::vector<int> selected = select_chunks(scores, 0.8);
    REQUIRE(selected == std::vector<int>{0, 1, 2, 3});

    FrameSet frames = assemble_frames(chunks, scores, selected, 40);
    // 4x16 = 64 > 40: drop chunk 3 (0.85) then chunk 1 (0.9) -> 32 frames
    CHECK(selected == std::vector<int>{0, 2});
    CHECK(frames.indices.size() == 32);
    CHECK(std::is_sorted(frames.indices.begin(), frames.indices.end()));

    // a cap below a single chunk truncates it rather than returning nothing
    std::vector<int> one = select_chunks(scores_from_totals({0.1, 0.1, 0.1, 0.1, 0.1, 0.9}), 0.8);
    FrameSet few = assemble_frames(chunks, scores_from_totals({0.1, 0.1, 0.1, 0.1, 0.1, 0.9}),
                                   one, 5);
    CHECK(few.indices.size() == 5);
}

TEST_CASE("hash mock scorer is deterministic and sensitive to its inputs") {
    HashMockScorer scorer(3);
    FrameSet chunk0{"v1", {0, 1}, FrameOrigin::chunk(0)};
    FrameSet chunk1{"v1", {50, 51}, FrameOrigin::chunk(1)};
    CHECK(scorer.score(chunk0, "text") == scorer.score(chunk0, "text"));
    CHECK(scorer.score(chunk0, "text") != scorer.score(chunk1, "text"));
    CHECK(scorer.score(chunk0, "text") != scorer.score(chunk0, "other"));
    double v = scorer.score(chunk0, "text");
    CHECK((v >= 0.0 && v < 1.0));
}

TEST_SUITE_END();
