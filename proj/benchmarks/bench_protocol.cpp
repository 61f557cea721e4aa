#include <benchmark/benchmark.h>

#include "council/deliberation.hpp"
#include "council/domain.hpp"
#include "council/harness.hpp"
#include "council/perception.hpp"
#include "council/prompts.hpp"
#include "council/rng.hpp"

using namespace council;

namespace {

void BM_ParseAnswerLetter(benchmark::State& state) {
    const std::string reply =
        "Considering the frames, the subtitles, and the stated options, the best answer is: C";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_answer_letter(reply));
    }
}
BENCHMARK(BM_ParseAnswerLetter);

void BM_SelectChunks(benchmark::State& state) {
    SplitMix64 rng(1);
    std::vector<ChunkScore> scores;
    for (int i = 0; i < 6; ++i) {
        double total = rng.next_double() * 1.6;
        scores.push_back({i, total / 2, total / 2, total});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_chunks(scores, 0.8));
    }
}
BENCHMARK(BM_SelectChunks);

void BM_JudgePromptRender(benchmark::State& state) {
    std::vector<AgentSlot> agents = {
        {"Agent 1", "A", "the opening scene shows the event directly"},
        {"Agent 2", "B", "the subtitles contradict option A"},
        {"Agent 3", "C", "the closing shot implies a different outcome"},
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_judge_prompt("What happens at the end?", agents));
    }
}
BENCHMARK(BM_JudgePromptRender);

void BM_EliminateLowest(benchmark::State& state) {
    ScoreMatrix matrix;
    matrix.agent_ids = {"a1", "a2", "a3"};
    matrix.labels = {"Agent 1", "Agent 2", "Agent 3"};
    matrix.rows = {{8, 6, 9}, {7, 7, 8}, {9, 5, 9}};
    matrix.neutral_row = {false, false, false};
    matrix.failed_row = {false, false, false};
    std::vector<std::optional<double>> accuracies(3, std::nullopt);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eliminate_lowest(matrix, accuracies));
    }
}
BENCHMARK(BM_EliminateLowest);

void BM_SimulatedSession(benchmark::State& state) {
    SimSpec spec;
    spec.accuracies = {0.7, 0.7, 0.7};
    spec.trials = static_cast<int>(state.range(0));
    spec.seed = 99;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(spec));
    }
    state.SetItemsProcessed(state.iterations() * spec.trials);
}
BENCHMARK(BM_SimulatedSession)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
