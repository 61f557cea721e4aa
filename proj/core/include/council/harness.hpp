#pragma once
// Dataset loading, accuracy evaluation over a team, and desk-scale protocol
// simulation with stochastic agents.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "council/config.hpp"
#include "council/orchestrator.hpp"

namespace council {

struct ManifestError : std::runtime_error {
    explicit ManifestError(const std::string& what, std::vector<std::string> errors = {})
        : std::runtime_error(what), errors(std::move(errors)) {}
    std::vector<std::string> errors;  // one per offending line, with line numbers
};

// Line-delimited JSON, one task per line. Required fields: task_id, video_id,
// frame_count, duration_s, question, options (object keyed A-D); optional:
// subtitles, answer, frame_locator. Every record passes validate_task; all
// problems are reported together with their line numbers.
std::vector<QaTask> load_manifest(const std::string& path);
std::vector<QaTask> parse_manifest_text(const std::string& text, const std::string& origin);

struct TaskOutcome {
    std::string task_id;
    std::optional<FinalAnswer> final;
    std::optional<bool> correct;  // absent when the task has no gold answer
    bool session_error = false;
    bool backend_failures = false;
    long frames = 0;
    double wall_ms = 0.0;
};

struct EvalReport {
    std::vector<TaskOutcome> tasks;
    std::optional<double> accuracy;  // over graded tasks only; errors count as wrong
    int graded = 0;
    int correct = 0;
    std::vector<int> round_histogram;  // [r-1] = sessions decided at round r
    int session_errors = 0;
    int sessions_with_failures = 0;
    double avg_frames_per_session = 0.0;
    double avg_wall_ms_per_session = 0.0;  // zero in deterministic runs

    nlohmann::json to_json() const;
    std::string human_table() const;
};

// Called once per finished session, in task order, e.g. to write transcripts.
using SessionObserver = std::function<void(const QaTask&, const SessionResult&)>;

// Runs the full protocol once per task (concurrently up to the session cap)
// and aggregates. Accuracy covers only tasks with gold answers; a session
// error counts as wrong.
EvalReport evaluate(const std::vector<QaTask>& tasks, const std::vector<AgentRuntime>& team,
                    SimilarityScorer& scorer, const RunConfig& config,
                    const SessionObserver& observer = {});

struct SimSpec {
    std::vector<double> accuracies;  // one stochastic agent per entry
    int option_count = 4;            // the data model fixes four options
    int trials = 1000;
    std::uint64_t seed = 0;
    JudgeMode judge_mode = JudgeMode::banded;
    double watch_whole_prob = 0.2;
    RunConfig config;  // max_rounds, terminal policy, perception overrides

    void validate() const;  // throws ConfigError on bad probabilities etc.
};

struct SimReport {
    int trials = 0;
    double round1_consensus_rate = 0.0;
    double round1_consensus_correct_rate = 0.0;  // consensus formed in round 1 on the gold answer
    double round1_wrong_consensus_rate = 0.0;    // consensus formed in round 1 on a wrong answer
    double final_accuracy = 0.0;
    long eliminations = 0;
    long eliminations_with_wrong_present = 0;
    long eliminations_removed_wrong = 0;
    double elimination_correctness = 0.0;  // removed-wrong / eliminations
    std::vector<int> stop_round_histogram;
    int session_errors = 0;

    nlohmann::json to_json() const;
    std::string human_table() const;
};

// The synthetic task fed to trial `index`: uniformly random gold letter so no
// policy can exploit letter priors.
QaTask make_synthetic_task(std::uint64_t seed, int index);

// Runs `trials` synthetic questions through the full protocol with stochastic
// agents. Bit-reproducible for a fixed spec.
SimReport simulate(const SimSpec& spec, const SessionObserver& observer = {});

}  // namespace council
