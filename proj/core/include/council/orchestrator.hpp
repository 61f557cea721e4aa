#pragma once
// The per-question state machine: rounds of perception, answering, consensus
// checking, judging and elimination, with early stopping the moment a strict
// majority forms and a terminal policy when the round cap runs out. Every step
// is logged as a trace event; identical fixtures, config and seeds replay to
// byte-identical transcripts.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "council/config.hpp"
#include "council/deliberation.hpp"
#include "council/domain.hpp"
#include "council/perception.hpp"

namespace council {

struct FinalAnswer {
    Option answer = Option::A;
    enum class DecidedBy { consensus, terminal_policy } decided_by = DecidedBy::consensus;
    int round_decided = 1;
};

std::string_view decided_by_name(FinalAnswer::DecidedBy d);

// One protocol step. The timestamp is the event's position in the session's
// log (a logical clock), which keeps transcripts replayable; wall-clock time
// is added only in non-deterministic runs.
struct TraceEvent {
    int timestamp = 0;
    std::string session_id;
    std::string kind;  // perceive | answer | consensus | judge | eliminate | finalize | error
    nlohmann::json payload;

    std::string to_line() const;
};

struct SessionResult {
    std::optional<FinalAnswer> final;  // absent when the session errored out
    std::vector<RoundRecord> rounds;
    std::vector<TraceEvent> events;  // populated when collect_events is set
    bool backend_failures = false;
    bool session_error = false;
    std::string error;
    long total_sampled_frames = 0;  // sum of per-agent frame set sizes across rounds
    int rounds_run = 0;
};

// Runs one question to completion. The team keeps its order; labels are
// assigned from it ("Agent 1", ...) and stay stable for the whole session.
SessionResult run_question(const QaTask& task, const std::vector<AgentRuntime>& team,
                           SimilarityScorer& scorer, const RunConfig& config,
                           bool collect_events = true);

// Assigns session labels by team position.
std::vector<AgentRuntime> label_team(std::vector<AgentRuntime> team);

std::string transcript_to_jsonl(const std::vector<TraceEvent>& events);

}  // namespace council
