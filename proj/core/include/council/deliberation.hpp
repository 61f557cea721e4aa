#pragma once
// One round's discussion mechanics: collect answers and reasons from every
// active agent, check for a strict-majority consensus, have every agent score
// every answer's reasoning, drop the lowest-scoring agent, and render the
// round digest that seeds the next round.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "council/agents.hpp"
#include "council/domain.hpp"
#include "council/perception.hpp"

namespace council {

// An agent as the orchestrator runs it: identity, backend, and the display
// label it keeps for the whole session ("Agent 1", "Agent 2", ...).
struct AgentRuntime {
    AgentProfile profile;
    AgentBackend* backend = nullptr;
    std::string label;
};

struct AnswerSet {
    std::vector<AgentReply> replies;  // one per active agent, same order
};

struct ScoreMatrix {
    std::vector<std::string> agent_ids;  // active agents, also the judge set
    std::vector<std::string> labels;
    std::vector<std::vector<int>> rows;  // rows[j][i] = judge j's score for agent i, in [1,10]
    std::vector<bool> neutral_row;       // judge j was unparseable or failed; row is all 5s
    std::vector<bool> failed_row;        // the judge call itself failed (subset of neutral_row)
};

struct EliminationResult {
    std::vector<int> totals;  // column sums, aligned with agent_ids
    std::size_t eliminated_index = 0;
};

struct HistoryDigest {
    int round = 0;
    std::vector<HistoryEntry> survivors;
    std::optional<RemovedEntry> removed;
    std::string rendered;
};

// Asks every active agent for its answer (with its own perceived frames) and
// then for the reason behind it. An agent with no perception outcome, or whose
// call fails, gets an invalid reply carrying the failure note; agents whose
// transport budget is exhausted are additionally reported through
// transport_dead.
AnswerSet collect_answers(const std::vector<AgentRuntime>& active,
                          const std::vector<std::optional<PerceptionOutcome>>& outcomes,
                          const QaTask& task, int round, bool subtitles_on,
                          std::uint64_t master_seed, int parallel_agents,
                          std::vector<std::string>* transport_dead = nullptr);

// The answer whose vote count strictly exceeds half the active agents; invalid
// replies never vote. Two agents therefore need unanimity.
std::optional<Option> check_consensus(const AnswerSet& answers);

// Every active agent judges all answers and reasons (text only, no frames).
// Unparseable or failed judgments contribute the neutral score to everyone.
// Requires at least two active agents.
ScoreMatrix judge_round(const std::vector<AgentRuntime>& active, const QaTask& task,
                        const AnswerSet& answers, int round, std::uint64_t master_seed,
                        int parallel_agents, std::vector<std::string>* transport_dead = nullptr);

// Column sums and the argmin agent; ties go to the lower selection accuracy
// (absent accuracy counts as 0), then the smaller agent id.
EliminationResult eliminate_lowest(const ScoreMatrix& matrix,
                                   const std::vector<std::optional<double>>& selection_accuracies);

// Digest of a completed round. Survivors keep their label order; the removed
// agent's entry closes with the removal sentence. Pass nullopt when the
// configured policy keeps all agents.
HistoryDigest summarize_history(int round, const std::vector<AgentRuntime>& active,
                                const AnswerSet& answers, const std::vector<int>& totals,
                                std::optional<std::size_t> eliminated_index);

}  // namespace council
