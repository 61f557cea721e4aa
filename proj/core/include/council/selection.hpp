#pragma once
// Team pre-selection by pseudo-label voting over an unlabeled subset: every
// library agent answers every subset task, the plurality answer becomes the
// pseudo label, agents are ranked by agreement with it, and the top k form
// the team. Gold labels are never consulted.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "council/agents.hpp"
#include "council/domain.hpp"
#include "council/perception.hpp"

namespace council {

struct SelectionSubset {
    std::vector<std::string> task_ids;  // in dataset order
    std::uint64_t seed = 0;
    int requested_size = 0;
    bool clamped = false;  // requested size exceeded the dataset, whole set returned
};

struct PseudoLabel {
    Option label = Option::A;
    bool tie = false;  // plurality was tied; lexicographically smallest letter chosen
};

struct SelectionReport {
    SelectionSubset subset;
    std::map<std::string, double> accuracies;          // agent -> pseudo accuracy in [0,1]
    std::map<std::string, PseudoLabel> pseudo_labels;  // task -> label
    std::vector<std::string> team;                     // top-k ids, accuracy descending
};

// The per-agent answers for one subset, agent-major: answers[a][t] aligns with
// agent_ids[a] and task_ids[t].
struct AnswerTable {
    std::vector<std::string> agent_ids;
    std::vector<std::string> task_ids;
    std::vector<std::vector<Answer>> answers;
    std::map<std::string, int> backend_failures;  // agent -> failed (agent, task) calls
};

// Uniform sample without replacement, deterministic per seed; task order
// follows the dataset. Oversized requests return the whole dataset with the
// clamped flag set. Throws on an empty dataset.
SelectionSubset sample_subset(const std::vector<std::string>& dataset_task_ids, int size,
                              std::uint64_t seed);

// Plurality answer; invalid answers never vote. On ties the lexicographically
// smallest tied letter wins and the tie flag is set. Throws when every answer
// is invalid.
PseudoLabel pseudo_label(const std::vector<Answer>& answers);

// Accuracy of each agent against the pseudo labels (matches / subset size,
// invalid answers stay in the denominator); team = top-k by accuracy with ties
// broken by agent id ascending.
SelectionReport rank_agents(const AnswerTable& table, const SelectionSubset& subset, int team_size);

struct SelectionAgent {
    AgentProfile profile;
    AgentBackend* backend = nullptr;
};

// Gathers one answer per (agent, task) through the round-1 perception + answer
// path with reflection disabled. parallel_agents bounds concurrent calls.
AnswerTable gather_selection_answers(const std::vector<SelectionAgent>& agents,
                                     const std::vector<QaTask>& tasks,
                                     SimilarityScorer& scorer, const PerceptionParams& params,
                                     bool subtitles_on, std::uint64_t master_seed,
                                     int parallel_agents);

}  // namespace council
