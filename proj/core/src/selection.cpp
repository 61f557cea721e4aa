#include "council/selection.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "council/parallel.hpp"
#include "council/rng.hpp"

namespace council {

SelectionSubset sample_subset(const std::vector<std::string>& dataset_task_ids, int size,
                              std::uint64_t seed) {
    if (dataset_task_ids.empty()) throw std::invalid_argument("sample_subset: empty dataset");
    if (size < 1) throw std::invalid_argument("sample_subset: size must be >= 1");

    SelectionSubset subset;
    subset.seed = seed;
    subset.requested_size = size;
    int n = static_cast<int>(dataset_task_ids.size());
    if (size >= n) {
        subset.task_ids = dataset_task_ids;
        subset.clamped = size > n;
        return subset;
    }
    SplitMix64 rng(derive_seed(seed, {"subset"}));
    for (int pos : sample_distinct_sorted(n, size, rng)) {
        subset.task_ids.push_back(dataset_task_ids[static_cast<std::size_t>(pos)]);
    }
    return subset;
}

PseudoLabel pseudo_label(const std::vector<Answer>& answers) {
    int counts[4] = {0, 0, 0, 0};
    int voters = 0;
    for (const auto& a : answers) {
        if (!a) continue;
        ++counts[option_char(*a) - 'A'];
        ++voters;
    }
    if (voters == 0) throw std::invalid_argument("pseudo_label: every answer is invalid");
    int best = 0;
    for (int i = 1; i < 4; ++i) {
        if (counts[i] > counts[best]) best = i;
    }
    bool tie = false;
    for (int i = 0; i < 4; ++i) {
        if (i != best && counts[i] == counts[best]) tie = true;
    }
    // On ties `best` is already the lexicographically smallest letter because
    // the scan only replaces on strictly greater counts.
    PseudoLabel out;
    out.label = static_cast<Option>('A' + best);
    out.tie = tie;
    return out;
}

SelectionReport rank_agents(const AnswerTable& table, const SelectionSubset& subset,
                            int team_size) {
    if (table.agent_ids.empty()) throw std::invalid_argument("rank_agents: no agents");
    if (table.task_ids.empty()) throw std::invalid_argument("rank_agents: no tasks");
    for (const auto& row : table.answers) {
        if (row.size() != table.task_ids.size()) {
            throw std::invalid_argument("rank_agents: ragged answer table");
        }
    }

    SelectionReport report;
    report.subset = subset;

    std::vector<int> matches(table.agent_ids.size(), 0);
    for (std::size_t t = 0; t < table.task_ids.size(); ++t) {
        std::vector<Answer> column;
        column.reserve(table.agent_ids.size());
        for (std::size_t a = 0; a < table.agent_ids.size(); ++a) {
            column.push_back(table.answers[a][t]);
        }
        PseudoLabel label = pseudo_label(column);
        report.pseudo_labels[table.task_ids[t]] = label;
        for (std::size_t a = 0; a < table.agent_ids.size(); ++a) {
            if (column[a] && *column[a] == label.label) ++matches[a];
        }
    }

    auto subset_size = static_cast<double>(table.task_ids.size());
    for (std::size_t a = 0; a < table.agent_ids.size(); ++a) {
        report.accuracies[table.agent_ids[a]] = static_cast<double>(matches[a]) / subset_size;
    }

    std::vector<std::size_t> order(table.agent_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (matches[x] != matches[y]) return matches[x] > matches[y];
        return table.agent_ids[x] < table.agent_ids[y];
    });
    auto k = static_cast<std::size_t>(std::max(1, team_size));
    for (std::size_t i = 0; i < order.size() && i < k; ++i) {
        report.team.push_back(table.agent_ids[order[i]]);
    }
    return report;
}

AnswerTable gather_selection_answers(const std::vector<SelectionAgent>& agents,
                                     const std::vector<QaTask>& tasks,
                                     SimilarityScorer& scorer, const PerceptionParams& params,
                                     bool subtitles_on, std::uint64_t master_seed,
                                     int parallel_agents) {
    AnswerTable table;
    for (const auto& a : agents) table.agent_ids.push_back(a.profile.agent_id);
    for (const auto& t : tasks) table.task_ids.push_back(t.task_id);
    table.answers.assign(agents.size(), std::vector<Answer>(tasks.size(), std::nullopt));

    std::mutex failures_mutex;
    parallel_for_indexed(agents.size() * tasks.size(), parallel_agents, [&](std::size_t i) {
        std::size_t a = i / tasks.size();
        std::size_t t = i % tasks.size();
        const auto& agent = agents[a];
        const QaTask& task = tasks[t];
        try {
            PerceptionOutcome outcome =
                perceive(agent.profile, *agent.backend, task, 1, std::nullopt, scorer, params,
                         subtitles_on, master_seed);
            AgentRequest req;
            req.kind = RequestKind::answer;
            req.task = &task;
            req.frames = outcome.frames;
            req.bindings = standard_bindings(task, outcome.frames, subtitles_on);
            req.round = 1;
            req.seed = request_seed(master_seed, task.task_id, agent.profile.agent_id,
                                    RequestKind::answer, 1);
            table.answers[a][t] = parse_answer_letter(agent.backend->invoke(agent.profile, req));
        } catch (const FixtureMissError&) {
            throw;  // scripted runs must not silently skip
        } catch (const BackendError&) {
            // the unreachable agent simply scores no match on this task
            std::lock_guard<std::mutex> lock(failures_mutex);
            ++table.backend_failures[agent.profile.agent_id];
        }
    });
    return table;
}

}  // namespace council
