#pragma once
// Seeded simulator backend. Per-agent accuracy p drives answers: the gold
// answer with probability p, otherwise a uniformly random wrong option. All
// draws use the request seed, so a given (master seed, task, agent, round,
// kind) always replays the same reply regardless of call order or threads.

#include <map>
#include <string>

#include "council/agents.hpp"

namespace council {

enum class JudgeMode {
    banded,  // gold-matching answers scored from [high_lo, high_hi], others from [low_lo, low_hi]
    oracle,  // gold-matching answers score 10, others 1
};

struct StochasticParams {
    double default_accuracy = 0.5;
    double watch_whole_prob = 0.2;  // P(decide_watch answers Yes)
    JudgeMode judge_mode = JudgeMode::banded;
    int high_lo = 7, high_hi = 10;
    int low_lo = 1, low_hi = 4;
};

class StochasticBackend : public AgentBackend {
  public:
    explicit StochasticBackend(StochasticParams params = {}) : params_(params) {}

    void set_accuracy(const std::string& agent_id, double p) { accuracy_[agent_id] = p; }
    double accuracy(const std::string& agent_id) const;

    const StochasticParams& params() const { return params_; }

    std::string invoke(const AgentProfile& profile, const AgentRequest& request) override;

  private:
    StochasticParams params_;
    std::map<std::string, double> accuracy_;
};

}  // namespace council
