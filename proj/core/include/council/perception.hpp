#pragma once
// Frame selection per agent and round: a rough glance, the watch-whole vs
// retrieve decision, agent-generated key information, and chunk retrieval by
// summed similarity against the key info and the question.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "council/agents.hpp"
#include "council/domain.hpp"

namespace council {

// Scores a frame set against a text query. Scores are opaque reals; only the
// threshold / argmax rules interpret them, and the usable threshold depends on
// the scorer's own scale. Implementations must tolerate concurrent calls.
class SimilarityScorer {
  public:
    virtual ~SimilarityScorer() = default;
    virtual double score(const FrameSet& frames, std::string_view text) = 0;
};

struct ScorerError : std::runtime_error {
    ScorerError(int chunk_index, const std::string& what)
        : std::runtime_error("scorer failed on chunk " + std::to_string(chunk_index) + ": " + what),
          chunk_index(chunk_index) {}
    int chunk_index;
};

// Deterministic pseudo-scores from a seeded hash of (video id, chunk index,
// query text); uniform in [0, 1). Good for replayable tests.
class HashMockScorer : public SimilarityScorer {
  public:
    explicit HashMockScorer(std::uint64_t seed = 0) : seed_(seed) {}
    double score(const FrameSet& frames, std::string_view text) override;

  private:
    std::uint64_t seed_;
};

// Readable fixtures: each (video id, chunk index) carries a description, and
// the score is the fraction of distinct query words present in it.
class KeywordMockScorer : public SimilarityScorer {
  public:
    void set_chunk_text(const std::string& video_id, int chunk_index, std::string text);
    double score(const FrameSet& frames, std::string_view text) override;

  private:
    std::map<std::string, std::string> chunk_texts_;  // "video\x1findex" -> text
};

class HttpTransport;  // remote_backend.hpp

// Client for a remote scoring service: POST /score with the frame references
// and the query text, response {"score": <real>}.
class RemoteScorer : public SimilarityScorer {
  public:
    RemoteScorer(std::string base_url, std::unique_ptr<HttpTransport> transport = nullptr);
    ~RemoteScorer() override;
    double score(const FrameSet& frames, std::string_view text) override;

  private:
    std::string base_url_;
    std::unique_ptr<HttpTransport> transport_;
};

struct PerceptionParams {
    int rough_sample_size = 4;
    int global_sample_size = 16;
    int chunk_count = 6;
    int chunk_sample_size = 16;
    double threshold = 0.8;
    int frame_cap = 96;  // bound on assembled frames per agent; lowest-scoring chunks trimmed first
};

struct Chunk {
    int index = 0;
    int begin = 0;  // half-open frame-index interval [begin, end)
    int end = 0;
    FrameSet sampled;
};

struct ChunkScore {
    int chunk_index = 0;
    double key_sim = 0.0;
    double question_sim = 0.0;
    double total = 0.0;  // key_sim + question_sim, exactly
};

struct PerceptionOutcome {
    enum class Mode { whole_video, retrieved };

    std::string agent_id;
    Mode mode = Mode::retrieved;
    FrameSet frames;
    std::optional<std::string> key_info;
    std::optional<std::vector<ChunkScore>> chunk_scores;
    std::optional<std::vector<int>> selected_chunks;  // ascending chunk indices
    bool decided_watch_whole = false;
};

// n distinct uniformly drawn indices, sorted; all frames when frame_count <= n.
FrameSet rough_sample(const VideoRef& video, int n, std::uint64_t seed);

// Evenly spaced indices: floor(j * frame_count / n); all frames when fewer exist.
FrameSet global_sample(const VideoRef& video, int n);

// Contiguous near-equal partition of [0, frame_count); earlier chunks take the
// remainder. Each chunk carries a seeded random sample clamped to its size.
std::vector<Chunk> make_chunks(const VideoRef& video, int chunk_count, int sample_size,
                               std::uint64_t seed);

// Per chunk: scorer(frames, key_info) + scorer(frames, question), order preserved.
std::vector<ChunkScore> score_chunks(const std::vector<Chunk>& chunks, const std::string& key_info,
                                     const std::string& question, SimilarityScorer& scorer);

// Chunks with total strictly above the threshold; when none qualify, the
// single highest-scoring chunk (ties to the smallest index). Never empty.
std::vector<int> select_chunks(const std::vector<ChunkScore>& scores, double threshold);

// Concatenates the selected chunks' samples in chunk order, trimming the
// lowest-scoring selected chunks first when the cap would be exceeded.
FrameSet assemble_frames(const std::vector<Chunk>& chunks, const std::vector<ChunkScore>& scores,
                         std::vector<int>& selected, int frame_cap);

// Full per-agent, per-round perception. Round 1 runs the rough glance and the
// watch-whole decision; later rounds regenerate key info from the previous
// round's history and always retrieve. history_text required iff round > 1.
PerceptionOutcome perceive(const AgentProfile& profile, AgentBackend& backend, const QaTask& task,
                           int round, const std::optional<std::string>& history_text,
                           SimilarityScorer& scorer, const PerceptionParams& params,
                           bool subtitles_on, std::uint64_t master_seed);

}  // namespace council
