#pragma once
// Corpus preparation for retrieval fine-tuning data: per-source clip listings
// are filtered by duration (5 s to 12 min inclusive), captions are rewritten
// to fit the retrieval encoder's context budget, clips with captions under 20
// tokens are dropped, and summary statistics are reported. Stage order is
// fixed and each stage is idempotent on already-processed records.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "council/agents.hpp"

namespace council {

enum class ClipStatus { kept, dropped_duration, dropped_caption, rewritten };

std::string_view clip_status_name(ClipStatus status);
std::optional<ClipStatus> clip_status_from_string(std::string_view name);

struct ClipRecord {
    std::string source;
    std::string clip_id;
    double duration_s = 0.0;
    std::string caption;
    int caption_tokens = 0;
    ClipStatus status = ClipStatus::kept;
    bool rewrite_failed = false;

    bool is_kept() const {
        return status == ClipStatus::kept || status == ClipStatus::rewritten;
    }
};

struct CorpusStats {
    int total_kept = 0;
    std::optional<double> mean_duration_s;      // absent when nothing is kept
    std::optional<double> mean_caption_tokens;  // absent when nothing is kept
    std::map<std::string, int> per_source_kept;
};

struct DurationBounds {
    double min_s = 5.0;
    double max_s = 720.0;  // "shorter than 5 s or longer than 12 min" are dropped; bounds stay
};

// Whitespace token count; the 20-token rule is counted this way so it is
// deterministic across machines and model tokenizers.
int count_tokens(std::string_view caption);

class CaptionRewriter {
  public:
    virtual ~CaptionRewriter() = default;
    // New caption text, or nullopt when rewriting failed (original kept, flagged).
    virtual std::optional<std::string> rewrite(const ClipRecord& clip) = 0;
};

class IdentityRewriter : public CaptionRewriter {
  public:
    std::optional<std::string> rewrite(const ClipRecord& clip) override { return clip.caption; }
};

class ScriptedRewriter : public CaptionRewriter {
  public:
    void set(const std::string& clip_id, std::string caption) {
        rewrites_[clip_id] = std::move(caption);
    }
    // Missing entries count as failures, mirroring a rewriter outage.
    std::optional<std::string> rewrite(const ClipRecord& clip) override;

  private:
    std::map<std::string, std::string> rewrites_;
};

// Rewrites through an agent backend using the caption-compression prompt.
class BackendRewriter : public CaptionRewriter {
  public:
    BackendRewriter(AgentBackend& backend, AgentProfile profile, int word_limit = 60,
                    std::uint64_t seed = 0)
        : backend_(backend), profile_(std::move(profile)), word_limit_(word_limit), seed_(seed) {}

    std::optional<std::string> rewrite(const ClipRecord& clip) override;

  private:
    AgentBackend& backend_;
    AgentProfile profile_;
    int word_limit_;
    std::uint64_t seed_;
};

// Per-source listing: {"clip_id":..,"start_s":..,"end_s":..,"caption":..} per
// line. Duration is end minus start; non-positive durations are rejected.
std::vector<ClipRecord> load_clip_listing(const std::string& path, const std::string& source);
std::vector<ClipRecord> parse_clip_listing(const std::string& text, const std::string& source,
                                           const std::string& origin);

// Manually screened clip ids, one per line; matching records never enter the
// pipeline. Returns how many were excluded.
int apply_exclusions(std::vector<ClipRecord>& clips, const std::set<std::string>& excluded_ids);

// Drops clips outside [min_s, max_s]; boundary values stay.
void filter_duration(std::vector<ClipRecord>& clips, DurationBounds bounds = {});

// Rewrites one clip's caption and recounts tokens; failure keeps the original
// caption and sets the flag.
ClipRecord rewrite_caption(ClipRecord clip, CaptionRewriter& rewriter);
void rewrite_captions(std::vector<ClipRecord>& clips, CaptionRewriter& rewriter);

// Drops kept clips whose caption has fewer than min_tokens tokens.
void filter_caption(std::vector<ClipRecord>& clips, int min_tokens = 20);

CorpusStats corpus_stats(const std::vector<ClipRecord>& clips);

// The whole pipeline in its fixed order: duration filter, caption rewriting,
// caption filter. Output order is deterministic (source, then clip id).
void process_corpus(std::vector<ClipRecord>& clips, CaptionRewriter& rewriter,
                    int min_tokens = 20, DurationBounds bounds = {});

std::string clips_to_jsonl(const std::vector<ClipRecord>& clips, bool kept_only);
std::string stats_to_json(const CorpusStats& stats);

}  // namespace council
