#pragma once

// Filtered link-prediction ranking: every entity is substituted at the probed
// position, known-true substitutions are removed (never the target itself),
// and the target's rank aggregates into MR / MRR / Hits@N.
//
// Discrete scores collide heavily (range [-k, k] with fixed parity over tens
// of thousands of candidates), so the tie policy materially moves MR; records
// carry the (strictly-higher, equal) counts and reports include all three
// policies.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include "dkge/baselines.hpp"
#include "dkge/bitpack.hpp"
#include "dkge/dataset.hpp"
#include "dkge/dkge.hpp"
#include "dkge/quantize.hpp"

namespace dkge {

enum class TiePolicy : uint8_t { midrank, optimistic, pessimistic };
const char* tie_policy_name(TiePolicy p);
TiePolicy parse_tie_policy(const std::string& name);

enum class Direction : uint8_t { head, tail };
const char* direction_name(Direction d);

struct EvalConfig {
    std::vector<Split> filter_splits{Split::train, Split::valid, Split::test};
    TiePolicy ties = TiePolicy::midrank;
    bool eval_head = true;
    bool eval_tail = true;
};

// Triple scorer over a fixed entity universe; higher scores more plausible.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual uint64_t entity_count() const = 0;
    virtual double score(uint32_t h, uint32_t r, uint32_t t) const = 0;
    // Scores of all candidate substitutions at `direction`; the default loops
    // score(). Overrides must match it exactly.
    virtual std::vector<double> score_candidates(const Triple& triple, Direction direction) const;
};

struct RankRecord {
    Triple triple;
    Direction direction = Direction::tail;
    double rank = 0.0;  // fractional under midrank
    uint64_t candidates_ranked = 0;
    uint64_t strictly_higher = 0;  // among unfiltered competitors
    uint64_t equal = 0;            // score ties, target excluded
};

double rank_from_counts(uint64_t strictly_higher, uint64_t equal, TiePolicy policy);

// filter == nullptr ranks against the raw candidate list.
RankRecord rank_entity(const Triple& triple, Direction direction, const Scorer& scorer,
                       const FilterIndex* filter, TiePolicy policy);

struct MetricsReport {
    double mr = 0.0;
    double mrr = 0.0;
    std::map<int, double> hits;  // N -> fraction with rank <= N, N in {1,3,10}
    uint64_t record_count = 0;
    uint64_t memory_bits = 0;  // filled by the caller via memory_footprint_bits
    std::vector<RankRecord> records;
};

MetricsReport evaluate(const TripleSet& test, const Scorer& scorer, const FilterIndex* filter,
                       const EvalConfig& config);

// Re-aggregates MR/MRR/hits from records under a (possibly different) policy.
MetricsReport aggregate_records(std::vector<RankRecord> records, TiePolicy policy);

struct ModelDescriptor {
    enum class Storage : uint8_t { binary, continuous } storage = Storage::binary;
    uint64_t code_bits = 0;  // k for binary models, d for continuous
    uint64_t n = 0;
    uint64_t m = 0;
    uint32_t continuous_value_bits = 32;
};

uint64_t memory_footprint_bits(const ModelDescriptor& desc);

// Concrete scorers.
class DkgeScorer : public Scorer {
public:
    explicit DkgeScorer(const ModelParams& model) : model_(model) {}
    uint64_t entity_count() const override { return model_.entities.count(); }
    double score(uint32_t h, uint32_t r, uint32_t t) const override;
    std::vector<double> score_candidates(const Triple& triple, Direction d) const override;

private:
    const ModelParams& model_;
};

class ContinuousScorer : public Scorer {
public:
    ContinuousScorer(const ContinuousEmbedding& emb, Norm norm) : emb_(emb), norm_(norm) {}
    uint64_t entity_count() const override { return emb_.n; }
    double score(uint32_t h, uint32_t r, uint32_t t) const override;

private:
    const ContinuousEmbedding& emb_;
    Norm norm_;
};

class QuantizedScorer : public Scorer {
public:
    QuantizedScorer(const QuantizedModel& model, ScoreMode mode) : model_(model), mode_(mode) {}
    uint64_t entity_count() const override { return model_.entities.count(); }
    double score(uint32_t h, uint32_t r, uint32_t t) const override;

private:
    const QuantizedModel& model_;
    ScoreMode mode_;
};

// Metrics emission (key = value text plus per-record CSV).
void write_metrics_file(const std::filesystem::path& path, const MetricsReport& report,
                        const EvalConfig& config,
                        const std::vector<std::pair<std::string, std::string>>& extra);
void write_rank_records_csv(const std::filesystem::path& path,
                            const std::vector<RankRecord>& records);

}  // namespace dkge
