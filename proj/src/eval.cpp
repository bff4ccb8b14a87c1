#include "dkge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dkge/io.hpp"

namespace dkge {

const char* tie_policy_name(TiePolicy p) {
    switch (p) {
        case TiePolicy::midrank: return "midrank";
        case TiePolicy::optimistic: return "optimistic";
        case TiePolicy::pessimistic: return "pessimistic";
    }
    return "?";
}

TiePolicy parse_tie_policy(const std::string& name) {
    if (name == "midrank") return TiePolicy::midrank;
    if (name == "optimistic") return TiePolicy::optimistic;
    if (name == "pessimistic") return TiePolicy::pessimistic;
    throw std::invalid_argument("unknown tie policy: " + name);
}

const char* direction_name(Direction d) { return d == Direction::head ? "head" : "tail"; }

std::vector<double> Scorer::score_candidates(const Triple& triple, Direction direction) const {
    std::vector<double> out(entity_count());
    Triple probe = triple;
    uint32_t& slot = direction == Direction::head ? probe.h : probe.t;
    for (uint64_t e = 0; e < out.size(); ++e) {
        slot = static_cast<uint32_t>(e);
        out[e] = score(probe.h, probe.r, probe.t);
    }
    return out;
}

double rank_from_counts(uint64_t strictly_higher, uint64_t equal, TiePolicy policy) {
    switch (policy) {
        case TiePolicy::optimistic: return 1.0 + static_cast<double>(strictly_higher);
        case TiePolicy::pessimistic:
            return 1.0 + static_cast<double>(strictly_higher) + static_cast<double>(equal);
        case TiePolicy::midrank: break;
    }
    return 1.0 + static_cast<double>(strictly_higher) + static_cast<double>(equal) / 2.0;
}

RankRecord rank_entity(const Triple& triple, Direction direction, const Scorer& scorer,
                       const FilterIndex* filter, TiePolicy policy) {
    const std::vector<double> scores = scorer.score_candidates(triple, direction);
    const uint32_t target = direction == Direction::head ? triple.h : triple.t;
    if (target >= scores.size()) throw std::out_of_range("triple index outside entity universe");
    const double target_score = scores[target];

    RankRecord rec;
    rec.triple = triple;
    rec.direction = direction;
    rec.candidates_ranked = 1;  // the target itself is never filtered
    Triple probe = triple;
    uint32_t& slot = direction == Direction::head ? probe.h : probe.t;
    for (uint64_t e = 0; e < scores.size(); ++e) {
        if (e == target) continue;
        if (filter != nullptr) {
            slot = static_cast<uint32_t>(e);
            if (filter->contains(probe)) continue;
        }
        ++rec.candidates_ranked;
        if (scores[e] > target_score)
            ++rec.strictly_higher;
        else if (scores[e] == target_score)
            ++rec.equal;
    }
    rec.rank = rank_from_counts(rec.strictly_higher, rec.equal, policy);
    return rec;
}

MetricsReport aggregate_records(std::vector<RankRecord> records, TiePolicy policy) {
    MetricsReport rep;
    rep.records = std::move(records);
    rep.record_count = rep.records.size();
    rep.hits = {{1, 0.0}, {3, 0.0}, {10, 0.0}};
    if (rep.records.empty()) return rep;
    for (RankRecord& r : rep.records) {
        r.rank = rank_from_counts(r.strictly_higher, r.equal, policy);
        rep.mr += r.rank;
        rep.mrr += 1.0 / r.rank;
        for (auto& [n, frac] : rep.hits)
            if (r.rank <= static_cast<double>(n)) frac += 1.0;
    }
    const auto count = static_cast<double>(rep.record_count);
    rep.mr /= count;
    rep.mrr /= count;
    for (auto& [n, frac] : rep.hits) frac /= count;
    return rep;
}

MetricsReport evaluate(const TripleSet& test, const Scorer& scorer, const FilterIndex* filter,
                       const EvalConfig& config) {
    if (!config.eval_head && !config.eval_tail)
        throw std::invalid_argument("at least one ranking direction must be enabled");
    if (test.empty()) throw std::invalid_argument("empty test set");
    std::vector<RankRecord> records;
    records.reserve(test.size() * 2);
    for (const Triple& x : test) {
        if (config.eval_head)
            records.push_back(rank_entity(x, Direction::head, scorer, filter, config.ties));
        if (config.eval_tail)
            records.push_back(rank_entity(x, Direction::tail, scorer, filter, config.ties));
    }
    return aggregate_records(std::move(records), config.ties);
}

uint64_t memory_footprint_bits(const ModelDescriptor& desc) {
    const uint64_t items = desc.n + desc.m;
    if (desc.storage == ModelDescriptor::Storage::binary) return desc.code_bits * items;
    return static_cast<uint64_t>(desc.continuous_value_bits) * desc.code_bits * items;
}

double DkgeScorer::score(uint32_t h, uint32_t r, uint32_t t) const {
    return static_cast<double>(triple_score(model_.entities.code(h), model_.relations.code(r),
                                            model_.entities.code(t)));
}

std::vector<double> DkgeScorer::score_candidates(const Triple& triple, Direction d) const {
    const uint32_t fixed = d == Direction::head ? triple.t : triple.h;
    const TriplePosition pos = d == Direction::head ? TriplePosition::head : TriplePosition::tail;
    const std::vector<int64_t> raw = score_all_candidates(
        model_.entities.code(fixed), model_.relations.code(triple.r), model_.entities, pos);
    return {raw.begin(), raw.end()};
}

double ContinuousScorer::score(uint32_t h, uint32_t r, uint32_t t) const {
    return emb_.kind == BaselineKind::transe
               ? transe_score(emb_.entity(h), emb_.relation(r), emb_.entity(t), norm_)
               : distmult_score(emb_.entity(h), emb_.relation(r), emb_.entity(t));
}

double QuantizedScorer::score(uint32_t h, uint32_t r, uint32_t t) const {
    return quantized_score(model_.source_kind, model_.entities.code(h),
                           model_.relations.code(r), model_.entities.code(t), mode_,
                           &model_.quantizer);
}

void write_metrics_file(const std::filesystem::path& path, const MetricsReport& report,
                        const EvalConfig& config,
                        const std::vector<std::pair<std::string, std::string>>& extra) {
    io::AtomicFile file(path);
    auto& out = file.stream();
    out.precision(9);
    out << "# dkge metrics\n";
    out << "# MR is tie-policy sensitive at discrete code lengths; all three\n";
    out << "# policies are reported below (primary: " << tie_policy_name(config.ties) << ").\n";
    out << "tie_policy = " << tie_policy_name(config.ties) << "\n";
    out << "filter_splits = ";
    for (size_t i = 0; i < config.filter_splits.size(); ++i)
        out << (i ? "," : "") << split_name(config.filter_splits[i]);
    out << "\n";
    out << "directions = ";
    if (config.eval_head) out << "head";
    if (config.eval_head && config.eval_tail) out << ",";
    if (config.eval_tail) out << "tail";
    out << "\n";
    for (const auto& [k, v] : extra) out << k << " = " << v << "\n";
    out << "count = " << report.record_count << "\n";
    out << "memory_bits = " << report.memory_bits << "\n";
    out << "mr = " << report.mr << "\n";
    out << "mrr = " << report.mrr << "\n";
    for (const auto& [n, frac] : report.hits) out << "hits_at_" << n << " = " << frac << "\n";
    for (TiePolicy p : {TiePolicy::midrank, TiePolicy::optimistic, TiePolicy::pessimistic}) {
        if (p == config.ties) continue;
        const MetricsReport alt = aggregate_records(report.records, p);
        out << "mr_" << tie_policy_name(p) << " = " << alt.mr << "\n";
        out << "mrr_" << tie_policy_name(p) << " = " << alt.mrr << "\n";
        for (const auto& [n, frac] : alt.hits)
            out << "hits_at_" << n << "_" << tie_policy_name(p) << " = " << frac << "\n";
    }
    file.commit();
}

void write_rank_records_csv(const std::filesystem::path& path,
                            const std::vector<RankRecord>& records) {
    io::AtomicFile file(path);
    auto& out = file.stream();
    out.precision(9);
    out << "h,r,t,direction,rank,candidates_ranked,strictly_higher,equal\n";
    for (const RankRecord& r : records)
        out << r.triple.h << ',' << r.triple.r << ',' << r.triple.t << ','
            << direction_name(r.direction) << ',' << r.rank << ',' << r.candidates_ranked << ','
            << r.strictly_higher << ',' << r.equal << "\n";
    file.commit();
}

}  // namespace dkge
