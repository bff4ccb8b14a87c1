#include "dkge/dkge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace dkge {

namespace {

int64_t pair_margin_violation_sign(const ModelParams& model, const CorruptedPair& p,
                                   double gamma) {
    const auto& e = model.entities;
    const auto& r = model.relations;
    const int64_t s_pos =
        triple_score(e.code(p.positive.h), r.code(p.positive.r), e.code(p.positive.t));
    const int64_t s_neg =
        triple_score(e.code(p.corrupted.h), r.code(p.corrupted.r), e.code(p.corrupted.t));
    return gamma - static_cast<double>(s_pos) + static_cast<double>(s_neg) > 0.0 ? 1 : 0;
}

// One signed occurrence of the updated item inside a triple.
struct EntityOccurrence {
    uint32_t other;     // the entity on the other side
    uint32_t relation;  // relation of the triple
    int sign;           // +1 positive triple, -1 corrupted triple
};

struct RelationOccurrence {
    uint32_t head;
    uint32_t tail;
    int sign;
};

void collect_entity_occurrences(uint32_t entity, const CorruptedPair& p,
                                std::vector<EntityOccurrence>& out) {
    const Triple& pos = p.positive;
    if (pos.h != pos.t) {
        if (pos.h == entity) out.push_back({pos.t, pos.r, +1});
        if (pos.t == entity) out.push_back({pos.h, pos.r, +1});
    }
    const Triple& neg = p.corrupted;
    if (neg.h != neg.t) {
        if (neg.h == entity) out.push_back({neg.t, neg.r, -1});
        if (neg.t == entity) out.push_back({neg.h, neg.r, -1});
    }
}

void collect_relation_occurrences(uint32_t relation, const CorruptedPair& p,
                                  std::vector<RelationOccurrence>& out) {
    const Triple& pos = p.positive;
    if (pos.r == relation && pos.h != pos.t) out.push_back({pos.h, pos.t, +1});
    const Triple& neg = p.corrupted;
    if (neg.r == relation && neg.h != neg.t) out.push_back({neg.h, neg.t, -1});
}

uint64_t apply_bit_rule(BinaryCodeMatrix& codes, uint32_t item, uint32_t k,
                        const std::vector<double>& coeff) {
    uint64_t flips = 0;
    for (uint32_t j = 0; j < k; ++j) {
        if (coeff[j] == 0.0) continue;  // exact zero keeps the previous bit
        const int target = coeff[j] > 0.0 ? +1 : -1;
        if (codes.sign_at(item, j) != target) {
            codes.set_sign(item, j, target);
            ++flips;
        }
    }
    return flips;
}

}  // namespace

void TrainConfig::validate() const {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (resolved_gamma() <= 0) throw std::invalid_argument("gamma must be positive");
    if (alpha < 0 || beta < 0) throw std::invalid_argument("alpha and beta must be >= 0");
    if (negatives_per_positive < 1)
        throw std::invalid_argument("negatives_per_positive must be >= 1");
}

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::not_run: return "not_run";
        case StopReason::max_epochs: return "max_epochs";
        case StopReason::zero_flips: return "zero_flips";
        case StopReason::objective_converged: return "objective_converged";
    }
    return "?";
}

Matrix codes_as_matrix(const BinaryCodeMatrix& codes) {
    Matrix m(codes.code_length(), codes.count());
    for (uint64_t i = 0; i < codes.count(); ++i)
        for (uint32_t j = 0; j < codes.code_length(); ++j)
            m.at(j, i) = static_cast<double>(codes.sign_at(i, j));
    return m;
}

std::pair<ModelParams, AuxiliaryParams> init_params(uint64_t n, uint64_t m,
                                                    const TrainConfig& config, Rng& rng) {
    if (n < 1 || m < 1) throw std::invalid_argument("need at least one entity and one relation");
    config.validate();
    ModelParams model{BinaryCodeMatrix(config.k, n), BinaryCodeMatrix(config.k, m)};
    std::vector<int8_t> signs(config.k);
    for (uint64_t i = 0; i < n; ++i) {
        for (auto& s : signs) s = static_cast<int8_t>(rng.sign());
        model.entities.set_code(i, signs);
    }
    for (uint64_t i = 0; i < m; ++i) {
        for (auto& s : signs) s = static_cast<int8_t>(rng.sign());
        model.relations.set_code(i, signs);
    }
    AuxiliaryParams aux = update_auxiliary(model);
    return {std::move(model), std::move(aux)};
}

PairBatch sample_negatives(const TripleSet& triples, uint64_t n_entities, uint32_t c, Rng& rng,
                           const FilterIndex* filter) {
    if (c < 1) throw std::invalid_argument("need at least one corruption per positive");
    if (n_entities < 2) throw std::invalid_argument("cannot corrupt with fewer than 2 entities");
    constexpr int kRetries = 50;

    PairBatch batch;
    batch.reserve(triples.size() * c);
    for (const Triple& pos : triples) {
        for (uint32_t rep = 0; rep < c; ++rep) {
            TriplePosition side =
                rng.below(2) == 0 ? TriplePosition::head : TriplePosition::tail;

            auto draw = [&](TriplePosition s) {
                const uint32_t original = s == TriplePosition::head ? pos.h : pos.t;
                auto e = static_cast<uint32_t>(rng.below(n_entities - 1));
                if (e >= original) ++e;
                Triple neg = pos;
                (s == TriplePosition::head ? neg.h : neg.t) = e;
                return neg;
            };

            CorruptedPair pair{pos, pos, side, true};
            bool settled = false;
            for (int side_try = 0; side_try < 2 && !settled; ++side_try) {
                for (int attempt = 0; attempt < kRetries; ++attempt) {
                    const Triple neg = draw(side);
                    if (neg.h == neg.t) continue;
                    if (filter != nullptr && filter->contains(neg)) continue;
                    pair.corrupted = neg;
                    pair.corrupted_position = side;
                    settled = true;
                    break;
                }
                if (!settled)
                    side = side == TriplePosition::head ? TriplePosition::tail
                                                        : TriplePosition::head;
            }
            if (!settled) {
                // Forced case (tiny vocabularies): keep a draw that merely
                // differs from the positive at the corrupted position.
                pair.corrupted = draw(side);
                pair.corrupted_position = side;
            }
            batch.push_back(pair);
        }
    }
    return batch;
}

ObjectiveValue hinge_objective(const ModelParams& model, const AuxiliaryParams& aux,
                               const PairBatch& batch, const TrainConfig& config) {
    const double gamma = config.resolved_gamma();
    ObjectiveValue v;
    for (const CorruptedPair& p : batch) {
        const auto& e = model.entities;
        const auto& r = model.relations;
        const auto s_pos = static_cast<double>(
            triple_score(e.code(p.positive.h), r.code(p.positive.r), e.code(p.positive.t)));
        const auto s_neg = static_cast<double>(
            triple_score(e.code(p.corrupted.h), r.code(p.corrupted.r), e.code(p.corrupted.t)));
        v.hinge += std::max(0.0, gamma - s_pos + s_neg);
    }

    const uint32_t k = model.entities.code_length();
    double frob_e = 0.0, frob_r = 0.0;
    for (uint64_t i = 0; i < model.entities.count(); ++i)
        for (uint32_t j = 0; j < k; ++j) {
            const double x = aux.x.at(j, i);
            const double e = model.entities.sign_at(i, j);
            v.trace_e += e * x;
            frob_e += (e - x) * (e - x);
        }
    for (uint64_t i = 0; i < model.relations.count(); ++i)
        for (uint32_t j = 0; j < k; ++j) {
            const double y = aux.y.at(j, i);
            const double r = model.relations.sign_at(i, j);
            v.trace_r += r * y;
            frob_r += (r - y) * (r - y);
        }

    v.eq_trace = v.hinge - 2.0 * config.alpha * v.trace_e - 2.0 * config.beta * v.trace_r;
    v.eq_distance = v.hinge + config.alpha * frob_e + config.beta * frob_r;
    return v;
}

void mark_active_pairs(const ModelParams& model, PairBatch& batch, double gamma) {
    for (CorruptedPair& p : batch)
        p.active = pair_margin_violation_sign(model, p, gamma) != 0;
}

uint64_t dcd_update_entity(uint32_t entity, ModelParams& model, const AuxiliaryParams& aux,
                           const PairBatch& batch, std::span<const uint32_t> pair_indices,
                           double alpha) {
    const uint32_t k = model.entities.code_length();
    std::vector<EntityOccurrence> occ;
    occ.reserve(pair_indices.size() * 2);
    for (uint32_t idx : pair_indices) {
        const CorruptedPair& p = batch[idx];
        if (!p.active) continue;
        const size_t before = occ.size();
        collect_entity_occurrences(entity, p, occ);
        if (occ.size() == before)
            throw std::invalid_argument("pair does not mention the updated entity");
    }

    std::vector<double> coeff(k);
    for (uint32_t j = 0; j < k; ++j) {
        double c = 2.0 * alpha * aux.x.at(j, entity);
        for (const EntityOccurrence& o : occ)
            c += o.sign * model.entities.sign_at(o.other, j) *
                 model.relations.sign_at(o.relation, j);
        coeff[j] = c;
    }
    return apply_bit_rule(model.entities, entity, k, coeff);
}

uint64_t dcd_update_entity(uint32_t entity, ModelParams& model, const AuxiliaryParams& aux,
                           const PairBatch& pairs_touching, double alpha) {
    std::vector<uint32_t> all(pairs_touching.size());
    std::iota(all.begin(), all.end(), 0u);
    return dcd_update_entity(entity, model, aux, pairs_touching, all, alpha);
}

uint64_t dcd_update_relation(uint32_t relation, ModelParams& model, const AuxiliaryParams& aux,
                             const PairBatch& batch, std::span<const uint32_t> pair_indices,
                             double beta) {
    const uint32_t k = model.relations.code_length();
    std::vector<RelationOccurrence> occ;
    occ.reserve(pair_indices.size() * 2);
    for (uint32_t idx : pair_indices) {
        const CorruptedPair& p = batch[idx];
        if (!p.active) continue;
        const size_t before = occ.size();
        collect_relation_occurrences(relation, p, occ);
        if (occ.size() == before)
            throw std::invalid_argument("pair does not use the updated relation");
    }

    std::vector<double> coeff(k);
    for (uint32_t j = 0; j < k; ++j) {
        double c = 2.0 * beta * aux.y.at(j, relation);
        for (const RelationOccurrence& o : occ)
            c += o.sign * model.entities.sign_at(o.head, j) * model.entities.sign_at(o.tail, j);
        coeff[j] = c;
    }
    return apply_bit_rule(model.relations, relation, k, coeff);
}

uint64_t dcd_update_relation(uint32_t relation, ModelParams& model, const AuxiliaryParams& aux,
                             const PairBatch& pairs_touching, double beta) {
    std::vector<uint32_t> all(pairs_touching.size());
    std::iota(all.begin(), all.end(), 0u);
    return dcd_update_relation(relation, model, aux, pairs_touching, all, beta);
}

AuxiliaryParams update_auxiliary(const ModelParams& model) {
    // A single-column factor is a degenerate case: Y1 = 0 forces Y = 0, and
    // tr(R^T Y) = 0 is already optimal.
    auto solve_or_zero = [](const BinaryCodeMatrix& codes) {
        if (codes.count() < 2) return Matrix(codes.code_length(), codes.count(), 0.0);
        return solve_orthogonal_auxiliary(codes_as_matrix(codes));
    };
    AuxiliaryParams aux;
    aux.x = solve_or_zero(model.entities);
    aux.y = solve_or_zero(model.relations);
    return aux;
}

void train_epoch(PairBatch& batch, ModelParams& model, AuxiliaryParams& aux, TrainState& state,
                 const TrainConfig& config) {
    config.validate();
    const double gamma = config.resolved_gamma();
    const uint64_t n = model.entities.count();
    const uint64_t m = model.relations.count();

    mark_active_pairs(model, batch, gamma);
    state.objective_pre.push_back(hinge_objective(model, aux, batch, config).eq_trace);

    // Entity sweep over the frozen active set.
    std::vector<std::vector<uint32_t>> touching(n);
    for (uint32_t idx = 0; idx < batch.size(); ++idx) {
        const CorruptedPair& p = batch[idx];
        if (!p.active) continue;
        uint32_t ids[4];
        size_t cnt = 0;
        if (p.positive.h != p.positive.t) {
            ids[cnt++] = p.positive.h;
            ids[cnt++] = p.positive.t;
        }
        if (p.corrupted.h != p.corrupted.t) {
            ids[cnt++] = p.corrupted.h;
            ids[cnt++] = p.corrupted.t;
        }
        std::sort(ids, ids + cnt);
        for (size_t i = 0; i < cnt; ++i)
            if (i == 0 || ids[i] != ids[i - 1]) touching[ids[i]].push_back(idx);
    }
    uint64_t entity_flips = 0;
    for (uint32_t i = 0; i < n; ++i)
        if (!touching[i].empty() || config.alpha > 0)
            entity_flips += dcd_update_entity(i, model, aux, batch, touching[i], config.alpha);

    // Relation sweep with refreshed activity flags.
    mark_active_pairs(model, batch, gamma);
    std::vector<std::vector<uint32_t>> rel_touching(m);
    for (uint32_t idx = 0; idx < batch.size(); ++idx)
        if (batch[idx].active) rel_touching[batch[idx].positive.r].push_back(idx);
    uint64_t relation_flips = 0;
    for (uint32_t i = 0; i < m; ++i)
        if (!rel_touching[i].empty() || config.beta > 0)
            relation_flips += dcd_update_relation(i, model, aux, batch, rel_touching[i],
                                                  config.beta);

    aux = update_auxiliary(model);

    state.objective.push_back(hinge_objective(model, aux, batch, config).eq_trace);
    state.entity_flips.push_back(entity_flips);
    state.relation_flips.push_back(relation_flips);
    ++state.epoch;
}

void train_epoch(const TripleSet& train, uint64_t n_entities, ModelParams& model,
                 AuxiliaryParams& aux, TrainState& state, const TrainConfig& config,
                 const FilterIndex* filter) {
    PairBatch batch =
        sample_negatives(train, n_entities, config.negatives_per_positive, state.rng, filter);
    train_epoch(batch, model, aux, state, config);
}

FitResult fit(const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    const SelfLoopRemoval cleaned = remove_self_loops(dataset.train);
    if (cleaned.triples.empty())
        throw std::invalid_argument("no training triples left after self-loop removal");

    FilterIndex filter;
    const FilterIndex* filter_ptr = nullptr;
    if (config.filter_false_negatives) {
        const Split train_only[] = {Split::train};
        filter = FilterIndex::build(dataset, train_only);
        filter_ptr = &filter;
    }

    const uint64_t n = dataset.vocab.entity_count();
    FitResult res;
    res.state.rng = Rng(config.seed);
    auto [model, aux] = init_params(n, dataset.vocab.relation_count(), config, res.state.rng);
    res.model = std::move(model);
    res.aux = std::move(aux);
    res.state.stop_reason = config.max_epochs == 0 ? StopReason::not_run : StopReason::max_epochs;

    PairBatch batch;
    for (uint32_t e = 0; e < config.max_epochs; ++e) {
        if (e == 0 || config.resample_negatives)
            batch = sample_negatives(cleaned.triples, n, config.negatives_per_positive,
                                     res.state.rng, filter_ptr);
        train_epoch(batch, res.model, res.aux, res.state, config);
        if (res.state.entity_flips.back() + res.state.relation_flips.back() == 0) {
            res.state.stop_reason = StopReason::zero_flips;
            break;
        }
        if (res.state.epoch >= 2) {
            const double prev = res.state.objective[res.state.epoch - 2];
            const double cur = res.state.objective[res.state.epoch - 1];
            if (std::abs(cur - prev) < config.convergence_tol * std::max(1.0, std::abs(prev))) {
                res.state.stop_reason = StopReason::objective_converged;
                break;
            }
        }
    }
    return res;
}

}  // namespace dkge
