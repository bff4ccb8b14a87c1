#pragma once

// Naive ±1-array reimplementations of the learner's inner quantities, used to
// cross-check the packed implementation bit for bit.

#include <cstdint>
#include <vector>

#include "dkge/dkge.hpp"

namespace dkge::test {

struct NaiveModel {
    std::vector<std::vector<int8_t>> entities;
    std::vector<std::vector<int8_t>> relations;

    static NaiveModel from(const ModelParams& m) {
        NaiveModel n;
        n.entities.reserve(m.entities.count());
        for (uint64_t i = 0; i < m.entities.count(); ++i)
            n.entities.push_back(m.entities.unpack_code(i));
        n.relations.reserve(m.relations.count());
        for (uint64_t i = 0; i < m.relations.count(); ++i)
            n.relations.push_back(m.relations.unpack_code(i));
        return n;
    }
};

inline int64_t naive_score(const NaiveModel& m, const Triple& x) {
    const auto& h = m.entities[x.h];
    const auto& r = m.relations[x.r];
    const auto& t = m.entities[x.t];
    int64_t sum = 0;
    for (size_t j = 0; j < h.size(); ++j) sum += int64_t{h[j]} * r[j] * t[j];
    return sum;
}

// Frozen surrogate over the given pairs: sum of (gamma - s_pos + s_neg) minus
// the trace penalty restricted to the updated column. Self-loop triples are
// scored as 0 so that they shift the surrogate by a constant only, mirroring
// their exclusion from training.
inline double naive_entity_surrogate(const NaiveModel& m, uint32_t entity,
                                     const PairBatch& pairs, double alpha, const Matrix& x,
                                     double gamma) {
    double total = 0.0;
    for (const CorruptedPair& p : pairs) {
        const double s_pos =
            p.positive.h == p.positive.t ? 0.0 : static_cast<double>(naive_score(m, p.positive));
        const double s_neg = p.corrupted.h == p.corrupted.t
                                 ? 0.0
                                 : static_cast<double>(naive_score(m, p.corrupted));
        total += gamma - s_pos + s_neg;
    }
    for (size_t j = 0; j < m.entities[entity].size(); ++j)
        total -= 2.0 * alpha * m.entities[entity][j] * x.at(j, entity);
    return total;
}

inline double naive_relation_surrogate(const NaiveModel& m, uint32_t relation,
                                       const PairBatch& pairs, double beta, const Matrix& y,
                                       double gamma) {
    double total = 0.0;
    for (const CorruptedPair& p : pairs) {
        const double s_pos =
            p.positive.h == p.positive.t ? 0.0 : static_cast<double>(naive_score(m, p.positive));
        const double s_neg = p.corrupted.h == p.corrupted.t
                                 ? 0.0
                                 : static_cast<double>(naive_score(m, p.corrupted));
        total += gamma - s_pos + s_neg;
    }
    for (size_t j = 0; j < m.relations[relation].size(); ++j)
        total -= 2.0 * beta * m.relations[relation][j] * y.at(j, relation);
    return total;
}

// Exhaustive per-bit two-way minimization of the frozen surrogate, starting
// from the snapshot column. A tie keeps the pre-update bit.
inline std::vector<int8_t> oracle_entity_column(NaiveModel snapshot, uint32_t entity,
                                                const PairBatch& active_pairs, double alpha,
                                                const Matrix& x, double gamma) {
    const size_t k = snapshot.entities[entity].size();
    for (size_t j = 0; j < k; ++j) {
        const int8_t original = snapshot.entities[entity][j];
        snapshot.entities[entity][j] = +1;
        const double plus = naive_entity_surrogate(snapshot, entity, active_pairs, alpha, x, gamma);
        snapshot.entities[entity][j] = -1;
        const double minus =
            naive_entity_surrogate(snapshot, entity, active_pairs, alpha, x, gamma);
        snapshot.entities[entity][j] = plus < minus ? int8_t{+1}
                                        : minus < plus ? int8_t{-1}
                                                       : original;
    }
    return snapshot.entities[entity];
}

inline std::vector<int8_t> oracle_relation_column(NaiveModel snapshot, uint32_t relation,
                                                  const PairBatch& active_pairs, double beta,
                                                  const Matrix& y, double gamma) {
    const size_t k = snapshot.relations[relation].size();
    for (size_t j = 0; j < k; ++j) {
        const int8_t original = snapshot.relations[relation][j];
        snapshot.relations[relation][j] = +1;
        const double plus =
            naive_relation_surrogate(snapshot, relation, active_pairs, beta, y, gamma);
        snapshot.relations[relation][j] = -1;
        const double minus =
            naive_relation_surrogate(snapshot, relation, active_pairs, beta, y, gamma);
        snapshot.relations[relation][j] = plus < minus ? int8_t{+1}
                                           : minus < plus ? int8_t{-1}
                                                          : original;
    }
    return snapshot.relations[relation];
}

}  // namespace dkge::test
