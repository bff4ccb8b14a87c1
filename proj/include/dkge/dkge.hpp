#pragma once

// The DKGE learner: margin objective over corrupted triple pairs, discrete
// coordinate descent on entity and relation bits, centered-orthogonal
// auxiliary updates, and the alternating training loop.
//
// The corruption batch is sampled once at the start of fit() and reused, so
// the discrete system has a genuine fixed point and the zero-flip stop can
// fire; TrainConfig::resample_negatives switches to fresh draws per epoch.
// One epoch over the batch:
//   (1) mark active pairs (margin - s_pos + s_neg > 0)
//   (2) sweep entities 0..n-1, updating each column bit by bit
//   (3) re-mark active pairs
//   (4) sweep relations 0..m-1
//   (5) refresh the auxiliary matrices X, Y
//   (6) record the objective on the batch
//
// The per-bit rule: with everything else frozen, the objective is linear in
// one bit, so the bit moves to the sign of its coefficient
//   e_ij <- sign( sum_pos e'_j r_j - sum_neg e'_j r_j + 2 alpha x_ij )
// and keeps its value on an exact zero. Relation bits use h_j t_j sums and
// 2 beta y_ij. Self-loop triples (h == t) carry no signal for this rule and
// are excluded from the sums.

#include <cstdint>
#include <utility>
#include <vector>

#include "dkge/bitpack.hpp"
#include "dkge/dataset.hpp"
#include "dkge/linalg.hpp"
#include "dkge/rng.hpp"

namespace dkge {

struct ModelParams {
    BinaryCodeMatrix entities;   // n codes of k bits (columns of E)
    BinaryCodeMatrix relations;  // m codes of k bits (columns of R)
};

struct AuxiliaryParams {
    Matrix x;  // k x n
    Matrix y;  // k x m
};

struct TrainConfig {
    uint32_t k = 32;
    // Margin in score units (scores live in [-k, k]). < 0 means "use 2k":
    // with gamma = 2k no pair deactivates before its margin saturates, so the
    // sweeps act as exact coordinate descent on the batch.
    double gamma = -1.0;
    double alpha = 1e-7;
    double beta = 1e-7;
    uint32_t negatives_per_positive = 2;
    uint32_t max_epochs = 30;
    uint64_t seed = 1;
    double convergence_tol = 1e-4;
    bool filter_false_negatives = false;
    bool resample_negatives = false;  // fresh corruptions every epoch

    double resolved_gamma() const { return gamma < 0 ? 2.0 * k : gamma; }
    void validate() const;
};

enum class StopReason { not_run, max_epochs, zero_flips, objective_converged };
const char* stop_reason_name(StopReason r);

struct TrainState {
    uint32_t epoch = 0;
    // Eq-style objective on each epoch's pair batch, before the sweeps and
    // after the auxiliary refresh. pre/post pairs share the batch, so
    // post <= pre is the per-epoch monotonicity observable.
    std::vector<double> objective_pre;
    std::vector<double> objective;
    std::vector<uint64_t> entity_flips;
    std::vector<uint64_t> relation_flips;
    StopReason stop_reason = StopReason::not_run;
    Rng rng{1};
};

struct CorruptedPair {
    Triple positive;
    Triple corrupted;
    TriplePosition corrupted_position = TriplePosition::tail;
    bool active = true;
};

using PairBatch = std::vector<CorruptedPair>;

// E, R i.i.d. uniform ±1 from the seeded rng; X, Y from the auxiliary solve.
std::pair<ModelParams, AuxiliaryParams> init_params(uint64_t n, uint64_t m,
                                                    const TrainConfig& config, Rng& rng);

// c corruptions per positive, side chosen uniformly, replacement uniform over
// entities excluding the original one at that position. Draws that create a
// self-loop (or, with `filter`, a known-true triple) are resampled a bounded
// number of times, then the other side is tried; as a last resort the draw
// that merely differs from the positive is kept.
PairBatch sample_negatives(const TripleSet& triples, uint64_t n_entities, uint32_t c, Rng& rng,
                           const FilterIndex* filter = nullptr);

struct ObjectiveValue {
    double hinge = 0.0;    // sum of max(0, gamma - s_pos + s_neg)
    double trace_e = 0.0;  // tr(E^T X)
    double trace_r = 0.0;  // tr(R^T Y)
    double eq_trace = 0.0;     // hinge - 2a tr(E^T X) - 2b tr(R^T Y)
    double eq_distance = 0.0;  // hinge + a ||E - X||_F^2 + b ||R - Y||_F^2
};

// Both objective forms; for feasible X, Y they differ by exactly
// 2 a k n + 2 b k m.
ObjectiveValue hinge_objective(const ModelParams& model, const AuxiliaryParams& aux,
                               const PairBatch& batch, const TrainConfig& config);

// active <=> gamma - s_pos + s_neg > 0 under the current model.
void mark_active_pairs(const ModelParams& model, PairBatch& batch, double gamma);

// Updates one entity column against the given pairs (all of which must be
// active and mention the entity outside of self-loops). Returns flipped-bit
// count. The indexed overload avoids materializing per-entity sub-batches.
uint64_t dcd_update_entity(uint32_t entity, ModelParams& model, const AuxiliaryParams& aux,
                           const PairBatch& pairs_touching, double alpha);
uint64_t dcd_update_entity(uint32_t entity, ModelParams& model, const AuxiliaryParams& aux,
                           const PairBatch& batch, std::span<const uint32_t> pair_indices,
                           double alpha);

uint64_t dcd_update_relation(uint32_t relation, ModelParams& model, const AuxiliaryParams& aux,
                             const PairBatch& pairs_touching, double beta);
uint64_t dcd_update_relation(uint32_t relation, ModelParams& model, const AuxiliaryParams& aux,
                             const PairBatch& batch, std::span<const uint32_t> pair_indices,
                             double beta);

// X <- argmax tr(E^T X), Y <- argmax tr(R^T Y) over the centered-orthogonal
// sets; never decreases either trace.
AuxiliaryParams update_auxiliary(const ModelParams& model);

Matrix codes_as_matrix(const BinaryCodeMatrix& codes);  // k x count, entries ±1

// One full round over an existing batch: flags, entity sweep, re-flag,
// relation sweep, auxiliary refresh, objective bookkeeping. Mutates the
// batch's active flags.
void train_epoch(PairBatch& batch, ModelParams& model, AuxiliaryParams& aux, TrainState& state,
                 const TrainConfig& config);

// Convenience form that samples a fresh batch first (the resampling mode).
void train_epoch(const TripleSet& train, uint64_t n_entities, ModelParams& model,
                 AuxiliaryParams& aux, TrainState& state, const TrainConfig& config,
                 const FilterIndex* filter = nullptr);

struct FitResult {
    ModelParams model;
    AuxiliaryParams aux;
    TrainState state;
};

// Samples the corruption batch (once, unless config.resample_negatives), then
// runs epochs until a zero-flip round, relative objective change below
// convergence_tol, or max_epochs.
FitResult fit(const Dataset& dataset, const TrainConfig& config);

}  // namespace dkge
