#pragma once

// Minimal continuous TransE / DistMult trainers. These exist to feed the
// quantizers, not to chase leaderboard numbers: margin-ranking SGD with
// uniform corruptions, seeded and single-threaded.
//
// Embedding file format (.dkgc), all little-endian:
//   magic      "DKGC" (4 bytes)
//   version    u16 = 1
//   model_kind u8   (0 = transe, 1 = distmult)
//   d          u32
//   n, m       u64, u64
//   entity matrix then relation matrix, column-major f64

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dkge/dataset.hpp"
#include "dkge/rng.hpp"

namespace dkge {

enum class BaselineKind : uint8_t { transe = 0, distmult = 1 };
enum class Norm : uint8_t { l1, l2 };

const char* baseline_kind_name(BaselineKind k);

struct ContinuousEmbedding {
    BaselineKind kind = BaselineKind::transe;
    uint32_t dim = 0;
    uint64_t n = 0;
    uint64_t m = 0;
    std::vector<double> entities;   // dim x n, column j at [j*dim, (j+1)*dim)
    std::vector<double> relations;  // dim x m

    std::span<const double> entity(uint64_t i) const { return {&entities[i * dim], dim}; }
    std::span<const double> relation(uint64_t i) const { return {&relations[i * dim], dim}; }
    std::span<double> entity(uint64_t i) { return {&entities[i * dim], dim}; }
    std::span<double> relation(uint64_t i) { return {&relations[i * dim], dim}; }
};

struct BaselineConfig {
    BaselineKind kind = BaselineKind::transe;
    uint32_t dim = 64;
    double margin = 1.0;
    double learning_rate = 0.01;
    uint32_t epochs = 100;
    Norm norm = Norm::l1;  // transe distance norm
    uint32_t negatives = 1;
    uint64_t seed = 1;

    void validate() const;
};

// -||h + r - t|| under the given norm; higher is better.
double transe_score(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, Norm norm);

// Trilinear sum_j h_j r_j t_j; on ±1 inputs this equals the packed kernel.
double distmult_score(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t);

struct BaselineFitResult {
    ContinuousEmbedding embedding;
    std::vector<double> loss_history;  // summed hinge loss per epoch
};

BaselineFitResult train_baseline(const Dataset& dataset, const BaselineConfig& config);

void write_embedding(const ContinuousEmbedding& emb, const std::filesystem::path& path);
ContinuousEmbedding read_embedding(const std::filesystem::path& path);

}  // namespace dkge
