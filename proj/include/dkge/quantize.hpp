#pragma once

// Post-hoc hashing of continuous embeddings: sign thresholding, equal-width
// interval coding, and Lloyd-Max MSE-optimal coding, plus scoring for the
// quantized models in binary space or through reconstructed values.
//
// Level indices are written as natural binary, most significant bit first,
// with bit 1 <-> +1. A shared scalar quantizer is fitted on the pooled
// entity + relation values.
//
// Sidecar (.quant.txt) records: method, source model kind, dim, levels /
// thresholds (lloyd) or lo / hi (uniform), bits per value.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dkge/baselines.hpp"
#include "dkge/bitpack.hpp"

namespace dkge {

enum class QuantizeMethod : uint8_t { sign, uniform, lloyd };
const char* quantize_method_name(QuantizeMethod m);
QuantizeMethod parse_quantize_method(const std::string& name);  // sign|equal|lloyd

struct UniformQuantizer {
    double lo = 0.0;
    double hi = 1.0;
    uint32_t levels = 2;

    double cell_width() const { return (hi - lo) / levels; }
    uint32_t bits_per_value() const;
    uint32_t encode(double v) const;  // floor((v-lo)/width) clamped to levels-1
    double decode(uint32_t index) const;  // cell midpoint
};

// >= 2 distinct values required; constant input is a degenerate range.
UniformQuantizer fit_uniform(std::span<const double> values, uint32_t levels);

struct LloydQuantizer {
    std::vector<double> levels;      // ascending representatives
    std::vector<double> thresholds;  // ascending midpoints, size levels-1
    std::vector<double> mse_history;

    uint32_t bits_per_value() const;
    uint32_t encode(double v) const;  // nearest level via threshold search
    double decode(uint32_t index) const { return levels[index]; }
};

// Alternates threshold/centroid updates until max level movement < tol or
// max_iter; empty cells are re-seeded to their boundary midpoints. Requires
// at least `levels` distinct values.
LloydQuantizer fit_lloyd(std::span<const double> values, uint32_t levels, double tol = 1e-9,
                         uint32_t max_iter = 200);

// Shared decode interface for the scorer.
struct ScalarQuantizer {
    QuantizeMethod method = QuantizeMethod::sign;
    std::optional<UniformQuantizer> uniform;
    std::optional<LloydQuantizer> lloyd;

    uint32_t bits_per_value() const;
    double decode(uint32_t index) const;
};

struct QuantizedModel {
    BinaryCodeMatrix entities;
    BinaryCodeMatrix relations;
    BaselineKind source_kind = BaselineKind::transe;
    uint32_t dim = 0;  // source dimension d; code length k = bits_per_value * d
    ScalarQuantizer quantizer;
};

// sign: k = d, bit = +1 iff value >= 0. uniform/lloyd: the quantizer is fit
// on pooled entity+relation values and k = bits_per_value * d.
QuantizedModel quantize_embedding(const ContinuousEmbedding& cont, QuantizeMethod method,
                                  uint32_t levels);

enum class ScoreMode : uint8_t { binary, reconstruct };

// binary: the source model's scoring function applied to the ±1 code vectors
// (transe uses the L1 norm; distmult equals the packed kernel).
// reconstruct: codes are decoded to cell representatives first; requires the
// quantizer for uniform/lloyd codes.
double quantized_score(BaselineKind kind, PackedCodeView h, PackedCodeView r, PackedCodeView t,
                       ScoreMode mode, const ScalarQuantizer* quantizer = nullptr);

void write_quantizer_sidecar(const QuantizedModel& model, const std::filesystem::path& path);
// Reads the sidecar written above; the code matrices are loaded separately.
QuantizedModel read_quantizer_sidecar(const std::filesystem::path& path);

}  // namespace dkge
