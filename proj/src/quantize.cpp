#include "dkge/quantize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dkge/io.hpp"

namespace dkge {

namespace {

uint32_t bits_for_levels(uint32_t levels) {
    return levels <= 1 ? 1 : 32 - std::countl_zero(levels - 1);  // ceil(log2 L)
}

size_t count_distinct(std::span<const double> values, size_t needed) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    size_t distinct = sorted.empty() ? 0 : 1;
    for (size_t i = 1; i < sorted.size() && distinct < needed; ++i)
        if (sorted[i] != sorted[i - 1]) ++distinct;
    return distinct;
}

// Writes one scalar's level index as natural binary, MSB first.
void write_value_bits(BinaryCodeMatrix& codes, uint64_t item, uint32_t value_index,
                      uint32_t bits, uint32_t level_index) {
    for (uint32_t b = 0; b < bits; ++b) {
        const int sign = (level_index >> (bits - 1 - b)) & 1u ? +1 : -1;
        codes.set_sign(item, value_index * bits + b, sign);
    }
}

uint32_t read_value_bits(PackedCodeView code, uint32_t value_index, uint32_t bits) {
    uint32_t index = 0;
    for (uint32_t b = 0; b < bits; ++b) {
        const uint32_t j = value_index * bits + b;
        const uint32_t bit = (code.words[j / 64] >> (j % 64)) & 1u;
        index = (index << 1) | bit;
    }
    return index;
}

}  // namespace

const char* quantize_method_name(QuantizeMethod m) {
    switch (m) {
        case QuantizeMethod::sign: return "sign";
        case QuantizeMethod::uniform: return "equal";
        case QuantizeMethod::lloyd: return "lloyd";
    }
    return "?";
}

QuantizeMethod parse_quantize_method(const std::string& name) {
    if (name == "sign") return QuantizeMethod::sign;
    if (name == "equal" || name == "uniform") return QuantizeMethod::uniform;
    if (name == "lloyd") return QuantizeMethod::lloyd;
    throw std::invalid_argument("unknown quantize method: " + name);
}

uint32_t UniformQuantizer::bits_per_value() const { return bits_for_levels(levels); }

uint32_t UniformQuantizer::encode(double v) const {
    const auto raw = static_cast<int64_t>(std::floor((v - lo) / cell_width()));
    return static_cast<uint32_t>(std::clamp<int64_t>(raw, 0, levels - 1));
}

double UniformQuantizer::decode(uint32_t index) const {
    return lo + (index + 0.5) * cell_width();
}

UniformQuantizer fit_uniform(std::span<const double> values, uint32_t levels) {
    if (levels < 2) throw std::invalid_argument("need at least 2 levels");
    if (count_distinct(values, 2) < 2)
        throw std::invalid_argument("degenerate range: need at least 2 distinct values");
    UniformQuantizer q;
    q.levels = levels;
    q.lo = *std::min_element(values.begin(), values.end());
    q.hi = *std::max_element(values.begin(), values.end());
    return q;
}

uint32_t LloydQuantizer::bits_per_value() const {
    return bits_for_levels(static_cast<uint32_t>(levels.size()));
}

uint32_t LloydQuantizer::encode(double v) const {
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), v);
    return static_cast<uint32_t>(it - thresholds.begin());
}

LloydQuantizer fit_lloyd(std::span<const double> values, uint32_t levels, double tol,
                         uint32_t max_iter) {
    if (levels < 2) throw std::invalid_argument("need at least 2 levels");
    if (count_distinct(values, levels) < levels)
        throw std::invalid_argument("need at least as many distinct values as levels");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> prefix(sorted.size() + 1, 0.0);
    for (size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
    const double lo = sorted.front();
    const double hi = sorted.back();

    LloydQuantizer q;
    q.levels.resize(levels);
    q.thresholds.resize(levels - 1);
    for (uint32_t i = 0; i < levels; ++i) q.levels[i] = lo + (i + 0.5) * (hi - lo) / levels;

    for (uint32_t iter = 0; iter < max_iter; ++iter) {
        for (uint32_t i = 0; i + 1 < levels; ++i)
            q.thresholds[i] = 0.5 * (q.levels[i] + q.levels[i + 1]);

        // Cell i = [thr[i-1], thr[i]); boundaries via binary search on the
        // sorted samples, means via prefix sums.
        double movement = 0.0;
        double mse = 0.0;
        size_t begin = 0;
        for (uint32_t i = 0; i < levels; ++i) {
            const size_t end =
                i + 1 < levels
                    ? static_cast<size_t>(std::lower_bound(sorted.begin(), sorted.end(),
                                                           q.thresholds[i]) -
                                          sorted.begin())
                    : sorted.size();
            double new_level;
            if (end > begin) {
                new_level = (prefix[end] - prefix[begin]) / static_cast<double>(end - begin);
            } else {
                const double left = i == 0 ? lo : q.thresholds[i - 1];
                const double right = i + 1 < levels ? q.thresholds[i] : hi;
                new_level = 0.5 * (left + right);
            }
            movement = std::max(movement, std::abs(new_level - q.levels[i]));
            q.levels[i] = new_level;
            for (size_t s = begin; s < end; ++s) {
                const double err = sorted[s] - new_level;
                mse += err * err;
            }
            begin = end;
        }
        q.mse_history.push_back(mse / static_cast<double>(sorted.size()));
        if (movement < tol) break;
    }
    for (uint32_t i = 0; i + 1 < levels; ++i)
        q.thresholds[i] = 0.5 * (q.levels[i] + q.levels[i + 1]);
    for (uint32_t i = 0; i + 1 < levels; ++i)
        if (!(q.levels[i] < q.levels[i + 1]))
            throw std::runtime_error("Lloyd-Max levels failed to stay strictly ascending");
    return q;
}

uint32_t ScalarQuantizer::bits_per_value() const {
    switch (method) {
        case QuantizeMethod::sign: return 1;
        case QuantizeMethod::uniform: return uniform->bits_per_value();
        case QuantizeMethod::lloyd: return lloyd->bits_per_value();
    }
    return 1;
}

double ScalarQuantizer::decode(uint32_t index) const {
    switch (method) {
        case QuantizeMethod::sign: return index ? 1.0 : -1.0;
        case QuantizeMethod::uniform: return uniform->decode(index);
        case QuantizeMethod::lloyd: return lloyd->decode(index);
    }
    return 0.0;
}

QuantizedModel quantize_embedding(const ContinuousEmbedding& cont, QuantizeMethod method,
                                  uint32_t levels) {
    QuantizedModel out;
    out.source_kind = cont.kind;
    out.dim = cont.dim;
    out.quantizer.method = method;

    if (method != QuantizeMethod::sign) {
        std::vector<double> pooled;
        pooled.reserve(cont.entities.size() + cont.relations.size());
        pooled.insert(pooled.end(), cont.entities.begin(), cont.entities.end());
        pooled.insert(pooled.end(), cont.relations.begin(), cont.relations.end());
        if (method == QuantizeMethod::uniform)
            out.quantizer.uniform = fit_uniform(pooled, levels);
        else
            out.quantizer.lloyd = fit_lloyd(pooled, levels);
    }

    const uint32_t bits = out.quantizer.bits_per_value();
    const uint32_t k = bits * cont.dim;
    out.entities = BinaryCodeMatrix(k, cont.n);
    out.relations = BinaryCodeMatrix(k, cont.m);

    auto encode_matrix = [&](const std::vector<double>& values, uint64_t count,
                             BinaryCodeMatrix& codes) {
        for (uint64_t i = 0; i < count; ++i) {
            for (uint32_t v = 0; v < cont.dim; ++v) {
                const double x = values[i * cont.dim + v];
                uint32_t index;
                switch (method) {
                    case QuantizeMethod::sign: index = x >= 0.0 ? 1 : 0; break;
                    case QuantizeMethod::uniform: index = out.quantizer.uniform->encode(x); break;
                    default: index = out.quantizer.lloyd->encode(x); break;
                }
                write_value_bits(codes, i, v, bits, index);
            }
        }
    };
    encode_matrix(cont.entities, cont.n, out.entities);
    encode_matrix(cont.relations, cont.m, out.relations);
    return out;
}

double quantized_score(BaselineKind kind, PackedCodeView h, PackedCodeView r, PackedCodeView t,
                       ScoreMode mode, const ScalarQuantizer* quantizer) {
    if (h.k != r.k || h.k != t.k) throw std::invalid_argument("mismatched code length");
    if (mode == ScoreMode::binary) {
        if (kind == BaselineKind::distmult) return static_cast<double>(triple_score(h, r, t));
        // -||h + r - t||_1 over ±1 coordinates: per coordinate the value is 3
        // when the bits are (0,0,1) or (1,1,0), else 1.
        int64_t acc = 0;
        for (size_t w = 0; w < h.words.size(); ++w) {
            const uint64_t hw = h.words[w], rw = r.words[w], tw = t.words[w];
            acc += std::popcount((hw & rw & ~tw) | (~hw & ~rw & tw));
        }
        return -static_cast<double>(h.k + 2 * acc);
    }

    if (quantizer == nullptr)
        throw std::invalid_argument("reconstruct mode requires the fitted quantizer");
    const uint32_t bits = quantizer->bits_per_value();
    if (h.k % bits != 0) throw std::invalid_argument("code length not divisible by value bits");
    const uint32_t d = h.k / bits;
    std::vector<double> hv(d), rv(d), tv(d);
    for (uint32_t v = 0; v < d; ++v) {
        hv[v] = quantizer->decode(read_value_bits(h, v, bits));
        rv[v] = quantizer->decode(read_value_bits(r, v, bits));
        tv[v] = quantizer->decode(read_value_bits(t, v, bits));
    }
    return kind == BaselineKind::transe ? transe_score(hv, rv, tv, Norm::l1)
                                        : distmult_score(hv, rv, tv);
}

void write_quantizer_sidecar(const QuantizedModel& model, const std::filesystem::path& path) {
    io::AtomicFile file(path);
    auto& out = file.stream();
    out.precision(17);
    out << "method = " << quantize_method_name(model.quantizer.method) << "\n";
    out << "source_kind = " << baseline_kind_name(model.source_kind) << "\n";
    out << "dim = " << model.dim << "\n";
    out << "bits_per_value = " << model.quantizer.bits_per_value() << "\n";
    if (model.quantizer.method == QuantizeMethod::uniform) {
        out << "levels = " << model.quantizer.uniform->levels << "\n";
        out << "lo = " << model.quantizer.uniform->lo << "\n";
        out << "hi = " << model.quantizer.uniform->hi << "\n";
    } else if (model.quantizer.method == QuantizeMethod::lloyd) {
        out << "levels =";
        for (double v : model.quantizer.lloyd->levels) out << ' ' << v;
        out << "\nthresholds =";
        for (double v : model.quantizer.lloyd->thresholds) out << ' ' << v;
        out << "\n";
    }
    file.commit();
}

QuantizedModel read_quantizer_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    QuantizedModel model;
    std::optional<uint32_t> uniform_levels;
    std::optional<double> lo, hi;
    std::vector<double> lloyd_levels;
    std::string line;
    while (std::getline(in, line)) {
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const size_t a = s.find_first_not_of(" \t");
            const size_t b = s.find_last_not_of(" \t\r");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(value);
        std::istringstream vs(value);
        if (key == "method") {
            model.quantizer.method = parse_quantize_method(value);
        } else if (key == "source_kind") {
            model.source_kind =
                value == "transe" ? BaselineKind::transe : BaselineKind::distmult;
        } else if (key == "dim") {
            vs >> model.dim;
        } else if (key == "levels") {
            if (value.find(' ') == std::string::npos) {
                uint32_t l;
                vs >> l;
                uniform_levels = l;
            } else {
                double x;
                while (vs >> x) lloyd_levels.push_back(x);
            }
        } else if (key == "lo") {
            double x;
            vs >> x;
            lo = x;
        } else if (key == "hi") {
            double x;
            vs >> x;
            hi = x;
        } else if (key == "thresholds") {
            double x;
            LloydQuantizer lq;
            while (vs >> x) lq.thresholds.push_back(x);
            if (!model.quantizer.lloyd) model.quantizer.lloyd = lq;
            else model.quantizer.lloyd->thresholds = lq.thresholds;
        }
    }
    if (model.quantizer.method == QuantizeMethod::uniform) {
        if (!uniform_levels || !lo || !hi)
            throw std::runtime_error("incomplete uniform quantizer sidecar: " + path.string());
        model.quantizer.uniform = UniformQuantizer{*lo, *hi, *uniform_levels};
    } else if (model.quantizer.method == QuantizeMethod::lloyd) {
        if (lloyd_levels.empty())
            throw std::runtime_error("incomplete lloyd quantizer sidecar: " + path.string());
        if (!model.quantizer.lloyd) model.quantizer.lloyd = LloydQuantizer{};
        model.quantizer.lloyd->levels = lloyd_levels;
        if (model.quantizer.lloyd->thresholds.size() + 1 != lloyd_levels.size())
            throw std::runtime_error("inconsistent lloyd sidecar: " + path.string());
    }
    return model;
}

}  // namespace dkge
