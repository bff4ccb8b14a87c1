#include "dkge/baselines.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dkge/io.hpp"

namespace dkge {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'G', 'C'};
constexpr uint16_t kVersion = 1;

void normalize_l2(std::span<double> v) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm > 0.0)
        for (double& x : v) x /= norm;
}

// Subgradient of ||h + r - t|| at the current point.
void transe_grad(std::span<const double> h, std::span<const double> r,
                 std::span<const double> t, Norm norm, std::vector<double>& g) {
    const size_t d = h.size();
    g.resize(d);
    if (norm == Norm::l1) {
        for (size_t j = 0; j < d; ++j) {
            const double x = h[j] + r[j] - t[j];
            g[j] = x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0;
        }
    } else {
        double dist = 0.0;
        for (size_t j = 0; j < d; ++j) {
            const double x = h[j] + r[j] - t[j];
            dist += x * x;
        }
        dist = std::sqrt(dist);
        const double inv = dist > 1e-12 ? 1.0 / dist : 0.0;
        for (size_t j = 0; j < d; ++j) g[j] = (h[j] + r[j] - t[j]) * inv;
    }
}

}  // namespace

const char* baseline_kind_name(BaselineKind k) {
    return k == BaselineKind::transe ? "transe" : "distmult";
}

void BaselineConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be at least 1");
    if (margin <= 0) throw std::invalid_argument("margin must be positive");
    if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
    if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
}

double transe_score(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, Norm norm) {
    if (h.size() != r.size() || h.size() != t.size())
        throw std::invalid_argument("mismatched embedding dimension");
    double acc = 0.0;
    if (norm == Norm::l1) {
        for (size_t j = 0; j < h.size(); ++j) acc += std::abs(h[j] + r[j] - t[j]);
    } else {
        for (size_t j = 0; j < h.size(); ++j) {
            const double x = h[j] + r[j] - t[j];
            acc += x * x;
        }
        acc = std::sqrt(acc);
    }
    return -acc;
}

double distmult_score(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t) {
    if (h.size() != r.size() || h.size() != t.size())
        throw std::invalid_argument("mismatched embedding dimension");
    double acc = 0.0;
    for (size_t j = 0; j < h.size(); ++j) acc += h[j] * r[j] * t[j];
    return acc;
}

BaselineFitResult train_baseline(const Dataset& dataset, const BaselineConfig& config) {
    config.validate();
    if (dataset.train.empty()) throw std::invalid_argument("empty train split");
    const uint64_t n = dataset.vocab.entity_count();
    const uint64_t m = dataset.vocab.relation_count();
    const uint32_t d = config.dim;

    BaselineFitResult res;
    ContinuousEmbedding& emb = res.embedding;
    emb.kind = config.kind;
    emb.dim = d;
    emb.n = n;
    emb.m = m;
    emb.entities.resize(static_cast<size_t>(d) * n);
    emb.relations.resize(static_cast<size_t>(d) * m);

    Rng rng(config.seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(d));
    for (double& x : emb.entities) x = rng.uniform(-bound, bound);
    for (double& x : emb.relations) x = rng.uniform(-bound, bound);
    if (config.kind == BaselineKind::transe) {
        for (uint64_t i = 0; i < n; ++i) normalize_l2(emb.entity(i));
        for (uint64_t i = 0; i < m; ++i) normalize_l2(emb.relation(i));
    }

    auto score = [&](uint32_t h, uint32_t r, uint32_t t) {
        return config.kind == BaselineKind::transe
                   ? transe_score(emb.entity(h), emb.relation(r), emb.entity(t), config.norm)
                   : distmult_score(emb.entity(h), emb.relation(r), emb.entity(t));
    };

    std::vector<double> g_pos, g_neg;
    const double lr = config.learning_rate;
    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = 0.0;
        for (const Triple& pos : dataset.train) {
            for (uint32_t c = 0; c < config.negatives; ++c) {
                Triple neg = pos;
                const bool corrupt_head = rng.below(2) == 0;
                uint32_t& slot = corrupt_head ? neg.h : neg.t;
                auto e = static_cast<uint32_t>(rng.below(n - 1));
                if (e >= slot) ++e;
                slot = e;

                const double violation = config.margin - score(pos.h, pos.r, pos.t) +
                                         score(neg.h, neg.r, neg.t);
                if (violation <= 0) continue;
                loss += violation;

                if (config.kind == BaselineKind::transe) {
                    transe_grad(emb.entity(pos.h), emb.relation(pos.r), emb.entity(pos.t),
                                config.norm, g_pos);
                    transe_grad(emb.entity(neg.h), emb.relation(neg.r), emb.entity(neg.t),
                                config.norm, g_neg);
                    auto ph = emb.entity(pos.h);
                    auto pt = emb.entity(pos.t);
                    auto nh = emb.entity(neg.h);
                    auto nt = emb.entity(neg.t);
                    auto rel = emb.relation(pos.r);
                    for (uint32_t j = 0; j < d; ++j) {
                        ph[j] -= lr * g_pos[j];
                        pt[j] += lr * g_pos[j];
                        rel[j] -= lr * (g_pos[j] - g_neg[j]);
                        nh[j] += lr * g_neg[j];
                        nt[j] -= lr * g_neg[j];
                    }
                    normalize_l2(ph);
                    normalize_l2(pt);
                    normalize_l2(nh);
                    normalize_l2(nt);
                } else {
                    auto ph = emb.entity(pos.h);
                    auto pt = emb.entity(pos.t);
                    auto nh = emb.entity(neg.h);
                    auto nt = emb.entity(neg.t);
                    auto rel = emb.relation(pos.r);
                    for (uint32_t j = 0; j < d; ++j) {
                        const double gp_h = rel[j] * pt[j];
                        const double gp_t = rel[j] * ph[j];
                        const double gp_r = ph[j] * pt[j] - nh[j] * nt[j];
                        const double gn_h = rel[j] * nt[j];
                        const double gn_t = rel[j] * nh[j];
                        ph[j] += lr * gp_h;
                        pt[j] += lr * gp_t;
                        rel[j] += lr * gp_r;
                        nh[j] -= lr * gn_h;
                        nt[j] -= lr * gn_t;
                    }
                }
            }
        }
        res.loss_history.push_back(loss);
    }
    return res;
}

void write_embedding(const ContinuousEmbedding& emb, const std::filesystem::path& path) {
    io::AtomicFile file(path);
    auto& out = file.stream();
    out.write(kMagic, 4);
    io::write_u16(out, kVersion);
    out.put(static_cast<char>(emb.kind));
    io::write_u32(out, emb.dim);
    io::write_u64(out, emb.n);
    io::write_u64(out, emb.m);
    for (double x : emb.entities) io::write_f64(out, x);
    for (double x : emb.relations) io::write_f64(out, x);
    file.commit();
}

ContinuousEmbedding read_embedding(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in) throw std::runtime_error("truncated file: " + path.string());
    if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
        throw std::runtime_error("bad magic: not a DKGC embedding file: " + path.string());
    const uint16_t version = io::read_u16(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported DKGC version " + std::to_string(version));
    const int kind_byte = in.get();
    if (kind_byte != 0 && kind_byte != 1)
        throw std::runtime_error("invalid model kind in " + path.string());

    ContinuousEmbedding emb;
    emb.kind = static_cast<BaselineKind>(kind_byte);
    emb.dim = io::read_u32(in);
    if (emb.dim == 0) throw std::runtime_error("invalid dimension 0 in " + path.string());
    emb.n = io::read_u64(in);
    emb.m = io::read_u64(in);
    emb.entities.resize(static_cast<size_t>(emb.dim) * emb.n);
    emb.relations.resize(static_cast<size_t>(emb.dim) * emb.m);
    for (double& x : emb.entities) x = io::read_f64(in);
    for (double& x : emb.relations) x = io::read_f64(in);
    if (in.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("trailing bytes after embedding data in " + path.string());
    return emb;
}

}  // namespace dkge
