// Acceptance suite: runs every criterion end to end and prints one line per
// criterion. Exit status is the number of failed criteria (skips don't fail).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dkge/baselines.hpp"
#include "dkge/bitpack.hpp"
#include "dkge/cli.hpp"
#include "dkge/dataset.hpp"
#include "dkge/dkge.hpp"
#include "dkge/eval.hpp"
#include "dkge/linalg.hpp"
#include "dkge/quantize.hpp"
#include "dkge/rng.hpp"
#include "support/dkge_oracles.hpp"
#include "support/oracles.hpp"
#include "support/planted.hpp"

using namespace dkge;
namespace fs = std::filesystem;

namespace {

struct Skip {
    std::string reason;
};

class Harness {
public:
    void run(int id, const std::string& name, const std::function<void()>& body) {
        const auto start = std::chrono::steady_clock::now();
        std::string verdict = "PASS";
        std::string detail;
        try {
            body();
        } catch (const Skip& s) {
            verdict = "SKIP";
            detail = s.reason;
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures_;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d. %-28s (%.1fs)%s%s\n", verdict.c_str(), id, name.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
    }

    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error(message);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
void kernel_oracle_equivalence() {
    Rng rng(0x11);
    const uint32_t ks[] = {1, 63, 64, 65, 127, 512};
    const size_t per_k = 1'000'000 / std::size(ks) + 1;
    for (uint32_t k : ks) {
        for (size_t rep = 0; rep < per_k; ++rep) {
            const auto hs = test::random_signs(rng, k);
            const auto rs = test::random_signs(rng, k);
            const auto ts = test::random_signs(rng, k);
            const PackedCode h = pack(hs), r = pack(rs), t = pack(ts);
            const int64_t score = triple_score(h.view(), r.view(), t.view());
            const int64_t dist = hamming_translation_distance(h.view(), r.view(), t.view());
            if (score != test::naive_triple_score(hs, rs, ts))
                throw std::runtime_error("packed score != naive score at k=" + std::to_string(k));
            if (2 * dist + score != int64_t{k})
                throw std::runtime_error("2d + s != k at k=" + std::to_string(k));
        }
    }
}

// ---------------------------------------------------------------- criterion 2
void auxiliary_solver_optimality() {
    Rng rng(0x22);
    for (int inst = 0; inst < 200; ++inst) {
        const size_t k = 1 + rng.below(16);
        const size_t n = std::min<size_t>(200, k + 2 + rng.below(200 - k - 1));
        const Matrix a = test::random_pm1_matrix(k, n, rng);
        const Matrix x = solve_orthogonal_auxiliary(a);

        double row_worst = 0.0;
        for (size_t i = 0; i < k; ++i) {
            double s = 0.0;
            for (size_t j = 0; j < n; ++j) s += x.at(i, j);
            row_worst = std::max(row_worst, std::abs(s));
        }
        require(row_worst <= 1e-6 * std::sqrt(static_cast<double>(n)),
                "X1 residual " + fmt(row_worst));

        double gram_worst = 0.0;
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j) {
                double dot = 0.0;
                for (size_t c = 0; c < n; ++c) dot += x.at(i, c) * x.at(j, c);
                gram_worst = std::max(
                    gram_worst, std::abs(dot / static_cast<double>(n) - (i == j ? 1.0 : 0.0)));
            }
        require(gram_worst <= 1e-6, "XX^T/N residual " + fmt(gram_worst));

        const double achieved = test::trace_product(a, x);
        const double optimal =
            std::sqrt(static_cast<double>(n)) * test::nuclear_norm(row_center(a));
        require(std::abs(achieved - optimal) <= 1e-6 * std::max(1.0, std::abs(optimal)),
                "trace " + fmt(achieved) + " vs nuclear optimum " + fmt(optimal));

        for (int comp = 0; comp < 100; ++comp) {
            const Matrix q = test::random_orthogonal(k, rng);
            const double rival = test::trace_product(a, test::matmul(q, x));
            require(rival <= achieved + 1e-8 * std::abs(achieved) + 1e-9,
                    "random feasible competitor beat the solver");
        }
    }
}

// ---------------------------------------------------------------- criterion 3
void dcd_correctness() {
    Rng meta(0x33);
    size_t epoch_count = 0, epoch_increases = 0;
    double worst_increase = 0.0;

    for (int inst = 0; inst < 50; ++inst) {
        const uint32_t k = 2 + static_cast<uint32_t>(meta.below(15));
        const uint64_t n = 4 + meta.below(27);
        const uint64_t m = 1 + meta.below(5);
        TrainConfig cfg;
        cfg.k = k;
        const double gammas[] = {std::ceil(k / 2.0), static_cast<double>(k), 2.0 * k};
        cfg.gamma = gammas[meta.below(3)];
        cfg.alpha = inst % 3 == 0 ? 0.0 : 1e-3;
        cfg.beta = inst % 2 == 0 ? 0.0 : 1e-3;
        cfg.seed = 3000 + inst;

        Rng rng(cfg.seed);
        auto [model, aux] = init_params(n, m, cfg, rng);
        TripleSet train;
        while (train.size() < 10 + meta.below(50)) {
            Triple x{static_cast<uint32_t>(meta.below(n)), static_cast<uint32_t>(meta.below(m)),
                     static_cast<uint32_t>(meta.below(n))};
            if (x.h != x.t) train.push_back(x);
        }
        PairBatch batch = sample_negatives(train, n, 1, rng);
        const TrainConfig frozen_cfg = cfg;

        for (int epoch = 0; epoch < 2; ++epoch) {
            ++epoch_count;
            mark_active_pairs(model, batch, cfg.resolved_gamma());
            const double epoch_start = hinge_objective(model, aux, batch, cfg).eq_trace;

            // Entity sweep, each column shadowed by the brute-force oracle.
            for (uint32_t i = 0; i < n; ++i) {
                PairBatch touching;
                for (const CorruptedPair& p : batch) {
                    if (!p.active) continue;
                    const bool mentions =
                        (p.positive.h != p.positive.t &&
                         (p.positive.h == i || p.positive.t == i)) ||
                        (p.corrupted.h != p.corrupted.t &&
                         (p.corrupted.h == i || p.corrupted.t == i));
                    if (mentions) touching.push_back(p);
                }
                if (touching.empty() && cfg.alpha == 0.0) continue;
                const test::NaiveModel snapshot = test::NaiveModel::from(model);
                const auto expect = test::oracle_entity_column(snapshot, i, touching, cfg.alpha,
                                                               aux.x, cfg.resolved_gamma());
                const double before = test::naive_entity_surrogate(
                    snapshot, i, touching, cfg.alpha, aux.x, cfg.resolved_gamma());
                dcd_update_entity(i, model, aux, touching, cfg.alpha);
                if (model.entities.unpack_code(i) != expect)
                    throw std::runtime_error("entity column deviates from brute force");
                const double after = test::naive_entity_surrogate(
                    test::NaiveModel::from(model), i, touching, cfg.alpha, aux.x,
                    cfg.resolved_gamma());
                require(after <= before + 1e-6, "entity update raised its frozen surrogate");
            }

            mark_active_pairs(model, batch, cfg.resolved_gamma());
            for (uint32_t i = 0; i < m; ++i) {
                PairBatch touching;
                for (const CorruptedPair& p : batch)
                    if (p.active && p.positive.r == i) touching.push_back(p);
                if (touching.empty() && cfg.beta == 0.0) continue;
                const test::NaiveModel snapshot = test::NaiveModel::from(model);
                const auto expect = test::oracle_relation_column(snapshot, i, touching, cfg.beta,
                                                                 aux.y, cfg.resolved_gamma());
                const double before = test::naive_relation_surrogate(
                    snapshot, i, touching, cfg.beta, aux.y, cfg.resolved_gamma());
                dcd_update_relation(i, model, aux, touching, cfg.beta);
                if (model.relations.unpack_code(i) != expect)
                    throw std::runtime_error("relation column deviates from brute force");
                const double after = test::naive_relation_surrogate(
                    test::NaiveModel::from(model), i, touching, cfg.beta, aux.y,
                    cfg.resolved_gamma());
                require(after <= before + 1e-6, "relation update raised its frozen surrogate");
            }

            // Step 6 must not raise the full objective (hinge unchanged).
            const double pre_aux = hinge_objective(model, aux, batch, cfg).eq_trace;
            aux = update_auxiliary(model);
            const double post_aux = hinge_objective(model, aux, batch, cfg).eq_trace;
            require(post_aux <= pre_aux + 1e-6, "auxiliary refresh raised the objective");

            // Informational: the literal epoch-level delta of the clipped
            // objective (see the decisions ledger on why this may be > 0).
            if (post_aux > epoch_start + 1e-6) {
                ++epoch_increases;
                worst_increase = std::max(worst_increase, post_aux - epoch_start);
            }
        }
        (void)frozen_cfg;
    }
    std::printf("      info: clipped epoch objective rose in %zu/%zu epochs (worst +%.3g);\n"
                "      per-sweep frozen surrogates and the auxiliary step were monotone "
                "throughout\n",
                epoch_increases, epoch_count, worst_increase);
}

// ---------------------------------------------------------------- criterion 4
void objective_consistency() {
    Rng rng(0x44);
    for (int inst = 0; inst < 100; ++inst) {
        const uint32_t k = 2 + static_cast<uint32_t>(rng.below(6));
        const uint64_t n = k + 2 + rng.below(20);
        const uint64_t m = k + 2 + rng.below(10);
        TrainConfig cfg;
        cfg.k = k;
        cfg.gamma = static_cast<double>(k);
        cfg.alpha = 0.01 + rng.next_double();
        cfg.beta = 0.01 + rng.next_double();
        cfg.seed = 4000 + inst;
        Rng init_rng(cfg.seed);
        auto [model, aux] = init_params(n, m, cfg, init_rng);

        TripleSet triples;
        while (triples.size() < 15) {
            Triple x{static_cast<uint32_t>(rng.below(n)), static_cast<uint32_t>(rng.below(m)),
                     static_cast<uint32_t>(rng.below(n))};
            if (x.h != x.t) triples.push_back(x);
        }
        PairBatch batch = sample_negatives(triples, n, 1, rng);

        const ObjectiveValue v = hinge_objective(model, aux, batch, cfg);
        const double expected_gap = 2.0 * cfg.alpha * k * static_cast<double>(n) +
                                    2.0 * cfg.beta * k * static_cast<double>(m);
        const double gap = v.eq_distance - v.eq_trace;
        require(std::abs(gap - expected_gap) <= 1e-6 * std::max(1.0, std::abs(expected_gap)),
                "objective gap " + fmt(gap) + " vs 2akn+2bkm " + fmt(expected_gap));
    }
}

// ---------------------------------------------------------------- criterion 5
struct PlantedOutcome {
    FitResult fit_result;
    MetricsReport report;
};

PlantedOutcome run_planted(const test::PlantedData& data, uint32_t k) {
    TrainConfig cfg;  // defaults: gamma 2k, alpha/beta 1e-7, c = 2, fixed batch
    cfg.k = k;
    cfg.max_epochs = 50;
    cfg.seed = 1;
    PlantedOutcome out;
    out.fit_result = fit(data.dataset, cfg);

    const Split all[] = {Split::train, Split::valid, Split::test};
    const FilterIndex filter = FilterIndex::build(data.dataset, all);
    const DkgeScorer scorer(out.fit_result.model);
    EvalConfig ecfg;
    ecfg.eval_head = false;  // the planted signal is tail-functional
    out.report = evaluate(data.dataset.test, scorer, &filter, ecfg);
    return out;
}

void planted_recovery() {
    const test::PlantedData data = test::make_planted(100, 5, 32, 1000, 200, 20260810);
    require(data.train_lines.size() == 1000, "generator must emit 1000 train lines");
    require(data.dataset.test.size() == 200, "generator must emit 200 test triples");
    const PlantedOutcome out = run_planted(data, 32);
    require(out.fit_result.state.stop_reason == StopReason::zero_flips,
            std::string("expected zero-flip termination, got ") +
                stop_reason_name(out.fit_result.state.stop_reason));
    require(out.fit_result.state.epoch <= 50, "needed more than 50 epochs");
    require(out.report.mrr >= 0.95, "filtered MRR " + fmt(out.report.mrr) + " < 0.95");
    require(out.report.hits.at(1) >= 0.90,
            "filtered Hits@1 " + fmt(out.report.hits.at(1)) + " < 0.90");
    std::printf("      info: stopped at epoch %u, MRR %.4f, Hits@1 %.4f\n",
                out.fit_result.state.epoch, out.report.mrr, out.report.hits.at(1));
}

// ---------------------------------------------------------------- criterion 6
void quantizer_correctness() {
    Rng rng(0x66);
    std::vector<double> samples(1'000'000);
    for (double& v : samples) v = rng.normal();

    const LloydQuantizer q = fit_lloyd(samples, 2, 1e-10, 500);
    require(std::abs(q.levels[0] + 0.798) <= 0.01, "low level " + fmt(q.levels[0]));
    require(std::abs(q.levels[1] - 0.798) <= 0.01, "high level " + fmt(q.levels[1]));
    require(std::abs(q.thresholds[0]) <= 0.01, "threshold " + fmt(q.thresholds[0]));

    // Brute-force grid search over symmetric 2-level quantizers {-a, +a}
    // (threshold 0): MSE(a) computed exactly from one pass of moments.
    double sum_abs = 0.0, sum_sq = 0.0;
    for (double v : samples) {
        sum_abs += std::abs(v);
        sum_sq += v * v;
    }
    const auto count = static_cast<double>(samples.size());
    double best_a = 0.0, best_mse = 1e300;
    for (double a = 0.0; a <= 2.0; a += 1e-4) {
        const double mse = (sum_sq - 2.0 * a * sum_abs) / count + a * a;
        if (mse < best_mse) {
            best_mse = mse;
            best_a = a;
        }
    }
    require(std::abs(q.levels[1] - best_a) <= 0.01,
            "Lloyd level " + fmt(q.levels[1]) + " vs grid optimum " + fmt(best_a));

    for (size_t i = 1; i < q.mse_history.size(); ++i)
        require(q.mse_history[i] <= q.mse_history[i - 1] + 1e-12,
                "Lloyd MSE increased at iteration " + std::to_string(i));

    const UniformQuantizer u = fit_uniform(samples, 16);
    const double half = u.cell_width() / 2.0;
    for (double v : samples)
        require(std::abs(u.decode(u.encode(v)) - v) <= half + 1e-12,
                "uniform reconstruction error above half cell width");
}

// ---------------------------------------------------------------- criterion 7
void beats_posthoc_hashing() {
    const test::PlantedData data = test::make_planted(100, 5, 32, 1000, 200, 20260810);

    const PlantedOutcome dkge_out = run_planted(data, 64);

    BaselineConfig bcfg;  // defaults: d = 64, margin 1, lr 0.01, 100 epochs, L1
    bcfg.seed = 1;
    const BaselineFitResult transe = train_baseline(data.dataset, bcfg);
    const QuantizedModel signed_model =
        quantize_embedding(transe.embedding, QuantizeMethod::sign, 2);

    const Split all[] = {Split::train, Split::valid, Split::test};
    const FilterIndex filter = FilterIndex::build(data.dataset, all);
    const QuantizedScorer scorer(signed_model, ScoreMode::binary);
    EvalConfig ecfg;
    ecfg.eval_head = false;
    const MetricsReport sign_report = evaluate(data.dataset.test, scorer, &filter, ecfg);

    // Equal bit budget: both models store 64 bits per entity/relation.
    require(signed_model.entities.code_length() == 64, "sign model is not 64 bits");
    require(dkge_out.fit_result.model.entities.code_length() == 64, "DKGE model is not 64 bits");
    require(dkge_out.report.mrr > sign_report.mrr,
            "DKGE MRR " + fmt(dkge_out.report.mrr) + " not above TransE+sign " +
                fmt(sign_report.mrr));
    std::printf("      info: DKGE(k=64) MRR %.4f vs TransE+sign MRR %.4f\n", dkge_out.report.mrr,
                sign_report.mrr);
}

// ---------------------------------------------------------------- criterion 8
class BucketScorer : public Scorer {
public:
    BucketScorer(uint64_t n, uint64_t salt, uint64_t buckets)
        : n_(n), salt_(salt), buckets_(buckets) {}
    uint64_t entity_count() const override { return n_; }
    double score(uint32_t h, uint32_t r, uint32_t t) const override {
        uint64_t v = salt_;
        for (uint64_t x : {uint64_t{h}, uint64_t{r}, uint64_t{t}}) {
            v ^= x + 0x9e3779b97f4a7c15ull + (v << 6) + (v >> 2);
            v *= 0xff51afd7ed558ccdull;
        }
        return static_cast<double>(v % buckets_);
    }

private:
    uint64_t n_, salt_, buckets_;
};

void ranking_protocol_oracle() {
    const uint64_t n = 200;
    Dataset ds;
    for (uint64_t i = 0; i < n; ++i) ds.vocab.entity_id("e" + std::to_string(i));
    for (int i = 0; i < 3; ++i) ds.vocab.relation_id("r" + std::to_string(i));
    Rng rng(0x88);
    for (int i = 0; i < 500; ++i)
        ds.train.push_back({static_cast<uint32_t>(rng.below(n)),
                            static_cast<uint32_t>(rng.below(3)),
                            static_cast<uint32_t>(rng.below(n))});
    const Split train_only[] = {Split::train};
    const FilterIndex filter = FilterIndex::build(ds, train_only);

    for (uint64_t salt = 0; salt < 10; ++salt) {
        const BucketScorer scorer(n, salt, 13);
        for (int rep = 0; rep < 10; ++rep) {
            const Triple x = ds.train[rng.below(ds.train.size())];
            for (Direction dir : {Direction::head, Direction::tail}) {
                const uint32_t target = dir == Direction::head ? x.h : x.t;
                const auto scores = scorer.score_candidates(x, dir);
                std::vector<double> kept{scores[target]};
                Triple probe = x;
                uint32_t& slot = dir == Direction::head ? probe.h : probe.t;
                for (uint64_t e = 0; e < n; ++e) {
                    if (e == target) continue;
                    slot = static_cast<uint32_t>(e);
                    if (filter.contains(probe)) continue;
                    kept.push_back(scores[e]);
                }
                std::sort(kept.begin(), kept.end(), std::greater<>());
                const auto first = static_cast<double>(
                    std::find(kept.begin(), kept.end(), scores[target]) - kept.begin());
                const auto last = static_cast<double>(
                    std::find_if(kept.begin(), kept.end(),
                                 [&](double s) { return s < scores[target]; }) -
                    kept.begin());
                for (TiePolicy p :
                     {TiePolicy::midrank, TiePolicy::optimistic, TiePolicy::pessimistic}) {
                    const RankRecord rec = rank_entity(x, dir, scorer, &filter, p);
                    const double expect = p == TiePolicy::optimistic ? first + 1.0
                                          : p == TiePolicy::pessimistic
                                              ? last
                                              : (first + 1.0 + last) / 2.0;
                    require(rec.rank == expect, "rank mismatch vs full-sort reference");
                    const RankRecord raw = rank_entity(x, dir, scorer, nullptr, p);
                    require(rec.rank <= raw.rank, "filtered rank exceeded raw rank");
                }
            }
        }
    }

    // Aggregation identities over randomized reports.
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<RankRecord> records(1 + rng.below(40));
        for (RankRecord& r : records) {
            r.strictly_higher = rng.below(50);
            r.equal = rng.below(10);
            r.candidates_ranked = r.strictly_higher + r.equal + 1 + rng.below(100);
        }
        const MetricsReport rep_m =
            aggregate_records(records, static_cast<TiePolicy>(rng.below(3)));
        require(rep_m.mrr > 0.0 && rep_m.mrr <= 1.0, "MRR outside (0, 1]");
        require(rep_m.mr >= 1.0, "MR below 1");
        require(rep_m.hits.at(1) <= rep_m.hits.at(3) + 1e-12 &&
                    rep_m.hits.at(3) <= rep_m.hits.at(10) + 1e-12 && rep_m.hits.at(10) <= 1.0,
                "hits ladder not monotone");
    }
}

// ---------------------------------------------------------------- criterion 9
void full_dataset_reproduction() {
    const char* dir = std::getenv("DKGE_FB15K237_DIR");
    if (dir == nullptr)
        throw Skip{"optional, hours-long; set DKGE_FB15K237_DIR to the dataset directory"};
    const fs::path root(dir);
    const Dataset ds = load_dataset(root / "train.txt", root / "valid.txt", root / "test.txt");

    TrainConfig cfg;
    cfg.k = 256;
    cfg.max_epochs = 30;
    cfg.seed = 1;
    const FitResult res = fit(ds, cfg);

    const Split all[] = {Split::train, Split::valid, Split::test};
    const FilterIndex filter = FilterIndex::build(ds, all);
    const DkgeScorer scorer(res.model);
    const MetricsReport report = evaluate(ds.test, scorer, &filter, EvalConfig{});
    std::printf("      info: FB15k-237 k=256 MR %.1f MRR %.4f Hits@10 %.4f\n", report.mr,
                report.mrr, report.hits.at(10));
    require(std::abs(report.mrr - 0.416) <= 0.08,
            "MRR " + fmt(report.mrr) + " outside 0.416 +/- 0.08");
}

// --------------------------------------------------------------- criterion 10
int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"dkge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

void determinism() {
    const test::PlantedData data = test::make_planted(40, 3, 16, 300, 60, 5);
    const fs::path base = fs::temp_directory_path() / "dkge_acceptance_det";
    fs::remove_all(base);

    // Twin directory trees driven with identical relative paths.
    const fs::path cwd = fs::current_path();
    for (const char* root : {"a", "b"}) {
        const fs::path dir = base / root;
        test::write_planted_files(data, dir);
        fs::current_path(dir);
        require(run_cli({"prepare", "--train", "train.txt", "--valid", "valid.txt", "--test",
                         "test.txt", "--out", "bundle.dkgd"}) == 0,
                "prepare failed");
        require(run_cli({"train", "--data", "bundle.dkgd", "--dim", "16", "--epochs", "20",
                         "--seed", "7", "--out", "model"}) == 0,
                "train failed");
        require(run_cli({"eval", "--data", "bundle.dkgd", "--model", "model", "--out",
                         "metrics"}) == 0,
                "eval failed");
        fs::current_path(cwd);
    }

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    };
    for (const char* rel :
         {"bundle.dkgd", "model.entities.dkgb", "model.relations.dkgb", "model.manifest.txt",
          "metrics/metrics.txt", "metrics/ranks.csv"}) {
        const std::string a = slurp(base / "a" / rel);
        const std::string b = slurp(base / "b" / rel);
        require(!a.empty(), std::string("missing output ") + rel);
        require(a == b, std::string("byte mismatch in ") + rel);
    }
    fs::remove_all(base);
}

}  // namespace

int main() {
    Harness h;
    h.run(1, "kernel-oracle-equivalence", kernel_oracle_equivalence);
    h.run(2, "auxiliary-solver-optimality", auxiliary_solver_optimality);
    h.run(3, "dcd-correctness", dcd_correctness);
    h.run(4, "objective-consistency", objective_consistency);
    h.run(5, "planted-recovery", planted_recovery);
    h.run(6, "quantizer-correctness", quantizer_correctness);
    h.run(7, "beats-posthoc-hashing", beats_posthoc_hashing);
    h.run(8, "ranking-protocol-oracle", ranking_protocol_oracle);
    h.run(9, "full-dataset-reproduction", full_dataset_reproduction);
    h.run(10, "determinism", determinism);
    if (h.failures() == 0) std::printf("acceptance: all criteria passed\n");
    return h.failures();
}
