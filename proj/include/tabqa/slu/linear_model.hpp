#pragma once

// Trainable linear SLU model: three heads over hashed n-gram features.
//   y_I = sigmoid(W_I . pooled + b_I)        multi-label intents (16)
//   y_N = softmax(W_N . pooled + b_N)        intent count (1 or 2)
//   y_S[j] = softmax(W_S . per_char[j] + b_S)  per-character slot tags (13)
// Loss = BCE(intents) + CE(count) + mean_j CE(tags), minimized by mini-batch
// gradient descent. Deterministic for a fixed seed.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/errors.hpp"
#include "tabqa/slu/featurizer.hpp"
#include "tabqa/slu/labels.hpp"

namespace tabqa::slu {

inline constexpr int kNumCounts = 2;

struct LinearSluModel {
    size_t dim = kFeatureDim;
    // row-major [out x dim]
    std::vector<float> w_intent, b_intent;  // 16 x D, 16
    std::vector<float> w_count, b_count;    // 2 x D, 2
    std::vector<float> w_slot, b_slot;      // 13 x D, 13
    bool trained = false;

    static LinearSluModel zeros() {
        LinearSluModel m;
        m.w_intent.assign(kNumIntents * kFeatureDim, 0.f);
        m.b_intent.assign(kNumIntents, 0.f);
        m.w_count.assign(kNumCounts * kFeatureDim, 0.f);
        m.b_count.assign(kNumCounts, 0.f);
        m.w_slot.assign(SlotTag::kCount * kFeatureDim, 0.f);
        m.b_slot.assign(SlotTag::kCount, 0.f);
        return m;
    }

    std::vector<float> intent_logits(const SparseVec& x) const {
        std::vector<float> out(kNumIntents);
        for (int k = 0; k < kNumIntents; ++k)
            out[k] = x.dot_dense(&w_intent[k * kFeatureDim]) + b_intent[k];
        return out;
    }
    std::vector<float> count_logits(const SparseVec& x) const {
        std::vector<float> out(kNumCounts);
        for (int k = 0; k < kNumCounts; ++k)
            out[k] = x.dot_dense(&w_count[k * kFeatureDim]) + b_count[k];
        return out;
    }
    std::vector<float> slot_logits(const SparseVec& x) const {
        std::vector<float> out(SlotTag::kCount);
        for (int k = 0; k < SlotTag::kCount; ++k)
            out[k] = x.dot_dense(&w_slot[k * kFeatureDim]) + b_slot[k];
        return out;
    }
};

namespace model_detail {

inline std::vector<double> softmax(const std::vector<float>& logits) {
    double mx = logits[0];
    for (float v : logits) mx = std::max(mx, double(v));
    std::vector<double> p(logits.size());
    double z = 0;
    for (size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(double(logits[i]) - mx);
        z += p[i];
    }
    for (auto& v : p) v /= z;
    return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace model_detail

struct TrainExample {
    std::string query;
    SluAnnotation gold;
    Features feats;  // cached
};

// Loss for one example; pure in the model so finite differences apply.
inline double example_loss(const LinearSluModel& m, const TrainExample& ex) {
    using namespace model_detail;
    const double eps = 1e-12;
    double loss = 0;
    // BCE over intent labels
    auto il = m.intent_logits(ex.feats.pooled);
    for (int k = 0; k < kNumIntents; ++k) {
        double p = sigmoid(il[k]);
        bool y = ex.gold.intents.count(static_cast<IntentLabel>(k)) > 0;
        loss += y ? -std::log(p + eps) : -std::log(1 - p + eps);
    }
    // CE over intent count
    auto cp = softmax(m.count_logits(ex.feats.pooled));
    loss += -std::log(cp[ex.gold.intent_count - 1] + eps);
    // mean CE over slot tags
    double slot_loss = 0;
    for (size_t j = 0; j < ex.feats.per_char.size(); ++j) {
        auto sp = softmax(m.slot_logits(ex.feats.per_char[j]));
        slot_loss += -std::log(sp[ex.gold.tags[j].id] + eps);
    }
    loss += slot_loss / static_cast<double>(ex.feats.per_char.size());
    return loss;
}

// Analytic gradient accumulated into `grad` (same layout as the model).
inline void example_grad(const LinearSluModel& m, const TrainExample& ex, LinearSluModel& grad) {
    using namespace model_detail;
    auto add_head = [](std::vector<float>& gw, std::vector<float>& gb, int k, double delta,
                       const SparseVec& x) {
        for (const auto& [i, v] : x.entries)
            gw[size_t(k) * kFeatureDim + i] += static_cast<float>(delta * v);
        gb[k] += static_cast<float>(delta);
    };
    auto il = m.intent_logits(ex.feats.pooled);
    for (int k = 0; k < kNumIntents; ++k) {
        double p = sigmoid(il[k]);
        double y = ex.gold.intents.count(static_cast<IntentLabel>(k)) ? 1.0 : 0.0;
        add_head(grad.w_intent, grad.b_intent, k, p - y, ex.feats.pooled);
    }
    auto cp = softmax(m.count_logits(ex.feats.pooled));
    for (int k = 0; k < kNumCounts; ++k) {
        double y = (k == ex.gold.intent_count - 1) ? 1.0 : 0.0;
        add_head(grad.w_count, grad.b_count, k, cp[k] - y, ex.feats.pooled);
    }
    double inv_n = 1.0 / static_cast<double>(ex.feats.per_char.size());
    for (size_t j = 0; j < ex.feats.per_char.size(); ++j) {
        auto sp = softmax(m.slot_logits(ex.feats.per_char[j]));
        for (int k = 0; k < SlotTag::kCount; ++k) {
            double y = (k == ex.gold.tags[j].id) ? 1.0 : 0.0;
            add_head(grad.w_slot, grad.b_slot, k, (sp[k] - y) * inv_n, ex.feats.per_char[j]);
        }
    }
}

struct TrainLog {
    std::vector<double> epoch_loss;
    std::vector<std::string> warnings;
};

inline LinearSluModel train_linear(const std::vector<std::pair<std::string, SluAnnotation>>& train,
                                   int epochs, double lr, uint64_t seed = 7,
                                   TrainLog* log = nullptr, int batch_size = 8) {
    if (train.empty()) throw EmptyInput("train_linear: empty training set");
    std::vector<TrainExample> examples;
    examples.reserve(train.size());
    std::vector<int> intent_seen(kNumIntents, 0);
    for (const auto& [q, g] : train) {
        TrainExample ex{q, g, featurize(q)};
        if (ex.feats.per_char.size() != g.tags.size())
            throw AlignmentError("gold tags misaligned with query: " + q);
        for (auto i : g.intents) intent_seen[static_cast<size_t>(i)]++;
        examples.push_back(std::move(ex));
    }
    if (log) {
        for (int k = 0; k < kNumIntents; ++k)
            if (!intent_seen[k])
                log->warnings.push_back("intent absent from training data: " +
                                       intent_name(static_cast<IntentLabel>(k)));
    }

    LinearSluModel model = LinearSluModel::zeros();
    std::mt19937_64 rng(seed);
    std::vector<size_t> order(examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0;
        for (size_t start = 0; start < order.size(); start += batch_size) {
            size_t end = std::min(order.size(), start + batch_size);
            LinearSluModel grad = LinearSluModel::zeros();
            for (size_t i = start; i < end; ++i) {
                total += example_loss(model, examples[order[i]]);
                example_grad(model, examples[order[i]], grad);
            }
            double scale = lr / static_cast<double>(end - start);
            auto step = [&](std::vector<float>& w, const std::vector<float>& g) {
                for (size_t i = 0; i < w.size(); ++i) w[i] -= static_cast<float>(scale) * g[i];
            };
            step(model.w_intent, grad.w_intent);
            step(model.b_intent, grad.b_intent);
            step(model.w_count, grad.w_count);
            step(model.b_count, grad.b_count);
            step(model.w_slot, grad.w_slot);
            step(model.b_slot, grad.b_slot);
        }
        if (log) log->epoch_loss.push_back(total / static_cast<double>(examples.size()));
    }
    model.trained = true;
    return model;
}

inline SluAnnotation predict_linear(const LinearSluModel& m, const std::string& query) {
    if (!m.trained) throw ModelError("predict_linear: model not trained");
    using namespace model_detail;
    Features f = featurize(query);
    SluAnnotation ann;
    auto cp = softmax(m.count_logits(f.pooled));
    ann.intent_count = (cp[1] > cp[0]) ? 2 : 1;
    auto il = m.intent_logits(f.pooled);
    // top-count intents by score; ties broken by enum order (stable sort)
    std::vector<int> idx(kNumIntents);
    for (int k = 0; k < kNumIntents; ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return il[a] > il[b]; });
    for (int k = 0; k < ann.intent_count; ++k) ann.intents.insert(static_cast<IntentLabel>(idx[k]));
    for (const auto& x : f.per_char) {
        auto sl = m.slot_logits(x);
        int best = 0;
        for (int k = 1; k < SlotTag::kCount; ++k)
            if (sl[k] > sl[best]) best = k;
        ann.tags.push_back(SlotTag{best});
    }
    ann.tags = iob_repair(std::move(ann.tags));
    return ann;
}

// ---- serialization: JSON header + raw little-endian float blocks ----

inline void save_model(const LinearSluModel& m, const std::string& path) {
    nlohmann::json header{{"format", "tabqa-linear-slu-v1"},
                          {"dim", m.dim},
                          {"intents", intent_names()},
                          {"slot_types", slot_type_names()}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RecordError("cannot write model file: " + path);
    std::string h = header.dump();
    uint64_t hlen = h.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    auto block = [&](const std::vector<float>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(float)));
    };
    block(m.w_intent);
    block(m.b_intent);
    block(m.w_count);
    block(m.b_count);
    block(m.w_slot);
    block(m.b_slot);
}

inline LinearSluModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open model file: " + path);
    uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string h(hlen, '\0');
    in.read(h.data(), static_cast<std::streamsize>(hlen));
    nlohmann::json header = nlohmann::json::parse(h);
    if (header.value("format", "") != "tabqa-linear-slu-v1")
        throw ConfigError("unrecognized model file format");
    LinearSluModel m = LinearSluModel::zeros();
    m.dim = header.at("dim").get<size_t>();
    if (m.dim != kFeatureDim) throw ConfigError("model dimension mismatch");
    auto block = [&](std::vector<float>& v) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(float)));
    };
    block(m.w_intent);
    block(m.b_intent);
    block(m.w_count);
    block(m.b_count);
    block(m.w_slot);
    block(m.b_slot);
    if (!in) throw ConfigError("truncated model file: " + path);
    m.trained = true;
    return m;
}

}  // namespace tabqa::slu
