#pragma once

// The four predictors behind one forward/backward/step contract:
//   dap         four-branch network (LSTM dynamics, region embedding,
//               description vector, POI) with a dense classification head
//   dap-noembed dap without the embedding branch
//   dnn         dense baseline on the flattened feature vector
//   logreg      softmax regression with optional L1/L2 penalty
//
// Branches with zero input width (after ablation) drop out of the wiring;
// at least one input source must remain.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dap/nn/checkpoint.hpp"
#include "dap/nn/gradcheck.hpp"
#include "dap/nn/layers.hpp"
#include "dap/nn/lstm.hpp"
#include "dap/windows.hpp"

namespace dap {

using nn::Matrix2D;
using nn::Mode;

inline nlohmann::json layout_to_json(const FeatureLayout& l) {
  return nlohmann::json{{"traffic", l.traffic},   {"time", l.time}, {"weather", l.weather},
                        {"poi", l.poi},           {"desc2vec", l.desc2vec},
                        {"steps", l.steps}};
}

inline FeatureLayout layout_from_json(const nlohmann::json& j) {
  FeatureLayout l;
  l.traffic = j.at("traffic").get<int>();
  l.time = j.at("time").get<int>();
  l.weather = j.at("weather").get<int>();
  l.poi = j.at("poi").get<int>();
  l.desc2vec = j.at("desc2vec").get<int>();
  l.steps = j.at("steps").get<int>();
  return l;
}

// ---------------------------------------------------------------------------
// Batch assembly
// ---------------------------------------------------------------------------

struct Batch {
  std::size_t n = 0;
  std::vector<Matrix2D> steps;  // per-step dynamics [n x interval_dim]
  Matrix2D poi;                 // [n x poi]
  Matrix2D d2v;                 // [n x desc2vec]
  Matrix2D flat;                // [n x total_dim]
  std::vector<int> regions;
  std::vector<int> labels;
};

inline Batch make_batch(const std::vector<const SampleEntry*>& rows, const FeatureLayout& layout,
                        bool want_branches, bool want_flat) {
  Batch b;
  b.n = rows.size();
  b.regions.reserve(b.n);
  b.labels.reserve(b.n);
  for (const SampleEntry* e : rows) {
    b.regions.push_back(e->region_index);
    b.labels.push_back(e->label);
  }
  const int dyn = layout.interval_dim();
  if (want_branches) {
    if (dyn > 0) {
      b.steps.assign(layout.steps, Matrix2D(b.n, dyn));
      for (std::size_t r = 0; r < b.n; ++r) {
        const double* src = rows[r]->dynamics.data();
        for (int s = 0; s < layout.steps; ++s)
          std::copy(src + static_cast<std::size_t>(s) * dyn,
                    src + static_cast<std::size_t>(s + 1) * dyn, b.steps[s].row(r));
      }
    }
    if (layout.poi > 0) {
      b.poi = Matrix2D(b.n, layout.poi);
      for (std::size_t r = 0; r < b.n; ++r)
        std::copy(rows[r]->statics.begin(), rows[r]->statics.begin() + layout.poi, b.poi.row(r));
    }
    if (layout.desc2vec > 0) {
      b.d2v = Matrix2D(b.n, layout.desc2vec);
      for (std::size_t r = 0; r < b.n; ++r)
        std::copy(rows[r]->statics.begin() + layout.poi, rows[r]->statics.end(), b.d2v.row(r));
    }
  }
  if (want_flat) {
    b.flat = Matrix2D(b.n, layout.total_dim());
    for (std::size_t r = 0; r < b.n; ++r) {
      double* dst = b.flat.row(r);
      std::copy(rows[r]->statics.begin(), rows[r]->statics.end(), dst);
      std::copy(rows[r]->dynamics.begin(), rows[r]->dynamics.end(),
                dst + rows[r]->statics.size());
    }
  }
  return b;
}

inline std::vector<const SampleEntry*> entry_pointers(const std::vector<SampleEntry>& entries) {
  std::vector<const SampleEntry*> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(&e);
  return out;
}

// ---------------------------------------------------------------------------
// Model contract
// ---------------------------------------------------------------------------

class Model {
public:
  virtual ~Model() = default;

  virtual std::string kind() const = 0;
  virtual nlohmann::json architecture() const = 0;
  virtual std::vector<nn::Param*> parameters() = 0;
  virtual std::vector<nn::NamedBuffer> buffers() = 0;
  virtual bool wants_branches() const = 0;

  // Probabilities [n x 2]; column 0 = non-accident, column 1 = accident.
  virtual Matrix2D forward(const Batch& batch, Mode mode) = 0;

  // Forward + cross entropy + full backward in the given mode; gradients
  // accumulate into the parameter blocks. Returns the loss.
  virtual double loss_and_grad(const Batch& batch, Mode mode) = 0;

  // Loss without touching gradients or batch statistics.
  double loss_only(const Batch& batch, Mode mode) {
    return nn::cross_entropy(forward(batch, mode), batch.labels) + regularization_loss();
  }

  virtual double regularization_loss() const { return 0.0; }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (nn::Param* p : parameters()) n += p->value.size();
    return n;
  }
};

// ---------------------------------------------------------------------------
// Shared classification head:
//   dense(s0) relu -> dense(s1) relu -> batchnorm -> dense(s2) relu ->
//   batchnorm -> dense(2) -> softmax
// ---------------------------------------------------------------------------

struct ClassifierHead {
  nn::Dense l1, l2, l3, l4;
  nn::BatchNorm bn2, bn3;

  // forward caches
  Matrix2D in_, a1_, a2_, b2_, a3_, b3_, probs_;

  ClassifierHead() = default;
  ClassifierHead(const std::string& name, std::size_t in_dim, const std::vector<int>& sizes,
                 RngStream& rng) {
    if (sizes.size() != 4 || sizes.back() != 2)
      fail(Errc::config, "classifier head needs four sizes ending in 2");
    l1 = nn::Dense(name + ".fc1", in_dim, sizes[0], rng);
    l2 = nn::Dense(name + ".fc2", sizes[0], sizes[1], rng);
    bn2 = nn::BatchNorm(name + ".bn2", sizes[1]);
    l3 = nn::Dense(name + ".fc3", sizes[1], sizes[2], rng);
    bn3 = nn::BatchNorm(name + ".bn3", sizes[2]);
    l4 = nn::Dense(name + ".fc4", sizes[2], sizes[3], rng);
  }

  Matrix2D forward(const Matrix2D& x, Mode mode) {
    in_ = x;
    a1_ = nn::relu_forward(l1.forward(x));
    a2_ = nn::relu_forward(l2.forward(a1_));
    b2_ = bn2.forward(a2_, mode);
    a3_ = nn::relu_forward(l3.forward(b2_));
    b3_ = bn3.forward(a3_, mode);
    probs_ = nn::softmax(l4.forward(b3_));
    return probs_;
  }

  // dlogits -> gradient of the head input.
  Matrix2D backward(const Matrix2D& dlogits) {
    Matrix2D d = l4.backward(b3_, dlogits);
    d = bn3.backward(d);
    d = nn::relu_backward(a3_, d);
    d = l3.backward(b2_, d);
    d = bn2.backward(d);
    d = nn::relu_backward(a2_, d);
    d = l2.backward(a1_, d);
    d = nn::relu_backward(a1_, d);
    return l1.backward(in_, d);
  }

  std::vector<nn::Param*> parameters() {
    return {&l1.W, &l1.b, &l2.W, &l2.b, &bn2.gamma, &bn2.beta,
            &l3.W, &l3.b, &bn3.gamma, &bn3.beta, &l4.W, &l4.b};
  }

  std::vector<nn::NamedBuffer> buffers(const std::string& name) {
    return {{name + ".bn2.running_mean", &bn2.running_mean},
            {name + ".bn2.running_var", &bn2.running_var},
            {name + ".bn3.running_mean", &bn3.running_mean},
            {name + ".bn3.running_var", &bn3.running_var}};
  }
};

// ---------------------------------------------------------------------------
// DAP
// ---------------------------------------------------------------------------

struct DapConfig {
  int region_count = 0;
  int embedding_dim = 128;
  int lstm_layers = 2;
  int lstm_hidden = 128;
  int branch_dense = 128;
  std::vector<int> head_sizes = {512, 256, 64, 2};
  bool use_embedding = true;
};

class DapModel : public Model {
public:
  DapModel(const DapConfig& cfg, const FeatureLayout& layout, RngStream rng)
      : cfg_(cfg), layout_(layout) {
    has_lstm_ = layout.interval_dim() > 0;
    has_poi_ = layout.poi > 0;
    has_d2v_ = layout.desc2vec > 0;
    if (!has_lstm_ && !has_poi_ && !has_d2v_ && !cfg.use_embedding)
      fail(Errc::empty_feature_set, "dap: no input branch remains");
    if (cfg.use_embedding && cfg.region_count < 1)
      fail(Errc::config, "dap: embedding requires region_count >= 1");

    std::size_t cat = 0;
    if (has_lstm_) {
      lstm_ = nn::LstmStack("lstm", layout.interval_dim(), cfg.lstm_hidden, cfg.lstm_layers, rng);
      cat += cfg.lstm_hidden;
    }
    if (cfg.use_embedding) {
      embedding_ = nn::Param("embedding", cfg.region_count, cfg.embedding_dim);
      nn::init_uniform(embedding_, cfg.region_count, cfg.embedding_dim, rng);
      emb_dense_ = nn::Dense("emb_fc", cfg.embedding_dim, cfg.branch_dense, rng);
      cat += cfg.branch_dense;
    }
    if (has_d2v_) {
      d2v_dense_ = nn::Dense("d2v_fc", layout.desc2vec, cfg.branch_dense, rng);
      cat += cfg.branch_dense;
    }
    if (has_poi_) {
      poi_dense_ = nn::Dense("poi_fc", layout.poi, cfg.branch_dense, rng);
      cat += cfg.branch_dense;
    }
    head_ = ClassifierHead("head", cat, cfg.head_sizes, rng);
    cat_width_ = cat;
  }

  std::string kind() const override { return cfg_.use_embedding ? "dap" : "dap-noembed"; }

  nlohmann::json architecture() const override {
    return nlohmann::json{{"kind", kind()},
                          {"layout", layout_to_json(layout_)},
                          {"region_count", cfg_.region_count},
                          {"embedding_dim", cfg_.embedding_dim},
                          {"lstm_layers", cfg_.lstm_layers},
                          {"lstm_hidden", cfg_.lstm_hidden},
                          {"branch_dense", cfg_.branch_dense},
                          {"head_sizes", cfg_.head_sizes}};
  }

  bool wants_branches() const override { return true; }

  std::size_t concat_width() const { return cat_width_; }

  Matrix2D forward(const Batch& batch, Mode mode) override {
    std::size_t col = 0;
    Matrix2D cat(batch.n, cat_width_);
    if (has_lstm_) {
      lstm_out_ = lstm_.forward(batch.steps, lstm_caches_);
      nn::set_columns(cat, col, lstm_out_);
      col += cfg_.lstm_hidden;
    }
    if (cfg_.use_embedding) {
      emb_rows_ = Matrix2D(batch.n, cfg_.embedding_dim);
      for (std::size_t r = 0; r < batch.n; ++r) {
        const int region = batch.regions[r];
        if (region < 0 || region >= cfg_.region_count)
          fail(Errc::unknown_region,
               "dap: region index " + std::to_string(region) + " outside [0, " +
                   std::to_string(cfg_.region_count) + ")");
        std::copy(embedding_.value.row(region), embedding_.value.row(region) + cfg_.embedding_dim,
                  emb_rows_.row(r));
      }
      emb_act_ = nn::sigmoid_forward(emb_dense_.forward(emb_rows_));
      nn::set_columns(cat, col, emb_act_);
      col += cfg_.branch_dense;
    }
    if (has_d2v_) {
      d2v_act_ = nn::sigmoid_forward(d2v_dense_.forward(batch.d2v));
      nn::set_columns(cat, col, d2v_act_);
      col += cfg_.branch_dense;
    }
    if (has_poi_) {
      poi_act_ = nn::sigmoid_forward(poi_dense_.forward(batch.poi));
      nn::set_columns(cat, col, poi_act_);
      col += cfg_.branch_dense;
    }
    return head_.forward(cat, mode);
  }

  double loss_and_grad(const Batch& batch, Mode mode) override {
    const Matrix2D probs = forward(batch, mode);
    const double loss = nn::cross_entropy(probs, batch.labels);
    const Matrix2D dlogits = nn::softmax_ce_grad(probs, batch.labels);
    Matrix2D dcat = head_.backward(dlogits);

    std::size_t col = 0;
    if (has_lstm_) {
      const Matrix2D d_lstm = nn::columns(dcat, col, col + cfg_.lstm_hidden);
      lstm_.backward(d_lstm, lstm_caches_);
      col += cfg_.lstm_hidden;
    }
    if (cfg_.use_embedding) {
      const Matrix2D d_emb_act = nn::columns(dcat, col, col + cfg_.branch_dense);
      const Matrix2D d_pre = nn::sigmoid_backward(emb_act_, d_emb_act);
      const Matrix2D d_rows = emb_dense_.backward(emb_rows_, d_pre);
      for (std::size_t r = 0; r < batch.n; ++r) {
        double* g = embedding_.grad.row(batch.regions[r]);
        const double* src = d_rows.row(r);
        for (int j = 0; j < cfg_.embedding_dim; ++j) g[j] += src[j];
      }
      col += cfg_.branch_dense;
    }
    if (has_d2v_) {
      const Matrix2D d_act = nn::columns(dcat, col, col + cfg_.branch_dense);
      d2v_dense_.backward(batch.d2v, nn::sigmoid_backward(d2v_act_, d_act));
      col += cfg_.branch_dense;
    }
    if (has_poi_) {
      const Matrix2D d_act = nn::columns(dcat, col, col + cfg_.branch_dense);
      poi_dense_.backward(batch.poi, nn::sigmoid_backward(poi_act_, d_act));
      col += cfg_.branch_dense;
    }
    return loss;
  }

  std::vector<nn::Param*> parameters() override {
    std::vector<nn::Param*> out;
    if (has_lstm_)
      for (nn::Param* p : lstm_.parameters()) out.push_back(p);
    if (cfg_.use_embedding) {
      out.push_back(&embedding_);
      out.push_back(&emb_dense_.W);
      out.push_back(&emb_dense_.b);
    }
    if (has_d2v_) {
      out.push_back(&d2v_dense_.W);
      out.push_back(&d2v_dense_.b);
    }
    if (has_poi_) {
      out.push_back(&poi_dense_.W);
      out.push_back(&poi_dense_.b);
    }
    for (nn::Param* p : head_.parameters()) out.push_back(p);
    return out;
  }

  std::vector<nn::NamedBuffer> buffers() override { return head_.buffers("head"); }

  const DapConfig& config() const { return cfg_; }

private:
  DapConfig cfg_;
  FeatureLayout layout_;
  bool has_lstm_ = false, has_poi_ = false, has_d2v_ = false;
  std::size_t cat_width_ = 0;

  nn::LstmStack lstm_;
  nn::Param embedding_;
  nn::Dense emb_dense_, d2v_dense_, poi_dense_;
  ClassifierHead head_;

  // forward caches
  std::vector<nn::LstmLayerCache> lstm_caches_;
  Matrix2D lstm_out_, emb_rows_, emb_act_, d2v_act_, poi_act_;
};

// ---------------------------------------------------------------------------
// DNN baseline
// ---------------------------------------------------------------------------

class DnnModel : public Model {
public:
  DnnModel(const FeatureLayout& layout, RngStream rng,
           const std::vector<int>& sizes = {512, 256, 64, 2})
      : layout_(layout), sizes_(sizes) {
    if (layout.total_dim() < 1) fail(Errc::empty_feature_set, "dnn: empty feature vector");
    head_ = ClassifierHead("head", layout.total_dim(), sizes, rng);
  }

  std::string kind() const override { return "dnn"; }
  nlohmann::json architecture() const override {
    return nlohmann::json{
        {"kind", "dnn"}, {"layout", layout_to_json(layout_)}, {"head_sizes", sizes_}};
  }
  bool wants_branches() const override { return false; }

  Matrix2D forward(const Batch& batch, Mode mode) override {
    return head_.forward(batch.flat, mode);
  }

  double loss_and_grad(const Batch& batch, Mode mode) override {
    const Matrix2D probs = forward(batch, mode);
    const double loss = nn::cross_entropy(probs, batch.labels);
    head_.backward(nn::softmax_ce_grad(probs, batch.labels));
    return loss;
  }

  std::vector<nn::Param*> parameters() override { return head_.parameters(); }
  std::vector<nn::NamedBuffer> buffers() override { return head_.buffers("head"); }

private:
  FeatureLayout layout_;
  std::vector<int> sizes_;
  ClassifierHead head_;
};

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

enum class Penalty : int { none = 0, l1 = 1, l2 = 2 };

class LogRegModel : public Model {
public:
  LogRegModel(const FeatureLayout& layout, Penalty penalty, double lambda, RngStream rng)
      : layout_(layout), penalty_(penalty), lambda_(lambda) {
    if (layout.total_dim() < 1) fail(Errc::empty_feature_set, "logreg: empty feature vector");
    if (lambda < 0.0) fail(Errc::invalid_penalty, "logreg: penalty weight must be >= 0");
    linear_ = nn::Dense("linear", layout.total_dim(), 2, rng);
  }

  std::string kind() const override { return "logreg"; }
  nlohmann::json architecture() const override {
    return nlohmann::json{{"kind", "logreg"},
                          {"layout", layout_to_json(layout_)},
                          {"penalty", static_cast<int>(penalty_)},
                          {"lambda", lambda_}};
  }
  bool wants_branches() const override { return false; }

  Matrix2D forward(const Batch& batch, Mode) override {
    return nn::softmax(linear_.forward(batch.flat));
  }

  double regularization_loss() const override {
    if (penalty_ == Penalty::none || lambda_ == 0.0) return 0.0;
    double s = 0.0;
    const double* w = linear_.W.value.data();
    for (std::size_t i = 0; i < linear_.W.value.size(); ++i)
      s += penalty_ == Penalty::l1 ? std::abs(w[i]) : w[i] * w[i];
    return lambda_ * s;
  }

  double loss_and_grad(const Batch& batch, Mode mode) override {
    const Matrix2D probs = forward(batch, mode);
    const double loss = nn::cross_entropy(probs, batch.labels) + regularization_loss();
    linear_.backward(batch.flat, nn::softmax_ce_grad(probs, batch.labels));
    if (penalty_ != Penalty::none && lambda_ != 0.0) {
      const double* w = linear_.W.value.data();
      double* g = linear_.W.grad.data();
      for (std::size_t i = 0; i < linear_.W.value.size(); ++i) {
        if (penalty_ == Penalty::l1) g[i] += lambda_ * (w[i] > 0 ? 1.0 : (w[i] < 0 ? -1.0 : 0.0));
        else g[i] += 2.0 * lambda_ * w[i];
      }
    }
    return loss;
  }

  std::vector<nn::Param*> parameters() override { return {&linear_.W, &linear_.b}; }
  std::vector<nn::NamedBuffer> buffers() override { return {}; }

  const Matrix2D& weights() const { return linear_.W.value; }

private:
  FeatureLayout layout_;
  Penalty penalty_;
  double lambda_;
  nn::Dense linear_;
};

// ---------------------------------------------------------------------------
// Builders and prediction
// ---------------------------------------------------------------------------

inline std::unique_ptr<Model> build_dap(const DapConfig& cfg, const FeatureLayout& layout,
                                        std::uint64_t seed) {
  return std::make_unique<DapModel>(cfg, layout, RngStream(seed));
}

inline std::unique_ptr<Model> build_dnn(const FeatureLayout& layout, std::uint64_t seed,
                                        const std::vector<int>& sizes = {512, 256, 64, 2}) {
  return std::make_unique<DnnModel>(layout, RngStream(seed), sizes);
}

inline std::unique_ptr<Model> build_logreg(const FeatureLayout& layout, Penalty penalty,
                                           double lambda, std::uint64_t seed) {
  return std::make_unique<LogRegModel>(layout, penalty, lambda, RngStream(seed));
}

// Rebuild a model skeleton from a checkpoint's architecture descriptor.
inline std::unique_ptr<Model> model_from_architecture(const nlohmann::json& arch,
                                                      std::uint64_t seed = 0) {
  const std::string kind = arch.at("kind").get<std::string>();
  const FeatureLayout layout = layout_from_json(arch.at("layout"));
  if (kind == "dap" || kind == "dap-noembed") {
    DapConfig cfg;
    cfg.region_count = arch.at("region_count").get<int>();
    cfg.embedding_dim = arch.at("embedding_dim").get<int>();
    cfg.lstm_layers = arch.at("lstm_layers").get<int>();
    cfg.lstm_hidden = arch.at("lstm_hidden").get<int>();
    cfg.branch_dense = arch.at("branch_dense").get<int>();
    cfg.head_sizes = arch.at("head_sizes").get<std::vector<int>>();
    cfg.use_embedding = kind == "dap";
    return build_dap(cfg, layout, seed);
  }
  if (kind == "dnn")
    return build_dnn(layout, seed, arch.at("head_sizes").get<std::vector<int>>());
  if (kind == "logreg")
    return build_logreg(layout, static_cast<Penalty>(arch.at("penalty").get<int>()),
                        arch.at("lambda").get<double>(), seed);
  fail(Errc::config, "unknown model kind '" + kind + "'");
}

struct Prediction {
  double prob_non_accident = 0.0;
  double prob_accident = 0.0;
  int hard_label = 0;
};

inline std::vector<Prediction> predict(Model& m, const std::vector<SampleEntry>& entries,
                                       const FeatureLayout& layout, std::size_t batch_size = 256) {
  std::vector<Prediction> out;
  out.reserve(entries.size());
  std::vector<const SampleEntry*> chunk;
  for (std::size_t begin = 0; begin < entries.size(); begin += batch_size) {
    const std::size_t end = std::min(entries.size(), begin + batch_size);
    chunk.clear();
    for (std::size_t i = begin; i < end; ++i) chunk.push_back(&entries[i]);
    const Batch b = make_batch(chunk, layout, m.wants_branches(), !m.wants_branches());
    const Matrix2D probs = m.forward(b, Mode::eval);
    for (std::size_t i = 0; i < probs.rows(); ++i) {
      Prediction p;
      p.prob_non_accident = probs.at(i, 0);
      p.prob_accident = probs.at(i, 1);
      p.hard_label = probs.at(i, 1) > probs.at(i, 0) ? 1 : 0;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace dap
