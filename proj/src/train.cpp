#include "secfn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace secfn {

namespace {

std::vector<Mat> snapshot(const std::vector<Param*>& params) {
  std::vector<Mat> out;
  out.reserve(params.size());
  for (Param* p : params) out.push_back(p->w);
  return out;
}

void restore(const std::vector<Param*>& params, const std::vector<Mat>& snap) {
  for (size_t i = 0; i < params.size(); ++i) params[i]->w = snap[i];
}

}  // namespace

TrainHistory train_neural(NeuralModel& model, const EncodedCorpus& data,
                          std::vector<TrainExample> train, const std::vector<TrainExample>& valid,
                          const std::vector<Label>& macro_classes) {
  if (train.empty() || valid.empty())
    throw DataError("train_neural: train and validation sets must be nonempty");
  const Hyper& hy = model.hyper();
  Rng rng(derive_seed(hy.seed, 0x7261696e));
  std::vector<Param*> params = model.params();

  std::vector<Label> valid_gold;
  valid_gold.reserve(valid.size());
  for (const auto& ex : valid) {
    if (ex.label < 0) throw DataError("train_neural: unlabeled validation example");
    valid_gold.push_back(label_from_id(ex.label));
  }

  TrainHistory hist;
  std::vector<Mat> best = snapshot(params);
  const int micro = model.micro_batch_size();

  for (int epoch = 0; epoch < hy.max_epochs; ++epoch) {
    rng.shuffle(train);
    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t b0 = 0; b0 < train.size(); b0 += static_cast<size_t>(hy.batch_size)) {
      const size_t b1 = std::min(train.size(), b0 + static_cast<size_t>(hy.batch_size));
      for (Param* p : params) p->zero_grad();
      for (size_t m0 = b0; m0 < b1; m0 += static_cast<size_t>(micro)) {
        const size_t m1 = std::min(b1, m0 + static_cast<size_t>(micro));
        std::vector<TrainExample> part(train.begin() + static_cast<long>(m0),
                                       train.begin() + static_cast<long>(m1));
        std::vector<int> labels;
        labels.reserve(part.size());
        for (const auto& ex : part) {
          if (ex.label < 0) throw DataError("train_neural: unlabeled training example");
          labels.push_back(ex.label);
        }
        Tape t;
        Var* logits = model.forward(t, data, part, true, &rng);
        Var* loss = t.cross_entropy_mean(logits, labels);
        if (!std::isfinite(loss->val.a[0]))
          throw InternalError("train_neural: non-finite loss at epoch " + std::to_string(epoch) +
                              " (learning rate too high for the data scale?)");
        t.backward(loss);
        // batch-summed cross-entropy: the fixed learning rate acts on the sum
        // of per-example losses over the mini-batch
        t.flush_param_grads(static_cast<double>(m1 - m0));
        epoch_loss += loss->val.a[0] * static_cast<double>(m1 - m0);
        seen += m1 - m0;
      }
      for (Param* p : params) {
        if (p->pad_row0)
          for (int j = 0; j < p->g.cols; ++j) p->g.at(0, j) = 0.0;
        for (size_t i = 0; i < p->w.size(); ++i) p->w.a[i] -= hy.learning_rate * p->g.a[i];
      }
    }
    hist.train_loss.push_back(epoch_loss / static_cast<double>(seen));

    const std::vector<Label> pred = model.predict(data, valid);
    const MetricsReport rep = evaluate_predictions(valid_gold, pred, macro_classes);
    const double f1 = rep.macro().f1;
    hist.valid_macro_f1.push_back(f1);
    if (std::getenv("SECFN_TRAIN_LOG"))
      std::fprintf(stderr, "[train] %s epoch %d loss %.5f valid-f1 %.4f\n",
                   arch_name(model.spec().kind), epoch, hist.train_loss.back(), f1);
    if (f1 > hist.best_f1) {
      hist.best_f1 = f1;
      hist.best_epoch = epoch;
      best = snapshot(params);
    } else if (epoch - hist.best_epoch >= hy.patience) {
      break;
    }
  }
  restore(params, best);
  return hist;
}

}  // namespace secfn
