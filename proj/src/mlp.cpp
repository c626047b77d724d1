#include "wg/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "wg/random.hpp"

namespace wg {

namespace {

using Dense = Eigen::MatrixXd;

struct ForwardPass {
  std::vector<Dense> activations;  // activations[0] = input, batch x width
  std::vector<Dense> pre;          // pre-activations of each layer
};

ForwardPass forward(const std::vector<MlpModel::Layer>& layers, const Dense& x) {
  ForwardPass fp;
  fp.activations.push_back(x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Dense z = fp.activations.back() * layers[l].weight.transpose();
    z.rowwise() += layers[l].bias.transpose();
    fp.pre.push_back(z);
    if (l + 1 < layers.size())
      fp.activations.push_back(z.cwiseMax(0.0));
    else
      fp.activations.push_back(z);
  }
  return fp;
}

// Propagates d(loss)/d(output) back to d(loss)/d(input); optionally
// accumulates parameter gradients.
Dense backward(const std::vector<MlpModel::Layer>& layers, const ForwardPass& fp, Dense delta,
               std::vector<MlpModel::Layer>* grads) {
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 < layers.size()) delta = delta.cwiseProduct((fp.pre[l].array() > 0.0).cast<double>().matrix());
    if (grads) {
      (*grads)[l].weight = delta.transpose() * fp.activations[l];
      (*grads)[l].bias = delta.colwise().sum().transpose();
    }
    delta = delta * layers[l].weight;
  }
  return delta;
}

}  // namespace

MlpModel::MlpModel(int input_dim, const std::vector<int>& hidden, int num_classes, std::uint64_t seed)
    : input_dim_(input_dim), num_classes_(num_classes) {
  if (input_dim < 1) throw ConfigError("MLP input dimension must be >= 1");
  if (num_classes < 2) throw ConfigError("MLP needs at least two classes");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  int fan_in = input_dim;
  std::vector<int> widths = hidden;
  widths.push_back(output_dim());
  for (int width : widths) {
    if (width < 1) throw ConfigError("MLP layer width must be >= 1");
    Layer layer{Eigen::MatrixXd(width, fan_in), Eigen::VectorXd::Zero(width)};
    const double scale = std::sqrt(2.0 / fan_in);  // He initialization
    for (Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = scale * normal(rng);
    layers_.push_back(std::move(layer));
    fan_in = width;
  }
}

Eigen::MatrixXd MlpModel::outputs(const Matrix& x) const {
  if (x.cols() != input_dim_) throw ConfigError("MLP input has wrong dimension");
  return forward(layers_, x).activations.back();
}

Eigen::MatrixXd MlpModel::class_scores(const Matrix& x) const {
  Eigen::MatrixXd out = outputs(x);
  if (num_classes_ != 2) return out;
  Eigen::MatrixXd scores(out.rows(), 2);
  scores.col(0) = -out.col(0);
  scores.col(1) = out.col(0);
  return scores;
}

std::vector<int> MlpModel::predict(const Matrix& x) const {
  const Eigen::MatrixXd scores = class_scores(x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < num_classes_; ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

int MlpModel::predict(const Vector& x) const { return predict(Matrix(x.transpose())).front(); }

double MlpModel::class_score(const Vector& x, int cls) const {
  return class_scores(Matrix(x.transpose()))(0, cls);
}

Matrix MlpModel::score_gradients(const Matrix& x, std::span<const int> classes) const {
  if (x.cols() != input_dim_) throw ConfigError("MLP input has wrong dimension");
  if (static_cast<Index>(classes.size()) != x.rows()) throw ConfigError("one target class per row required");
  const ForwardPass fp = forward(layers_, x);
  Dense seed = Dense::Zero(x.rows(), output_dim());
  for (Index i = 0; i < x.rows(); ++i) {
    const int c = classes[static_cast<std::size_t>(i)];
    if (c < 0 || c >= num_classes_) throw ConfigError("target class out of range");
    if (num_classes_ == 2)
      seed(i, 0) = c == 1 ? 1.0 : -1.0;
    else
      seed(i, c) = 1.0;
  }
  return backward(layers_, fp, std::move(seed), nullptr);
}

Vector MlpModel::score_gradient(const Vector& x, int cls) const {
  const int classes[] = {cls};
  return score_gradients(Matrix(x.transpose()), classes).row(0).transpose();
}

MlpModel train(const Matrix& data, std::span<const int> labels, const MlpTrainingConfig& config) {
  if (data.rows() < 1) throw ConfigError("training needs at least one sample");
  if (static_cast<Index>(labels.size()) != data.rows()) throw ConfigError("one label per sample required");
  if (config.epochs < 1 || config.batch_size < 1 || !(config.learning_rate > 0))
    throw ConfigError("invalid training configuration");
  const int max_label = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 0) throw ConfigError("labels must be >= 0");
  const int num_classes = std::max(2, max_label + 1);

  Rng rng(derive_seed(config.seed, Stream::Training));
  MlpModel model(static_cast<int>(data.cols()), config.hidden, num_classes, rng());
  auto& layers = model.layers();

  // Adam state.
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  std::vector<MlpModel::Layer> m1, m2;
  for (const auto& l : layers) {
    m1.push_back({Dense::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
    m2.push_back(m1.back());
  }
  std::vector<MlpModel::Layer> grads(layers.size());

  const Index n = data.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Index start = 0; start < n; start += config.batch_size) {
      const Index b = std::min<Index>(config.batch_size, n - start);
      Dense xb(b, data.cols());
      std::vector<int> yb(static_cast<std::size_t>(b));
      for (Index i = 0; i < b; ++i) {
        const Index src = order[static_cast<std::size_t>(start + i)];
        xb.row(i) = data.row(src);
        yb[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(src)];
      }
      const ForwardPass fp = forward(layers, xb);
      const Dense& out = fp.activations.back();
      Dense delta(b, out.cols());
      double loss = 0.0;
      if (num_classes == 2) {
        for (Index i = 0; i < b; ++i) {
          const double z = out(i, 0);
          const double y = yb[static_cast<std::size_t>(i)];
          // Stable log(1 + exp(-|z|)) form of binary cross-entropy.
          loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
          delta(i, 0) = (1.0 / (1.0 + std::exp(-z)) - y) / b;
        }
      } else {
        for (Index i = 0; i < b; ++i) {
          const double zmax = out.row(i).maxCoeff();
          const Eigen::RowVectorXd e = (out.row(i).array() - zmax).exp();
          const double total = e.sum();
          const int y = yb[static_cast<std::size_t>(i)];
          loss += -(out(i, y) - zmax - std::log(total));
          delta.row(i) = e / total / static_cast<double>(b);
          delta(i, y) -= 1.0 / b;
        }
      }
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged (non-finite loss) at epoch " << epoch << " with learning_rate="
            << config.learning_rate << ", batch_size=" << config.batch_size
            << ", epochs=" << config.epochs << ", seed=" << config.seed;
        throw NumericError(msg.str());
      }
      backward(layers, fp, std::move(delta), &grads);

      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t l = 0; l < layers.size(); ++l) {
        if (config.weight_decay > 0) grads[l].weight += config.weight_decay * layers[l].weight;
        m1[l].weight = beta1 * m1[l].weight + (1 - beta1) * grads[l].weight;
        m2[l].weight = beta2 * m2[l].weight + (1 - beta2) * grads[l].weight.cwiseAbs2();
        m1[l].bias = beta1 * m1[l].bias + (1 - beta1) * grads[l].bias;
        m2[l].bias = beta2 * m2[l].bias + (1 - beta2) * grads[l].bias.cwiseAbs2();
        layers[l].weight.array() -= config.learning_rate * (m1[l].weight.array() / c1) /
                                    ((m2[l].weight.array() / c2).sqrt() + adam_eps);
        layers[l].bias.array() -= config.learning_rate * (m1[l].bias.array() / c1) /
                                  ((m2[l].bias.array() / c2).sqrt() + adam_eps);
      }
    }
  }
  return model;
}

double accuracy(const MlpModel& model, const Matrix& data, std::span<const int> labels) {
  const std::vector<int> pred = model.predict(data);
  long hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace wg
