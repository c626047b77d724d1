#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wg/spaces.hpp"

namespace wg {

struct MlpTrainingConfig {
  std::vector<int> hidden = {64, 64};
  double learning_rate = 5e-3;  // Adam
  int epochs = 60;
  int batch_size = 32;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
};

/// Fully connected ReLU network. Binary problems use one output logit z
/// (class 1 scores z, class 0 scores -z); multiclass problems use one logit
/// per class. Class scores are logits, so input gradients do not saturate.
class MlpModel {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  MlpModel(int input_dim, const std::vector<int>& hidden, int num_classes, std::uint64_t seed);

  int input_dim() const noexcept { return input_dim_; }
  int num_classes() const noexcept { return num_classes_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }

  // Batch x outputs matrix of raw network outputs.
  Eigen::MatrixXd outputs(const Matrix& x) const;
  // Batch x num_classes class scores.
  Eigen::MatrixXd class_scores(const Matrix& x) const;

  // Argmax of the class scores; ties go to the lower class index.
  std::vector<int> predict(const Matrix& x) const;
  int predict(const Vector& x) const;
  double class_score(const Vector& x, int cls) const;

  /// Row i is d score_{classes[i]} / dx at x.row(i).
  Matrix score_gradients(const Matrix& x, std::span<const int> classes) const;
  Vector score_gradient(const Vector& x, int cls) const;

 private:
  int output_dim() const noexcept { return num_classes_ == 2 ? 1 : num_classes_; }

  int input_dim_;
  int num_classes_;
  std::vector<Layer> layers_;
};

/// Minibatch Adam on cross-entropy; deterministic for a fixed seed. Throws
/// NumericError if the loss becomes non-finite.
MlpModel train(const Matrix& data, std::span<const int> labels, const MlpTrainingConfig& config);

double accuracy(const MlpModel& model, const Matrix& data, std::span<const int> labels);

}  // namespace wg
