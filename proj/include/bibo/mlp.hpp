#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bibo/model.hpp"
#include "bibo/rng.hpp"

namespace bibo {

enum class LrSchedule : std::uint8_t { Constant = 0, InvScaling = 1 };

std::string_view to_string(LrSchedule schedule);
LrSchedule lr_schedule_from_string(std::string_view text);

struct MlpConfig {
    std::vector<int> hidden = {50};
    LrSchedule schedule = LrSchedule::Constant;
    double learning_rate = 1e-3;  // invscaling: lr_t = lr0 / sqrt(epoch)
    int max_epochs = 500;
    int batch_size = 32;
    int patience = 20;  // epochs without training-loss improvement
    std::uint64_t seed = 0;

    // trainable parameter count, for complexity tie-breaks
    std::int64_t complexity(std::int64_t n_inputs) const;
};

// The paper's 12-point search space, in canonical enumeration order.
std::vector<MlpConfig> mlp_grid();

// Feed-forward ReLU network with a 2-way softmax head, trained on
// cross-entropy. Exposed so the analytic gradient can be checked against
// finite differences.
class MlpNet {
public:
    MlpNet(std::size_t n_inputs, const std::vector<int>& hidden, Rng& rng);

    // Mean cross-entropy over the batch; gradients match the layer shapes.
    double loss_and_gradient(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& y,
                             std::vector<Eigen::MatrixXd>& grad_w,
                             std::vector<Eigen::VectorXd>& grad_b) const;

    // P(class 1) per row.
    Eigen::VectorXd predict_prob1(const Eigen::MatrixXd& X) const;

    std::size_t param_count() const;
    double get_param(std::size_t flat_index) const;
    void set_param(std::size_t flat_index, double value);

    std::vector<Eigen::MatrixXd> weights;  // [layer](fan_in x fan_out)
    std::vector<Eigen::VectorXd> biases;
};

class MlpModel final : public TrainedModel {
public:
    MlpModel(MlpConfig config, std::vector<std::string> schema, bool degenerate,
             double degenerate_prob, MlpNet net, std::vector<double> feat_mean,
             std::vector<double> feat_scale);

    std::vector<double> predict_scores(std::span<const double> data,
                                       std::size_t n_rows) const override;
    std::string params_json() const override;

    const MlpConfig& config() const { return config_; }
    const MlpNet& net() const { return net_; }
    int trained_epochs() const { return trained_epochs_; }

    MlpConfig config_;
    MlpNet net_;
    std::vector<double> feat_mean_;
    std::vector<double> feat_scale_;
    double degenerate_prob_ = 0.0;
    int trained_epochs_ = 0;
};

// Mini-batch gradient descent with adaptive moment estimation on the z-score
// standardized features (statistics from the training rows travel with the
// model). Throws DomainError with the epoch and learning rate when the loss
// turns non-finite.
std::unique_ptr<MlpModel> train_mlp(const TrainInput& input, const MlpConfig& config);

}  // namespace bibo
