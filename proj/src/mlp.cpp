#include "bibo/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "bibo/errors.hpp"
#include "bibo/text.hpp"

namespace bibo {

std::string_view to_string(LrSchedule schedule) {
    return schedule == LrSchedule::Constant ? "constant" : "invscaling";
}

LrSchedule lr_schedule_from_string(std::string_view text) {
    if (text == "constant") return LrSchedule::Constant;
    if (text == "invscaling") return LrSchedule::InvScaling;
    throw SchemaError("unknown learning-rate schedule '" + std::string(text) + "'");
}

std::int64_t MlpConfig::complexity(std::int64_t n_inputs) const {
    std::int64_t total = 0;
    std::int64_t fan_in = n_inputs;
    for (int h : hidden) {
        total += (fan_in + 1) * h;
        fan_in = h;
    }
    total += (fan_in + 1) * 2;
    return total;
}

std::vector<MlpConfig> mlp_grid() {
    static const std::vector<std::vector<int>> architectures = {
        {50}, {10, 50, 10}, {10, 50, 50, 10}};
    static const LrSchedule schedules[] = {LrSchedule::Constant, LrSchedule::InvScaling};
    static const double rates[] = {1e-2, 1e-3};
    std::vector<MlpConfig> grid;
    grid.reserve(12);
    for (const auto& hidden : architectures) {
        for (LrSchedule s : schedules) {
            for (double lr : rates) {
                MlpConfig cfg;
                cfg.hidden = hidden;
                cfg.schedule = s;
                cfg.learning_rate = lr;
                grid.push_back(cfg);
            }
        }
    }
    return grid;
}

MlpNet::MlpNet(std::size_t n_inputs, const std::vector<int>& hidden, Rng& rng) {
    std::vector<std::size_t> sizes;
    sizes.push_back(n_inputs);
    for (int h : hidden) {
        if (h < 1) throw ConfigError("MlpConfig: hidden layer sizes must be >= 1");
        sizes.push_back(static_cast<std::size_t>(h));
    }
    sizes.push_back(2);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t fan_in = sizes[l];
        const std::size_t fan_out = sizes[l + 1];
        Eigen::MatrixXd w(fan_in, fan_out);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < fan_in; ++i) {
            for (std::size_t j = 0; j < fan_out; ++j) {
                w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (2.0 * rng.uniform() - 1.0) * bound;
            }
        }
        weights.push_back(std::move(w));
        biases.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out)));
    }
}

namespace {

// Row-wise softmax probabilities, numerically shifted.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out = logits;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        const double m = out.row(r).maxCoeff();
        out.row(r) = (out.row(r).array() - m).exp();
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

}  // namespace

double MlpNet::loss_and_gradient(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& y,
                                 std::vector<Eigen::MatrixXd>& grad_w,
                                 std::vector<Eigen::VectorXd>& grad_b) const {
    const Eigen::Index batch = X.rows();
    const std::size_t n_layers = weights.size();

    std::vector<Eigen::MatrixXd> activations;  // post-ReLU inputs per layer
    activations.reserve(n_layers);
    activations.push_back(X);
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        Eigen::MatrixXd z = (activations.back() * weights[l]).rowwise() + biases[l].transpose();
        activations.push_back(z.cwiseMax(0.0));
    }
    const Eigen::MatrixXd logits =
        (activations.back() * weights[n_layers - 1]).rowwise() + biases[n_layers - 1].transpose();
    const Eigen::MatrixXd probs = softmax_rows(logits);

    double loss = 0.0;
    Eigen::MatrixXd delta = probs;  // dL/dlogits, scaled by 1/batch below
    for (Eigen::Index r = 0; r < batch; ++r) {
        const Eigen::Index cls = y[static_cast<std::size_t>(r)] ? 1 : 0;
        const double p = std::max(probs(r, cls), 1e-300);
        loss -= std::log(p);
        delta(r, cls) -= 1.0;
    }
    loss /= static_cast<double>(batch);
    delta /= static_cast<double>(batch);

    grad_w.assign(n_layers, Eigen::MatrixXd());
    grad_b.assign(n_layers, Eigen::VectorXd());
    for (std::size_t l = n_layers; l-- > 0;) {
        grad_w[l] = activations[l].transpose() * delta;
        grad_b[l] = delta.colwise().sum();
        if (l > 0) {
            Eigen::MatrixXd upstream = delta * weights[l].transpose();
            // ReLU gate: activations[l] is already the rectified output
            delta = upstream.cwiseProduct(
                (activations[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return loss;
}

Eigen::VectorXd MlpNet::predict_prob1(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd h = X;
    for (std::size_t l = 0; l + 1 < weights.size(); ++l) {
        h = ((h * weights[l]).rowwise() + biases[l].transpose()).cwiseMax(0.0);
    }
    const Eigen::MatrixXd logits =
        (h * weights.back()).rowwise() + biases.back().transpose();
    return softmax_rows(logits).col(1);
}

std::size_t MlpNet::param_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        total += static_cast<std::size_t>(weights[l].size());
        total += static_cast<std::size_t>(biases[l].size());
    }
    return total;
}

double MlpNet::get_param(std::size_t flat_index) const {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::size_t ws = static_cast<std::size_t>(weights[l].size());
        if (flat_index < ws) return weights[l].data()[flat_index];
        flat_index -= ws;
        const std::size_t bs = static_cast<std::size_t>(biases[l].size());
        if (flat_index < bs) return biases[l].data()[flat_index];
        flat_index -= bs;
    }
    throw std::out_of_range("MlpNet::get_param: index out of range");
}

void MlpNet::set_param(std::size_t flat_index, double value) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::size_t ws = static_cast<std::size_t>(weights[l].size());
        if (flat_index < ws) {
            weights[l].data()[flat_index] = value;
            return;
        }
        flat_index -= ws;
        const std::size_t bs = static_cast<std::size_t>(biases[l].size());
        if (flat_index < bs) {
            biases[l].data()[flat_index] = value;
            return;
        }
        flat_index -= bs;
    }
    throw std::out_of_range("MlpNet::set_param: index out of range");
}

MlpModel::MlpModel(MlpConfig config, std::vector<std::string> schema, bool degenerate,
                   double degenerate_prob, MlpNet net, std::vector<double> feat_mean,
                   std::vector<double> feat_scale)
    : TrainedModel(ModelKind::MLP, std::move(schema), degenerate),
      config_(std::move(config)),
      net_(std::move(net)),
      feat_mean_(std::move(feat_mean)),
      feat_scale_(std::move(feat_scale)),
      degenerate_prob_(degenerate_prob) {}

std::vector<double> MlpModel::predict_scores(std::span<const double> data,
                                             std::size_t n_rows) const {
    std::vector<double> scores(n_rows);
    if (degenerate_) {
        std::fill(scores.begin(), scores.end(), degenerate_prob_);
        return scores;
    }
    const std::size_t n_cols = schema_.size();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t f = 0; f < n_cols; ++f) {
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) =
                (data[r * n_cols + f] - feat_mean_[f]) / feat_scale_[f];
        }
    }
    const Eigen::VectorXd p = net_.predict_prob1(X);
    for (std::size_t r = 0; r < n_rows; ++r) scores[r] = p(static_cast<Eigen::Index>(r));
    return scores;
}

std::unique_ptr<MlpModel> train_mlp(const TrainInput& input, const MlpConfig& config) {
    if (config.max_epochs < 0) throw ConfigError("MlpConfig: max_epochs must be >= 0");
    if (config.batch_size < 1) throw ConfigError("MlpConfig: batch_size must be >= 1");
    if (!(config.learning_rate > 0.0)) {
        throw ConfigError("MlpConfig: learning rate must be > 0");
    }
    const std::size_t n = input.rows.size();
    const std::size_t n_features = input.n_cols;
    if (n < 2) throw std::invalid_argument("train_mlp: need at least 2 training rows");

    std::vector<std::string> schema(input.columns.begin(), input.columns.end());
    Rng rng(derive_seed(config.seed, "mlp.train"));

    std::size_t n_pos = 0;
    for (std::size_t r : input.rows) {
        if (input.labels[r] == Bibo::BI) ++n_pos;
    }
    if (n_pos == 0 || n_pos == n) {
        MlpNet net(n_features, config.hidden, rng);
        return std::make_unique<MlpModel>(config, std::move(schema), true,
                                          n_pos == 0 ? 0.0 : 1.0, std::move(net),
                                          std::vector<double>(n_features, 0.0),
                                          std::vector<double>(n_features, 1.0));
    }

    // z-score standardization fitted on the training rows
    std::vector<double> mean(n_features, 0.0), scale(n_features, 0.0);
    for (std::size_t r : input.rows) {
        const double* row = input.data.data() + r * n_features;
        for (std::size_t f = 0; f < n_features; ++f) mean[f] += row[f];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t r : input.rows) {
        const double* row = input.data.data() + r * n_features;
        for (std::size_t f = 0; f < n_features; ++f) {
            const double d = row[f] - mean[f];
            scale[f] += d * d;
        }
    }
    for (double& s : scale) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s <= 0.0) s = 1.0;
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_features));
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = input.rows[i];
        const double* row = input.data.data() + r * n_features;
        for (std::size_t f = 0; f < n_features; ++f) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) =
                (row[f] - mean[f]) / scale[f];
        }
        y[i] = input.labels[r] == Bibo::BI ? 1 : 0;
    }

    MlpNet net(n_features, config.hidden, rng);

    // Adam state
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        m_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        v_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        m_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        v_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    std::int64_t step = 0;

    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    std::vector<Eigen::MatrixXd> grad_w;
    std::vector<Eigen::VectorXd> grad_b;

    double best_loss = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;
    int epoch = 0;
    for (epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const double lr = config.schedule == LrSchedule::Constant
                              ? config.learning_rate
                              : config.learning_rate / std::sqrt(static_cast<double>(epoch));
        rng.shuffle(indices);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
            const std::size_t bsz = stop - start;
            Eigen::MatrixXd bx(static_cast<Eigen::Index>(bsz),
                               static_cast<Eigen::Index>(n_features));
            std::vector<std::uint8_t> by(bsz);
            for (std::size_t i = 0; i < bsz; ++i) {
                bx.row(static_cast<Eigen::Index>(i)) =
                    X.row(static_cast<Eigen::Index>(indices[start + i]));
                by[i] = y[indices[start + i]];
            }
            const double loss = net.loss_and_gradient(bx, by, grad_w, grad_b);
            if (!std::isfinite(loss)) {
                throw DomainError("train_mlp: non-finite loss at epoch " + format_int(epoch) +
                                  " (lr=" + format_double(lr) + ")");
            }
            epoch_loss += loss;
            ++batches;
            ++step;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                m_w[l] = beta1 * m_w[l] + (1.0 - beta1) * grad_w[l];
                v_w[l] = beta2 * v_w[l] + (1.0 - beta2) * grad_w[l].cwiseProduct(grad_w[l]);
                net.weights[l].array() -=
                    lr * (m_w[l].array() / bc1) / ((v_w[l].array() / bc2).sqrt() + eps);
                m_b[l] = beta1 * m_b[l] + (1.0 - beta1) * grad_b[l];
                v_b[l] = beta2 * v_b[l] + (1.0 - beta2) * grad_b[l].cwiseProduct(grad_b[l]);
                net.biases[l].array() -=
                    lr * (m_b[l].array() / bc1) / ((v_b[l].array() / bc2).sqrt() + eps);
            }
        }
        epoch_loss /= static_cast<double>(batches);
        if (epoch_loss < best_loss - 1e-6) {
            best_loss = epoch_loss;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.patience) {
            break;
        }
    }

    auto model = std::make_unique<MlpModel>(config, std::move(schema), false, 0.0, std::move(net),
                                            std::move(mean), std::move(scale));
    model->trained_epochs_ = std::min(epoch, config.max_epochs);
    return model;
}

std::string MlpModel::params_json() const {
    nlohmann::json j;
    j["hidden"] = config_.hidden;
    j["schedule"] = std::string(to_string(config_.schedule));
    j["learning_rate"] = config_.learning_rate;
    j["max_epochs"] = config_.max_epochs;
    j["batch_size"] = config_.batch_size;
    j["patience"] = config_.patience;
    j["seed"] = config_.seed;
    j["degenerate_prob"] = degenerate_prob_;
    j["trained_epochs"] = trained_epochs_;
    j["feat_mean"] = feat_mean_;
    j["feat_scale"] = feat_scale_;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net_.weights.size(); ++l) {
        nlohmann::json layer;
        const auto& w = net_.weights[l];
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(w.rows()));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            rows[static_cast<std::size_t>(r)].assign(w.row(r).begin(), w.row(r).end());
        }
        layer["w"] = rows;
        layer["b"] = std::vector<double>(net_.biases[l].begin(), net_.biases[l].end());
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump();
}

}  // namespace bibo
