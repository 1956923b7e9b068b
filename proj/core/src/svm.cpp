#include "aedkit/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

// Regularized weighted hinge objective:
//   0.5 * lambda * |w|^2 + (1/n) * sum_i c_i * max(0, 1 - y_i * (w.x_i + b))
double objective(const Matrix& x, const std::vector<double>& y,
                 const std::vector<double>& cost, double lambda,
                 const Vector& w, double b) {
  const Eigen::Index n = x.cols();
  double hinge = 0.0;
  Vector scores = x.transpose() * w;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double margin = y[static_cast<std::size_t>(i)] * (scores(i) + b);
    if (margin < 1.0) hinge += cost[static_cast<std::size_t>(i)] * (1.0 - margin);
  }
  return 0.5 * lambda * w.squaredNorm() + hinge / static_cast<double>(n);
}

// Full-batch subgradient descent with the 1/(lambda*t) base step, halved
// until the step does not increase the objective. Monotone by construction;
// deterministic regardless of seed.
LinearClassifier train_binary(const Matrix& x, const std::vector<double>& y,
                              const std::vector<double>& cost, int event,
                              const SvmTrainConfig& cfg) {
  const Eigen::Index d = x.rows(), n = x.cols();
  const double lambda =
      1.0 / (cfg.regularization_c * static_cast<double>(n));

  LinearClassifier clf;
  clf.event = event;
  clf.weights = Vector::Zero(d);
  clf.bias = 0.0;

  double obj = objective(x, y, cost, lambda, clf.weights, clf.bias);
  for (int t = 1; t <= cfg.max_epochs; ++t) {
    Vector grad_w = lambda * clf.weights;
    double grad_b = 0.0;
    Vector scores = x.transpose() * clf.weights;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (y[ui] * (scores(i) + clf.bias) < 1.0) {
        grad_w -= (cost[ui] * y[ui] / static_cast<double>(n)) * x.col(i);
        grad_b -= cost[ui] * y[ui] / static_cast<double>(n);
      }
    }

    double step = 1.0 / (lambda * t);
    bool moved = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      const Vector w_next = clf.weights - step * grad_w;
      const double b_next = clf.bias - step * grad_b;
      const double obj_next = objective(x, y, cost, lambda, w_next, b_next);
      if (obj_next <= obj) {
        clf.weights = w_next;
        clf.bias = b_next;
        obj = obj_next;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    clf.objective_trace.push_back(obj);
    if (!moved && grad_w.norm() + std::abs(grad_b) < 1e-12) break;
  }
  return clf;
}

}  // namespace

FeatureScaling scaling_from_string(const std::string& name) {
  if (name == "none") return FeatureScaling::None;
  if (name == "per_dim_max") return FeatureScaling::PerDimMax;
  if (name == "log_compress") return FeatureScaling::LogCompress;
  throw ConfigError("unknown feature scaling '" + name + "'");
}

std::string to_string(FeatureScaling s) {
  switch (s) {
    case FeatureScaling::None: return "none";
    case FeatureScaling::PerDimMax: return "per_dim_max";
    case FeatureScaling::LogCompress: return "log_compress";
  }
  return "?";
}

const LinearClassifier* ClassifierModel::find(int event) const {
  for (const auto& c : classifiers)
    if (c.event == event) return &c;
  return nullptr;
}

Matrix apply_scaling(const ClassifierModel& model, const Matrix& activations) {
  switch (model.scaling) {
    case FeatureScaling::None:
      return activations;
    case FeatureScaling::LogCompress:
      return activations.array().max(0.0).log1p().matrix();
    case FeatureScaling::PerDimMax: {
      if (model.scale_divisors.size() != activations.rows())
        throw DimensionError("svm: scaling divisors do not match feature dim");
      Matrix out = activations;
      for (Eigen::Index j = 0; j < out.rows(); ++j)
        out.row(j) /= model.scale_divisors(j);
      return out;
    }
  }
  throw ConfigError("svm: unknown scaling");
}

ClassifierModel train_ovr(const Matrix& activations,
                          const std::vector<std::vector<int>>& frame_labels,
                          const std::vector<std::string>& event_labels,
                          const SvmTrainConfig& cfg,
                          const std::string& dict_fingerprint) {
  const Eigen::Index n = activations.cols();
  if (static_cast<Eigen::Index>(frame_labels.size()) != n)
    throw DimensionError("svm: label count != activation column count");
  if (cfg.regularization_c <= 0.0) throw ConfigError("svm: C must be > 0");
  if (cfg.positive_class_weight <= 0.0)
    throw ConfigError("svm: positive_class_weight must be > 0");
  if (cfg.max_epochs < 1) throw ConfigError("svm: max_epochs must be >= 1");

  ClassifierModel model;
  model.event_labels = event_labels;
  model.scaling = cfg.scaling;
  model.dict_fingerprint = dict_fingerprint;
  if (cfg.scaling == FeatureScaling::PerDimMax) {
    model.scale_divisors = activations.rowwise().maxCoeff();
    for (Eigen::Index j = 0; j < model.scale_divisors.size(); ++j)
      if (model.scale_divisors(j) <= 0.0) model.scale_divisors(j) = 1.0;
  }
  const Matrix x = apply_scaling(model, activations);

  const int n_events = static_cast<int>(event_labels.size());
  for (int e = 0; e < n_events; ++e) {
    std::vector<double> y(static_cast<std::size_t>(n), -1.0);
    std::vector<double> cost(static_cast<std::size_t>(n), 1.0);
    long positives = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& labs = frame_labels[static_cast<std::size_t>(i)];
      if (std::find(labs.begin(), labs.end(), e) != labs.end()) {
        y[static_cast<std::size_t>(i)] = 1.0;
        cost[static_cast<std::size_t>(i)] = cfg.positive_class_weight;
        ++positives;
      }
    }
    if (positives == 0 || positives == n) {
      std::cerr << "[aedkit] svm: event " << e << " ('" << event_labels[e]
                << "') has a single class in training; skipped\n";
      model.skipped_events.push_back(e);
      continue;
    }
    model.classifiers.push_back(train_binary(x, y, cost, e, cfg));
  }
  return model;
}

EventRoll predict_frames(const ClassifierModel& model, const Matrix& activations,
                         double frame_hop_seconds) {
  const Matrix x = apply_scaling(model, activations);
  for (const auto& c : model.classifiers)
    if (c.weights.size() != x.rows())
      throw DimensionError("svm: activation rows do not match classifier dim");

  EventRoll roll;
  roll.labels = model.event_labels;
  roll.frame_hop = frame_hop_seconds;
  roll.active = BinaryMatrix::Zero(static_cast<Eigen::Index>(model.event_labels.size()),
                                   x.cols());
  for (const auto& c : model.classifiers) {
    const Vector scores = x.transpose() * c.weights;
    for (Eigen::Index t = 0; t < x.cols(); ++t)
      roll.active(c.event, t) = scores(t) + c.bias > 0.0 ? 1 : 0;
  }
  return roll;
}

}  // namespace aed
