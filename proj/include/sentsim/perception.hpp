#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sentsim/core.hpp"
#include "sentsim/vecmath.hpp"

namespace sentsim::perception {

using core::RngStream;
using core::SensorySignal;

enum class Activation { Tanh, ReLU, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& s);

// Parameters of a small feed-forward network. Weights are stored per layer
// as flat row-major (out x in) arrays.
struct EncoderParams {
  std::vector<int> layer_dims;                 // [in, h1, ..., out]
  std::vector<std::vector<double>> weights;    // one flat matrix per layer
  std::vector<Vec> biases;
  std::vector<Activation> activations;         // one per layer
};

void validate_params(const EncoderParams& p);
int input_dim(const EncoderParams& p);
int output_dim(const EncoderParams& p);
std::size_t param_count(const EncoderParams& p);

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
EncoderParams init_encoder(const std::vector<int>& layer_dims,
                           const std::vector<Activation>& activations,
                           RngStream& rng);

// Single identity layer: output == input.
EncoderParams identity_encoder(int dim);

Vec forward(const EncoderParams& p, const Vec& x);

// Activations of every layer, [0] being the input itself.
std::vector<Vec> forward_activations(const EncoderParams& p, const Vec& x);

struct PerceptualRepresentation {
  std::string rep_id;
  Vec vector;
  std::string source_channel;
  long long t = 0;
};

// First-order encoding of a signal; rep_id is "<channel>#<t>".
PerceptualRepresentation encode(const EncoderParams& p,
                                const SensorySignal& s);

struct InterpretationScores {
  std::vector<std::string> hypothesis_ids;
  Vec scores;
};

// One finite score per hypothesis, straight from the head network.
InterpretationScores interpret(const PerceptualRepresentation& rep,
                               const std::vector<std::string>& hypotheses,
                               const EncoderParams& head);

struct PredictedRepresentation {
  Vec vector;
  long long for_t = 0;
};

enum class LossKind {
  SquaredError,  // per-sample mean over output dims of (a - y)^2
  LogisticBce,   // network outputs logits; stable binary cross entropy
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 100;
  int batch = 16;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::SquaredError;
  std::string stream_id = "train";
};

using Sample = std::pair<Vec, Vec>;  // (input, target)
using Dataset = std::vector<Sample>;

struct TrainResult {
  EncoderParams params;
  // epoch_loss[0] is the loss before any update, then one entry per epoch.
  std::vector<double> epoch_loss;
};

double dataset_loss(const EncoderParams& p, const Dataset& data,
                    LossKind loss);

// Plain mini-batch SGD. Throws NonFiniteLoss on divergence.
TrainResult train_encoder(const EncoderParams& p, const Dataset& data,
                          const TrainConfig& cfg);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<Vec> biases;
  Vec input;  // dL/dx, used by the adversarial exploration mode
};

Gradients backward(const EncoderParams& p, const Vec& x, const Vec& y,
                   LossKind loss);

// Max relative error between analytic and central finite-difference
// gradients over all parameters, denominator floored at 1.
double grad_check(const EncoderParams& p, const Sample& sample, double eps,
                  LossKind loss = LossKind::SquaredError);

nlohmann::json params_to_json(const EncoderParams& p);
EncoderParams params_from_json(const nlohmann::json& j);

}  // namespace sentsim::perception
