#include "sentsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sentsim::perception {

using vecmath::all_finite;

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::ReLU: return "relu";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Activation activation_from_name(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::ReLU;
  if (s == "identity") return Activation::Identity;
  raise(Err::ConfigInvalid, "unknown activation '" + s + "'");
}

void validate_params(const EncoderParams& p) {
  require(p.layer_dims.size() >= 2, Err::ShapeMismatch,
          "need at least input and output dims");
  const std::size_t n_layers = p.layer_dims.size() - 1;
  require(p.weights.size() == n_layers && p.biases.size() == n_layers &&
              p.activations.size() == n_layers,
          Err::ShapeMismatch, "layer count");
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto in = static_cast<std::size_t>(p.layer_dims[l]);
    const auto out = static_cast<std::size_t>(p.layer_dims[l + 1]);
    require(p.layer_dims[l] > 0 && p.layer_dims[l + 1] > 0,
            Err::ShapeMismatch, "non-positive layer dim");
    require(p.weights[l].size() == in * out, Err::ShapeMismatch,
            "weight matrix layer " + std::to_string(l));
    require(p.biases[l].size() == out, Err::ShapeMismatch,
            "bias vector layer " + std::to_string(l));
    require(all_finite(p.weights[l]) && all_finite(p.biases[l]),
            Err::NonFiniteValues, "parameters layer " + std::to_string(l));
  }
}

int input_dim(const EncoderParams& p) { return p.layer_dims.front(); }
int output_dim(const EncoderParams& p) { return p.layer_dims.back(); }

std::size_t param_count(const EncoderParams& p) {
  std::size_t n = 0;
  for (const auto& w : p.weights) n += w.size();
  for (const auto& b : p.biases) n += b.size();
  return n;
}

EncoderParams init_encoder(const std::vector<int>& layer_dims,
                           const std::vector<Activation>& activations,
                           RngStream& rng) {
  EncoderParams p;
  p.layer_dims = layer_dims;
  p.activations = activations;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const auto in = static_cast<std::size_t>(layer_dims[l]);
    const auto out = static_cast<std::size_t>(layer_dims[l + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    p.weights.push_back(rng.uniform_vec(in * out, -bound, bound));
    p.biases.push_back(Vec(out, 0.0));
  }
  validate_params(p);
  return p;
}

EncoderParams identity_encoder(int dim) {
  EncoderParams p;
  p.layer_dims = {dim, dim};
  p.activations = {Activation::Identity};
  std::vector<double> w(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) w[static_cast<std::size_t>(i) * dim + i] = 1.0;
  p.weights.push_back(std::move(w));
  p.biases.push_back(Vec(static_cast<std::size_t>(dim), 0.0));
  return p;
}

static double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::Identity: return z;
  }
  return z;
}

// derivative expressed via the post-activation value where possible
static double act_deriv(Activation a, double z, double out) {
  switch (a) {
    case Activation::Tanh: return 1.0 - out * out;
    case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

std::vector<Vec> forward_activations(const EncoderParams& p, const Vec& x) {
  require(static_cast<int>(x.size()) == input_dim(p), Err::DimensionMismatch,
          "input dim " + std::to_string(x.size()) + " vs expected " +
              std::to_string(input_dim(p)));
  std::vector<Vec> acts;
  acts.reserve(p.layer_dims.size());
  acts.push_back(x);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto in = static_cast<std::size_t>(p.layer_dims[l]);
    const auto out = static_cast<std::size_t>(p.layer_dims[l + 1]);
    const Vec& a_prev = acts.back();
    Vec a(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = p.biases[l][o];
      const double* row = p.weights[l].data() + o * in;
      for (std::size_t i = 0; i < in; ++i) z += row[i] * a_prev[i];
      a[o] = apply_act(p.activations[l], z);
    }
    acts.push_back(std::move(a));
  }
  return acts;
}

Vec forward(const EncoderParams& p, const Vec& x) {
  return forward_activations(p, x).back();
}

PerceptualRepresentation encode(const EncoderParams& p,
                                const SensorySignal& s) {
  core::validate_signal(s);
  PerceptualRepresentation rep;
  rep.rep_id = s.channel_id + "#" + std::to_string(s.t);
  rep.vector = forward(p, s.values);
  rep.source_channel = s.channel_id;
  rep.t = s.t;
  return rep;
}

InterpretationScores interpret(const PerceptualRepresentation& rep,
                               const std::vector<std::string>& hypotheses,
                               const EncoderParams& head) {
  require(static_cast<std::size_t>(output_dim(head)) == hypotheses.size(),
          Err::DimensionMismatch,
          "head outputs " + std::to_string(output_dim(head)) + " scores for " +
              std::to_string(hypotheses.size()) + " hypotheses");
  InterpretationScores s;
  s.hypothesis_ids = hypotheses;
  s.scores = forward(head, rep.vector);
  return s;
}

static double sample_loss(const Vec& out, const Vec& y, LossKind loss) {
  const double m = static_cast<double>(out.size());
  double acc = 0.0;
  if (loss == LossKind::SquaredError) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      double d = out[j] - y[j];
      acc += d * d;
    }
  } else {
    for (std::size_t j = 0; j < out.size(); ++j) {
      double z = out[j];
      acc += std::max(z, 0.0) - z * y[j] + std::log1p(std::exp(-std::abs(z)));
    }
  }
  return acc / m;
}

static Vec loss_grad(const Vec& out, const Vec& y, LossKind loss) {
  const double m = static_cast<double>(out.size());
  Vec g(out.size());
  if (loss == LossKind::SquaredError) {
    for (std::size_t j = 0; j < out.size(); ++j)
      g[j] = 2.0 * (out[j] - y[j]) / m;
  } else {
    for (std::size_t j = 0; j < out.size(); ++j)
      g[j] = (vecmath::sigmoid(out[j]) - y[j]) / m;
  }
  return g;
}

double dataset_loss(const EncoderParams& p, const Dataset& data,
                    LossKind loss) {
  require(!data.empty(), Err::ShapeMismatch, "empty dataset");
  double acc = 0.0;
  for (const auto& [x, y] : data) {
    Vec out = forward(p, x);
    require(out.size() == y.size(), Err::ShapeMismatch, "target dim");
    acc += sample_loss(out, y, loss);
  }
  return acc / static_cast<double>(data.size());
}

Gradients backward(const EncoderParams& p, const Vec& x, const Vec& y,
                   LossKind loss) {
  const auto acts = forward_activations(p, x);
  require(acts.back().size() == y.size(), Err::ShapeMismatch, "target dim");

  Gradients g;
  g.weights.resize(p.weights.size());
  g.biases.resize(p.biases.size());

  // delta = dL/da at the current layer's output
  Vec delta = loss_grad(acts.back(), y, loss);
  for (std::size_t li = p.weights.size(); li-- > 0;) {
    const auto in = static_cast<std::size_t>(p.layer_dims[li]);
    const auto out = static_cast<std::size_t>(p.layer_dims[li + 1]);
    const Vec& a_prev = acts[li];
    const Vec& a_out = acts[li + 1];

    // pre-activation z recomputed only where ReLU needs its sign
    Vec dz(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = 0.0;
      if (p.activations[li] == Activation::ReLU) {
        z = p.biases[li][o];
        const double* row = p.weights[li].data() + o * in;
        for (std::size_t i = 0; i < in; ++i) z += row[i] * a_prev[i];
      }
      dz[o] = delta[o] * act_deriv(p.activations[li], z, a_out[o]);
    }

    g.weights[li].assign(in * out, 0.0);
    g.biases[li].assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      g.biases[li][o] = dz[o];
      double* wrow = g.weights[li].data() + o * in;
      for (std::size_t i = 0; i < in; ++i) wrow[i] = dz[o] * a_prev[i];
    }

    Vec delta_prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = p.weights[li].data() + o * in;
      for (std::size_t i = 0; i < in; ++i) delta_prev[i] += row[i] * dz[o];
    }
    delta = std::move(delta_prev);
  }
  g.input = std::move(delta);
  return g;
}

TrainResult train_encoder(const EncoderParams& p, const Dataset& data,
                          const TrainConfig& cfg) {
  validate_params(p);
  require(!data.empty(), Err::ShapeMismatch, "empty dataset");
  for (const auto& [x, y] : data) {
    require(static_cast<int>(x.size()) == input_dim(p), Err::ShapeMismatch,
            "input dim");
    require(static_cast<int>(y.size()) == output_dim(p), Err::ShapeMismatch,
            "target dim");
  }

  TrainResult result;
  result.params = p;
  result.epoch_loss.push_back(dataset_loss(p, data, cfg.loss));

  RngStream rng(cfg.seed, cfg.stream_id);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.batch));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      Gradients acc;
      for (std::size_t k = start; k < end; ++k) {
        const auto& [x, y] = data[order[k]];
        Gradients g = backward(result.params, x, y, cfg.loss);
        if (acc.weights.empty()) {
          acc = std::move(g);
        } else {
          for (std::size_t l = 0; l < g.weights.size(); ++l) {
            for (std::size_t i = 0; i < g.weights[l].size(); ++i)
              acc.weights[l][i] += g.weights[l][i];
            for (std::size_t i = 0; i < g.biases[l].size(); ++i)
              acc.biases[l][i] += g.biases[l][i];
          }
        }
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t l = 0; l < acc.weights.size(); ++l) {
        for (std::size_t i = 0; i < acc.weights[l].size(); ++i)
          result.params.weights[l][i] -= scale * acc.weights[l][i];
        for (std::size_t i = 0; i < acc.biases[l].size(); ++i)
          result.params.biases[l][i] -= scale * acc.biases[l][i];
      }
    }
    const double loss = dataset_loss(result.params, data, cfg.loss);
    require(std::isfinite(loss), Err::NonFiniteLoss,
            "epoch " + std::to_string(epoch));
    result.epoch_loss.push_back(loss);
  }
  return result;
}

double grad_check(const EncoderParams& p, const Sample& sample, double eps,
                  LossKind loss) {
  require(eps > 0.0, Err::InvalidSpec, "grad_check eps must be > 0");
  const auto& [x, y] = sample;
  const Gradients analytic = backward(p, x, y, loss);

  EncoderParams q = p;
  double max_rel = 0.0;
  auto probe = [&](double& theta, double analytic_g) {
    const double saved = theta;
    theta = saved + eps;
    const double lp = sample_loss(forward(q, x), y, loss);
    theta = saved - eps;
    const double lm = sample_loss(forward(q, x), y, loss);
    theta = saved;
    const double numeric = (lp - lm) / (2.0 * eps);
    const double denom =
        std::max({1.0, std::abs(analytic_g), std::abs(numeric)});
    max_rel = std::max(max_rel, std::abs(analytic_g - numeric) / denom);
  };

  for (std::size_t l = 0; l < q.weights.size(); ++l) {
    for (std::size_t i = 0; i < q.weights[l].size(); ++i)
      probe(q.weights[l][i], analytic.weights[l][i]);
    for (std::size_t i = 0; i < q.biases[l].size(); ++i)
      probe(q.biases[l][i], analytic.biases[l][i]);
  }
  return max_rel;
}

nlohmann::json params_to_json(const EncoderParams& p) {
  nlohmann::json j;
  j["layer_dims"] = p.layer_dims;
  std::vector<std::string> acts;
  for (auto a : p.activations) acts.emplace_back(activation_name(a));
  j["activations"] = acts;
  j["weights"] = p.weights;  // flat row-major per layer
  j["biases"] = p.biases;
  return j;
}

EncoderParams params_from_json(const nlohmann::json& j) {
  EncoderParams p;
  p.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  for (const auto& a : j.at("activations"))
    p.activations.push_back(activation_from_name(a.get<std::string>()));
  p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  p.biases = j.at("biases").get<std::vector<Vec>>();
  validate_params(p);
  return p;
}

}  // namespace sentsim::perception
