#include "sentsim/taggers.hpp"

#include <algorithm>
#include <cmath>

namespace sentsim::taggers {

using perception::forward;

Vec ground_truth_by_averaging(
    const std::vector<PerceptualRepresentation>& reps) {
  require(!reps.empty(), Err::EmptyWindow, "averaging window");
  const std::size_t dim = reps.front().vector.size();
  Vec acc(dim, 0.0);
  for (const auto& r : reps) {
    require(r.vector.size() == dim, Err::DimMismatch,
            "rep " + r.rep_id + " in averaging window");
    for (std::size_t i = 0; i < dim; ++i) acc[i] += r.vector[i];
  }
  for (double& x : acc) x /= static_cast<double>(reps.size());
  return acc;
}

CrossModalLabel ground_truth_by_cross_modal(
    const PerceptualRepresentation& a, const PerceptualRepresentation& b,
    double align_threshold, const simspace::SimilaritySpace& space) {
  require(space.kind == simspace::SpaceKind::Continuous &&
              static_cast<int>(a.vector.size()) == space.dim &&
              static_cast<int>(b.vector.size()) == space.dim,
          Err::SpaceMismatch,
          a.rep_id + " / " + b.rep_id + " vs space " + space.space_id);
  const double d = simspace::distance(space, a.vector, b.vector);
  return d <= align_threshold ? CrossModalLabel::Veridical
                              : CrossModalLabel::Nonveridical;
}

EpistemicTag tag_supervised(const EncoderParams& estimator,
                            const PerceptualRepresentation& rep) {
  require(perception::output_dim(estimator) == 1, Err::DimensionMismatch,
          "supervised estimator must emit one logit");
  const double logit = forward(estimator, rep.vector)[0];
  return core::make_tag(vecmath::sigmoid(logit), "supervised", rep.rep_id);
}

void validate_predictor(const TemporalPredictor& p) {
  require(p.k >= 1, Err::InvalidSpec, "predictor history length");
  require(p.tau > 0.0, Err::InvalidSpec, "predictor tau");
  perception::validate_params(p.params);
}

PredictedRepresentation predict_next(
    const TemporalPredictor& p,
    const std::vector<PerceptualRepresentation>& history) {
  validate_predictor(p);
  require(static_cast<int>(history.size()) == p.k,
          Err::HistoryLengthMismatch,
          "got " + std::to_string(history.size()) + ", predictor wants " +
              std::to_string(p.k));
  Vec input;
  for (const auto& h : history)
    input = vecmath::concat(input, h.vector);
  PredictedRepresentation out;
  out.vector = forward(p.params, input);
  out.for_t = history.back().t + 1;
  return out;
}

EpistemicTag tag_temporal(const TemporalPredictor& p,
                          const std::vector<PerceptualRepresentation>& history,
                          const PerceptualRepresentation& current) {
  const auto predicted = predict_next(p, history);
  require(predicted.vector.size() == current.vector.size(), Err::DimMismatch,
          "prediction vs current rep");
  const double err = vecmath::sq_dist(current.vector, predicted.vector);
  return core::make_tag(std::exp(-err / p.tau), "temporal", current.rep_id);
}

void validate_scorer(const BayesianScorer& b) {
  require(b.prior_mean.size() == b.prior_precision.size(), Err::DimMismatch,
          "prior mean vs precision");
  for (double p : b.prior_precision)
    require(p > 0.0, Err::NonPositivePrecision, "prior precision");
  require(b.noise_precision > 0.0, Err::NonPositivePrecision,
          "noise precision");
  require(b.calib_scale > 0.0, Err::InvalidSpec, "calibration scale");
  perception::validate_params(b.likelihood_model);
}

BayesScore bayes_score(const BayesianScorer& b, const Vec& latent,
                       const PerceptualRepresentation& rep) {
  validate_scorer(b);
  require(latent.size() == b.prior_mean.size(), Err::DimMismatch,
          "latent dim");
  BayesScore s;
  for (std::size_t i = 0; i < latent.size(); ++i) {
    const double d = latent[i] - b.prior_mean[i];
    s.log_prior -= 0.5 * b.prior_precision[i] * d * d;
  }
  const Vec expected = forward(b.likelihood_model, latent);
  require(expected.size() == rep.vector.size(), Err::DimMismatch,
          "likelihood output vs rep");
  s.log_likelihood =
      -0.5 * b.noise_precision * vecmath::sq_dist(rep.vector, expected);
  s.total = s.log_prior + s.log_likelihood;
  return s;
}

std::pair<double, EpistemicTag> tag_bayesian(
    const BayesianScorer& b, const Vec& latent,
    const PerceptualRepresentation& rep) {
  const auto s = bayes_score(b, latent, rep);
  const double r =
      vecmath::sigmoid((s.total - b.calib_mid) / b.calib_scale);
  return {s.total, core::make_tag(r, "bayes", rep.rep_id)};
}

double discriminate(const Discriminator& d, const Vec& tuple) {
  require(perception::output_dim(d.params) == 1, Err::DimensionMismatch,
          "discriminator must emit one logit");
  const double p = vecmath::sigmoid(forward(d.params, tuple)[0]);
  // keep strictly inside (0,1) even where sigmoid rounds to an endpoint
  return std::min(std::max(p, 1e-15), 1.0 - 1e-15);
}

EpistemicTag tag_discriminator(const Discriminator& d, const Vec& tuple) {
  return core::make_tag(discriminate(d, tuple), "discriminator", "tuple");
}

void validate_generator(const GeneratorSpec& g) {
  perception::validate_params(g.params);
  require(g.latent_dim >= 1 && g.signal_dim >= 1 && g.rep_dim >= 0,
          Err::InvalidSpec, "generator dims");
  require(perception::input_dim(g.params) == g.latent_dim, Err::ShapeMismatch,
          "generator input vs latent_dim");
  require(perception::output_dim(g.params) == g.signal_dim + g.rep_dim,
          Err::ShapeMismatch, "generator output vs signal+rep dims");
}

Vec generate(const GeneratorSpec& g, RngStream& rng) {
  validate_generator(g);
  return forward(g.params,
                 rng.normal_vec(static_cast<std::size_t>(g.latent_dim), 0.0, 1.0));
}

DiscTrainResult train_discriminator(const Discriminator& d,
                                    const GeneratorSpec& g,
                                    const std::vector<Vec>& real_tuples,
                                    const TrainConfig& cfg,
                                    double holdout_fraction) {
  require(!real_tuples.empty(), Err::ShapeMismatch, "no real tuples");
  require(holdout_fraction > 0.0 && holdout_fraction < 1.0, Err::InvalidSpec,
          "holdout fraction");
  validate_generator(g);

  const std::size_t n = real_tuples.size();
  std::size_t n_hold = static_cast<std::size_t>(
      std::max(1.0, std::floor(holdout_fraction * static_cast<double>(n))));
  if (n_hold >= n) n_hold = n - 1;
  const std::size_t n_train = n - n_hold;

  RngStream synth_rng(cfg.seed, cfg.stream_id + "/synthetic");
  Dataset train, holdout;
  for (std::size_t i = 0; i < n; ++i) {
    auto& split = i < n_train ? train : holdout;
    split.push_back({real_tuples[i], {1.0}});
    split.push_back({generate(g, synth_rng), {0.0}});
  }

  TrainConfig disc_cfg = cfg;
  disc_cfg.loss = perception::LossKind::LogisticBce;
  DiscTrainResult out;
  out.holdout_loss_before =
      perception::dataset_loss(d.params, holdout, disc_cfg.loss);
  auto trained = perception::train_encoder(d.params, train, disc_cfg);
  out.disc.params = std::move(trained.params);
  out.holdout_loss_after =
      perception::dataset_loss(out.disc.params, holdout, disc_cfg.loss);
  return out;
}

double discriminator_accuracy(const Discriminator& d,
                              const std::vector<Vec>& real_tuples,
                              const std::vector<Vec>& synth_tuples) {
  require(!real_tuples.empty() || !synth_tuples.empty(), Err::SizeMismatch,
          "no tuples");
  std::size_t hit = 0;
  for (const auto& t : real_tuples)
    if (discriminate(d, t) >= 0.5) ++hit;
  for (const auto& t : synth_tuples)
    if (discriminate(d, t) < 0.5) ++hit;
  return static_cast<double>(hit) /
         static_cast<double>(real_tuples.size() + synth_tuples.size());
}

}  // namespace sentsim::taggers
