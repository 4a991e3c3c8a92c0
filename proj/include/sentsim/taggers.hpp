#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sentsim/perception.hpp"
#include "sentsim/simspace.hpp"

namespace sentsim::taggers {

using core::EpistemicTag;
using core::RngStream;
using perception::Dataset;
using perception::EncoderParams;
using perception::PerceptualRepresentation;
using perception::PredictedRepresentation;
using perception::TrainConfig;

// Elementwise mean over repeated noisy representations of one stimulus.
Vec ground_truth_by_averaging(const std::vector<PerceptualRepresentation>& reps);

enum class CrossModalLabel { Veridical, Nonveridical };

// Both reps must already live in the shared space (same dimension).
CrossModalLabel ground_truth_by_cross_modal(const PerceptualRepresentation& a,
                                            const PerceptualRepresentation& b,
                                            double align_threshold,
                                            const simspace::SimilaritySpace& space);

// estimator emits one logit; reliability = logistic(logit).
EpistemicTag tag_supervised(const EncoderParams& estimator,
                            const PerceptualRepresentation& rep);

struct TemporalPredictor {
  EncoderParams params;  // k concatenated reps in, one rep out
  int k = 1;
  double tau = 1.0;  // error-to-reliability temperature
};

void validate_predictor(const TemporalPredictor& p);

PredictedRepresentation predict_next(
    const TemporalPredictor& p,
    const std::vector<PerceptualRepresentation>& history);

// err = ||current - predicted||^2, reliability = exp(-err/tau).
EpistemicTag tag_temporal(const TemporalPredictor& p,
                          const std::vector<PerceptualRepresentation>& history,
                          const PerceptualRepresentation& current);

struct BayesianScorer {
  Vec prior_mean;
  Vec prior_precision;             // per-dim, > 0
  EncoderParams likelihood_model;  // latent -> expected representation
  double noise_precision = 1.0;
  double calib_mid = 0.0;  // logistic calibration of the log score
  double calib_scale = 1.0;
};

void validate_scorer(const BayesianScorer& b);

struct BayesScore {
  double log_prior = 0.0;       // -0.5 * sum prec_i (x_i - mu_i)^2
  double log_likelihood = 0.0;  // -0.5 * noise_prec * ||rep - f(latent)||^2
  double total = 0.0;           // sum of the two, up to additive constant
};

BayesScore bayes_score(const BayesianScorer& b, const Vec& latent,
                       const PerceptualRepresentation& rep);

std::pair<double, EpistemicTag> tag_bayesian(const BayesianScorer& b,
                                             const Vec& latent,
                                             const PerceptualRepresentation& rep);

struct Discriminator {
  EncoderParams params;  // tuple in, one logit out
};

// P(real | tuple) in (0,1).
double discriminate(const Discriminator& d, const Vec& tuple);

EpistemicTag tag_discriminator(const Discriminator& d, const Vec& tuple);

struct GeneratorSpec {
  EncoderParams params;  // latent -> synthetic sensory-percept tuple
  int latent_dim = 1;
  int signal_dim = 1;
  int rep_dim = 1;
};

void validate_generator(const GeneratorSpec& g);

// One synthetic tuple from a standard-normal latent draw.
Vec generate(const GeneratorSpec& g, RngStream& rng);

// Trains the discriminator against a fixed generator. The last
// holdout_fraction of real_tuples is held out; synthetic counterparts are
// drawn fresh for each split. Returns the updated discriminator and the
// held-out logistic loss before and after training.
struct DiscTrainResult {
  Discriminator disc;
  double holdout_loss_before = 0.0;
  double holdout_loss_after = 0.0;
};

DiscTrainResult train_discriminator(const Discriminator& d,
                                    const GeneratorSpec& g,
                                    const std::vector<Vec>& real_tuples,
                                    const TrainConfig& cfg,
                                    double holdout_fraction = 0.2);

// Fraction of a labeled tuple set classified correctly at threshold 0.5.
double discriminator_accuracy(const Discriminator& d,
                              const std::vector<Vec>& real_tuples,
                              const std::vector<Vec>& synth_tuples);

}  // namespace sentsim::taggers
