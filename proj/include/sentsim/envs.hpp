#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentsim/core.hpp"

namespace sentsim::envs {

using core::Origin;
using core::SensorySignal;

enum class EnvKind { Noisy, Illusion, Hallucination, CrossModal };

const char* env_kind_name(EnvKind k);
EnvKind env_kind_from_name(const std::string& s);

// One spec covers all four kinds; fields unused by a kind are ignored.
//
// Noisy        constant latent, obs = latent + N(0, sigma) on "obs".
// Illusion     two equal lengths; "percept" sees (L1+bias, L2-bias) + N(0,sigma),
//              "measure" sees the true lengths + N(0, measure_sigma).
// Hallucination 2-d circular latent on "stream"; each step with prob rate the
//              observation is an unrelated uniform draw, marked internal.
// CrossModal   latent ~ N(0,I) per step through two fixed linear maps onto
//              "mod_a"/"mod_b" + N(0,sigma); with prob rate mod_b is replaced
//              by an unrelated draw, marked internal.
struct EnvSpec {
  EnvKind kind = EnvKind::Noisy;
  long long horizon = 1;
  std::uint64_t seed = 0;
  double sigma = 0.0;          // observation noise
  double bias = 0.3;           // illusion offset
  double rate = 0.0;           // hallucination / corruption probability
  double measure_sigma = 0.05; // illusion second-channel noise
  Vec latent = {1.0};          // Noisy constant; Illusion uses first two dims
};

void validate_spec(const EnvSpec& spec);

// Ground truth is environment-side only; delivered signals carry Unknown.
struct StepTruth {
  Vec latent;
  std::map<std::string, Origin> origins;  // channel -> actual origin
};

struct Episode {
  EnvSpec spec;
  std::vector<std::vector<SensorySignal>> observations;  // one list per step
  std::vector<StepTruth> ground_truth;
};

Episode gen_episode(const EnvSpec& spec);

// Deterministic re-emission of steps [from, to).
std::vector<std::vector<SensorySignal>> replay(const Episode& episode,
                                               long long from, long long to);

// The fixed cross-modal mixing maps (shared across seeds so heads trained
// on one episode transfer to another).
const std::vector<Vec>& cross_modal_map_a();
const std::vector<Vec>& cross_modal_map_b();

}  // namespace sentsim::envs
