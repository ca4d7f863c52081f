#pragma once

// The learnable dynamics models.
//
// The contact-integrator network pairs a learned potential V_θ (force
// -∂V_θ/∂Q, built with lab/mlp.hpp's recorded input gradient so training
// differentiates through it) with a learned contact net ĉ_θ feeding the
// integrator's gate.  The velocity-Verlet network reuses the potential
// machinery on the smooth baseline stepper.  The residual baselines update
// stacked states s = [Q; Q̇] as s_{n+1} = s_n + net(input), optionally with
// contact flags appended to the input and a separate sigmoid head predicting
// the next flags.
//
// Training rollouts run on a caller-owned tape with caller-leased parameters
// (so losses over several rollouts can share one tape); inference wrappers
// own a scratch tape internally and return plain trajectories.

#include <cstdint>
#include <string>
#include <vector>

#include "lab/mlp.hpp"
#include "lab/rollout.hpp"
#include "lab/scene.hpp"
#include "lab/trajectory.hpp"

namespace lab::models {

enum class ModelKind { Cdl, ResNet, ResNetContact, Vin };

const char* model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

struct CdlModel {
  mech::SystemSpec scene;
  ad::MlpSpec pot_spec;  // K -> hidden -> 1, identity output
  ad::MlpSpec con_spec;  // 2K -> hidden -> K, sigmoid output
  ad::ParamStore pot;
  ad::ParamStore con;
};

struct ResNetModel {
  mech::SystemSpec scene;
  bool contact_aware = false;
  ad::MlpSpec net_spec;   // 2K (+K flags when contact-aware) -> hidden -> 2K
  ad::MlpSpec head_spec;  // 2K -> hidden -> K, sigmoid (contact-aware only)
  ad::ParamStore net;
  ad::ParamStore head;
};

struct VinModel {
  mech::SystemSpec scene;
  ad::MlpSpec pot_spec;  // K -> hidden -> 1, identity output
  ad::ParamStore pot;
};

CdlModel make_cdl_model(const mech::SystemSpec& scene, const std::vector<int>& hidden,
                        std::uint64_t seed);
ResNetModel make_resnet_model(const mech::SystemSpec& scene, bool contact_aware,
                              const std::vector<int>& hidden, std::uint64_t seed);
VinModel make_vin_model(const mech::SystemSpec& scene, const std::vector<int>& hidden,
                        std::uint64_t seed);

// -∂V_θ/∂Q as tape operations, (K,B) for a (K,B) input.
ad::DiffValue learned_force(ad::Tape& t, const ad::MlpSpec& spec,
                            const std::vector<ad::DiffValue>& theta, ad::DiffValue Q);

// ĉ_θ on stacked (Q, Q̇): per-body contact probabilities, (K,B).
ad::DiffValue contact_probs_tape(ad::Tape& t, const ad::MlpSpec& spec,
                                 const std::vector<ad::DiffValue>& theta, ad::DiffValue Q,
                                 ad::DiffValue Qdot);

// Where a contact rollout's gates come from.  `recorded` teacher-forces the
// observed signals: recorded[n] holds the (K,B) flags at point n+1, matching
// the integrator's gate query at Q_{n+1}.  With `soft` the net's sigmoid
// outputs drive the gate directly and stay differentiable (the no-touch
// regime).  With neither, the net's outputs are thresholded at 0.5 into hard
// constants (inference).
struct GateSource {
  const std::vector<Tensor>* recorded = nullptr;
  bool soft = false;
};

integ::Rollout<integ::TapeEngine> cdl_rollout_tape(ad::Tape& t, const CdlModel& m,
                                                   const std::vector<ad::DiffValue>& theta_pot,
                                                   const std::vector<ad::DiffValue>& theta_con,
                                                   const Tensor& Q0, const Tensor& V0,
                                                   int n_steps, const GateSource& gates);

integ::Rollout<integ::TapeEngine> vin_rollout_tape(ad::Tape& t, const VinModel& m,
                                                   const std::vector<ad::DiffValue>& theta_pot,
                                                   const Tensor& Q0, const Tensor& V0,
                                                   int n_steps);

// Residual chain on stacked states.  `s` holds n+1 points of shape (2K,B).
// Teacher forcing reads recorded[n], the (K,B) flags at point n (the input
// side); inference chains thresholded head predictions seeded by c0.  The
// head runs only when self-predicting; head_probs[n] then holds the
// probabilities for point n+1.
struct ResnetRollout {
  std::vector<ad::DiffValue> s;
  std::vector<ad::DiffValue> head_probs;
  bool diverged = false;

  int n_points() const { return static_cast<int>(s.size()); }
};

ResnetRollout resnet_rollout_tape(ad::Tape& t, const ResNetModel& m,
                                  const std::vector<ad::DiffValue>& theta_net,
                                  const std::vector<ad::DiffValue>& theta_head, const Tensor& s0,
                                  int n_steps, const std::vector<Tensor>* recorded,
                                  const Tensor* c0);

// Inference: forecast n_steps from a staggered state with self-predicted
// contacts; point 0 carries the caller's flags.  The returned trajectory
// stores the model's thresholded contact predictions per point.
mech::Trajectory cdl_forecast(const CdlModel& m, const mech::StaggeredState& y0,
                              const mech::ContactSignal& c0, int n_steps);
mech::Trajectory vin_forecast(const VinModel& m, const mech::StaggeredState& y0, int n_steps);
mech::Trajectory resnet_forecast(const ResNetModel& m, const mech::StaggeredState& y0,
                                 const mech::ContactSignal& c0, int n_steps);

struct ContactPrediction {
  Tensor probs;  // (K,B) sigmoid outputs
  Tensor flags;  // (K,B) of 0/1: probability >= 0.5 counts as contact
};

ContactPrediction contact_predict(const CdlModel& m, const Tensor& Q, const Tensor& Qdot);

// Checkpoints: a JSON bundle of the scene, every parameter tensor, and the
// training config hash it was produced under.
std::string cdl_to_json(const CdlModel& m, const std::string& config_hash);
CdlModel cdl_from_json(const std::string& text);
std::string resnet_to_json(const ResNetModel& m, const std::string& config_hash);
ResNetModel resnet_from_json(const std::string& text);
std::string vin_to_json(const VinModel& m, const std::string& config_hash);
VinModel vin_from_json(const std::string& text);

}  // namespace lab::models
