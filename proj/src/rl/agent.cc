// Copyright 2026 The DyNODE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dynode/rl/agent.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dynode/autodiff/checkpoint.h"
#include "dynode/common/errors.h"
#include "dynode/eval/svg.h"
#include "dynode/models/train.h"
#include "dynode/rl/policy.h"

namespace dynode::rl {

using ad::Tensor;
using ad::Var;

namespace {

constexpr char kAgentMagic[] = "DYNODEAGENT1";
constexpr const char* kCurveHeader =
    "env_step,episode,return,critic_loss,actor_loss,model_loss,"
    "mve_fallback_count";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent stream `tag` of a run seed.
std::mt19937_64 Stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

enum StreamTag : std::uint32_t {
  kEnvStream = 1,
  kAgentStream = 2,
  kModelStream = 3,
  kReferenceStream = 4,
  kInitStream = 5,
};

bool SameDouble(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b) ||
         (std::isnan(a) && std::isnan(b));
}

// Little-endian binary serialization of the run state.
class Writer {
 public:
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Bool(bool v) { U64(v ? 1 : 0); }
  void Str(const std::string& s) {
    U64(s.size());
    bytes_ += s;
  }
  void Vec(std::span<const double> v) {
    U64(v.size());
    for (double x : v) F64(x);
  }
  void Sizes(const std::vector<std::size_t>& v) {
    U64(v.size());
    for (std::size_t x : v) U64(x);
  }
  void Mlp(const ad::MlpParams& p) { Str(ad::SerializeMlp(p)); }
  void Adam(const ad::AdamState& s) {
    U64(static_cast<std::uint64_t>(s.step));
    U64(s.m.size());
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      Vec(s.m[i]);
      Vec(s.v[i]);
    }
  }
  template <typename Rng>
  void Random(const Rng& rng) {
    std::ostringstream out;
    out << rng;
    Str(out.str());
  }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  bool Bool() { return U64() != 0; }
  std::string Str() {
    const std::uint64_t n = U64();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> Vec() {
    const std::uint64_t n = U64();
    Need(n * 8);
    std::vector<double> v(n);
    for (double& x : v) x = F64();
    return v;
  }
  std::vector<std::size_t> Sizes() {
    const std::uint64_t n = U64();
    Need(n * 8);
    std::vector<std::size_t> v(n);
    for (std::size_t& x : v) x = U64();
    return v;
  }
  ad::MlpParams Mlp() { return ad::DeserializeMlp(Str()); }
  ad::AdamState Adam() {
    ad::AdamState s;
    s.step = static_cast<std::int64_t>(U64());
    const std::uint64_t n = U64();
    for (std::uint64_t i = 0; i < n; ++i) {
      s.m.push_back(Vec());
      s.v.push_back(Vec());
    }
    return s;
  }
  template <typename Rng>
  void Random(Rng& rng) {
    std::istringstream in(Str());
    in >> rng;
    if (!in) throw IoError("agent checkpoint: corrupt random state");
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw IoError("agent checkpoint: truncated");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

void WriteConfig(Writer& w, const SacConfig& c) {
  for (double v : {c.gamma, c.alpha, c.tau, c.lr, c.divergence_bound,
                   c.model_lr, c.model_noise_sigma}) {
    w.F64(v);
  }
  for (std::size_t v : {c.batch, c.steps, c.start_steps, c.update_after,
                        c.updates_per_step, c.replay_capacity, c.mve_horizon,
                        c.retrain_every, c.model_iterations, c.model_horizon,
                        c.model_batch}) {
    w.U64(v);
  }
  w.Sizes(c.hidden);
  w.Sizes(c.model_hidden);
  w.U64(c.seed);
}

SacConfig ReadConfig(Reader& r) {
  SacConfig c;
  for (double* v : {&c.gamma, &c.alpha, &c.tau, &c.lr, &c.divergence_bound,
                    &c.model_lr, &c.model_noise_sigma}) {
    *v = r.F64();
  }
  for (std::size_t* v : {&c.batch, &c.steps, &c.start_steps, &c.update_after,
                         &c.updates_per_step, &c.replay_capacity,
                         &c.mve_horizon, &c.retrain_every, &c.model_iterations,
                         &c.model_horizon, &c.model_batch}) {
    *v = r.U64();
  }
  c.hidden = r.Sizes();
  c.model_hidden = r.Sizes();
  c.seed = r.U64();
  return c;
}

Tensor OneRow(std::span<const double> values) {
  return Tensor::Matrix(1, values.size(), {values.begin(), values.end()});
}

}  // namespace

bool CurveRow::operator==(const CurveRow& other) const {
  return env_step == other.env_step && episode == other.episode &&
         SameDouble(episode_return, other.episode_return) &&
         SameDouble(critic_loss, other.critic_loss) &&
         SameDouble(actor_loss, other.actor_loss) &&
         SameDouble(model_loss, other.model_loss) &&
         mve_fallbacks == other.mve_fallbacks;
}

std::string LearningCurveCsv(const LearningCurve& curve) {
  std::string out = kCurveHeader;
  out += '\n';
  for (const CurveRow& r : curve) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.env_step, r.episode,
                       r.episode_return, r.critic_loss, r.actor_loss,
                       r.model_loss, r.mve_fallbacks);
  }
  return out;
}

LearningCurve ParseLearningCurveCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw IoError("learning curve: unexpected header");
  }
  LearningCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) f.push_back(field);
    if (f.size() != 7) throw IoError("learning curve: bad row '" + line + "'");
    auto num = [&](const std::string& s, auto& value) {
      const char* end = s.data() + s.size();
      auto [ptr, ec] = std::from_chars(s.data(), end, value);
      if (ec != std::errc() || ptr != end) {
        throw IoError("learning curve: bad number '" + s + "'");
      }
    };
    CurveRow r;
    num(f[0], r.env_step);
    num(f[1], r.episode);
    num(f[2], r.episode_return);
    num(f[3], r.critic_loss);
    num(f[4], r.actor_loss);
    num(f[5], r.model_loss);
    num(f[6], r.mve_fallbacks);
    curve.push_back(r);
  }
  return curve;
}

double FinalReturn(const LearningCurve& curve, std::size_t last) {
  std::vector<double> returns;
  for (const CurveRow& r : curve) {
    if (r.episode > 0) returns.push_back(r.episode_return);
  }
  if (returns.empty() || last == 0) return kNaN;
  const std::size_t n = std::min(last, returns.size());
  double sum = 0.0;
  for (std::size_t i = returns.size() - n; i < returns.size(); ++i) {
    sum += returns[i];
  }
  return sum / static_cast<double>(n);
}

std::string Fig3Svg(const std::string& env,
                    const std::map<std::string, std::vector<LearningCurve>>&
                        curves_by_variant) {
  std::vector<eval::Series> series;
  for (const auto& [variant, curves] : curves_by_variant) {
    std::map<std::size_t, std::pair<double, std::size_t>> by_step;
    for (const LearningCurve& curve : curves) {
      for (const CurveRow& r : curve) {
        auto& [sum, count] = by_step[r.env_step];
        sum += r.episode_return;
        ++count;
      }
    }
    eval::Series s{variant, {}, {}, {}, false};
    for (const auto& [step, acc] : by_step) {
      s.x.push_back(static_cast<double>(step));
      s.y.push_back(acc.first / static_cast<double>(acc.second));
    }
    series.push_back(std::move(s));
  }
  return eval::RenderLinePlot(
      {env + ": episode return (mean over seeds)", "environment steps",
       "return"},
      series);
}

Tensor ObserveRows(const envs::Environment& env, const Tensor& states) {
  const std::size_t obs_dim = env.spec().observation_dim;
  Tensor obs = Tensor::Zeros(states.rows(), obs_dim);
  for (std::size_t b = 0; b < states.rows(); ++b) {
    obs.SetRow(b, env.Observe(states.Row(b)));
  }
  return obs;
}

Agent::Agent(const envs::Environment& env, Variant variant, SacConfig config)
    : Agent(env, variant, std::move(config), /*fresh=*/true) {}

Agent::Agent(const envs::Environment& env, Variant variant, SacConfig config,
             bool fresh)
    : env_(&env),
      variant_(variant),
      config_(std::move(config)),
      replay_(env.spec().state_dim, env.spec().action_dim,
              config_.replay_capacity),
      env_rng_(Stream(config_.seed, kEnvStream)),
      agent_rng_(Stream(config_.seed, kAgentStream)),
      model_rng_(Stream(config_.seed, kModelStream)) {
  config_.Validate();
  if (!fresh) return;
  const envs::EnvSpec& spec = env.spec();
  std::mt19937_64 init_rng = Stream(config_.seed, kInitStream);
  policy_ = InitPolicy(spec.observation_dim, spec.action_dim, config_.hidden,
                       init_rng);
  critics_ = InitTwinCritic(spec.observation_dim, spec.action_dim,
                            config_.hidden, init_rng);
  if (variant_ != Variant::kSac) {
    models::ModelConfig mc;
    mc.kind = variant_ == Variant::kDynodeSac ? models::ModelKind::kDynodeEuler
                                              : models::ModelKind::kBaseline;
    mc.hidden = config_.model_hidden;
    mc.dt = spec.dt;
    mc.substeps = 1;
    std::mt19937_64 model_init = Stream(config_.seed, kModelStream + 16);
    model_.emplace(mc, spec.state_dim, spec.action_dim, model_init);
  }
  // Reference episode of the uniform random policy.
  std::mt19937_64 ref_rng = Stream(config_.seed, kReferenceStream);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  envs::State s = env.Reset(ref_rng);
  double ret = 0.0;
  for (int t = 0; t < spec.max_steps; ++t) {
    std::vector<double> a(spec.action_dim);
    for (double& v : a) v = uniform(ref_rng);
    envs::StepResult r = env.Step(s, a);
    ret += r.reward;
    s = std::move(r.next_state);
    if (r.done) break;
  }
  curve_.push_back({0, 0, ret, kNaN, kNaN, kNaN, 0});
  state_ = env.Reset(env_rng_);
}

void Agent::Run(std::size_t max_steps) {
  for (std::size_t n = 0; n < max_steps && !finished(); ++n) {
    EnvironmentStep();
  }
}

void Agent::EnvironmentStep() {
  const envs::EnvSpec& spec = env_->spec();
  std::vector<double> action(spec.action_dim);
  if (step_ < config_.start_steps) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (double& v : action) v = uniform(agent_rng_);
  } else {
    const Tensor obs = OneRow(env_->Observe(state_));
    action = SampleActions(policy_, obs, agent_rng_).action.Row(0);
  }
  envs::StepResult result = env_->Step(state_, action);
  replay_.Add({state_, action, result.reward, result.next_state, result.done});
  state_ = std::move(result.next_state);
  episode_return_ += result.reward;
  ++episode_steps_;
  ++step_;
  if (result.done || episode_steps_ >= static_cast<std::size_t>(spec.max_steps)) {
    EndEpisode();
  }
  if (step_ < config_.update_after) return;
  if (config_.ExpansionHorizon(variant_) > 0 &&
      (!model_ready_ || step_ % config_.retrain_every == 0)) {
    TrainModel();
  }
  for (std::size_t u = 0; u < config_.updates_per_step; ++u) Update();
}

void Agent::EndEpisode() {
  replay_.CloseEpisode();
  ++episode_;
  const double n = static_cast<double>(updates_in_episode_);
  curve_.push_back({step_, episode_, episode_return_,
                    updates_in_episode_ ? critic_loss_sum_ / n : kNaN,
                    updates_in_episode_ ? actor_loss_sum_ / n : kNaN,
                    model_loss_, fallbacks_});
  critic_loss_sum_ = actor_loss_sum_ = 0.0;
  updates_in_episode_ = 0;
  episode_return_ = 0.0;
  episode_steps_ = 0;
  state_ = env_->Reset(env_rng_);
}

void Agent::TrainModel() {
  if (!model_ready_) {
    model_->set_normalizer(data::Normalizer::Fit(replay_.AllStates()));
  }
  models::TrainConfig tc;
  tc.horizon = models::IsDynode(model_->kind()) ? config_.model_horizon : 1;
  tc.batch = config_.model_batch;
  tc.lr = config_.model_lr;
  tc.max_iterations = config_.model_iterations;
  tc.noise_sigma = config_.model_noise_sigma;
  tc.eval_every = config_.model_iterations;
  tc.probe_batch = 64;
  tc.seed = model_rng_();
  models::TrainResult result =
      models::TrainModel(*model_, replay_, tc, &model_adam_);
  model_loss_ = result.probe.empty() ? kNaN : result.probe.back().loss;
  model_ready_ = true;
  ++model_trainings_;
}

MveContext Agent::ExpansionContext() const {
  MveContext ctx;
  const models::DynamicsModel& model = *model_;
  const envs::Environment& env = *env_;
  ctx.model = [&model](const Tensor& s, const Tensor& a) {
    return model.PredictNext(s, a);
  };
  const double bound = config_.divergence_bound;
  ctx.valid = [&model, bound](std::span<const double> row) {
    const std::vector<double> z = model.normalizer().Normalize(row);
    return std::all_of(z.begin(), z.end(),
                       [bound](double v) { return std::abs(v) <= bound; });
  };
  ctx.reward = [&env](std::span<const double> s, std::span<const double> a,
                      std::span<const double> s_next) {
    return env.Reward(s, a, s_next);
  };
  ctx.terminal = [&env](std::span<const double> s) { return env.Terminal(s); };
  ctx.observe = [&env](const Tensor& states) {
    return ObserveRows(env, states);
  };
  const ad::MlpParams& policy = policy_;
  ctx.policy = [&policy](const Tensor& obs, std::mt19937_64& r) {
    return SampleActions(policy, obs, r);
  };
  const TwinCritic& critics = critics_;
  ctx.target_q = [&critics](const Tensor& obs, const Tensor& actions) {
    ad::Tape tape;
    ad::BoundMlp t1(critics.target1, tape, false), t2(critics.target2, tape, false);
    Var o = tape.Constant(obs), a = tape.Constant(actions);
    return ad::Minimum(CriticValue(t1, o, a), CriticValue(t2, o, a)).value();
  };
  ctx.gamma = config_.gamma;
  ctx.alpha = config_.alpha;
  return ctx;
}

void Agent::Update() {
  const std::size_t m = env_->spec().action_dim;
  const data::PairBatch batch =
      replay_.SamplePairBatch(config_.batch, agent_rng_);
  const Tensor obs = ObserveRows(*env_, batch.states);
  const std::size_t horizon = config_.ExpansionHorizon(variant_);
  const ad::AdamConfig adam{config_.lr};

  // Critics.
  {
    ad::Tape tape;
    ad::BoundMlp q1(critics_.q1, tape), q2(critics_.q2, tape);
    Var loss;
    if (horizon == 0) {
      ad::BoundMlp pi(policy_, tape, false);
      ad::BoundMlp t1(critics_.target1, tape, false);
      ad::BoundMlp t2(critics_.target2, tape, false);
      const Tensor noise = GaussianNoise(batch.states.rows(), m, agent_rng_);
      Var next_v = SoftValue(pi, t1, t2,
                             tape.Constant(ObserveRows(*env_, batch.next_states)),
                             noise, config_.alpha);
      Var y = SoftTargets(tape.Constant(batch.rewards),
                          tape.Constant(batch.dones), next_v, config_.gamma);
      Var o = tape.Constant(obs), a = tape.Constant(batch.actions);
      loss = ad::Add(CriticLoss(q1, o, a, y), CriticLoss(q2, o, a, y));
    } else {
      const ExpandedTargets e =
          MveTargets(ExpansionContext(), batch, horizon, agent_rng_);
      fallbacks_ += e.fallbacks;
      Var o = tape.Constant(e.StackedObs());
      Var a = tape.Constant(e.StackedActions());
      Var y = tape.Constant(e.StackedTargets());
      const Tensor w = e.StackedWeights();
      loss = ad::Add(WeightedCriticLoss(q1, o, a, y, w),
                     WeightedCriticLoss(q2, o, a, y, w));
    }
    tape.Backward(loss);
    const ad::MlpParams g1 = q1.Gradients(), g2 = q2.Gradients();
    ad::AdamStep(critics_.q1, g1, q1_adam_, adam);
    ad::AdamStep(critics_.q2, g2, q2_adam_, adam);
    critic_loss_sum_ += loss.value()[0];
  }
  // Actor.
  {
    ad::Tape tape;
    ad::BoundMlp pi(policy_, tape);
    ad::BoundMlp q1(critics_.q1, tape, false), q2(critics_.q2, tape, false);
    const Tensor noise = GaussianNoise(batch.states.rows(), m, agent_rng_);
    Var loss = ActorLoss(pi, tape.Constant(obs), noise, config_.alpha,
                         MinCritic(q1, q2));
    tape.Backward(loss);
    const ad::MlpParams g = pi.Gradients();
    ad::AdamStep(policy_, g, policy_adam_, adam);
    actor_loss_sum_ += loss.value()[0];
  }
  PolyakUpdate(critics_.q1, critics_.target1, config_.tau);
  PolyakUpdate(critics_.q2, critics_.target2, config_.tau);
  ++updates_in_episode_;
}

void Agent::Save(const std::filesystem::path& file) const {
  Writer w;
  w.Str(kAgentMagic);
  w.Str(env_->spec().name);
  w.Str(VariantName(variant_));
  WriteConfig(w, config_);
  w.Mlp(policy_);
  w.Mlp(critics_.q1);
  w.Mlp(critics_.q2);
  w.Mlp(critics_.target1);
  w.Mlp(critics_.target2);
  w.Adam(policy_adam_);
  w.Adam(q1_adam_);
  w.Adam(q2_adam_);
  w.Bool(model_.has_value());
  if (model_) {
    w.Str(models::ModelKindName(model_->kind()));
    w.Mlp(model_->net());
    w.Vec(model_->normalizer().mean());
    w.Vec(model_->normalizer().std());
    w.Str(ode::MethodName(model_->solver().method));
    w.U64(static_cast<std::uint64_t>(model_->solver().substeps));
    w.F64(model_->solver().dt);
    w.Adam(model_adam_);
  }
  w.Bool(model_ready_);
  w.U64(model_trainings_);
  w.F64(model_loss_);
  // Replay, episode by episode.
  w.U64(replay_.episodes().size());
  for (const data::Episode& ep : replay_.episodes()) {
    w.U64(ep.length());
    for (const auto& s : ep.states) w.Vec(s);
    for (const auto& a : ep.actions) w.Vec(a);
    w.Vec(ep.rewards);
    w.Bool(ep.terminated);
    w.Bool(ep.closed);
  }
  w.Random(env_rng_);
  w.Random(agent_rng_);
  w.Random(model_rng_);
  w.Vec(state_);
  for (std::size_t v : {step_, episode_, episode_steps_, updates_in_episode_,
                        fallbacks_}) {
    w.U64(v);
  }
  w.F64(episode_return_);
  w.F64(critic_loss_sum_);
  w.F64(actor_loss_sum_);
  w.U64(curve_.size());
  for (const CurveRow& r : curve_) {
    w.U64(r.env_step);
    w.U64(r.episode);
    w.F64(r.episode_return);
    w.F64(r.critic_loss);
    w.F64(r.actor_loss);
    w.F64(r.model_loss);
    w.U64(r.mve_fallbacks);
  }
  std::error_code ec;
  if (file.has_parent_path()) {
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write agent checkpoint " + file.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("failed writing agent checkpoint " + file.string());
}

Agent Agent::Load(const envs::Environment& env,
                  const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw IoError("missing agent checkpoint " + file.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Reader r(buffer.str());
  if (r.Str() != kAgentMagic) {
    throw IoError("not an agent checkpoint: " + file.string());
  }
  const std::string env_name = r.Str();
  if (env_name != env.spec().name) {
    throw IoError("agent checkpoint is for environment '" + env_name +
                  "', not '" + env.spec().name + "'");
  }
  const Variant variant = ParseVariant(r.Str());
  Agent agent(env, variant, ReadConfig(r), /*fresh=*/false);
  agent.policy_ = r.Mlp();
  agent.critics_.q1 = r.Mlp();
  agent.critics_.q2 = r.Mlp();
  agent.critics_.target1 = r.Mlp();
  agent.critics_.target2 = r.Mlp();
  agent.policy_adam_ = r.Adam();
  agent.q1_adam_ = r.Adam();
  agent.q2_adam_ = r.Adam();
  if (r.Bool()) {
    const models::ModelKind kind = models::ParseModelKind(r.Str());
    ad::MlpParams net = r.Mlp();
    std::vector<double> mean = r.Vec();
    std::vector<double> std = r.Vec();
    ode::SolverConfig solver;
    solver.method = ode::ParseMethod(r.Str());
    solver.substeps = static_cast<int>(r.U64());
    solver.dt = r.F64();
    agent.model_.emplace(kind, std::move(net),
                         data::Normalizer(std::move(mean), std::move(std)),
                         solver);
    agent.model_adam_ = r.Adam();
  }
  agent.model_ready_ = r.Bool();
  agent.model_trainings_ = r.U64();
  agent.model_loss_ = r.F64();
  const std::uint64_t episodes = r.U64();
  for (std::uint64_t e = 0; e < episodes; ++e) {
    data::Episode ep;
    const std::uint64_t len = r.U64();
    for (std::uint64_t i = 0; i <= len; ++i) ep.states.push_back(r.Vec());
    for (std::uint64_t i = 0; i < len; ++i) ep.actions.push_back(r.Vec());
    ep.rewards = r.Vec();
    ep.terminated = r.Bool();
    ep.closed = r.Bool();
    if (ep.rewards.size() != len) throw IoError("agent checkpoint: bad episode");
    for (std::size_t t = 0; t < len; ++t) {
      data::Transition tr = ep.At(t);
      tr.done = ep.terminated && t + 1 == len;
      agent.replay_.Add(tr);
    }
    if (ep.closed) agent.replay_.CloseEpisode();
  }
  r.Random(agent.env_rng_);
  r.Random(agent.agent_rng_);
  r.Random(agent.model_rng_);
  agent.state_ = r.Vec();
  for (std::size_t* v : {&agent.step_, &agent.episode_, &agent.episode_steps_,
                         &agent.updates_in_episode_, &agent.fallbacks_}) {
    *v = r.U64();
  }
  agent.episode_return_ = r.F64();
  agent.critic_loss_sum_ = r.F64();
  agent.actor_loss_sum_ = r.F64();
  const std::uint64_t rows = r.U64();
  for (std::uint64_t i = 0; i < rows; ++i) {
    CurveRow row;
    row.env_step = r.U64();
    row.episode = r.U64();
    row.episode_return = r.F64();
    row.critic_loss = r.F64();
    row.actor_loss = r.F64();
    row.model_loss = r.F64();
    row.mve_fallbacks = r.U64();
    agent.curve_.push_back(row);
  }
  if (!r.at_end()) throw IoError("agent checkpoint: trailing bytes");
  return agent;
}

LearningCurve RunAgent(const envs::Environment& env, Variant variant,
                       const SacConfig& config,
                       const std::filesystem::path& failure_checkpoint) {
  Agent agent(env, variant, config);
  try {
    agent.Run();
  } catch (...) {
    if (!failure_checkpoint.empty()) {
      try {
        agent.Save(failure_checkpoint);
      } catch (const IoError&) {
        // The original error is more useful than the save failure.
      }
    }
    throw;
  }
  return agent.curve();
}

}  // namespace dynode::rl
