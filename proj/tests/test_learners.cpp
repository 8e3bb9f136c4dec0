#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "cli/verify.hpp"
#include "learners/factory.hpp"
#include "learners/features.hpp"
#include "numkit/mathfn.hpp"

using namespace learners;

namespace {

HyperParams tiny_hp() {
  HyperParams hp;
  hp.hidden = {16};
  hp.dropout = 0.0;
  hp.batch_size = 8;
  hp.replay_capacity = 64;
  hp.replay_min_fill = 1;
  hp.train_period = 1;
  hp.target_sync = 1;
  hp.lr = 1e-2;
  return hp;
}

matchenv::Experience make_exp(int zone, int count, int action, double reward,
                              int next_zone, int next_count, int num_agents) {
  matchenv::Experience e;
  e.zone = zone;
  e.count = count;
  e.normalized = static_cast<double>(count) / num_agents;
  e.action = action;
  e.reward = reward;
  e.next_zone = next_zone;
  e.next_count = next_count;
  e.next_normalized = static_cast<double>(next_count) / num_agents;
  return e;
}

void zero_params(numkit::Mlp& net) {
  for (auto& w : net.weights) w.assign(w.size(), 0.0);
  for (auto& b : net.biases) b.assign(b.size(), 0.0);
}

}  // namespace

TEST_CASE("exploration schedule decays exponentially between pinned endpoints") {
  CHECK(epsilon_at(0, 100000, 1.0, 0.05) == doctest::Approx(1.0));
  CHECK(epsilon_at(25000, 100000, 1.0, 0.05) ==
        doctest::Approx(1.0 / std::sqrt(20.0)).epsilon(1e-12));
  CHECK(epsilon_at(50000, 100000, 1.0, 0.05) ==
        doctest::Approx(0.05).epsilon(1e-12));
  CHECK(epsilon_at(100000, 100000, 1.0, 0.05) == doctest::Approx(0.05));
  CHECK(epsilon_at(250, 1000, 0.9, 0.3) ==
        doctest::Approx(std::sqrt(0.27)).epsilon(1e-12));
  CHECK(epsilon_at(500, 1000, 0.9, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  // Degenerate schedule: start at the floor, stay there.
  CHECK(epsilon_at(0, 1000, 0.05, 0.05) == doctest::Approx(0.05));
  CHECK(epsilon_at(999, 1000, 0.05, 0.05) == doctest::Approx(0.05));
}

TEST_CASE("replay memory overwrites oldest entries and samples uniformly") {
  ReplayMemory mem(4);
  CHECK_THROWS(ReplayMemory(0));
  numkit::Rng rng(3);
  CHECK_THROWS(mem.sample(rng));
  for (int i = 0; i < 6; ++i) {
    matchenv::Experience e;
    e.decided_at = i;
    mem.push(e);
  }
  CHECK(mem.size() == 4);
  std::set<long long> held;
  for (int i = 0; i < 4; ++i) held.insert(mem.at(i).decided_at);
  CHECK(held == std::set<long long>{2, 3, 4, 5});

  std::vector<long long> counts(6, 0);
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) counts[mem.sample(rng).decided_at] += 1;
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 0);
  double chi2 = 0.0;
  for (int id = 2; id <= 5; ++id) {
    double dev = counts[id] - draws / 4.0;
    chi2 += dev * dev / (draws / 4.0);
  }
  CHECK(chi2 < 11.34);  // df 3, significance 0.01
}

TEST_CASE("feature encodings") {
  std::vector<double> x;
  encode_obs(2, 0.25, 4, x);
  CHECK(x == std::vector<double>{0, 0, 1, 0, 0.25});
  std::vector<double> row{0.2, 0.3, 0.5};
  encode_mmf(1, 0.5, row, 3, x);
  CHECK(x == std::vector<double>{0, 1, 0, 0.5, 0.2, 0.3, 0.5});
  CHECK(obs_feature_size(10) == 11);
  CHECK(mmf_feature_size(10) == 21);
}

TEST_CASE("occupancy buckets split the population range evenly") {
  HyperParams hp = tiny_hp();
  hp.density_buckets = 5;
  TabularQLearner t(4, 20, hp, 9, 1000);
  CHECK(t.bucket_of(0) == 0);
  CHECK(t.bucket_of(3) == 0);
  CHECK(t.bucket_of(4) == 1);
  CHECK(t.bucket_of(11) == 2);
  CHECK(t.bucket_of(19) == 4);
  CHECK(t.bucket_of(20) == 4);  // full population clamps into the top bucket
}

TEST_CASE("tabular update arithmetic with a fixed step size") {
  HyperParams hp = tiny_hp();
  hp.alpha = 0.1;
  hp.gamma = 0.5;
  hp.density_buckets = 2;
  TabularQLearner t(2, 10, hp, 9, 1000);
  t.q_ref(1, 0, 0) = 3.0;
  t.q_ref(1, 0, 1) = 1.0;
  matchenv::Experience e = make_exp(0, 1, 1, 2.0, 1, 2, 10);
  t.observe(e);
  // y = 2 + 0.5 * 3 = 3.5; q <- 0 + 0.1 * 3.5
  CHECK(t.q(0, 0, 1) == doctest::Approx(0.35));
  t.observe(e);
  CHECK(t.q(0, 0, 1) == doctest::Approx(0.35 + 0.1 * (3.5 - 0.35)));
  t.set_training(false);
  t.observe(e);
  CHECK(t.q(0, 0, 1) == doctest::Approx(0.665));  // frozen once training stops
}

TEST_CASE("annealed tabular steps average the observed targets") {
  HyperParams hp = tiny_hp();
  hp.alpha_anneal = true;
  hp.gamma = 0.0;
  hp.density_buckets = 1;
  TabularQLearner t(2, 10, hp, 9, 1000);
  for (double r : {1.0, 2.0, 3.0}) t.observe(make_exp(0, 0, 1, r, 1, 0, 10));
  CHECK(t.q(0, 0, 1) == doctest::Approx(2.0));  // mean of 1, 2, 3
  t.observe(make_exp(0, 0, 1, 6.0, 1, 0, 10));
  CHECK(t.q(0, 0, 1) == doctest::Approx(3.0));  // mean of 1, 2, 3, 6
}

TEST_CASE("acting is uniform while epsilon is one") {
  HyperParams hp = tiny_hp();
  hp.epsilon_start = 1.0;
  hp.epsilon_floor = 1.0;
  DqnLearner learner(4, 8, hp, {}, 41, 1000);
  matchenv::Observation obs{1, 2, 0.25};
  std::vector<long long> counts(4, 0);
  const int draws = 8000;
  for (int i = 0; i < draws; ++i) counts[learner.act(obs, 0)] += 1;
  double chi2 = 0.0;
  for (int a = 0; a < 4; ++a) {
    double dev = counts[a] - draws / 4.0;
    chi2 += dev * dev / (draws / 4.0);
  }
  CHECK(chi2 < 11.34);
}

TEST_CASE("greedy action reads the argmax of the online q head") {
  HyperParams hp = tiny_hp();
  hp.epsilon_start = 1e-12;
  hp.epsilon_floor = 1e-12;
  DqnLearner learner(4, 8, hp, {}, 42, 1000);
  zero_params(learner.online_net());
  matchenv::Observation obs{1, 2, 0.25};
  CHECK(learner.act(obs, 0) == 0);  // all-equal table ties to the lowest index
  learner.online_net().biases.back()[2] = 1.0;
  CHECK(learner.act(obs, 0) == 2);
}

TEST_CASE("q target arithmetic from a rigged target network") {
  HyperParams hp = tiny_hp();
  hp.gamma = 0.5;
  hp.beta = 0.01;
  const int Z = 10;
  matchenv::Experience e = make_exp(2, 5, 4, 1.5, 7, 3, 20);

  SUBCASE("plain variant: reward plus discounted max") {
    DqnLearner learner(Z, 20, hp, {}, 7, 1000);
    zero_params(learner.target_net());
    learner.target_net().biases.back()[3] = 12.0;
    CHECK(learner.target_for(e) == doctest::Approx(1.5 + 0.5 * 12.0));
  }

  SUBCASE("entropy variant adds beta times the predicted-occupancy entropy") {
    DqnLearner::Options opt;
    opt.entropy_bonus = opt.density_train = opt.density_head = true;
    DqnLearner learner(Z, 20, hp, opt, 7, 1000);
    zero_params(learner.target_net());
    learner.target_net().biases.back()[3] = 12.0;
    // Zero logits in the occupancy block: uniform over 10 zones, entropy ln 10.
    CHECK(learner.target_for(e) ==
          doctest::Approx(1.5 + 0.5 * 12.0 + 0.01 * std::log(10.0))
              .epsilon(1e-12));
  }

  SUBCASE("entropy bonus vanishes with beta zero") {
    hp.beta = 0.0;
    DqnLearner::Options opt;
    opt.entropy_bonus = opt.density_train = opt.density_head = true;
    DqnLearner learner(Z, 20, hp, opt, 7, 1000);
    zero_params(learner.target_net());
    learner.target_net().biases.back()[3] = 12.0;
    CHECK(learner.target_for(e) == doctest::Approx(1.5 + 0.5 * 12.0));
  }
}

TEST_CASE("single-sample loss values against hand arithmetic") {
  numkit::Rng rng(11);
  numkit::Mlp net =
      numkit::mlp_init({3, 4, 6}, {{"q", 2}, {"density", 4}}, 0.0, rng);
  zero_params(net);
  QSample s;
  s.x = {1.0, 0.0, 0.5};
  s.action = 1;
  s.target = 0.0;       // matches the zeroed q output: no TD term
  s.next_zone = 0;
  s.density_target = 0.3;
  std::vector<QSample> batch{s};
  // Zero logits over two zones: predicted occupancy 0.5, error (0.5 - 0.3)^2.
  CHECK(q_density_loss(net, batch, 1.0, true, nullptr) ==
        doctest::Approx(0.04).epsilon(1e-12));
  CHECK(q_density_loss(net, batch, 0.0, true, nullptr) == doctest::Approx(0.0));
  batch[0].target = 2.0;
  CHECK(q_density_loss(net, batch, 1.0, true, nullptr) ==
        doctest::Approx(4.0 + 0.04).epsilon(1e-12));
  CHECK(argmax_q(net, s.x) == 0);
  CHECK(density_entropy(net, s.x, 0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("q learner fits a repeated transition") {
  HyperParams hp = tiny_hp();
  hp.gamma = 0.0;
  DqnLearner learner(4, 8, hp, {}, 13, 1000);
  matchenv::Experience e = make_exp(1, 2, 2, 3.0, 0, 1, 8);
  for (int i = 0; i < 400; ++i) learner.observe(e);
  std::vector<double> x;
  learner.encode(1, 2, x);
  CHECK(q_at(learner.online_net(), x, 2) == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("density head learns the observed occupancy coordinate") {
  HyperParams hp = tiny_hp();
  hp.gamma = 0.0;
  hp.lambda = 1.0;
  DqnLearner::Options opt;
  opt.density_train = opt.density_head = true;
  DqnLearner learner(3, 10, hp, opt, 14, 1000);
  matchenv::Experience e = make_exp(0, 3, 1, 1.0, 1, 8, 10);
  for (int i = 0; i < 800; ++i) learner.observe(e);
  std::vector<double> d = learner.predict_density(0, 3, 1);
  REQUIRE(d.size() == 3);
  CHECK(d[1] == doctest::Approx(0.8).epsilon(0.05));
  CHECK(learner.density_active());
  DqnLearner plain(3, 10, tiny_hp(), {}, 14, 1000);
  CHECK_FALSE(plain.density_active());
  CHECK(plain.predict_density(0, 3, 1).empty());
}

TEST_CASE("non-finite rewards trip the numeric guard") {
  HyperParams hp = tiny_hp();
  DqnLearner learner(4, 8, hp, {}, 15, 1000);
  matchenv::Experience e =
      make_exp(1, 2, 2, std::numeric_limits<double>::quiet_NaN(), 0, 1, 8);
  CHECK_THROWS_AS(learner.observe(e), numkit::NumericError);
}

TEST_CASE("mean-action table shifts the mean-field learner's estimates") {
  HyperParams hp = tiny_hp();
  DqnLearner::Options opt;
  opt.mean_field = true;
  DqnLearner learner(4, 8, hp, opt, 16, 1000);
  std::vector<double> x;
  learner.encode(1, 2, x);
  REQUIRE(x.size() == 9);
  CHECK(x[5] == doctest::Approx(0.25));  // uniform prior row
  double before = max_q(learner.online_net(), x);
  std::vector<std::vector<double>> table(4, std::vector<double>(4, 0.0));
  for (auto& row : table) row[3] = 1.0;
  learner.set_mean_actions(table);
  learner.encode(1, 2, x);
  CHECK(x[8] == doctest::Approx(1.0));
  CHECK(max_q(learner.online_net(), x) != doctest::Approx(before));
  CHECK_THROWS(learner.set_mean_actions(
      std::vector<std::vector<double>>(3, std::vector<double>(4, 0.25))));
}

TEST_CASE("actor-critic policies are distributions and follow rigged logits") {
  HyperParams hp = tiny_hp();
  A2cLearner learner(4, 8, hp, {}, 17, 1000);
  matchenv::Observation obs{2, 1, 0.125};
  std::vector<double> p = learner.policy(obs);
  REQUIRE(p.size() == 4);
  double sum = 0.0;
  for (double v : p) {
    CHECK(v > 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  zero_params(learner.policy_net());
  learner.policy_net().biases.back()[1] = 50.0;
  for (int i = 0; i < 100; ++i) CHECK(learner.act(obs, 0) == 1);
}

TEST_CASE("actor-critic updates fire at rollout boundaries") {
  HyperParams hp = tiny_hp();
  hp.k_step = 3;
  A2cLearner learner(2, 4, hp, {}, 18, 1000);
  matchenv::Experience e = make_exp(0, 1, 1, 1.0, 1, 1, 4);
  learner.observe(e);
  learner.observe(e);
  CHECK(learner.updates() == 0);
  learner.observe(e);
  CHECK(learner.updates() == 1);
  learner.observe(e);
  learner.on_period_end();  // flushes the partial rollout
  CHECK(learner.updates() == 2);
  learner.on_period_end();  // nothing buffered, no update
  CHECK(learner.updates() == 2);
}

TEST_CASE("two-armed bandit oracle: the actor concentrates on the paying arm") {
  verify::CheckReport r = verify::bandit_oracle(true, 2024);
  for (const std::string& line : r.lines) INFO(line);
  CHECK(r.ok);
}

TEST_CASE("factory wires kinds, names and head overrides") {
  HyperParams hp = tiny_hp();
  CHECK(learner_kind_from("dedqn") == LearnerKind::dedqn);
  CHECK(to_string(LearnerKind::mmfq) == "mmfq");
  CHECK_THROWS(learner_kind_from("dqnx"));
  for (const char* name : {"tabq", "dqn", "a2c", "dedqn", "dea2c", "mmfq"}) {
    auto l = make_learner(learner_kind_from(name), 4, 8, hp, -1, 21, 1000);
    REQUIRE(l != nullptr);
    matchenv::Observation obs{0, 1, 0.125};
    int a = l->act(obs, 0);
    CHECK(a >= 0);
    CHECK(a < 4);
  }
  CHECK(make_learner(LearnerKind::dedqn, 4, 8, hp, -1, 21, 1000)
            ->density_active());
  CHECK_FALSE(
      make_learner(LearnerKind::dqn, 4, 8, hp, -1, 21, 1000)->density_active());
  CHECK_THROWS(make_learner(LearnerKind::dedqn, 4, 8, hp, 0, 21, 1000));
  CHECK_THROWS(make_learner(LearnerKind::mmfq, 4, 8, hp, 1, 21, 1000));
  CHECK_THROWS(make_learner(LearnerKind::tabq, 4, 8, hp, 1, 21, 1000));
}

TEST_CASE("hyperparameter validation names the offending field") {
  HyperParams hp = tiny_hp();
  hp.gamma = 1.0;
  CHECK_THROWS_WITH_AS(hp.validate(), doctest::Contains("gamma"),
                       std::runtime_error);
  hp = tiny_hp();
  hp.epsilon_floor = 0.0;
  CHECK_THROWS_WITH_AS(hp.validate(), doctest::Contains("epsilon"),
                       std::runtime_error);
  hp = tiny_hp();
  hp.epsilon_floor = 0.5;
  hp.epsilon_start = 0.2;
  CHECK_THROWS(hp.validate());
  hp = tiny_hp();
  hp.dropout = 1.0;
  CHECK_THROWS_WITH_AS(hp.validate(), doctest::Contains("dropout"),
                       std::runtime_error);
  hp = tiny_hp();
  hp.hidden = {16, 0};
  CHECK_THROWS(hp.validate());
  hp = tiny_hp();
  hp.batch_size = 0;
  CHECK_THROWS(hp.validate());
}

TEST_CASE("identical seeds give bitwise identical learners") {
  HyperParams hp = tiny_hp();
  hp.dropout = 0.25;
  auto drive = [&](uint64_t seed) {
    DqnLearner::Options opt;
    opt.entropy_bonus = opt.density_train = opt.density_head = true;
    DqnLearner learner(3, 6, hp, opt, seed, 500);
    numkit::Rng feed(99);
    std::vector<int> acts;
    for (int i = 0; i < 300; ++i) {
      matchenv::Observation obs{feed.uniform_int(3), 1 + feed.uniform_int(3),
                                0.0};
      obs.normalized = obs.count / 6.0;
      acts.push_back(learner.act(obs, i));
      learner.observe(make_exp(obs.zone, obs.count, acts.back(),
                               feed.uniform(), feed.uniform_int(3), 1, 6));
    }
    return std::pair{acts, learner.online_net().weights};
  };
  auto a = drive(31);
  auto b = drive(31);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);  // bitwise equality, no tolerance
  auto c = drive(32);
  CHECK(a.second != c.second);
}
