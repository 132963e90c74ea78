#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uavsim/config.hpp"

using namespace uavsim;

namespace {

ScenarioConfig with_targets(ScenarioConfig c) {
  Rng rng(7);
  c.task_targets = sample_task_targets(c.num_tasks, c.cell_radius, rng);
  return c;
}

std::string error_key(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("defaults follow the simulation parameter table") {
  const ScenarioConfig c = default_config();
  CHECK(c.num_tasks == 10);
  CHECK(c.max_speed == 15.0);
  CHECK(c.uav_altitude == 200.0);
  CHECK(c.bs_height == 25.0);
  CHECK(c.tx_power_dbm == 23.0);
  CHECK(c.noise_power_dbm == -96.0);
  CHECK(c.carrier_freq_ghz == 2.0);
  CHECK(c.subcarrier_bandwidth_hz == 12.5e3);
  CHECK(c.cycle_duration_s == 0.1);
  CHECK(c.info_exchange_s == 0.02);
  CHECK(c.num_subcarriers == 80);
  CHECK(c.sensing_lambda == 0.01);
  CHECK(c.max_sensing_angle_rad == doctest::Approx(std::numbers::pi / 6).epsilon(1e-15));
  CHECK(c.sensing_data_bits == 8e6);
  CHECK(c.exploration == 0.1);
  CHECK(c.cell_radius == 500.0);
  CHECK(c.episode_cycles == 8000);
  CHECK(c.batch_size == 256);
  CHECK(c.soft_update == 0.01);
  CHECK(c.initial_lr == 0.1);
  CHECK(c.lr_decay == 1e-3);
  CHECK(c.hidden_width == 512);
  CHECK(c.task_targets.empty());
}

TEST_CASE("defaults validate without warnings once targets exist") {
  CHECK(validate_config(with_targets(default_config())).empty());
}

TEST_CASE("parse: overrides keep the remaining defaults") {
  const ScenarioConfig c = parse_config("num_uavs=2\nnum_tasks=10\ntask_targets=random\n");
  CHECK(c.num_uavs == 2);
  CHECK(c.num_tasks == 10);
  CHECK(c.task_targets.size() == 10);
  CHECK(c.num_subcarriers == 80);
  CHECK(c.cell_radius == 500.0);
}

TEST_CASE("parse: errors name the offending key") {
  CHECK(error_key("num_subcarriers=2\nnum_uavs=3\ntask_targets=random") == "num_subcarriers");
  try {
    parse_config("num_subcarriers=2\nnum_uavs=3\ntask_targets=random");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("K > M violated") != std::string::npos);
  }
  CHECK(error_key("") == "task_targets");
  CHECK(error_key("bogus_key=1") == "bogus_key");
  CHECK(error_key("num_uavs=two\ntask_targets=random") == "num_uavs");
  CHECK(error_key("info_exchange_s=0.2\ntask_targets=random") == "info_exchange_s");
  CHECK(error_key("max_sensing_angle_deg=90\ntask_targets=random") == "max_sensing_angle_rad");
  CHECK(error_key("num_tasks=3\ntask_targets=0,0;1,1") == "task_targets");
  CHECK(error_key("task_targets=600,0") == "task_targets");
  CHECK(error_key("sensing_data_bits=-1\ntask_targets=random") == "sensing_data_bits");
}

TEST_CASE("parse: comments, degrees, model flag, explicit targets") {
  const ScenarioConfig c = parse_config(
      "# desk\nmax_sensing_angle_deg=45  # inline\nlos_model=3gpp\ntask_targets=10,20;-30,40\n");
  CHECK(c.max_sensing_angle_rad == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK(c.los_model == LosModel::k3gpp);
  REQUIRE(c.num_tasks == 2);
  CHECK(c.task_targets[1].id == 2);
  CHECK(c.task_targets[1].target == Vec3{-30.0, 40.0, 0.0});
}

TEST_CASE("fewer tasks than UAVs warns") {
  const ScenarioConfig c = parse_config("num_uavs=3\nnum_tasks=2\ntask_targets=random");
  CHECK(validate_config(c).size() == 1);
}

TEST_CASE("3D altitude range must contain the nominal altitude") {
  CHECK(error_key("enable_3d=true\naltitude_range=100,150\ntask_targets=random") == "altitude_range");
  CHECK_NOTHROW(parse_config("enable_3d=true\naltitude_range=100,250\ntask_targets=random"));
}

TEST_CASE("serialize round-trips exactly") {
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    ScenarioConfig c = default_config();
    c.num_uavs = 1 + static_cast<int>(uniform_index(rng, 4));
    c.num_tasks = 1 + static_cast<int>(uniform_index(rng, 12));
    c.cell_radius = 100.0 + 900.0 * uniform01(rng);
    c.uav_altitude = 20.0 + 300.0 * uniform01(rng);
    c.sensing_lambda = 1e-3 + uniform01(rng) / 7.0;
    c.max_sensing_angle_rad = 0.1 + 1.3 * uniform01(rng);
    c.cycle_duration_s = 0.05 + uniform01(rng);
    c.info_exchange_s = c.cycle_duration_s * uniform01(rng) * 0.9 + 1e-6;
    c.los_model = k % 2 ? LosModel::k3gpp : LosModel::kPaper;
    c.cooperative = k % 3 == 0;
    c.exclusive_task_selection = k % 5 != 0;
    c.enable_3d = k % 4 == 0;
    c.altitude_min = c.uav_altitude * 0.5;
    c.altitude_max = c.uav_altitude * 1.5;
    c.rng_seed = rng();
    c.task_targets = sample_task_targets(c.num_tasks, c.cell_radius, rng);
    REQUIRE_NOTHROW(validate_config(c));
    const ScenarioConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
  }
}

TEST_CASE("target sampler") {
  Rng a(3), b(3);
  const auto ta = sample_task_targets(10, 500.0, a);
  const auto tb = sample_task_targets(10, 500.0, b);
  REQUIRE(ta.size() == 10);
  for (std::size_t j = 0; j < ta.size(); ++j) {
    CHECK(ta[j].target == tb[j].target);
    CHECK(ta[j].id == static_cast<int>(j) + 1);
    CHECK(ta[j].target.z == 0.0);
    CHECK(ta[j].target.horizontal_norm() <= 500.0);
  }

  Rng z(1);
  const auto origin = sample_task_targets(1, 0.0, z);
  CHECK(origin[0].target == Vec3{0.0, 0.0, 0.0});

  // Uniform disk: E[r] = 2R/3.
  Rng m(5);
  const auto many = sample_task_targets(1000, 500.0, m);
  double mean = 0.0;
  for (const auto& t : many) mean += t.target.horizontal_norm();
  mean /= 1000.0;
  CHECK(std::abs(mean - 1000.0 / 3.0) < 0.05 * 1000.0 / 3.0);
}

TEST_CASE("random targets follow rng_seed") {
  const auto a = parse_config("rng_seed=4\ntask_targets=random");
  const auto b = parse_config("rng_seed=4\ntask_targets=random");
  const auto c = parse_config("rng_seed=5\ntask_targets=random");
  CHECK(a == b);
  CHECK_FALSE(a.task_targets[0].target == c.task_targets[0].target);
}

TEST_CASE("desk scale") {
  const ScenarioConfig c = desk_config(2);
  CHECK(c.num_uavs == 2);
  CHECK(c.num_tasks == 5);
  CHECK(c.cell_radius == 200.0);
  CHECK(c.episode_cycles == 500);
  CHECK(c.num_episodes == 300);
  CHECK(validate_config(c).empty());
}
