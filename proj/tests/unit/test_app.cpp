#include <doctest.h>

#include "eam/app.hpp"
#include "eam/error.hpp"

using namespace eam;

TEST_CASE("HVAC rate table") {
  const auto hvac = builtin_app(BuiltinApp::Hvac);
  CHECK(rate_for(hvac, "TS", Profile::NML) == 30.0);
  CHECK(rate_for(hvac, "TS", Profile::SA) == 8.0);
  CHECK(rate_for(hvac, "TS", Profile::LA) == 4.0);
  CHECK(period_for(hvac, "D", Profile::CTL) == doctest::Approx(900.0));
  CHECK_THROWS_AS((void)rate_for(hvac, "XX", Profile::NML), Error);
}

TEST_CASE("other built-in apps") {
  CHECK(rate_for(builtin_app(BuiltinApp::Greenhouse), "SC", Profile::NML) == 12.0);
  CHECK(rate_for(builtin_app(BuiltinApp::Ventilation), "CS", Profile::NML) == 45.0);
}

TEST_CASE("task cost classes") {
  const auto hvac = builtin_app(BuiltinApp::Hvac);
  const auto &ts = hvac.tasks[*hvac.index_of("TS")];
  const auto &d = hvac.tasks[*hvac.index_of("D")];
  const auto &ac = hvac.tasks[*hvac.index_of("AC")];
  CHECK(ts.energy_cost == doctest::Approx(19.066e-6));
  CHECK(ts.duration == doctest::Approx(12.030e-3));
  CHECK(d.energy_cost == doctest::Approx(15.731e-6));
  CHECK(d.duration == doctest::Approx(10.182e-3));
  CHECK(ac.energy_cost == doctest::Approx(92.931e-6));
  CHECK(ac.duration == doctest::Approx(60.150e-3));
  CHECK(ac.buffer == 1);
  CHECK(ac.component == Component::Actuation);
}

TEST_CASE("disabled task has no period") {
  auto app = builtin_app(BuiltinApp::Hvac);
  app.tasks[0].rates[static_cast<int>(Profile::CTL)] = 0.0;
  CHECK_THROWS_AS((void)period_for(app, app.tasks[0].id, Profile::CTL), Error);
}

TEST_CASE("structural validation") {
  CHECK(validate(builtin_app(BuiltinApp::Hvac), 2).empty());
  CHECK(validate(builtin_app(BuiltinApp::Greenhouse), 2).empty());
  CHECK(validate(builtin_app(BuiltinApp::Ventilation), 2).empty());

  AppSpec cyc;
  cyc.name = "cyc";
  TaskSpec a;
  a.id = "A";
  a.energy_cost = 1e-6;
  a.duration = 1e-3;
  a.rates.fill(1.0);
  TaskSpec b = a;
  b.id = "B";
  a.predecessors = {"B"};
  b.predecessors = {"A"};
  cyc.tasks = {a, b};
  cyc.sink_task = "B";
  const auto v = validate(cyc, 1);
  REQUIRE(v.size() >= 1);
  bool cycle = false;
  for (const auto &x : v) cycle |= x.rule.find("cycle") != std::string::npos;
  CHECK(cycle);

  auto bad = builtin_app(BuiltinApp::Hvac);
  bad.tasks[3].buffer = 2;
  const auto vb = validate(bad, 2);
  CHECK(vb.size() == 1);
  CHECK_THROWS_AS(require_valid(bad, 2), Error);
}

TEST_CASE("queues drop the oldest and keep lineage") {
  DataQueue q(2);
  CHECK_FALSE(q.push({1, 0, 1}));
  CHECK_FALSE(q.push({2, 0, 2}));
  CHECK(q.push({3, 0, 4}));
  CHECK(q.size() == 2);
  CHECK(q.pop().payload_id == 2);

  const auto hvac = builtin_app(BuiltinApp::Hvac);
  const TaskGraph g(hvac);
  QueueSet qs(g, 4);
  const auto ts = *hvac.index_of("TS"), hs = *hvac.index_of("HS"), d = *hvac.index_of("D");
  CHECK_FALSE(qs.has_input(d, JoinKind::Any));
  qs.emit(ts, {1, 0.0, Lineage{1} << ts});
  CHECK(qs.has_input(d, JoinKind::Any));
  CHECK_FALSE(qs.has_input(d, JoinKind::All));
  qs.emit(hs, {2, 0.0, Lineage{1} << hs});
  CHECK(qs.has_input(d, JoinKind::All));
  const auto lineage = qs.consume(d);
  CHECK(lineage == ((Lineage{1} << ts) | (Lineage{1} << hs)));
  CHECK(qs.total_tokens() == 0);
}
