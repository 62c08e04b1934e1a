#include <doctest.h>

#include "eam/baseline.hpp"
#include "eam/error.hpp"

using namespace eam;

namespace {

CapacitorBank bank_of(double c0, double c1) {
  CapacitorParams a;
  a.capacitance = c0;
  CapacitorParams b = a;
  b.capacitance = c1;
  return CapacitorBank({Capacitor(a, 2.5), Capacitor(b, 2.0)}, {0, 0, 1});
}

} // namespace

TEST_CASE("capacitance-proportional shares") {
  const auto s = fh_allocate(bank_of(33e-6, 220e-6), 1e-3);
  CHECK(s[0] == doctest::Approx(33.0 / 253.0 * 1e-3));
  CHECK(s[0] == doctest::Approx(0.1304e-3).epsilon(1e-3));
  CHECK(s[1] == doctest::Approx(0.8696e-3).epsilon(1e-3));
  CHECK(s[0] + s[1] == 1e-3);

  const auto eq = fh_allocate(bank_of(100e-6, 100e-6), 2e-3);
  CHECK(eq[0] == doctest::Approx(eq[1]));
  const auto zero = fh_allocate(bank_of(33e-6, 220e-6), 0.0);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("central bank sums capacitance and keeps the stored energy") {
  const auto bank = bank_of(33e-6, 220e-6);
  const auto c = central_bank(bank);
  REQUIRE(c.size() == 1);
  CHECK(c[0].params().capacitance == doctest::Approx(253e-6));
  CHECK(c[0].energy() == doctest::Approx(bank.total_energy()));
  CHECK(c.buffer_for(Component::Actuation) == 0);

  const auto app = central_app(builtin_app(BuiltinApp::Hvac));
  for (const auto &t : app.tasks) CHECK(t.buffer == 0);
}

TEST_CASE("baselines ignore attacks and keep NML rates") {
  const auto hvac = builtin_app(BuiltinApp::Hvac);
  const TaskGraph g(hvac);
  QueueSet q(g, 4);
  auto bank = bank_of(33e-6, 220e-6);
  auto state = SchedulerState::initial(hvac);
  PolicyParams p;
  p.omega0 = 0.1;
  p.omega1 = 0.2;
  const AttackInfo info{true, 1.0, 0.0, 10.0};
  SlotDecision out;
  const PolicyInputs in{hvac, g, bank, q, info, p, 0.0, 1e-3, 0.0};
  rts_schedule(state, in, PolicyKind::Fh, out);
  CHECK(out.profile == Profile::NML);
  CHECK_FALSE(out.attack);
  CHECK(out.started == std::optional<std::size_t>(0));
}

TEST_CASE("policy names") {
  CHECK(policy_kind_from_string("fh") == PolicyKind::Fh);
  CHECK(std::string(to_string(PolicyKind::Central)) == "central");
  CHECK_THROWS_AS((void)policy_kind_from_string("rr"), Error);
}
