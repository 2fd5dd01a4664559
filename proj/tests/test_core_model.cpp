#include <cmath>

#include "crh/core_model.hpp"
#include "doctest.h"

using namespace crh;

TEST_CASE("frame spec arithmetic") {
  FrameSpec f{10, 3};
  CHECK(f.eta() == 11);
  CHECK(f.packet_slots() == 30);
  CHECK(f.frame_seconds(0.002) == doctest::Approx(0.02));
  CHECK_THROWS_AS(FrameSpec({0, 1}).validate(), InvalidParameter);
}

TEST_CASE("slot clock ticks by one") {
  SlotClock clk;
  for (int i = 0; i < 5; ++i) clk.tick();
  CHECK(clk.slot_index == 5);
  CHECK(clk.seconds() == doctest::Approx(0.01));
}

TEST_CASE("idle PU channel with zero arrivals stays off") {
  PuTrafficParams pu{0.0, PacketLengthModel::Fixed, 5};
  RandomStream rng(7);
  ChannelState st;
  for (int t = 0; t < 10000; ++t) {
    st = advance_pu_channel(st, pu, rng);
    REQUIRE(st.off());
  }
}

TEST_CASE("last slot of a fixed packet") {
  PuTrafficParams pu{0.0, PacketLengthModel::Fixed, 4};
  RandomStream rng(1);
  ChannelState st{1, 1, false};
  CHECK(advance_pu_channel(st, pu, rng).off());
  st.pending_pu_packet = true;
  const auto next = advance_pu_channel(st, pu, rng);
  CHECK(next.remaining_slots == 4);
  CHECK_FALSE(next.pending_pu_packet);
}

TEST_CASE("fixed-length bursts have exactly L slots") {
  // A busy period may chain buffered packets, so bursts are multiples of L.
  PuTrafficParams pu{0.05, PacketLengthModel::Fixed, 6};
  RandomStream rng(99);
  ChannelState st;
  int run = 0, bursts = 0;
  for (int t = 0; t < 200000; ++t) {
    const auto next = advance_pu_channel(st, pu, rng);
    if (next.on()) {
      ++run;
      if (st.on() && st.remaining_slots == 1) {
        // a buffered packet started back to back
        CHECK(next.remaining_slots == 6);
      }
    } else if (run > 0) {
      CHECK(run % 6 == 0);
      ++bursts;
      run = 0;
    }
    st = next;
  }
  CHECK(bursts > 100);
}

TEST_CASE("mean OFF duration matches the geometric mean") {
  // Fixed length 1 with no buffering effect on OFF runs; OFF run counts the
  // failures before an arrival starting from an OFF slot.
  const double p = 0.1;
  PuTrafficParams pu{p, PacketLengthModel::Fixed, 1};
  RandomStream rng(2024);
  ChannelState st;
  long long off_slots = 0, off_runs = 0;
  int current = 0;
  bool in_off = false;
  for (int t = 0; t < 1'000'000; ++t) {
    st = advance_pu_channel(st, pu, rng);
    if (st.off()) {
      ++current;
      in_off = true;
    } else if (in_off) {
      off_slots += current;
      ++off_runs;
      current = 0;
      in_off = false;
    } else {
      ++off_runs;  // zero-length gap between packets
    }
  }
  // pmf p (1-p)^n, n >= 0: mean = sum n p (1-p)^n.
  double oracle = 0.0;
  for (int n = 0; n < 2000; ++n) oracle += n * p * std::pow(1 - p, n);
  const double mean = static_cast<double>(off_slots) / off_runs;
  CHECK(mean == doctest::Approx(oracle).epsilon(0.02));
  CHECK(oracle == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("geometric PU lengths have mean 1/v") {
  PuTrafficParams pu{0.3, PacketLengthModel::Geometric, 8.0};
  CHECK(pu.completion_prob() == doctest::Approx(0.125));
  RandomStream rng(5);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const int len = sample_pu_packet_length(pu, rng);
    REQUIRE(len >= 1);
    sum += len;
  }
  CHECK(sum / n == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("SU arrival gaps") {
  RandomStream rng(11);
  SUBCASE("x = 1 gives the minimum gap every time") {
    SuTrafficParams su{1.0, 5};
    for (int i = 0; i < 1000; ++i) REQUIRE(next_su_arrival_gap(su, rng) == 5);
  }
  SUBCASE("shifted geometric mean") {
    SuTrafficParams su{0.25, 10};
    double sum = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      const int g = next_su_arrival_gap(su, rng);
      REQUIRE(g >= 10);
      sum += g;
    }
    double oracle = 0.0;
    for (int g = 10; g < 400; ++g) oracle += g * 0.25 * std::pow(0.75, g - 10);
    CHECK(sum / n == doctest::Approx(oracle).epsilon(0.02));
    CHECK(oracle == doctest::Approx(13.0).epsilon(1e-9));
  }
  SUBCASE("zero traffic cannot draw a gap") {
    SuTrafficParams su{0.0, 1};
    CHECK_NOTHROW(su.validate());
    CHECK_THROWS_AS(next_su_arrival_gap(su, rng), InvalidParameter);
  }
}

TEST_CASE("rate to probability clamps at one") {
  bool clamped = false;
  CHECK(rate_to_probability(10, 0.002, &clamped) == doctest::Approx(0.02));
  CHECK_FALSE(clamped);
  CHECK(rate_to_probability(800, 0.002, &clamped) == 1.0);
  CHECK(clamped);
  CHECK_THROWS_AS(rate_to_probability(1, 0), InvalidParameter);
}

TEST_CASE("streams are isolated per entity") {
  RandomStream a(42, StreamKind::PuChannel, 3, 0);
  RandomStream b(42, StreamKind::PuChannel, 3, 0);
  RandomStream c(42, StreamKind::PuChannel, 4, 0);
  RandomStream d(42, StreamKind::PuChannel, 3, 1);
  const auto va = a.next();
  CHECK(va == b.next());
  CHECK(va != c.next());
  CHECK(va != d.next());
}

TEST_CASE("below is uniform enough") {
  RandomStream rng(3);
  int counts[7] = {};
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int k : counts) CHECK(k == doctest::Approx(10000).epsilon(0.05));
}
