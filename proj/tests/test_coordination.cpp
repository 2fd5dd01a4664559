#include <vector>

#include "crh/coordination.hpp"
#include "doctest.h"

using namespace crh;

TEST_CASE("common hopping cycles through the channels") {
  HoppingScheme single{CoordinationKind::SingleRendezvous, 4};
  std::vector<int> seq;
  for (std::uint64_t t = 0; t <= 4; ++t) seq.push_back(hop_channel(single, 123, t));
  CHECK(seq == std::vector<int>{1, 2, 3, 4, 1});
  CHECK(hop_channel(single, 1, 9) == hop_channel(single, 2, 9));
}

TEST_CASE("per-node hopping is public and uniform") {
  HoppingScheme multi{CoordinationKind::MultipleRendezvous, 10};
  CHECK(hop_channel(multi, 77, 1234) == hop_channel(multi, 77, 1234));
  int match = 0;
  const int slots = 10000;
  for (std::uint64_t t = 0; t < slots; ++t) {
    const int a = hop_channel(multi, 1, t), b = hop_channel(multi, 2, t);
    REQUIRE(a >= 1);
    REQUIRE(a <= 10);
    match += a == b;
  }
  CHECK(static_cast<double>(match) / slots == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("rejoining the hopping sequence") {
  HoppingScheme single{CoordinationKind::SingleRendezvous, 4};
  CHECK(rejoin_hopping(single, 5, 7, false) == 4);
  HoppingScheme multi{CoordinationKind::MultipleRendezvous, 6};
  CHECK(rejoin_hopping(multi, 5, 33, false) == hop_channel(multi, 5, 33));
  CHECK(rejoin_hopping(multi, 5, 33, true) == common_hop_channel(6, 33));
}

TEST_CASE("rendezvous outcomes") {
  const std::vector<bool> none_busy(10, false);
  SUBCASE("one pair on an idle channel") {
    HoppingScheme single{CoordinationKind::SingleRendezvous, 10};
    std::vector<Contender> c{{1, 2, 2, true}};
    const bool busy[10] = {};
    auto out = attempt_rendezvous(single, c, 3, busy);
    CHECK(out.at(1).result == RendezvousResult::LinkEstablished);
    CHECK(out.at(1).channel == 4);
  }
  SUBCASE("two pairs on the common channel collide") {
    HoppingScheme single{CoordinationKind::SingleRendezvous, 10};
    std::vector<Contender> c{{1, 2, 2, true}, {3, 4, 4, true}};
    const bool busy[10] = {};
    auto out = attempt_rendezvous(single, c, 0, busy);
    CHECK(out.at(1).result == RendezvousResult::Type1Collision);
    CHECK(out.at(3).result == RendezvousResult::Type1Collision);
  }
  SUBCASE("two pairs with receivers on different channels both succeed") {
    HoppingScheme multi{CoordinationKind::MultipleRendezvous, 10};
    std::uint64_t slot = 0;
    while (hop_channel(multi, 2, slot) == hop_channel(multi, 4, slot)) ++slot;
    std::vector<Contender> c{{1, 2, 2, true}, {3, 4, 4, true}};
    const bool busy[10] = {};
    auto out = attempt_rendezvous(multi, c, slot, busy);
    CHECK(out.at(1).result == RendezvousResult::LinkEstablished);
    CHECK(out.at(3).result == RendezvousResult::LinkEstablished);
  }
  SUBCASE("PU present or receiver unavailable") {
    HoppingScheme single{CoordinationKind::SingleRendezvous, 10};
    bool busy[10] = {};
    busy[0] = true;
    std::vector<Contender> c{{1, 2, 2, true}, {3, 4, 4, false}};
    auto out = attempt_rendezvous(single, c, 0, busy);
    CHECK(out.at(1).result == RendezvousResult::ChannelBusy);
    CHECK(out.at(3).result == RendezvousResult::NoAttempt);
  }
}

TEST_CASE("at most one link per channel per slot") {
  HoppingScheme multi{CoordinationKind::MultipleRendezvous, 5};
  std::vector<Contender> c;
  for (int i = 0; i < 12; ++i) c.push_back({2 * i, 2 * i + 1, static_cast<std::uint64_t>(2 * i + 1), true});
  bool busy[5] = {false, true, false, false, false};
  for (std::uint64_t t = 0; t < 500; ++t) {
    auto out = attempt_rendezvous(multi, c, t, busy);
    int links[6] = {};
    for (auto& [tx, o] : out) {
      if (o.result == RendezvousResult::LinkEstablished) {
        REQUIRE(o.channel != 2);
        ++links[o.channel];
      }
    }
    for (int ch = 1; ch <= 5; ++ch) REQUIRE(links[ch] <= 1);
  }
}
