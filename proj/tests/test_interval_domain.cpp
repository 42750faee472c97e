#include <doctest.h>

#include <random>

#include "absint/difftest.hpp"
#include "absint/interval_domain.hpp"

using namespace absint;

namespace {

const Width w4(4);
const Width w8(8);

Itv iv(std::int64_t lo, std::int64_t up, Width w) { return Itv::make(lo, up, w); }

}  // namespace

TEST_CASE("interval construction") {
  CHECK(iv(3, 5, w8) == Itv::val(IntM(3, w8), IntM(5, w8)));
  CHECK(Itv::make(5, 3, w8).is_bottom());
  CHECK(Itv::make(-1000, 0, w8).is_bottom());
}

TEST_CASE("lattice basics") {
  IntervalDomain d(w8);
  CHECK(d.join(iv(0, 2, w8), iv(5, 6, w8)) == iv(0, 6, w8));
  CHECK(d.meet(iv(0, 2, w8), iv(5, 6, w8)).is_bottom());
  CHECK(d.join(d.bottom(), iv(1, 2, w8)) == iv(1, 2, w8));
  CHECK(d.top() == iv(-128, 127, w8));
  CHECK(d.leq(iv(1, 2, w8), iv(0, 3, w8)));
  CHECK_FALSE(d.leq(iv(0, 3, w8), iv(1, 2, w8)));
}

TEST_CASE("the width-4 carrier has 137 intervals") {
  CHECK(enumerate_intervals(w4).size() == 137);
}

TEST_CASE("cardinality measure") {
  IntervalDomain d(w4);
  CHECK(d.card(d.bottom()) == 0);
  CHECK(d.card(iv(5, 5, w8)) == 1);
  const Measure<Itv> m = d.measure();
  CHECK(m.f(d.top()) == 16);
  CHECK(m.f(d.top()) < m.max);
}

TEST_CASE("widening with default thresholds") {
  IntervalDomain d(w8);
  CHECK(d.widen(iv(0, 5, w8), iv(0, 6, w8)) == iv(0, 8, w8));
  CHECK(d.widen(d.bottom(), iv(3, 4, w8)) == iv(3, 4, w8));
  CHECK(d.widen(iv(3, 4, w8), d.bottom()) == iv(3, 4, w8));
  // unstable lower bound jumps down to the next threshold below
  CHECK(d.widen(iv(0, 5, w8), iv(-1, 5, w8)) == iv(-4, 5, w8));
  // stable bounds stay
  CHECK(d.widen(iv(0, 5, w8), iv(0, 5, w8)) == iv(0, 5, w8));
  // beyond the last finite threshold, jump to the extreme
  CHECK(d.widen(iv(0, 64, w8), iv(0, 65, w8)) == iv(0, 127, w8));

  IntervalDomain d4(w4);
  const std::vector<Itv> carrier = enumerate_intervals(w4);
  for (const Itv& x : carrier)
    for (const Itv& y : carrier) {
      const Itv w = d4.widen(x, y);
      CHECK(d4.leq(x, w));
      CHECK(d4.leq(y, w));
    }
}

TEST_CASE("threshold normalization") {
  Thresholds t = Thresholds::standard(w8);
  CHECK(t.values().front() == -128);
  CHECK(t.values().back() == 127);
  CHECK(t.next_above(6) == 8);
  CHECK(t.next_below(-5) == -8);

  // user list: unsorted, duplicated, some out of range
  Thresholds u = Thresholds::normalized({10, -3, 10, 500, -500}, w8);
  CHECK(u.values() == std::vector<std::int64_t>{-128, -3, 10, 127});

  // width 4 keeps only what fits
  Thresholds t4 = Thresholds::standard(w4);
  CHECK(t4.values() == std::vector<std::int64_t>{-8, -4, 4, 7});
}

TEST_CASE("membership") {
  IntervalDomain d(w4);
  CHECK(d.contains(iv(0, 4, w4), IntM(4, w4)));
  CHECK_FALSE(d.contains(d.bottom(), IntM(0, w4)));
  for (std::int64_t v = -8; v <= 7; ++v) CHECK(d.contains(d.top(), IntM(v, w4)));
}

TEST_CASE("three-valued truth") {
  IntervalDomain d(w8);
  CHECK(d.as_bool(d.constant(std::int64_t(0))) == UBool::FF);
  CHECK(d.as_bool(d.bottom()) == UBool::FF);
  CHECK(d.as_bool(iv(1, 5, w8)) == UBool::TT);
  CHECK(d.as_bool(iv(-1, 3, w8)) == UBool::Unk);
  CHECK(d.as_bool(iv(-5, -1, w8)) == UBool::TT);
}

TEST_CASE("forward operator unit cases") {
  IntervalDomain d(w8);
  CHECK(d.forward(BinOpKind::Plus, iv(1, 2, w8), iv(3, 4, w8)) == iv(4, 6, w8));
  CHECK(d.forward(BinOpKind::Plus, iv(100, 120, w8), iv(100, 120, w8)) == d.top());
  CHECK(d.forward(BinOpKind::Mult, iv(-2, 3, w8), iv(-4, 5, w8)) == iv(-12, 15, w8));
  CHECK(d.forward(BinOpKind::Lt, iv(0, 3, w8), iv(5, 9, w8)) == d.constant(std::int64_t(1)));
  CHECK(d.forward(BinOpKind::Lt, iv(5, 9, w8), iv(0, 5, w8)) == d.constant(std::int64_t(0)));
  CHECK(d.forward(BinOpKind::And, iv(1, 1, w8), iv(2, 7, w8)) == d.constant(std::int64_t(1)));
  CHECK(d.forward(BinOpKind::Eq, iv(3, 3, w8), iv(3, 3, w8)) == d.constant(std::int64_t(1)));
  CHECK(d.forward(BinOpKind::Eq, iv(0, 2, w8), iv(5, 6, w8)) == d.constant(std::int64_t(0)));
  CHECK(d.forward(BinOpKind::Eq, iv(0, 5, w8), iv(3, 9, w8)) == iv(0, 1, w8));
  for (BinOpKind op : all_binops) {
    CHECK(d.forward(op, d.bottom(), d.top()).is_bottom());
    CHECK(d.forward(op, d.top(), d.bottom()).is_bottom());
  }
}

TEST_CASE("negation guards the asymmetric minimum") {
  IntervalDomain d(w8);
  CHECK(d.negate(iv(3, 5, w8)) == iv(-5, -3, w8));
  CHECK(d.negate(iv(-128, 0, w8)) == d.top());
  CHECK(d.negate(d.bottom()).is_bottom());
  // Minus goes through negation: x - [min,min] can only be approximated
  CHECK(d.forward(BinOpKind::Minus, iv(0, 1, w8), iv(-128, -128, w8)) == d.top());
}

TEST_CASE("singleton forward agrees with concrete arithmetic") {
  IntervalDomain d8(w8);
  for (std::int64_t a = -128; a <= 127; ++a)
    for (std::int64_t b = -128; b <= 127; ++b)
      for (BinOpKind op : {BinOpKind::Plus, BinOpKind::Minus}) {
        const IntM r = concrete_binop(op, IntM(a, w8), IntM(b, w8));
        CHECK(d8.contains(d8.forward(op, d8.constant(IntM(a, w8)), d8.constant(IntM(b, w8))), r));
      }
  IntervalDomain d4(w4);
  for (std::int64_t a = -8; a <= 7; ++a)
    for (std::int64_t b = -8; b <= 7; ++b) {
      const IntM r = concrete_binop(BinOpKind::Mult, IntM(a, w4), IntM(b, w4));
      CHECK(d4.contains(
          d4.forward(BinOpKind::Mult, d4.constant(IntM(a, w4)), d4.constant(IntM(b, w4))), r));
    }
}

TEST_CASE("forward operators are exhaustively sound at width 4") {
  IntervalDomain d(w4);
  const std::vector<Itv> carrier = enumerate_intervals(w4);
  const std::vector<IntM> values = enumerate_values(w4);
  for (BinOpKind op : all_binops)
    for (const Itv& x : carrier)
      for (const Itv& y : carrier) {
        const Itv r = d.forward(op, x, y);
        for (IntM a : values) {
          if (!d.contains(x, a)) continue;
          for (IntM b : values) {
            if (!d.contains(y, b)) continue;
            if (!d.contains(r, concrete_binop(op, a, b))) {
              CAPTURE(binop_symbol(op));
              CAPTURE(x.str());
              CAPTURE(y.str());
              REQUIRE(false);
            }
          }
        }
      }
}

TEST_CASE("interval difference") {
  IntervalDomain d(w4);
  CHECK(d.difference(iv(0, 7, w4), iv(0, 0, w4)) == iv(1, 7, w4));
  CHECK(d.difference(iv(0, 0, w4), iv(0, 0, w4)).is_bottom());
  CHECK(d.difference(iv(0, 7, w4), iv(4, 5, w4)) == iv(0, 7, w4));

  // set-difference oracle over every pair
  const std::vector<Itv> carrier = enumerate_intervals(w4);
  for (const Itv& x : carrier)
    for (const Itv& y : carrier) {
      const Itv r = d.difference(x, y);
      CHECK(d.leq(r, x));
      for (std::int64_t v = -8; v <= 7; ++v) {
        IntM n(v, w4);
        if (d.contains(x, n) && !d.contains(y, n)) CHECK(d.contains(r, n));
      }
    }
}

TEST_CASE("backward operator unit cases") {
  IntervalDomain d(w8);
  const Itv bool_false = d.constant(std::int64_t(0));

  auto [lt_x, lt_y] = d.backward(BinOpKind::Lt, iv(0, 127, w8), iv(5, 15, w8), bool_false);
  CHECK(lt_x == iv(5, 127, w8));
  CHECK(lt_y == iv(5, 15, w8));

  auto [lt_x2, lt_y2] = d.backward(BinOpKind::Lt, d.top(), iv(10, 10, w8),
                                   d.constant(std::int64_t(1)));
  CHECK(lt_x2 == iv(-128, 9, w8));
  CHECK(lt_y2 == iv(10, 10, w8));

  auto [add_x, add_y] = d.backward(BinOpKind::Plus, d.top(), iv(0, 0, w8), iv(3, 3, w8));
  CHECK(add_x == iv(3, 3, w8));
  CHECK(add_y == iv(0, 0, w8));

  auto [eq_x, eq_y] = d.backward(BinOpKind::Eq, iv(0, 9, w8), iv(5, 20, w8),
                                 d.constant(std::int64_t(1)));
  CHECK(eq_x == iv(5, 9, w8));
  CHECK(eq_y == iv(5, 9, w8));

  auto [and_x, and_y] = d.backward(BinOpKind::And, iv(1, 3, w8), iv(-2, 9, w8), bool_false);
  CHECK(and_x == iv(1, 3, w8));
  CHECK(and_y == iv(0, 0, w8));

  auto [mul_x, mul_y] =
      d.backward(BinOpKind::Mult, d.top(), d.constant(std::int64_t(1)), iv(4, 6, w8));
  CHECK(mul_x == iv(4, 6, w8));
  CHECK(mul_y == d.constant(std::int64_t(1)));
}

TEST_CASE("backward operators: sound and refining on seeded triples") {
  IntervalDomain d(w4);
  const std::vector<Itv> carrier = enumerate_intervals(w4);
  const std::vector<IntM> values = enumerate_values(w4);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 2000; ++t) {
    const Itv& x = carrier[rng() % carrier.size()];
    const Itv& y = carrier[rng() % carrier.size()];
    const Itv& r = carrier[rng() % carrier.size()];
    for (BinOpKind op : all_binops) {
      auto [x2, y2] = d.backward(op, x, y, r);
      REQUIRE(d.leq(x2, x));
      REQUIRE(d.leq(y2, y));
      for (IntM a : values) {
        if (!d.contains(x, a)) continue;
        for (IntM b : values) {
          if (!d.contains(y, b)) continue;
          if (!d.contains(r, concrete_binop(op, a, b))) continue;
          REQUIRE(d.contains(x2, a));
          REQUIRE(d.contains(y2, b));
        }
      }
    }
  }
}

TEST_CASE("subtracting sets equals adding the wrapped inverse") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    ValueSet a(w4), b(w4);
    for (std::int64_t v = -8; v <= 7; ++v) {
      if (rng() & 1) a.add(IntM(v, w4));
      if (rng() & 1) b.add(IntM(v, w4));
    }
    ValueSet inv_b(w4);
    b.for_each([&](IntM v) { inv_b.add(IntM::wrap(-i128(v.value()), w4)); });
    const ValueSet sub = lift_binop(BinOpKind::Minus, a, b);
    const ValueSet add_inv = lift_binop(BinOpKind::Plus, a, inv_b);
    sub.for_each([&](IntM v) { CHECK(add_inv.contains(v)); });
  }
}

TEST_CASE("products stay within the corner bounds") {
  std::mt19937_64 rng(21);
  auto draw = [&] { return std::int64_t(rng() % 41) - 20; };
  for (int t = 0; t < 5000; ++t) {
    std::int64_t a = draw(), b = draw(), c = draw(), dd = draw();
    if (a > b) std::swap(a, b);
    if (c > dd) std::swap(c, dd);
    const std::int64_t x = a + std::int64_t(rng() % std::uint64_t(b - a + 1));
    const std::int64_t y = c + std::int64_t(rng() % std::uint64_t(dd - c + 1));
    const std::int64_t corners[4] = {a * c, a * dd, b * c, b * dd};
    const std::int64_t lo = *std::min_element(corners, corners + 4);
    const std::int64_t hi = *std::max_element(corners, corners + 4);
    CHECK(x * y >= lo);
    CHECK(x * y <= hi);
  }
}

TEST_CASE("the full law battery passes at width 4") {
  LawReport report = run_battery(IntervalDomain(w4), enumerate_intervals(w4),
                                 enumerate_values(w4), 1, 2000);
  INFO(report.summary());
  CHECK(report.all_passed());
}
