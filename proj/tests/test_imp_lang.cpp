#include <doctest.h>

#include "absint/concrete_semantics.hpp"
#include "absint/imp_ast.hpp"
#include "absint/imp_gen.hpp"
#include "absint/imp_parse.hpp"

using namespace absint;

TEST_CASE("smallest program") {
  Program p = parse_program("a := 5", Width(8));
  REQUIRE(p.vars == std::vector<std::string>{"a"});
  const auto& assign = std::get<AssignStmt>(p.body->node);
  CHECK(assign.var == 0);
  CHECK(std::get<ConstExpr>(assign.expr->node).value == IntM(5, Width(8)));
}

TEST_CASE("variable set is first-occurrence ordered") {
  Program p = parse_program("x := y; y := z + x", Width(8));
  CHECK(p.vars == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("while desugars into loop plus exit assumption") {
  Width w(8);
  Program p = parse_program("while a < 10 { a := a + 1 }", w);

  ExprPtr a = Expr::variable(0);
  ExprPtr cond = Expr::binary(BinOpKind::Lt, a, Expr::constant(IntM(10, w)));
  StmtPtr body = Stmt::seq(Stmt::assume(cond),
                           Stmt::assign(0, Expr::binary(BinOpKind::Plus, a, Expr::constant(IntM(1, w)))));
  StmtPtr expected = Stmt::seq(
      Stmt::loop(body),
      Stmt::assume(Expr::binary(BinOpKind::Eq, cond, Expr::constant(IntM(0, w)))));

  CHECK(structurally_equal(*p.body, *expected));
  // Desugared output re-parses to the same tree and shows no sugar.
  const std::string printed = pretty(p);
  CHECK(printed.find("while") == std::string::npos);
  CHECK(printed.find("if") == std::string::npos);
  CHECK(structurally_equal(parse_program(printed, w), p));
}

TEST_CASE("if desugars into a choice of guarded branches") {
  Width w(8);
  Program p = parse_program("if a { b := 1 } else { b := 2 }", w);
  const auto& choice = std::get<ChoiceStmt>(p.body->node);
  const auto& left = std::get<SeqStmt>(choice.left->node);
  const auto& right = std::get<SeqStmt>(choice.right->node);
  CHECK(std::holds_alternative<AssumeStmt>(left.first->node));
  const auto& guard = std::get<AssumeStmt>(right.first->node);
  const auto& eq = std::get<BinExpr>(guard.expr->node);
  CHECK(eq.op == BinOpKind::Eq);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_program("a := 5;\nb := ;", Width(8));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 6);
  }

  try {
    parse_program("a := 200", Width(8));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("200") != std::string::npos);
    CHECK(std::string(e.what()).find("width 8") != std::string::npos);
  }
}

TEST_CASE("negative literals only in operand position") {
  Width w(8);
  Program p = parse_program("a := -5; b := a - -3", w);
  const auto& seq = std::get<SeqStmt>(p.body->node);
  CHECK(std::get<ConstExpr>(std::get<AssignStmt>(seq.first->node).expr->node).value.value() == -5);
  const auto& sub = std::get<BinExpr>(std::get<AssignStmt>(seq.second->node).expr->node);
  CHECK(sub.op == BinOpKind::Minus);
  CHECK(std::get<ConstExpr>(sub.rhs->node).value.value() == -3);
  CHECK(parse_program("a := -128", w).vars.size() == 1);
}

TEST_CASE("precedence and associativity") {
  Width w(8);
  // 1 + 2 * 3 < 4 && 5 || 6  parses as  (((1 + (2*3)) < 4) && 5) || 6
  Program p = parse_program("a := 1 + 2 * 3 < 4 && 5 || 6", w);
  const auto& root = std::get<BinExpr>(std::get<AssignStmt>(p.body->node).expr->node);
  CHECK(root.op == BinOpKind::Or);
  const auto& andNode = std::get<BinExpr>(root.lhs->node);
  CHECK(andNode.op == BinOpKind::And);
  const auto& ltNode = std::get<BinExpr>(andNode.lhs->node);
  CHECK(ltNode.op == BinOpKind::Lt);

  // left associativity: a - b - c is (a - b) - c
  Program q = parse_program("x := a - b - c", w);
  const auto& outer = std::get<BinExpr>(std::get<AssignStmt>(q.body->node).expr->node);
  CHECK(outer.op == BinOpKind::Minus);
  CHECK(std::holds_alternative<BinExpr>(outer.lhs->node));
  CHECK(std::holds_alternative<VarExpr>(outer.rhs->node));
}

TEST_CASE("comments and question mark") {
  Program p = parse_program("# setup\na := ? # anything\n", Width(8));
  CHECK(std::holds_alternative<UnknownExpr>(std::get<AssignStmt>(p.body->node).expr->node));
  const std::string printed = pretty(p);
  CHECK(structurally_equal(parse_program(printed, Width(8)), p));
}

TEST_CASE("generator is deterministic and respects its budget") {
  Width w(4);
  Program p1 = generate_program(42, 12, 3, w);
  Program p2 = generate_program(42, 12, 3, w);
  CHECK(structurally_equal(p1, p2));
  CHECK(pretty(p1) == pretty(p2));

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Program p = generate_program(seed, 12, 3, w);
    CHECK(stmt_count(*p.body) <= 12);
    CHECK(loop_depth(*p.body) <= 2);
  }

  // budget 1 is a single assignment or assumption
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Program p = generate_program(seed, 1, 2, w);
    CHECK(stmt_count(*p.body) == 1);
  }
}

TEST_CASE("pretty/parse round trip on 1000 generated programs") {
  Width w(4);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Program p = generate_program(seed, 12, 3, w);
    Program q = parse_program(pretty(p), w);
    REQUIRE(structurally_equal(p, q));
  }
}

TEST_CASE("desugaring agrees with hand-built core encoding on the oracle") {
  Width w(4);
  Program sugar = parse_program("while a < 3 { a := a + 1 }", w);

  ExprPtr a = Expr::variable(0);
  ExprPtr cond = Expr::binary(BinOpKind::Lt, a, Expr::constant(IntM(3, w)));
  StmtPtr core = Stmt::seq(
      Stmt::loop(Stmt::seq(Stmt::assume(cond),
                           Stmt::assign(0, Expr::binary(BinOpKind::Plus, a,
                                                        Expr::constant(IntM(1, w)))))),
      Stmt::assume(Expr::binary(BinOpKind::Eq, cond, Expr::constant(IntM(0, w)))));

  const MemSet all = MemSet::all(w, 1);
  CHECK(post_image(*sugar.body, all) == post_image(*core, all));

  Program if_sugar = parse_program("if a < 0 { b := 1 } else { b := 2 }", w);
  StmtPtr if_core = Stmt::choice(
      Stmt::seq(Stmt::assume(Expr::binary(BinOpKind::Lt, Expr::variable(0),
                                          Expr::constant(IntM(0, w)))),
                Stmt::assign(1, Expr::constant(IntM(1, w)))),
      Stmt::seq(Stmt::assume(Expr::binary(
                    BinOpKind::Eq,
                    Expr::binary(BinOpKind::Lt, Expr::variable(0), Expr::constant(IntM(0, w))),
                    Expr::constant(IntM(0, w)))),
                Stmt::assign(1, Expr::constant(IntM(2, w)))));
  const MemSet all2 = MemSet::all(w, 2);
  CHECK(post_image(*if_sugar.body, all2) == post_image(*if_core, all2));
}

TEST_CASE("generated constants are always inbounds") {
  // Parsing back would throw otherwise; also check directly at width 2.
  Width w(2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Program p = generate_program(seed, 8, 2, w);
    CHECK_NOTHROW(parse_program(pretty(p), w));
  }
}
