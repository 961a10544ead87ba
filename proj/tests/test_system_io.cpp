#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "swstab/bellman.hpp"
#include "swstab/errors.hpp"
#include "swstab/system.hpp"
#include "swstab/trajectory.hpp"

namespace swstab {
namespace {

constexpr const char* kTwoMode = R"({
  "n": 2, "m": 1,
  "modes": [
    {"name": "a", "A": [[1.5, 0.1], [0.0, 0.3]], "B": [[1.0], [0.0]]},
    {"name": "b", "A": [[0.2, -0.7], [0.4, 1.1]], "B": [[0.0], [1.0]]}
  ]
})";

std::string error_of(std::string_view text) {
  try {
    load_system_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(LoadSystem, ParsesModesInOrder) {
  const SwitchedSystem s = load_system_text(kTwoMode);
  EXPECT_EQ(s.n(), 2);
  EXPECT_EQ(s.m(), 1);
  ASSERT_EQ(s.num_modes(), 2u);
  EXPECT_EQ(s.mode(1).label, "b");
  EXPECT_EQ(s.mode(1).index, 1u);
  EXPECT_DOUBLE_EQ(s.A(0)(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(s.A(1)(1, 0), 0.4);
  EXPECT_DOUBLE_EQ(s.B(1)(1, 0), 1.0);
}

TEST(LoadSystem, AcceptsNoInputWithEmptyRows) {
  const SwitchedSystem s = load_system_text(R"({"n": 2, "m": 0, "modes": [{"name": "s", "A": [[0.5, 0], [0, 0.5]], "B": [[], []]}]})");
  EXPECT_EQ(s.m(), 0);
  EXPECT_EQ(s.B(0).rows(), 2);
  EXPECT_EQ(s.B(0).cols(), 0);
  const Eigen::VectorXd x = s.step(0, Eigen::Vector2d(2, -4), Eigen::VectorXd(0));
  EXPECT_EQ(x, Eigen::Vector2d(1, -2));
}

TEST(LoadSystem, MalformedJsonIsParseError) {
  EXPECT_THROW(load_system_text("{\"n\": 2,"), ParseError);
  EXPECT_THROW(load_system_text(""), ParseError);
}

TEST(LoadSystem, ValidationErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"m": 1, "modes": []})").find("n"), std::string::npos);
  EXPECT_NE(error_of(R"({"n": 1, "m": 1, "modes": []})").find("modes"), std::string::npos);
  EXPECT_NE(error_of(R"({"n": 2, "m": 1, "modes": [{"name": "a", "A": [[1, 0]], "B": [[1], [0]]}]})")
                .find("modes[0].A"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n": 1, "m": 1, "modes": [{"name": "a", "A": [[1]], "B": [[1, 2]]}]})").find("modes[0].B"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n": 1, "m": 1, "modes": [{"name": "a", "A": [["x"]], "B": [[1]]}]})").find("modes[0].A"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n": 1, "m": 0, "modes": [{"name": "a", "A": [[1]], "B": [[]]},
                                                {"name": "a", "A": [[2]], "B": [[]]}]})")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n": 0, "m": 0, "modes": [{"name": "a", "A": [], "B": []}]})").find("n"),
            std::string::npos);
  EXPECT_THROW(load_system_text(R"({"n": 1, "m": 1, "modes": [{"name": "a", "A": [[1]], "B": [[1]]}]})"
                                "trailing"),
               ParseError);
}

TEST(SwitchedSystem, ConstructorRejectsNonFinite) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  A(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(SwitchedSystem(1, 1, {{"a", A, Eigen::MatrixXd::Ones(1, 1)}}), ValidationError);
}

TEST(SaveSystem, RoundTripsExactly) {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.1, 1.0 / 3.0, -2.5e-17, 123456789.123;
  B << std::nextafter(1.0, 2.0), -0.0;
  const SwitchedSystem s(2, 1, {{"only", A, B}});
  const SwitchedSystem back = load_system_text(save_system(s));
  EXPECT_TRUE(back == s);
  EXPECT_EQ(back.A(0)(0, 1), 1.0 / 3.0);
  EXPECT_EQ(back.B(0)(0, 0), std::nextafter(1.0, 2.0));
  EXPECT_EQ(save_system(back), save_system(s));
}

TEST(SystemHash, StableAndSensitive) {
  const SwitchedSystem s = load_system_text(kTwoMode);
  const std::string h = system_hash(s);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, system_hash(load_system_text(save_system(s))));

  std::vector<ModeDynamics> modes = s.modes();
  modes[1].A(0, 0) = std::nextafter(modes[1].A(0, 0), 1.0);
  EXPECT_NE(h, system_hash(SwitchedSystem(2, 1, modes)));
}

TEST(ContentHash, MatchesFnv1aReference) {
  // Published FNV-1a 64 test vectors.
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(content_hash("foobar"), "85944171f73967e8");
}

Certificate sample_certificate() {
  return Certificate{
      .system_hash = "0123456789abcdef",
      .mode_dependent = true,
      .norm = BalancedPolytopeNorm(2, {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.1, 1.0 / 3.0)}),
      .iterations = 17,
      .status = SynthesisStatus::Converged,
      .rho = 0.6,
      .c2 = 2.7,
      .directions = 360,
      .tol = 1e-6,
  };
}

TEST(CertificateJson, RoundTripsBitExact) {
  const Certificate c = sample_certificate();
  const std::string text = certificate_to_json(c);
  const Certificate back = certificate_from_json(text);
  EXPECT_EQ(back.system_hash, c.system_hash);
  EXPECT_EQ(back.mode_dependent, c.mode_dependent);
  EXPECT_TRUE(back.norm == c.norm);
  EXPECT_EQ(back.iterations, 17);
  EXPECT_EQ(back.status, SynthesisStatus::Converged);
  EXPECT_EQ(*back.rho, 0.6);
  EXPECT_EQ(*back.c2, 2.7);
  EXPECT_EQ(back.directions, 360);
  EXPECT_EQ(back.tol, 1e-6);
  EXPECT_EQ(certificate_to_json(back), text);
}

TEST(CertificateJson, NonConvergedHasNullConstants) {
  Certificate c = sample_certificate();
  c.status = SynthesisStatus::Diverged;
  c.rho.reset();
  c.c2.reset();
  const std::string text = certificate_to_json(c);
  EXPECT_NE(text.find("\"rho\": null"), std::string::npos);
  const Certificate back = certificate_from_json(text);
  EXPECT_FALSE(back.rho.has_value());
  EXPECT_FALSE(back.c2.has_value());
  EXPECT_THROW(back.gamma_bound(), InvariantError);
}

TEST(CertificateJson, RejectsBrokenDocuments) {
  EXPECT_THROW(certificate_from_json("[1,2"), ParseError);
  EXPECT_THROW(certificate_from_json("{}"), ValidationError);
  std::string text = certificate_to_json(sample_certificate());
  const auto pos = text.find("\"Converged\"");
  text.replace(pos, 11, "\"Finished\"");
  EXPECT_THROW(certificate_from_json(text), ValidationError);
}

TEST(TrajectoryCsv, HeaderRowsAndEmptyFinalInputs) {
  Trajectory t;
  t.states = {Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(0.1, -2.0)};
  t.inputs = {Eigen::VectorXd::Constant(1, -0.25)};
  t.modes = {1};
  t.v_values = std::vector<double>{1.5, 2.0};
  EXPECT_EQ(trajectory_csv(t), "k,mode,x0,x1,u0,V\n0,1,1,0.5,-0.25,1.5\n1,,0.1,-2,,2\n");

  t.v_values.reset();
  EXPECT_EQ(trajectory_csv(t), "k,mode,x0,x1,u0,V\n0,1,1,0.5,-0.25,\n1,,0.1,-2,,\n");
}

TEST(TrajectoryCsv, LengthMismatchThrows) {
  Trajectory t;
  t.states = {Eigen::Vector2d(1.0, 0.5)};
  t.modes = {0};
  t.inputs = {Eigen::VectorXd::Zero(1)};
  EXPECT_THROW(t.check_lengths(), ValidationError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e-7}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(RecursionDefect, ZeroForConsistentTrajectory) {
  const SwitchedSystem s = load_system_text(kTwoMode);
  Trajectory t;
  t.states = {Eigen::Vector2d(1.0, -1.0)};
  for (std::size_t k = 0; k < 5; ++k) {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 0.1 * static_cast<double>(k));
    t.inputs.push_back(u);
    t.modes.push_back(k % 2);
    t.states.push_back(s.step(k % 2, t.states.back(), u));
  }
  EXPECT_EQ(recursion_defect(t, s), 0.0);
  t.states[3][0] += 1e-3;
  EXPECT_GT(recursion_defect(t, s), 1e-4);
}

}  // namespace
}  // namespace swstab
