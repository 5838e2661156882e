#include <gtest/gtest.h>

#include <string>

#include "kstab/error.hpp"
#include "kstab/jobspec.hpp"

using namespace kstab;

namespace {

const char* kFull = R"({
  "schema": "kstab/1",
  "root_system": {"series": "A", "rank": 2},
  "polytope": {"vertices": [["1", "1"], ["2", "1"], ["1", "2"], ["2", "2"]]},
  "f": {"pieces": [{"a": ["0", "0"], "b": "0"}, {"a": ["1", "1"], "b": "-3"}]},
  "R": "7/2",
  "h": {"terms": [{"exponent": [2, 0], "coeff": "1"}, {"exponent": [0, 2], "coeff": "1/3"}]},
  "potential": {"canonical": true, "g": {"terms": [{"exponent": [1, 1], "coeff": "1/10"}]}},
  "options": {"kset": [4, 8], "kmax": 12, "A": "csc", "quad_depth": 10, "quad_ratio": "1/4", "tolerance": 1e-9}
})";

std::string error_of(const std::string& text) {
  try {
    parse_job_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(JobSpec, ParsesEveryField) {
  const JobSpec s = parse_job_text(kFull);
  EXPECT_EQ(s.build_root_system().num_positive(), 3);
  EXPECT_EQ(s.polytope.build().vertices().size(), 4u);
  EXPECT_EQ(s.build_f().pieces().size(), 2u);
  EXPECT_EQ(*s.R, Rational(7, 2));
  EXPECT_EQ(s.h->terms().size(), 2u);
  EXPECT_TRUE(s.potential->canonical);
  EXPECT_EQ(s.options.kset, (std::vector<std::int64_t>{4, 8}));
  EXPECT_EQ(*s.options.kmax, 12);
  EXPECT_EQ(*s.options.a_preset, "csc");
  EXPECT_EQ(*s.options.quad_ratio, Rational(1, 4));
  EXPECT_DOUBLE_EQ(*s.options.tolerance, 1e-9);
}

TEST(JobSpec, RoundTripIsLossless) {
  const nlohmann::json once = to_json(parse_job_text(kFull));
  const nlohmann::json twice = to_json(parse_job(once));
  EXPECT_EQ(once, twice);
  const std::string halfspaces = R"({"schema": "kstab/1",
    "root_system": {"cartan": [[2, -1], [-1, 2]]},
    "polytope": {"halfspaces": [{"normal": [1, 0], "offset": 1}, {"normal": [0, 1], "offset": 1},
                                {"normal": [-1, -1], "offset": "-4"}]}})";
  const JobSpec h = parse_job_text(halfspaces);
  EXPECT_EQ(h.polytope.build().vertices().size(), 3u);
  EXPECT_EQ(to_json(parse_job(to_json(h))), to_json(h));
}

TEST(JobSpec, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[[0.5],[2]]}})").find("polytope.vertices[0][0]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1"],["2"]]},"R":1.5})").find("'R'"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1"],["2"]]},
                         "f":{"pieces":[{"a":["1","2"],"b":"0"}]}})").find("f.pieces[0].a"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1"],["2"]]},
                         "root_system":{"series":"A","rank":2}})").find("root_system"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1"],["2"]]},"options":{"bogus":1}})")
                .find("options.bogus"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1"],["2"]]},"options":{"kset":[4,0]}})")
                .find("options.kset[1]"),
            std::string::npos);
}

TEST(JobSpec, RejectsBadDocuments) {
  EXPECT_NE(error_of(R"({"schema":"kstab/2","polytope":{"vertices":[["1"],["2"]]}})").find("schema"), std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1"})").find("polytope"), std::string::npos);
  EXPECT_NE(error_of("{\"schema\": \"kstab/1\",\n  \"polytope\": }").find("line 2"), std::string::npos);
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1/0"],["2"]]}})"), "");
  EXPECT_NE(error_of(R"({"schema":"kstab/1","polytope":{"vertices":[["1"]],"halfspaces":[]}})"), "");
  EXPECT_THROW(load_job("/nonexistent/job.json"), InputError);
}

TEST(JobSpec, PolynomialsAndIntLists) {
  const QPolynomial p = parse_polynomial(nlohmann::json::parse(R"({"terms":[{"exponent":[1,2],"coeff":"-3/4"}]})"), 2, "h");
  EXPECT_EQ(to_json(p), nlohmann::json::parse(R"({"terms":[{"exponent":[1,2],"coeff":"-3/4"}]})"));
  EXPECT_THROW(parse_polynomial(nlohmann::json::parse(R"({"terms":[{"exponent":[1],"coeff":"1"}]})"), 2, "h"),
               InputError);
  EXPECT_THROW(parse_polynomial(nlohmann::json::parse(R"({"terms":[{"exponent":[-1,0],"coeff":"1"}]})"), 2, "h"),
               InputError);
  EXPECT_EQ(parse_int_list("1, 2,3", "lambda"), (std::vector<long>{1, 2, 3}));
  EXPECT_THROW(parse_int_list("1,x", "lambda"), InputError);
  EXPECT_THROW(parse_int_list("", "lambda"), InputError);
  EXPECT_EQ(parse_rational_field(nlohmann::json(7), "x"), Rational(7));
  EXPECT_THROW(parse_rational_field(nlohmann::json(0.25), "x"), InputError);
}

TEST(JobSpec, PotentialDocuments) {
  const PotentialSpec s = parse_potential(nlohmann::json::parse(R"({"canonical": false,
    "g": {"terms": [{"exponent": [2], "coeff": "1/2"}]}})"));
  EXPECT_FALSE(s.canonical);
  EXPECT_EQ(s.g.nvars(), 1);
  EXPECT_EQ(parse_potential(to_json(s)).g, s.g);
  EXPECT_THROW(parse_potential(nlohmann::json::parse(R"({"canonical": 1})")), InputError);
}
