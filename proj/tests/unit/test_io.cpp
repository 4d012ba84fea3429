#include "minext/errors.hpp"
#include "minext/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <string>

using namespace minext;

namespace {

const std::string kData = MINEXT_TEST_DATA;

std::string data(const std::string& name) { return read_text(kData + "/" + name); }

ErrorKind kind_of(const std::string& text, std::string* message = nullptr) {
    try {
        parse_problem_text(text);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.kind();
    }
    return ErrorKind::Internal;
}

} // namespace

TEST_CASE("well-formed identity square") {
    const auto f = parse_problem_text(data("identity_square.json"));
    CHECK(f.polygon.size() == 4);
    CHECK(f.problem.q.size() == 4);
    CHECK(f.problem.eps == doctest::Approx(1e-3));
    CHECK(f.problem.phi.edge_count() == 4);
    CHECK(f.problem.phi.eval_at(Point{ratio(1, 2), Rational(1)}) == Point{ratio(1, 2), Rational(1)});
}

TEST_CASE("exact decimals and rational strings") {
    const std::string text = R"({"polygon": [[0, 0], ["1/3", 0], [0.1, 1]], "alpha": 0, "eps": 0.5,
        "boundary_map": [[[0, 0], [0, 0]], [[1, 0], ["1/3", 0]], [[2, 0], ["0.1", 1]]]})";
    const auto exact = parse_problem_text(text);
    CHECK(exact.polygon[1].x == ratio(1, 3));
    CHECK(exact.polygon[2].x == ratio(1, 10));
    const auto snapped = parse_problem_text(text, 8);
    CHECK(snapped.polygon[1].x == ratio(1, 3));
    CHECK(snapped.polygon[2].x == ratio(26, 256));
}

TEST_CASE("validation errors") {
    std::string msg;
    CHECK(kind_of(data("bowtie.json"), &msg) == ErrorKind::Validation);
    CHECK(msg.find("boundary map not injective") != std::string::npos);
    CHECK(kind_of(data("zero_eps.json"), &msg) == ErrorKind::Validation);
    CHECK(msg.find("eps must be positive") != std::string::npos);
    CHECK(kind_of("{not json") == ErrorKind::Parse);
    CHECK(kind_of(R"({"polygon": [[0,0],[1,0],[0,1]], "eps": 1})", &msg) == ErrorKind::Parse);
    CHECK(msg.find("boundary_map") != std::string::npos);
    CHECK(kind_of(R"({"polygon": [[0,0],[1,0],[0,1]], "eps": 1,
        "boundary_map": [[[0, 0], [0, 0]], [[1, 0], [1, 0]]]})",
                  &msg) == ErrorKind::Validation);
    CHECK(msg.find("edge 2") != std::string::npos);
    CHECK(kind_of(R"({"polygon": [[0,0],[1,0],[0,1]], "eps": 1,
        "boundary_map": [[[0, 0], [0, 0]], [[1, 0], [1, 0]], [[7, 0], [0, 1]]]})") == ErrorKind::Validation);
    CHECK(kind_of(R"({"polygon": [[0,0],[1,0],["x",1]], "eps": 1, "boundary_map": []})", &msg) == ErrorKind::Parse);
    CHECK(msg.find("polygon[2]") != std::string::npos);
}

TEST_CASE("problem round trip") {
    const auto f = parse_problem_text(data("diamond_shear.json"));
    const auto g = parse_problem_text(write_problem(f));
    REQUIRE(g.polygon.size() == f.polygon.size());
    for (std::size_t i = 0; i < f.polygon.size(); ++i) CHECK(g.polygon[i] == f.polygon[i]);
    for (std::size_t e = 0; e < f.problem.phi.edge_count(); ++e) {
        const auto& a = f.problem.phi.breakpoints(e);
        const auto& b = g.problem.phi.breakpoints(e);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].t == b[k].t);
            CHECK(a[k].image == b[k].image);
        }
    }
    CHECK(g.problem.eps == f.problem.eps);
}

TEST_CASE("mesh and report output") {
    const auto f = parse_problem_text(data("identity_square.json"));
    const auto r = extend_minimal(f.problem, f.budget);
    REQUIRE(r.certified());

    const auto text = write_mesh(r.mesh);
    const auto back = read_mesh(text);
    CHECK(back.vertices.size() == r.mesh.vertices.size());
    CHECK(back.triangles == r.mesh.triangles);
    CHECK(verify_mesh(back, back.trace).passed());
    CHECK(verify_mesh(back, f.problem.phi).passed());
    CHECK(write_mesh(back) == text);

    const auto report = nlohmann::json::parse(write_report(r));
    CHECK(report.at("certified").get<bool>());
    CHECK(report.contains("margins"));
    CHECK(report.at("margins").at("manhattan").at("decimal").get<double>() >= 0.0);

    const auto svg = render_svg(r.mesh, r.skeleton);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t panels = 0;
    for (auto pos = svg.find("<g"); pos != std::string::npos; pos = svg.find("<g", pos + 1)) ++panels;
    CHECK(panels == 2);
}

TEST_CASE("malformed mesh files") {
    CHECK_THROWS_AS(read_mesh("[]"), Error);
    CHECK_THROWS_AS(read_mesh(R"({"vertices": [], "triangles": [[0, 1, 2]]})"), Error);
}
