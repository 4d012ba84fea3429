// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include "generators.hpp"
#include "oracles.hpp"

#include "minext/errors.hpp"
#include "minext/extenders.hpp"
#include "minext/geodesics.hpp"
#include "minext/io.hpp"
#include "minext/mesh.hpp"
#include "minext/pipeline.hpp"
#include "minext/psi.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace minext;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

Point P(long x, long y) { return {Rational(x), Rational(y)}; }

BoundaryMap affine_map(const std::vector<Point>& poly, const gen::Affine& a) {
    Loop loop;
    for (const auto& p : poly) loop.push_back({p, a(p)});
    return BoundaryMap::from_loop(loop);
}

double norm(double x, double y) { return std::hypot(x, y); }

double dist(const Point& a, const Point& b) { return norm(a.x.get_d() - b.x.get_d(), a.y.get_d() - b.y.get_d()); }

Rational polygon_area(const std::vector<Point>& v) {
    Rational twice = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % v.size()];
        twice += p.x * q.y - p.y * q.x;
    }
    return abs(twice) / 2;
}

// ---------------------------------------------------------------------------------------------
// Shared randomized corpus

struct CorpusCase {
    Problem problem;
    ExtensionResult result;
    double seconds = 0.0;
    std::string failure;  // non-empty when the pipeline threw
};

std::vector<Problem> corpus_problems() {
    gen::Rng rng(20260101);
    const double alphas[] = {0.0, M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2};
    std::vector<Problem> out;
    for (int k = 0; k < 50; ++k) {
        const auto poly = gen::convex_polygon(rng, 3 + k % 8);
        const auto a = gen::affine(rng, k % 5 == 3);
        const auto phi = gen::perturbed_affine_map(rng, poly, a, 1 + k % 2, 0.05);
        const Direction dir = Direction::snapped(alphas[k % 5]);
        const double psi = psi_alpha(ConvexPolygon(poly), dir, phi).total();
        out.push_back(Problem{ConvexPolygon(poly), dir, phi, 0.05 * psi});
    }
    return out;
}

std::vector<CorpusCase> run_corpus(const std::vector<Problem>& problems) {
    std::vector<CorpusCase> out;
    for (const auto& p : problems) {
        CorpusCase c{p, {}, 0.0, {}};
        const auto start = Clock::now();
        try {
            c.result = extend_minimal(p, ExtenderBudget{});
        } catch (const std::exception& e) {
            c.failure = e.what();
        }
        c.seconds = seconds_since(start);
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Criteria

Verdict identity_baseline() {
    Verdict v;
    const std::vector<Point> square{P(0, 0), P(1, 0), P(1, 1), P(0, 1)};
    const gen::Affine id{Rational(1), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
    const auto start = Clock::now();
    const auto r = extend_minimal(Problem{ConvexPolygon(square), Direction(), affine_map(square, id), 1e-3}, {});
    const double t = seconds_since(start);
    v.require(std::abs(r.psi.total() - 2.0) <= 1e-6 && r.psi.error_bound() <= 1e-6, "psi is not 2");
    v.require(r.variation.manhattan.hi <= 2.0 + 1e-3, "variation above 2 + eps");
    v.require(r.certified(), "not certified");
    v.require(t < 1.0, "runtime " + std::to_string(t) + " s");
    std::ostringstream os;
    os << "psi " << r.psi.total() << ", variation <= " << r.variation.manhattan.hi << ", " << t << " s";
    if (v.pass) v.detail = os.str();
    return v;
}

Verdict affine_optimality() {
    Verdict v;
    gen::Rng rng(404);
    const auto start = Clock::now();
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto poly = gen::convex_polygon(rng, 3 + k % 6);
        const auto a = gen::affine(rng, k % 4 == 1);
        const auto r = extend_minimal(Problem{ConvexPolygon(poly), Direction(), affine_map(poly, a), 1e-3}, {});
        const double area = polygon_area(poly).get_d();
        const double d1 = area * norm(a.m00.get_d(), a.m10.get_d());
        const double d2 = area * norm(a.m01.get_d(), a.m11.get_d());
        const std::string tag = "case " + std::to_string(k) + ": ";
        v.require(r.certified(), tag + "not certified");
        v.require(std::abs(r.variation.along.value.hi - d1) <= 1e-3 && std::abs(r.variation.along.value.lo - d1) <= 1e-3,
                  tag + "first component off");
        v.require(std::abs(r.variation.across.value.hi - d2) <= 1e-3 &&
                      std::abs(r.variation.across.value.lo - d2) <= 1e-3,
                  tag + "second component off");
        v.require(std::abs(r.psi.horizontal.value - d1) <= r.psi.horizontal.error + 1e-9 * (1 + d1) &&
                      std::abs(r.psi.vertical.value - d2) <= r.psi.vertical.error + 1e-9 * (1 + d2),
                  tag + "psi differs from the analytic value");
        worst = std::max({worst, std::abs(r.variation.along.value.hi - d1), std::abs(r.variation.across.value.hi - d2)});
    }
    const double t = seconds_since(start);
    v.require(t < 5.0, "runtime " + std::to_string(t) + " s");
    if (v.pass) v.detail = "worst deviation " + std::to_string(worst) + ", " + std::to_string(t) + " s";
    return v;
}

Verdict total_corpus(const std::vector<CorpusCase>& corpus) {
    Verdict v;
    double slowest = 0.0, tightest = 1e300;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const auto& c = corpus[k];
        const std::string tag = "case " + std::to_string(k) + ": ";
        v.require(c.failure.empty(), tag + c.failure);
        if (!c.failure.empty()) continue;
        const double bound = c.result.psi.total() + c.result.psi.error_bound() + c.problem.eps;
        v.require(c.result.variation.manhattan.hi <= bound, tag + "variation above psi + eps");
        v.require(verify_mesh(c.result.mesh, c.problem.phi).passed(), tag + "mesh audit failed");
        v.require(c.seconds < 10.0, tag + "runtime " + std::to_string(c.seconds) + " s");
        slowest = std::max(slowest, c.seconds);
        tightest = std::min(tightest, c.result.margins.manhattan / c.problem.eps);
    }
    if (v.pass)
        v.detail = "50/50 certified, smallest margin " + std::to_string(tightest) + " eps, slowest " +
                   std::to_string(slowest) + " s";
    return v;
}

Verdict componentwise_corpus(const std::vector<CorpusCase>& corpus) {
    Verdict v;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const auto& c = corpus[k];
        const std::string tag = "case " + std::to_string(k) + ": ";
        v.require(c.failure.empty(), tag + c.failure);
        if (!c.failure.empty()) continue;
        const auto [along, across] = componentwise_check(c.result);
        v.require(along, tag + "first component above psi + eps");
        v.require(across, tag + "second component above psi + eps");
        const auto& r = c.result;
        v.require(r.variation.along.value.hi <= r.psi.horizontal.upper() + c.problem.eps, tag + "first component bound");
        v.require(r.variation.across.value.hi <= r.psi.vertical.upper() + c.problem.eps, tag + "second component bound");
    }
    if (v.pass) v.detail = "both components certified separately on 50/50";
    return v;
}

Verdict sandwich(const std::vector<CorpusCase>& corpus) {
    Verdict v;
    std::size_t runs = 0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const auto& c = corpus[k];
        if (!c.failure.empty()) continue;
        ++runs;
        const auto& r = c.result;
        const std::string tag = "case " + std::to_string(k) + ": ";
        v.require(r.psi.horizontal.lower() <= r.variation.along.value.hi, tag + "first component below psi");
        v.require(r.psi.vertical.lower() <= r.variation.across.value.hi, tag + "second component below psi");
    }
    if (v.pass) v.detail = "zero violations on " + std::to_string(runs) + " runs";
    return v;
}

Verdict geodesic_oracle() {
    Verdict v;
    gen::Rng rng(606);
    std::size_t queries = 0;
    for (int i = 0; i < 200; ++i) {
        const SimplePolygon poly(gen::star_polygon(rng, 3 + i % 12, i % 3 == 0 ? 8 : 0));
        for (int k = 0; k < 10; ++k) {
            const Point a = gen::boundary_point(rng, poly.vertices());
            const Point b = k % 4 == 3 ? poly[rng() % poly.size()] : gen::boundary_point(rng, poly.vertices());
            const auto g = shortest_path(poly, a, b);
            const auto want = oracle::shortest_path(poly.vertices(), a, b);
            const std::string tag = "polygon " + std::to_string(i) + " pair " + std::to_string(k) + ": ";
            v.require(g.path == want, tag + "vertex sequences differ");
            v.require(g.length.squares == oracle::squared_lengths(want), tag + "length expressions differ");
            ++queries;
        }
    }
    if (v.pass) v.detail = std::to_string(queries) + " queries agree exactly";
    return v;
}

// Unit vector with rational coordinates from a Pythagorean pair.
Point rational_unit(long p, long q) {
    const Rational d = Rational(p * p + q * q);
    return {Rational(p * p - q * q) / d, Rational(2 * p * q) / d};
}

Verdict direct_triangles() {
    Verdict v;
    gen::Rng rng(707);
    int built = 0;
    double worst = 0.0;
    while (built < 20) {
        const Point u = rational_unit(1 + static_cast<long>(rng() % 9), 1 + static_cast<long>(rng() % 9));
        const Point w = rational_unit(1 + static_cast<long>(rng() % 9), -1 - static_cast<long>(rng() % 9));
        const double cosine = u.x.get_d() * w.x.get_d() + u.y.get_d() * w.y.get_d();
        if (std::abs(cosine) > 0.9) continue;
        const Point c{gen::dyadic(rng, -1, 1), gen::dyadic(rng, -1, 1)};
        const Rational r1 = gen::dyadic(rng, 0.5, 2), r2 = gen::dyadic(rng, 0.5, 2);
        Point a{c.x + r1 * u.x, c.y + r1 * u.y}, b{c.x + r2 * w.x, c.y + r2 * w.y};
        Rational la = r1, lb = r2;
        if ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) < 0) {
            std::swap(a, b);
            std::swap(la, lb);
        }
        // The bisector from c meets ab at the point dividing it in the ratio |ca| : |cb|.
        const Point f{(lb * a.x + la * b.x) / (la + lb), (lb * a.y + la * b.y) / (la + lb)};
        const auto m = gen::affine(rng, built % 3 == 2);
        const Rational pull = gen::dyadic(rng, -0.3, 0.6, 6);
        const Point mf = m(f), mc = m(c);
        const Point ff{mf.x + pull * (mc.x - mf.x), mf.y + pull * (mc.y - mf.y)};
        const Loop loop{{c, mc}, {a, m(a)}, {f, ff}, {b, m(b)}};
        PieceExtension r;
        try {
            r = extend_triangle_direct(loop);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotInjective || e.kind() == ErrorKind::DegenerateImage) continue;
            v.require(false, std::string("triangle ") + std::to_string(built) + ": " + e.what());
            ++built;
            continue;
        }
        // Closed form: both affine pieces from doubles.
        double d1 = 0.0, d2 = 0.0;
        for (const auto& [p0, p1, p2] : {std::array<Node, 3>{loop[0], loop[1], loop[2]},
                                         std::array<Node, 3>{loop[0], loop[2], loop[3]}}) {
            const double px1 = p1.pre.x.get_d() - p0.pre.x.get_d(), py1 = p1.pre.y.get_d() - p0.pre.y.get_d();
            const double px2 = p2.pre.x.get_d() - p0.pre.x.get_d(), py2 = p2.pre.y.get_d() - p0.pre.y.get_d();
            const double qx1 = p1.img.x.get_d() - p0.img.x.get_d(), qy1 = p1.img.y.get_d() - p0.img.y.get_d();
            const double qx2 = p2.img.x.get_d() - p0.img.x.get_d(), qy2 = p2.img.y.get_d() - p0.img.y.get_d();
            const double det = px1 * py2 - px2 * py1;
            // J = Q P^{-1}; its columns are the images of e1 and e2.
            const double j00 = (qx1 * py2 - qx2 * py1) / det, j10 = (qy1 * py2 - qy2 * py1) / det;
            const double j01 = (qx2 * px1 - qx1 * px2) / det, j11 = (qy2 * px1 - qy1 * px2) / det;
            const double area = std::abs(det) / 2;
            d1 += area * norm(j00, j10);
            d2 += area * norm(j01, j11);
        }
        double pre_len = 0.0, img_len = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            pre_len += dist(loop[i].pre, loop[(i + 1) % 4].pre);
            img_len += dist(loop[i].img, loop[(i + 1) % 4].img);
        }
        const std::string tag = "triangle " + std::to_string(built) + ": ";
        const double tol = 1e-12 * (1 + d1 + d2);
        v.require(r.variation.along.value.lo - tol <= d1 && d1 <= r.variation.along.value.hi + tol, tag + "D1 differs");
        v.require(r.variation.across.value.lo - tol <= d2 && d2 <= r.variation.across.value.hi + tol, tag + "D2 differs");
        v.require(r.variation.manhattan.hi <= pre_len * img_len * (1 + 1e-12), tag + "above the perimeter bound");
        v.require(std::abs(r.bound - pre_len * img_len) <= 1e-9 * pre_len * img_len, tag + "bound misreported");
        worst = std::max(worst, std::abs(r.variation.manhattan.hi - (d1 + d2)));
        ++built;
    }
    if (v.pass) v.detail = "20 triangles, worst enclosure gap " + std::to_string(worst);
    return v;
}

// Consecutive arcs of image length below delta, never straddling a corner.
std::vector<Arc> complete_arcs(const BoundaryMap& psi, double delta, bool* ok) {
    const Loop loop = psi.loop();
    const auto corners = psi.corners();
    auto is_corner = [&](const Point& p) { return std::find(corners.begin(), corners.end(), p) != corners.end(); };
    std::vector<Arc> arcs;
    std::size_t from = 0;
    double length = 0.0;
    *ok = true;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const std::size_t j = (i + 1) % loop.size();
        const double step = dist(loop[i].img, loop[j].img);
        if (step >= delta) *ok = false;
        if (length + step >= delta || i != from && is_corner(loop[i].pre)) {
            if (i != from) arcs.push_back({from, i});
            from = i;
            length = 0.0;
        }
        length += step;
    }
    arcs.push_back({from, 0});
    return arcs;
}

Verdict linearization() {
    Verdict v;
    gen::Rng rng(808);
    double tightest = 1e300;
    int curves = 0;
    for (int k = 0; k < 20; ++k) {
        auto poly = gen::convex_polygon(rng, 3 + k % 4);
        for (auto& p : poly) p = {p.x / 4, p.y / 4};
        const gen::Affine m = gen::affine(rng, k % 5 == 4);
        const auto wiggly = gen::perturbed_affine_map(rng, poly, m, 12, 0.0005);
        // Joint scaling keeps the curve similar while making every image segment shorter than the smaller delta.
        Loop nodes = wiggly.loop();
        double longest = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            longest = std::max(longest, dist(nodes[i].img, nodes[(i + 1) % nodes.size()].img));
        const Rational scale = std::min(Rational(1), snap(0.008 / longest, 12));
        for (auto& n : nodes) n = {{n.pre.x * scale, n.pre.y * scale}, {n.img.x * scale, n.img.y * scale}};
        for (auto& p : poly) p = {p.x * scale, p.y * scale};
        const auto psi = BoundaryMap::from_loop(nodes);
        double perimeter = 0.0;
        for (std::size_t i = 0; i < poly.size(); ++i) perimeter += dist(poly[i], poly[(i + 1) % poly.size()]);
        const ConvexPolygon delta_poly(poly);
        for (const double delta : {0.1, 0.01}) {
            bool short_steps = false;
            const auto arcs = complete_arcs(psi, delta, &short_steps);
            const std::string tag = "curve " + std::to_string(k) + " delta " + std::to_string(delta) + ": ";
            v.require(short_steps, tag + "segments not shorter than delta");
            BoundaryMap phi;
            try {
                phi = delta_linearize(psi, arcs, delta);
            } catch (const Error& e) {
                v.require(false, tag + e.what());
                continue;
            }
            for (const double theta : {0.0, M_PI / 4}) {
                const Direction dir = Direction::snapped(theta);
                const auto lin = psi_alpha(delta_poly, dir, phi);
                const auto orig = psi_alpha(delta_poly, dir, psi);
                const double slack = orig.total() + 2 * delta * perimeter + lin.error_bound() + orig.error_bound();
                v.require(lin.total() <= slack, tag + "psi grew by more than 2 delta H1");
                tightest = std::min(tightest, slack - lin.total());
            }
        }
        ++curves;
    }
    if (v.pass) v.detail = std::to_string(curves) + " curves, smallest slack " + std::to_string(tightest);
    return v;
}

std::size_t interior_vertex(const AffineMesh& m) {
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        if (!m.trace.find(m.vertices[i].pre)) return i;
    return m.vertices.size();
}

std::size_t boundary_vertex(const AffineMesh& m, std::size_t skip) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        if (m.trace.find(m.vertices[i].pre) && seen++ == skip) return i;
    return m.vertices.size();
}

Verdict homeomorphism_audit(const std::vector<CorpusCase>& corpus) {
    Verdict v;
    std::size_t meshes = 0, mutants = 0, rejected = 0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        if (!corpus[k].failure.empty()) continue;
        const auto& mesh = corpus[k].result.mesh;
        v.require(verify_mesh(mesh, mesh.trace).passed(), "case " + std::to_string(k) + ": mesh rejected");
        ++meshes;
    }
    for (std::size_t k = 0; k < 30 && k < corpus.size(); ++k) {
        if (!corpus[k].failure.empty()) continue;
        auto m = corpus[k].result.mesh;
        const std::string tag = "mutant " + std::to_string(k) + ": ";
        bool caught = false;
        switch (k % 3) {
        case 0: {
            const std::size_t t = (7 * k) % m.triangles.size();
            std::swap(m.triangles[t][0], m.triangles[t][1]);
            const auto rep = verify_mesh(m, m.trace);
            caught = !rep.passed() && rep.check("orientation").witness == "triangle " + std::to_string(t);
            break;
        }
        case 1: {
            const std::size_t b = boundary_vertex(m, k);
            if (b == m.vertices.size()) break;
            m.vertices[b].img.x += ratio(1, 1024);
            const auto rep = verify_mesh(m, m.trace);
            caught = !rep.passed() && rep.check("boundary_trace").witness.rfind("vertex " + std::to_string(b) + " ", 0) == 0;
            break;
        }
        default: {
            const std::size_t i = interior_vertex(m);
            if (i == m.vertices.size()) break;
            std::erase_if(m.triangles, [&](const Triangle& t) { return t[0] == i || t[1] == i || t[2] == i; });
            const auto rep = verify_mesh(m, m.trace);
            caught = !rep.passed() && !rep.check("tiling").ok && !rep.check("tiling").witness.empty();
            break;
        }
        }
        ++mutants;
        rejected += caught;
        v.require(caught, tag + "not rejected with the expected witness");
    }
    v.require(mutants == 30, "only " + std::to_string(mutants) + " mutants built");
    if (v.pass)
        v.detail = std::to_string(meshes) + " meshes pass, " + std::to_string(rejected) + "/" + std::to_string(mutants) +
                   " mutants rejected";
    return v;
}

Verdict determinism(const std::vector<Problem>& problems, const std::vector<CorpusCase>& first) {
    Verdict v;
    const auto second = run_corpus(problems);
    for (std::size_t k = 0; k < problems.size(); ++k) {
        const std::string tag = "case " + std::to_string(k) + ": ";
        v.require(first[k].failure == second[k].failure, tag + "outcome differs");
        if (!first[k].failure.empty() || !second[k].failure.empty()) continue;
        v.require(write_mesh(first[k].result.mesh) == write_mesh(second[k].result.mesh), tag + "mesh files differ");
        v.require(write_report(first[k].result) == write_report(second[k].result), tag + "report files differ");
    }
    if (v.pass) v.detail = "two runs of the corpus produce identical mesh and report files";
    return v;
}

Verdict guarded(const std::function<Verdict()>& run) {
    try {
        return run();
    } catch (const std::exception& e) {
        return {false, std::string("threw: ") + e.what()};
    }
}

} // namespace

// Optional arguments select criteria by number; the shared corpus is built only when needed.
int main(int argc, char** argv) {
    std::vector<bool> selected(11, argc == 1);
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k >= 1 && k <= 10) selected[k] = true;
    }
    std::vector<Problem> problems;
    std::vector<CorpusCase> corpus;
    auto shared = [&]() -> const std::vector<CorpusCase>& {
        if (problems.empty()) {
            problems = corpus_problems();
            corpus = run_corpus(problems);
        }
        return corpus;
    };

    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"identity baseline", identity_baseline},
        {"affine optimality", affine_optimality},
        {"total variation corpus", [&] { return total_corpus(shared()); }},
        {"componentwise corpus", [&] { return componentwise_corpus(shared()); }},
        {"sandwich", [&] { return sandwich(shared()); }},
        {"geodesic oracle", geodesic_oracle},
        {"direct triangle closed form", direct_triangles},
        {"linearization bound", linearization},
        {"homeomorphism audit", [&] { return homeomorphism_audit(shared()); }},
        {"determinism", [&] { return determinism(problems, shared()); }},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        if (!selected[++index]) continue;
        const auto start = Clock::now();
        const Verdict v = guarded(run);
        std::printf("%s %2d %-28s %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
