#include "minext/skeleton.hpp"

#include "minext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace minext {

namespace {

std::string str(const Point& p) { return "(" + to_string(p.x) + ", " + to_string(p.y) + ")"; }

struct Extent {
    Rational xmin, xmax, ymin, ymax;
};

Extent extent(std::span<const Point> pts) {
    Extent e{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
    for (const auto& p : pts) {
        e.xmin = std::min(e.xmin, p.x);
        e.xmax = std::max(e.xmax, p.x);
        e.ymin = std::min(e.ymin, p.y);
        e.ymax = std::max(e.ymax, p.y);
    }
    return e;
}

std::vector<Point> preimages(const Loop& loop) {
    std::vector<Point> out;
    for (const auto& n : loop) out.push_back(n.pre);
    return out;
}

/// x on segment a-b at height y (a.y != b.y).
Rational x_at(const Point& a, const Point& b, const Rational& y) { return a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y); }

/// Polyline point at parameter u = segment index + fraction.
Point polyline_at(const std::vector<Point>& curve, const Rational& u) {
    const long k = std::min<long>(mpz_class(u.get_num() / u.get_den()).get_si(),
                                  static_cast<long>(curve.size()) - 2);
    return lerp(curve[k], curve[k + 1], Rational(u - k));
}

Rational polyline_param(const std::vector<Point>& curve, const Point& p) {
    for (std::size_t k = 0; k + 1 < curve.size(); ++k)
        if (on_segment(p, curve[k], curve[k + 1]))
            return Rational(static_cast<long>(k)) + param_on(p, curve[k], curve[k + 1]);
    fail(ErrorKind::Internal, "crossing point " + str(p) + " not on the cut curve");
}

/// Bends a straight image chord that runs along the polygon boundary into the open polygon.
std::vector<Point> bend_off_boundary(const SimplePolygon& poly, std::vector<Point> curve, std::span<const std::vector<Point>> others) {
    if (curve.size() != 2 || open_polyline_inside(poly, curve)) return curve;
    const Point m = midpoint(curve[0], curve[1]);
    const Point d = curve[1] - curve[0];
    const Point normal{-d.y, d.x};
    for (int k = 3; k < 60; ++k) {
        const Rational s(mpq_class(1, mpz_class(1) << k));
        for (int side : {1, -1}) {
            std::vector<Point> c{curve[0], m + Rational(side * s) * normal, curve[1]};
            if (!open_polyline_inside(poly, c)) continue;
            bool clear = true;
            for (const auto& o : others) clear = clear && polylines_disjoint(c, o);
            if (clear) return c;
        }
    }
    fail(ErrorKind::VerificationFailed, "cannot move a boundary chord into the open image polygon");
}

/// Forces strictly increasing parameters inside (lo, hi) by spreading ties evenly.
void make_monotone(std::vector<Rational>& u, const Rational& lo, const Rational& hi) {
    const std::size_t n = u.size();
    Rational prev = lo;
    for (std::size_t j = 0; j < n; ++j) {
        if (u[j] > prev && u[j] < hi) {
            prev = u[j];
            continue;
        }
        std::size_t k = j;
        while (k < n && !(u[k] > prev && u[k] < hi)) ++k;
        const Rational next = k < n ? u[k] : hi;
        const Rational step = (next - prev) / Rational(static_cast<long>(k - j + 1));
        for (std::size_t m = j; m < k; ++m) u[m] = prev + Rational(static_cast<long>(m - j + 1)) * step;
        prev = u[k - 1];
        j = k - 1;
    }
}

Rational snap_between(const Rational& v, const Rational& lo, const Rational& hi) {
    for (int bits = 24; bits <= 120; bits += 16) {
        Rational s = snap(v, bits);
        if (s > lo && s < hi) return s;
    }
    return v;
}

} // namespace

const char* to_string(PolygonClass c) noexcept {
    switch (c) {
    case PolygonClass::Rectangle: return "rectangle";
    case PolygonClass::TwoParallel: return "i";
    case PolygonClass::OneParallel: return "ii";
    case PolygonClass::NoParallel: return "iii";
    }
    return "?";
}

PolygonClass classify_polygon(const ConvexPolygon& q, const Direction& dir) {
    const BoundingFrame f = frame(q, dir);
    if (q.area() == f.ell() * f.h()) return PolygonClass::Rectangle;
    int parallel = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (dir.to_frame(q[i]).y == dir.to_frame(q.next(i)).y) ++parallel;
    if (parallel >= 2) return PolygonClass::TwoParallel;
    return parallel == 1 ? PolygonClass::OneParallel : PolygonClass::NoParallel;
}

// ---------------------------------------------------------------------------------------------
// NodeRegistry

void NodeRegistry::add(const Point& pre, const Point& img) {
    auto [it, inserted] = by_y_[pre.y].emplace(pre.x, img);
    if (!inserted) {
        if (it->second != img) fail(ErrorKind::Internal, "conflicting images at " + str(pre));
        return;
    }
    by_x_[pre.x].emplace(pre.y, img);
    ++count_;
}

std::optional<Point> NodeRegistry::find(const Point& pre) const {
    auto row = by_y_.find(pre.y);
    if (row == by_y_.end()) return std::nullopt;
    auto it = row->second.find(pre.x);
    if (it == row->second.end()) return std::nullopt;
    return it->second;
}

Loop NodeRegistry::loop_of(std::span<const Point> polygon) const {
    Loop out;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = polygon[i];
        const Point& b = polygon[(i + 1) % n];
        const auto start = find(a);
        if (!start) fail(ErrorKind::Internal, "polygon vertex " + str(a) + " has no image");
        out.push_back({a, *start});
        auto walk = [&](const std::map<Rational, Point>& line, const Rational& from, const Rational& to, auto make) {
            if (from < to) {
                for (auto it = line.upper_bound(from); it != line.end() && it->first < to; ++it)
                    out.push_back({make(it->first), it->second});
            } else {
                auto it = line.lower_bound(from);
                while (it != line.begin()) {
                    --it;
                    if (it->first <= to) break;
                    out.push_back({make(it->first), it->second});
                }
            }
        };
        if (a.y == b.y) {
            auto row = by_y_.find(a.y);
            walk(row->second, a.x, b.x, [&](const Rational& x) { return Point{x, a.y}; });
        } else if (a.x == b.x) {
            auto col = by_x_.find(a.x);
            walk(col->second, a.y, b.y, [&](const Rational& y) { return Point{a.x, y}; });
        } else {
            auto visit = [&](const Rational& y) {
                const Point p{x_at(a, b, y), y};
                if (auto img = find(p)) out.push_back({p, *img});
            };
            if (a.y < b.y) {
                for (auto it = by_y_.upper_bound(a.y); it != by_y_.end() && it->first < b.y; ++it) visit(it->first);
            } else {
                auto it = by_y_.lower_bound(a.y);
                while (it != by_y_.begin()) {
                    --it;
                    if (it->first <= b.y) break;
                    visit(it->first);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Tips

namespace {

/// Largest height above (below) the apex at which both chord ends satisfy the size and linearity constraints.
Rational tip_height(const Loop& loop, std::size_t apex, double eta) {
    const std::size_t n = loop.size();
    const Node& w = loop[apex];
    double limit = HUGE_VAL;
    for (int dirn : {1, -1}) {
        const Node& next = loop[(apex + n + dirn) % n];
        const double dy = std::abs(Rational(next.pre.y - w.pre.y).get_d());
        if (dy == 0) fail(ErrorKind::Internal, "horizontal side at a tip apex");
        const double pre_len = length(next.pre, w.pre), img_len = length(next.img, w.img);
        limit = std::min({limit, dy, eta * dy / pre_len, eta * dy / std::max(img_len, 1e-300)});
    }
    Rational t = snap(limit / 2, 40);
    while (t > 0 && t.get_d() >= limit) t /= 2;
    if (t <= 0) t = snap(limit / 2, 200);
    return t;
}

} // namespace

TipDecomposition remove_tips(const ConvexPolygon& q, const Loop& loop, double eta) {
    if (!(eta > 0)) fail(ErrorKind::Validation, "eta must be positive");
    const Extent ex = extent(q.vertices());
    std::vector<std::size_t> lows, highs;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        if (loop[i].pre.y == ex.ymin && !strictly_inside_segment(loop[i].pre, loop[(i + loop.size() - 1) % loop.size()].pre, loop[(i + 1) % loop.size()].pre)) lows.push_back(i);
        if (loop[i].pre.y == ex.ymax && !strictly_inside_segment(loop[i].pre, loop[(i + loop.size() - 1) % loop.size()].pre, loop[(i + 1) % loop.size()].pre)) highs.push_back(i);
    }
    if (lows.size() != 1 && highs.size() != 1)
        fail(ErrorKind::PreconditionViolated, "polygon already has two sides parallel to the slicing direction");

    const ImagePolygon image = validate_injective(loop);
    const SimplePolygon& big = image.polygon;
    eta = std::min(eta, Rational(ex.ymax - ex.ymin).get_d() / 4);

    TipDecomposition out;
    out.eta = eta;
    std::vector<std::pair<std::size_t, std::vector<Node>>> replacements;
    for (int pass = 0; pass < 2; ++pass) {
        const bool bottom = pass == 0;
        const auto& ids = bottom ? lows : highs;
        if (ids.size() != 1) continue;
        const std::size_t k = ids[0];
        const std::size_t n = loop.size();
        const Node& w = loop[k];
        const Node& prev = loop[(k + n - 1) % n];
        const Node& next = loop[(k + 1) % n];
        const Rational h = tip_height(loop, k, eta);
        const Rational y = bottom ? Rational(w.pre.y + h) : Rational(w.pre.y - h);
        Node a{{x_at(w.pre, prev.pre, y), y}, {}}, b{{x_at(w.pre, next.pre, y), y}, {}};
        a.img = lerp(w.img, prev.img, param_on(a.pre, w.pre, prev.pre));
        b.img = lerp(w.img, next.img, param_on(b.pre, w.pre, next.pre));
        // a lies on the side arriving at W, b on the side leaving it.
        Tip tip;
        tip.apex = w.pre;
        const bool a_left = a.pre.x < b.pre.x;
        tip.left = a_left ? a.pre : b.pre;
        tip.right = a_left ? b.pre : a.pre;
        const double da = length(w.pre, a.pre), db = length(w.pre, b.pre);
        const Rational lambda = snap_between(snap(da / (da + db), 24), Rational(0), Rational(1));
        tip.foot = lerp(a.pre, b.pre, lambda);

        std::optional<Point> x;
        if (open_polyline_inside(big, std::vector<Point>{a.img, b.img})) x = lerp(a.img, b.img, lambda);
        else {
            std::size_t idx = big.size();
            for (std::size_t i = 0; i < big.size(); ++i)
                if (big[i] == w.img) idx = i;
            if (idx == big.size()) fail(ErrorKind::Internal, "apex image is not an image polygon vertex");
            double r = std::min(length(w.img, a.img), length(w.img, b.img)) / 2;
            for (int attempt = 0; attempt < 60 && !x; ++attempt, r /= 2) {
                const Point c = push_inward(big, idx, r);
                const std::vector<Point> path{a.img, c, b.img};
                if (!open_polyline_inside(big, path)) continue;
                // Both affine halves keep the orientation of the tip boundary.
                const int s1 = orient(w.img, a.img, c), s2 = orient(w.img, c, b.img);
                const int want = orient(w.pre, a.pre, tip.foot);
                if (s1 == 0 || s2 == 0 || s1 != s2 || (want != 0 && (s1 == want) == image.reversed)) continue;
                x = c;
            }
            if (!x) fail(ErrorKind::VerificationFailed, "no admissible chord image near the tip apex");
        }
        tip.foot_image = *x;
        const Node foot{tip.foot, *x};
        // Counterclockwise tip loop: apex, then the side leaving it, across the chord, back down the arriving side.
        tip.loop = {w, b, foot, a};
        out.tips.push_back(tip);
        replacements.emplace_back(k, std::vector<Node>{a, foot, b});
    }

    for (std::size_t i = 0; i < loop.size(); ++i) {
        auto it = std::find_if(replacements.begin(), replacements.end(), [&](const auto& r) { return r.first == i; });
        if (it == replacements.end()) {
            out.delta_loop.push_back(loop[i]);
            continue;
        }
        for (const Node& nd : it->second)
            if (out.delta_loop.empty() || out.delta_loop.back().pre != nd.pre) out.delta_loop.push_back(nd);
    }
    // Drop a replacement chord end that coincides with an existing neighbour node.
    Loop cleaned;
    for (std::size_t i = 0; i < out.delta_loop.size(); ++i) {
        const Node& nd = out.delta_loop[i];
        if (!cleaned.empty() && cleaned.back().pre == nd.pre) continue;
        if (i + 1 == out.delta_loop.size() && nd.pre == out.delta_loop.front().pre) continue;
        cleaned.push_back(nd);
    }
    out.delta_loop = std::move(cleaned);
    out.delta = ConvexPolygon(drop_collinear(preimages(out.delta_loop)));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Strips

StripSplit split_strip(const ConvexPolygon& strip) {
    const Extent ex = extent(strip.vertices());
    Rational l0, l1, r0, r1;
    bool has_bottom = false, has_top = false;
    for (std::size_t i = 0; i < strip.size(); ++i) {
        const Point& a = strip[i];
        const Point& b = strip.next(i);
        if (a.y == ex.ymin && b.y == ex.ymin) {
            l0 = std::min(a.x, b.x);
            r0 = std::max(a.x, b.x);
            has_bottom = true;
        }
        if (a.y == ex.ymax && b.y == ex.ymax) {
            l1 = std::min(a.x, b.x);
            r1 = std::max(a.x, b.x);
            has_top = true;
        }
    }
    if (!has_bottom || !has_top) fail(ErrorKind::PreconditionViolated, "strip needs horizontal top and bottom sides");
    StripSplit out;
    out.x_left = std::max(l0, l1);
    out.x_right = std::min(r0, r1);
    if (out.x_left >= out.x_right) fail(ErrorKind::PreconditionViolated, "strip too slanted for an inscribed rectangle");
    out.rectangle = ConvexPolygon({{out.x_left, ex.ymin}, {out.x_right, ex.ymin}, {out.x_right, ex.ymax}, {out.x_left, ex.ymax}});
    if (l0 != l1) {
        if (l0 < l1) out.left = ConvexPolygon({{l0, ex.ymin}, {l1, ex.ymin}, {l1, ex.ymax}});
        else out.left = ConvexPolygon({{l0, ex.ymin}, {l0, ex.ymax}, {l1, ex.ymax}});
    }
    if (r0 != r1) {
        if (r0 > r1) out.right = ConvexPolygon({{r1, ex.ymin}, {r0, ex.ymin}, {r1, ex.ymax}});
        else out.right = ConvexPolygon({{r0, ex.ymin}, {r1, ex.ymax}, {r0, ex.ymax}});
    }
    return out;
}

namespace {

ConvexPolygon band(const ConvexPolygon& c, const Rational& lo, const Rational& hi) {
    std::vector<Point> v = c.vertices();
    v = clip_halfplane(v, {Rational(0), lo}, {Rational(1), lo});
    v = clip_halfplane(v, {Rational(1), hi}, {Rational(0), hi});
    return ConvexPolygon(drop_collinear(v));
}

std::vector<Point> slab(const std::vector<Point>& poly, const Rational& lo, const Rational& hi) {
    std::vector<Point> v = clip_halfplane(poly, {lo, Rational(1)}, {lo, Rational(0)});
    v = clip_halfplane(v, {hi, Rational(0)}, {hi, Rational(1)});
    return drop_collinear(v);
}

bool strip_splittable(const ConvexPolygon& c, const Rational& lo, const Rational& hi) {
    try {
        split_strip(band(c, lo, hi));
        return true;
    } catch (const Error&) {
        return false;
    }
}

/// Preimage coordinate for every interior polyline vertex, proportional to approximate arclength.
std::vector<Rational> arclength_coordinates(const std::vector<Point>& curve, const Rational& a, const Rational& b) {
    std::vector<double> acc{0.0};
    for (std::size_t k = 1; k < curve.size(); ++k) acc.push_back(acc.back() + length(curve[k - 1], curve[k]));
    std::vector<Rational> out;
    Rational prev = a;
    for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
        const Rational target = a + (b - a) * snap(acc[k] / acc.back(), 30);
        const Rational remaining(static_cast<long>(curve.size() - 1 - k));
        Rational v = target;
        const bool up = b > a;
        if (up ? v <= prev : v >= prev) v = prev + (b - prev) / (remaining + 1);
        if (up ? v >= b : v <= b) v = prev + (b - prev) / (remaining + 1);
        out.push_back(v);
        prev = v;
    }
    return out;
}

} // namespace

StripDecomposition slice_strips(const ConvexPolygon& c, const Loop& loop, const GridOptions& options) {
    if (options.strips < 1 || options.columns < 1) fail(ErrorKind::Validation, "grid needs at least one strip and column");
    StripDecomposition out;
    NodeRegistry& reg = out.registry;
    for (const Node& n : loop) reg.add(n.pre, n.img);
    const Extent ex = extent(c.vertices());
    const BoundaryMap phi = BoundaryMap::from_loop(loop);

    // Cut levels: node levels, a uniform grid, and densification along long boundary images.
    std::set<Rational> levels{ex.ymin, ex.ymax};
    for (const Node& n : loop) levels.insert(n.pre.y);
    const Rational h = ex.ymax - ex.ymin, w = ex.xmax - ex.xmin;
    for (int k = 1; k < options.strips; ++k) levels.insert(ex.ymin + h * ratio(k, options.strips));
    if (options.image_step > 0) {
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Node& a = loop[i];
            const Node& b = loop[(i + 1) % loop.size()];
            if (a.pre.y == b.pre.y) continue;
            const int m = static_cast<int>(std::ceil(length(a.img, b.img) / options.image_step));
            for (int j = 1; j < m; ++j) levels.insert(snap(lerp(a.pre, b.pre, ratio(j, m)).y, 40));
        }
    }
    std::vector<Rational> cuts(levels.begin(), levels.end());
    if (options.split && classify_polygon(c, Direction()) != PolygonClass::Rectangle &&
        classify_polygon(c, Direction()) != PolygonClass::TwoParallel)
        fail(ErrorKind::PreconditionViolated, "strip splitting needs horizontal top and bottom sides");
    if (options.split) {
        for (int guard = 0; guard < 40; ++guard) {
            std::vector<Rational> refined{cuts.front()};
            bool changed = false;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                if (!strip_splittable(c, cuts[i], cuts[i + 1])) {
                    refined.push_back((cuts[i] + cuts[i + 1]) / 2);
                    changed = true;
                }
                refined.push_back(cuts[i + 1]);
            }
            cuts = std::move(refined);
            if (!changed) break;
        }
    }
    out.cuts = cuts;
    const std::size_t m = cuts.size() - 1;  // number of strips

    // Cut endpoints and the image polygon.
    std::vector<std::pair<Point, Point>> ends(cuts.size());
    for (std::size_t i = 1; i < m; ++i) {
        ends[i] = chord(c, Direction(), Axis::Parallel, cuts[i]);
        reg.add(ends[i].first, phi.eval_at(ends[i].first));
        reg.add(ends[i].second, phi.eval_at(ends[i].second));
    }
    const ImagePolygon image = validate_injective(loop);
    const SimplePolygon& big = image.polygon;
    const PolygonGeodesics geo(big);
    const SafeDelta safe = safe_delta(big);
    const Rational delta0 = safe.infinite ? options.delta : std::min(options.delta, Rational(safe.value / 2));

    std::vector<Geodesic> cut_geodesics;
    for (std::size_t i = 1; i < m; ++i)
        cut_geodesics.push_back(geo.shortest_path(*reg.find(ends[i].first), *reg.find(ends[i].second)));
    auto curves = modify_family(big, cut_geodesics, delta0);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        std::vector<std::vector<Point>> others(curves.begin(), curves.begin() + static_cast<long>(i));
        others.insert(others.end(), curves.begin() + static_cast<long>(i) + 1, curves.end());
        curves[i] = bend_off_boundary(big, curves[i], others);
    }

    // Strips and their column positions.
    std::vector<ConvexPolygon> strips;
    std::vector<std::vector<Rational>> columns(m);
    std::vector<std::optional<StripSplit>> splits(m);
    for (std::size_t i = 0; i < m; ++i) {
        strips.push_back(band(c, cuts[i], cuts[i + 1]));
        const Extent se = extent(strips[i].vertices());
        std::set<Rational> xs;
        Rational lo = se.xmin, hi = se.xmax;
        if (options.split) {
            splits[i] = split_strip(strips[i]);
            lo = splits[i]->x_left;
            hi = splits[i]->x_right;
            if (splits[i]->left) xs.insert(lo);
            if (splits[i]->right) xs.insert(hi);
        }
        for (int k = 1; k < options.columns; ++k) {
            const Rational x = ex.xmin + w * ratio(k, options.columns);
            if (x > lo && x < hi) xs.insert(x);
        }
        columns[i].assign(xs.begin(), xs.end());
    }

    // Crossing parametrization of every interior cut by reference vertical geodesics.
    std::map<Rational, std::vector<Point>> reference;
    auto reference_path = [&](const Rational& x) -> const std::vector<Point>& {
        auto it = reference.find(x);
        if (it != reference.end()) return it->second;
        const auto [v1, v2] = chord(c, Direction(), Axis::Perpendicular, x);
        return reference.emplace(x, geo.shortest_path(phi.eval_at(v1), phi.eval_at(v2)).path).first->second;
    };
    for (std::size_t i = 1; i < m; ++i) {
        const auto& curve = curves[i - 1];
        const auto& [h1, h2] = ends[i];
        std::set<Rational> need;
        for (std::size_t s : {i - 1, i})
            for (const Rational& x : columns[s])
                if (x > h1.x && x < h2.x) need.insert(x);
        CrossingParam cp;
        cp.curve = curve;
        cp.xs.push_back(h1.x);
        std::vector<Rational> u;
        for (const Rational& x : need) {
            const CrossingResult cr = crossing(reference_path(x), curve);
            if (cr.kind == CrossingResult::Kind::Empty)
                fail(ErrorKind::Internal, "reference geodesic misses cut " + std::to_string(i));
            cp.xs.push_back(x);
            u.push_back(polyline_param(curve, cr.last));
        }
        const Rational end(static_cast<long>(curve.size() - 1));
        make_monotone(u, Rational(0), end);
        cp.xs.push_back(h2.x);
        cp.params.push_back(Rational(0));
        cp.params.insert(cp.params.end(), u.begin(), u.end());
        cp.params.push_back(end);
        for (std::size_t j = 1; j + 1 < cp.xs.size(); ++j) reg.add({cp.xs[j], cuts[i]}, polyline_at(curve, cp.params[j]));
        // Curve vertices between parametrized nodes get interpolated abscissae.
        for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
            const Rational uk(static_cast<long>(k));
            auto hi_it = std::lower_bound(cp.params.begin(), cp.params.end(), uk);
            const std::size_t j = static_cast<std::size_t>(hi_it - cp.params.begin());
            if (cp.params[j] == uk) continue;
            const Rational& ua = cp.params[j - 1];
            const Rational& ub = cp.params[j];
            const Rational& xa = cp.xs[j - 1];
            const Rational& xb = cp.xs[j];
            const Rational x = snap_between(xa + (xb - xa) * (uk - ua) / (ub - ua), xa, xb);
            reg.add({x, cuts[i]}, curve[k]);
        }
        out.params.push_back(std::move(cp));
    }
    out.cut_curves = curves;

    // Column ends on the outer boundary.
    std::vector<std::vector<std::pair<Point, Point>>> column_ends(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (const Rational& x : columns[i]) {
            auto [p, q] = chord(strips[i], Direction(), Axis::Perpendicular, x);
            for (const Point* e : {&p, &q})
                if (!reg.find(*e)) reg.add(*e, phi.eval_at(*e));
            column_ends[i].emplace_back(p, q);
        }
    }

    // Columns: modified geodesics of each strip image.
    for (std::size_t i = 0; i < m; ++i) {
        out.strips.push_back(strips[i]);
        Loop sl = reg.loop_of(strips[i].vertices());
        const ImagePolygon si = validate_injective(sl);
        out.strip_loops.push_back(sl);
        if (columns[i].empty()) continue;
        const PolygonGeodesics sgeo(si.polygon);
        std::vector<Geodesic> fam;
        for (const auto& [p, q] : column_ends[i]) fam.push_back(sgeo.shortest_path(*reg.find(p), *reg.find(q)));
        const SafeDelta ss = safe_delta(si.polygon);
        const Rational d = ss.infinite ? delta0 : std::min(delta0, Rational(ss.value / 2));
        auto cols = modify_family(si.polygon, fam, d);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::vector<std::vector<Point>> others(cols.begin(), cols.begin() + static_cast<long>(k));
            others.insert(others.end(), cols.begin() + static_cast<long>(k) + 1, cols.end());
            cols[k] = bend_off_boundary(si.polygon, cols[k], others);
            const auto& [p, q] = column_ends[i][k];
            const auto ys = arclength_coordinates(cols[k], p.y, q.y);
            for (std::size_t j = 0; j < ys.size(); ++j) reg.add({p.x, ys[j]}, cols[k][j + 1]);
        }
    }

    // Cells between consecutive columns.
    for (std::size_t i = 0; i < m; ++i) {
        const Extent se = extent(strips[i].vertices());
        std::vector<Rational> xs{se.xmin};
        xs.insert(xs.end(), columns[i].begin(), columns[i].end());
        xs.push_back(se.xmax);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const std::vector<Point> poly = slab(strips[i].vertices(), xs[k], xs[k + 1]);
            if (poly.size() < 3) continue;
            Cell cell{ConvexPolygon(poly), {}, CellKind::Interior, i};
            cell.loop = reg.loop_of(cell.polygon.vertices());
            if (splits[i]) {
                if (splits[i]->left && xs[k + 1] <= splits[i]->x_left) cell.kind = CellKind::LeftTriangle;
                if (splits[i]->right && xs[k] >= splits[i]->x_right) cell.kind = CellKind::RightTriangle;
            }
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

} // namespace minext
