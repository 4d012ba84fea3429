#include "minext/geodesics.hpp"

#include "minext/errors.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>

namespace minext {

// ---------------------------------------------------------------------------------------------
// Length expressions

Interval LengthExpr::enclosure() const {
    Interval s = Interval::point(0.0);
    for (const auto& q : squares) s += Interval::sqrt_of(q);
    return s;
}

namespace {

// sign(x + y*sqrt(z)), z >= 0.
int sign_plus_root(const Rational& x, const Rational& y, const Rational& z) {
    const int sx = sgn(x), sy = sgn(z) == 0 ? 0 : sgn(y);
    if (sy == 0) return sx;
    if (sx == 0 || sx == sy) return sy;
    const int c = cmp(x * x, y * y * z);
    return c > 0 ? sx : c < 0 ? sy : 0;
}

// Exact sign of sqrt(a1) + sqrt(a2) - sqrt(b1) - sqrt(b2).
int compare_two_terms(const Rational& a1, const Rational& a2, const Rational& b1, const Rational& b2) {
    const Rational d = a1 + a2 - b1 - b2, p = a1 * a2, q = b1 * b2;
    // sign(L^2 - R^2) = sign(d + 2 sqrt p - 2 sqrt q)
    if (sgn(q) == 0) return sign_plus_root(d, 2, p);
    if (sgn(p) == 0) return sign_plus_root(d, -2, q);
    const int m = sign_plus_root(d, 2, p);  // m = d + 2 sqrt p
    if (m <= 0) return -1;
    // m > 0: compare m^2 with 4q.
    return sign_plus_root(d * d + 4 * p - 4 * q, 4 * d, p);
}

struct MpfrSum {
    mpfr_t lo, hi, t;
    explicit MpfrSum(mpfr_prec_t prec) {
        mpfr_inits2(prec, lo, hi, t, static_cast<mpfr_ptr>(nullptr));
        mpfr_set_zero(lo, 1);
        mpfr_set_zero(hi, 1);
    }
    ~MpfrSum() { mpfr_clears(lo, hi, t, static_cast<mpfr_ptr>(nullptr)); }
    MpfrSum(const MpfrSum&) = delete;
    MpfrSum& operator=(const MpfrSum&) = delete;

    void add_sqrt(const Rational& q) {
        mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDD);
        mpfr_sqrt(t, t, MPFR_RNDD);
        mpfr_add(lo, lo, t, MPFR_RNDD);
        mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDU);
        mpfr_sqrt(t, t, MPFR_RNDU);
        mpfr_add(hi, hi, t, MPFR_RNDU);
    }
};

} // namespace

int compare(const LengthExpr& a, const LengthExpr& b) {
    if (a.squares.size() <= 2 && b.squares.size() <= 2) {
        auto at = [](const LengthExpr& e, std::size_t i) { return i < e.squares.size() ? e.squares[i] : Rational(0); };
        return compare_two_terms(at(a, 0), at(a, 1), at(b, 0), at(b, 1));
    }
    for (mpfr_prec_t prec = 128; prec <= 8192; prec *= 2) {
        MpfrSum sa(prec), sb(prec);
        for (const auto& q : a.squares) sa.add_sqrt(q);
        for (const auto& q : b.squares) sb.add_sqrt(q);
        if (mpfr_less_p(sa.hi, sb.lo)) return -1;
        if (mpfr_less_p(sb.hi, sa.lo)) return 1;
    }
    return 0;
}

bool Geodesic::straight() const {
    for (std::size_t k = 1; k + 1 < path.size(); ++k)
        if (!strictly_inside_segment(path[k], path[k - 1], path[k + 1])) return false;
    return true;
}

// ---------------------------------------------------------------------------------------------
// Triangulation

std::vector<std::array<std::size_t, 3>> triangulate(const SimplePolygon& polygon) {
    const auto& v = polygon.vertices();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!strictly_inside_segment(v[i], polygon.prev(i), polygon.next(i))) idx.push_back(i);
    const std::size_t n = idx.size();
    if (n < 3) fail(ErrorKind::Degenerate, "polygon has fewer than three corners");

    std::vector<std::size_t> nxt(n), prv(n);
    for (std::size_t i = 0; i < n; ++i) {
        nxt[i] = (i + 1) % n;
        prv[i] = (i + n - 1) % n;
    }
    std::vector<char> alive(n, 1);
    auto P = [&](std::size_t i) -> const Point& { return v[idx[i]]; };

    auto is_ear = [&](std::size_t i) {
        const std::size_t p = prv[i], q = nxt[i];
        if (orient(P(p), P(i), P(q)) <= 0) return false;
        for (std::size_t j = nxt[q]; j != p; j = nxt[j]) {
            const Point& w = P(j);
            if (orient(P(p), P(i), w) >= 0 && orient(P(i), P(q), w) >= 0 && orient(P(q), P(p), w) >= 0) return false;
        }
        return true;
    };

    std::vector<std::array<std::size_t, 3>> tris;
    std::size_t remaining = n, cur = 0;
    while (remaining > 3) {
        bool found = false;
        for (std::size_t step = 0, i = cur; step < remaining; ++step, i = nxt[i]) {
            if (!is_ear(i)) continue;
            tris.push_back({idx[prv[i]], idx[i], idx[nxt[i]]});
            nxt[prv[i]] = nxt[i];
            prv[nxt[i]] = prv[i];
            alive[i] = 0;
            cur = nxt[i];
            --remaining;
            found = true;
            break;
        }
        if (!found) fail(ErrorKind::Internal, "ear clipping found no ear");
    }
    tris.push_back({idx[prv[cur]], idx[cur], idx[nxt[cur]]});
    return tris;
}

// ---------------------------------------------------------------------------------------------
// Shortest paths

PolygonGeodesics::PolygonGeodesics(SimplePolygon polygon) : poly_(std::move(polygon)) {
    tris_ = triangulate(poly_);
    nbr_.assign(tris_.size(), {-1, -1, -1});
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, int>> open;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        for (int k = 0; k < 3; ++k) {
            std::size_t u = tris_[t][k], w = tris_[t][(k + 1) % 3];
            auto key = std::minmax(u, w);
            auto it = open.find(key);
            if (it == open.end()) {
                open.emplace(key, std::make_pair(t, k));
            } else {
                nbr_[t][k] = static_cast<long>(it->second.first);
                nbr_[it->second.first][it->second.second] = static_cast<long>(t);
                open.erase(it);
            }
        }
        const auto& v = poly_.vertices();
        Box b = Box::of(v[tris_[t][0]], v[tris_[t][1]]);
        Box c = Box::of(v[tris_[t][2]], v[tris_[t][2]]);
        boxes_.push_back({std::min(b.xlo, c.xlo), std::min(b.ylo, c.ylo), std::max(b.xhi, c.xhi), std::max(b.yhi, c.yhi)});
    }
}

std::vector<std::size_t> PolygonGeodesics::containing(const Point& p) const {
    const auto& v = poly_.vertices();
    const Box pb = Box::of(p, p);
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        if (!boxes_[t].overlaps(pb)) continue;
        const auto& tr = tris_[t];
        if (orient(v[tr[0]], v[tr[1]], p) >= 0 && orient(v[tr[1]], v[tr[2]], p) >= 0 &&
            orient(v[tr[2]], v[tr[0]], p) >= 0)
            out.push_back(t);
    }
    return out;
}

std::vector<std::size_t> PolygonGeodesics::sleeve(const std::vector<std::size_t>& from,
                                                  const std::vector<std::size_t>& to) const {
    auto in = [](const std::vector<std::size_t>& s, std::size_t t) { return std::binary_search(s.begin(), s.end(), t); };
    std::vector<long> parent(tris_.size(), -2);
    std::deque<std::size_t> queue{from.front()};
    parent[from.front()] = -1;
    std::size_t hit = tris_.size();
    while (!queue.empty()) {
        const std::size_t t = queue.front();
        queue.pop_front();
        if (in(to, t)) {
            hit = t;
            break;
        }
        for (long nb : nbr_[t])
            if (nb >= 0 && parent[nb] == -2) {
                parent[nb] = static_cast<long>(t);
                queue.push_back(static_cast<std::size_t>(nb));
            }
    }
    if (hit == tris_.size()) fail(ErrorKind::Internal, "dual tree is disconnected");
    std::vector<std::size_t> path;
    for (long t = static_cast<long>(hit); t >= 0; t = parent[t]) path.push_back(static_cast<std::size_t>(t));
    std::reverse(path.begin(), path.end());
    std::size_t first = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
        if (in(from, path[k])) first = k;
    return {path.begin() + static_cast<std::ptrdiff_t>(first), path.end()};
}

namespace {

// Funnel apex test helpers. `inside_of(apex, ray, p, side)`: p lies strictly on the funnel side of the ray,
// or on the ray strictly before its end.
bool before_on_ray(const Point& apex, const Point& ray, const Point& p) {
    return sgn(dot(p - apex, ray - apex)) > 0 && dist2(apex, p) < dist2(apex, ray);
}

} // namespace

Geodesic PolygonGeodesics::shortest_path(const Point& a, const Point& b) const {
    auto sa = containing(a);
    auto sb = containing(b);
    if (sa.empty() || sb.empty()) fail(ErrorKind::PointOutside, "endpoint outside polygon");
    if (a == b) return canonical_geodesic(poly_, {a});
    std::vector<std::size_t> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    if (!common.empty()) return canonical_geodesic(poly_, {a, b});

    const auto tube = sleeve(sa, sb);
    const auto& v = poly_.vertices();
    std::vector<std::pair<const Point*, const Point*>> portals;
    for (std::size_t j = 0; j + 1 < tube.size(); ++j) {
        const auto& tr = tris_[tube[j]];
        int k = 0;
        while (nbr_[tube[j]][k] != static_cast<long>(tube[j + 1])) ++k;
        portals.emplace_back(&v[tr[(k + 1) % 3]], &v[tr[k]]);  // (left, right)
    }
    portals.emplace_back(&b, &b);

    std::vector<Point> path{a};
    const Point* apex = &a;
    const Point* left = &a;
    const Point* right = &a;
    std::size_t apex_i = 0, left_i = 0, right_i = 0;
    for (std::size_t i = 0; i < portals.size(); ++i) {
        const Point* pl = portals[i].first;
        const Point* pr = portals[i].second;

        if (*right == *apex || orient(*apex, *right, *pr) >= 0) {
            const bool inside = *left == *apex || orient(*apex, *left, *pr) < 0 ||
                                (orient(*apex, *left, *pr) == 0 && before_on_ray(*apex, *left, *pr));
            if (*right == *apex || inside) {
                right = pr;
                right_i = i;
            } else {
                path.push_back(*left);
                apex = left;
                apex_i = left_i;
                right = left = apex;
                right_i = left_i = apex_i;
                i = apex_i;
                continue;
            }
        }
        if (*left == *apex || orient(*apex, *left, *pl) <= 0) {
            const bool inside = *right == *apex || orient(*apex, *right, *pl) > 0 ||
                                (orient(*apex, *right, *pl) == 0 && before_on_ray(*apex, *right, *pl));
            if (*left == *apex || inside) {
                left = pl;
                left_i = i;
            } else {
                path.push_back(*right);
                apex = right;
                apex_i = right_i;
                right = left = apex;
                right_i = left_i = apex_i;
                i = apex_i;
                continue;
            }
        }
    }
    if (path.back() != b) path.push_back(b);
    return canonical_geodesic(poly_, std::move(path));
}

Geodesic shortest_path(const SimplePolygon& polygon, const Point& a, const Point& b) {
    return PolygonGeodesics(polygon).shortest_path(a, b);
}

Geodesic canonical_geodesic(const SimplePolygon& polygon, std::vector<Point> polyline) {
    Geodesic g;
    g.a = polyline.front();
    g.b = polyline.back();
    std::vector<Point> reduced;
    for (auto& p : polyline) {
        if (!reduced.empty() && reduced.back() == p) continue;
        while (reduced.size() >= 2 && strictly_inside_segment(reduced.back(), reduced[reduced.size() - 2], p))
            reduced.pop_back();
        reduced.push_back(std::move(p));
    }
    const auto& v = polygon.vertices();
    g.path.push_back(reduced.front());
    for (std::size_t s = 0; s + 1 < reduced.size(); ++s) {
        const Point& p = reduced[s];
        const Point& q = reduced[s + 1];
        const Box box = Box::of(p, q);
        std::vector<std::pair<Rational, std::size_t>> met;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!box.overlaps(Box::of(v[k], v[k]))) continue;
            if (strictly_inside_segment(v[k], p, q)) met.emplace_back(param_on(v[k], p, q), k);
        }
        std::sort(met.begin(), met.end());
        for (auto& [t, k] : met) {
            g.path.push_back(v[k]);
            g.vertices.push_back(k);
        }
        if (s + 2 < reduced.size()) {
            auto it = std::find(v.begin(), v.end(), q);
            if (it == v.end()) fail(ErrorKind::Internal, "geodesic bends away from a polygon vertex");
            g.vertices.push_back(static_cast<std::size_t>(it - v.begin()));
        }
        g.path.push_back(q);
    }
    for (std::size_t k = 1; k < g.path.size(); ++k) g.length.squares.push_back(dist2(g.path[k - 1], g.path[k]));
    return g;
}

// ---------------------------------------------------------------------------------------------
// Safe delta and modifications

namespace {

Rational point_segment_dist2(const Point& p, const Point& a, const Point& b) {
    const Point ab = b - a;
    const Rational len2 = dot(ab, ab);
    const Rational t = dot(p - a, ab);
    if (sgn(t) <= 0) return dist2(p, a);
    if (t >= len2) return dist2(p, b);
    const Rational c = cross(ab, p - a);
    return c * c / len2;
}

} // namespace

SafeDelta safe_delta(const SimplePolygon& polygon) {
    const auto reflex = polygon.reflex_vertices();
    if (reflex.empty()) return {true, Rational(0)};
    const auto& v = polygon.vertices();
    const std::size_t n = v.size();
    std::optional<Rational> best;
    for (auto w : reflex) {
        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t f = (e + 1) % n;
            if (e == w || f == w) continue;
            Rational d = point_segment_dist2(v[w], v[e], v[f]);
            if (!best || d < *best) best = d;
        }
    }
    Rational value = sqrt_lower(*best) / 4;
    Rational min_edge2 = dist2(v[0], v[1]);
    for (std::size_t e = 1; e < n; ++e) min_edge2 = std::min(min_edge2, dist2(v[e], v[(e + 1) % n]));
    value = std::min(value, Rational(sqrt_lower(min_edge2) / 2));
    return {false, value};
}

Vec2 internal_bisector(const SimplePolygon& polygon, std::size_t k) {
    const Vec2 w = approx(polygon[k]);
    const Vec2 nx = approx(polygon.next(k)), pv = approx(polygon.prev(k));
    Vec2 e1{nx.x - w.x, nx.y - w.y}, e2{pv.x - w.x, pv.y - w.y};
    const double l1 = norm(e1), l2 = norm(e2);
    e1 = {e1.x / l1, e1.y / l1};
    e2 = {e2.x / l2, e2.y / l2};
    double theta = std::atan2(e1.x * e2.y - e1.y * e2.x, e1.x * e2.x + e1.y * e2.y);
    if (theta <= 0) theta += 2 * std::numbers::pi;
    // Interior sweeps counterclockwise from the outgoing edge to the incoming edge.
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {c * e1.x - s * e1.y, s * e1.x + c * e1.y};
}

Point push_inward(const SimplePolygon& polygon, std::size_t k, double r) {
    const Vec2 u = internal_bisector(polygon, k);
    const Point& w = polygon[k];
    const int bits = std::clamp(static_cast<int>(std::ceil(std::log2(512.0 / r))), 16, 400);
    const Vec2 wd = approx(w);
    if (r > 1e-9 * (std::fabs(wd.x) + std::fabs(wd.y) + 1.0))
        return {snap(wd.x + r * u.x, bits), snap(wd.y + r * u.y, bits)};
    return {w.x + snap(r * u.x, bits), w.y + snap(r * u.y, bits)};
}

bool open_polyline_inside(const SimplePolygon& polygon, std::span<const Point> pts) {
    const std::size_t m = pts.size();
    if (m == 0) return false;
    if (m == 1) return polygon.locate(pts[0]) != Location::Outside;
    for (std::size_t k = 1; k + 1 < m; ++k)
        if (polygon.locate(pts[k]) != Location::Inside) return false;
    const auto& v = polygon.vertices();
    const std::size_t n = v.size();
    for (std::size_t s = 0; s + 1 < m; ++s) {
        const Point& p = pts[s];
        const Point& q = pts[s + 1];
        if (p == q) return false;
        const Box box = Box::of(p, q);
        for (std::size_t e = 0; e < n; ++e) {
            const Point& u = v[e];
            const Point& w = v[(e + 1) % n];
            if (!box.overlaps(Box::of(u, w))) continue;
            switch (segment_contact(p, q, u, w)) {
            case SegmentContact::None: break;
            case SegmentContact::Proper:
            case SegmentContact::Overlap: return false;
            case SegmentContact::Touch:
                if (strictly_inside_segment(u, p, q) || strictly_inside_segment(w, p, q)) return false;
                if (s > 0 && on_segment(p, u, w)) return false;
                if (s + 2 < m && on_segment(q, u, w)) return false;
                break;
            }
        }
        if (polygon.locate(midpoint(p, q)) != Location::Inside) return false;
    }
    return true;
}

bool polyline_simple(std::span<const Point> pts) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Box bi = Box::of(pts[i], pts[i + 1]);
        for (std::size_t j = i + 1; j + 1 < pts.size(); ++j) {
            if (!bi.overlaps(Box::of(pts[j], pts[j + 1]))) continue;
            const auto c = segment_contact(pts[i], pts[i + 1], pts[j], pts[j + 1]);
            if (j == i + 1) {
                if (c == SegmentContact::Overlap) return false;
            } else if (c != SegmentContact::None) {
                return false;
            }
        }
    }
    return true;
}

bool polylines_disjoint(std::span<const Point> a, std::span<const Point> b) {
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const Box bi = Box::of(a[i], a[i + 1]);
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            if (!bi.overlaps(Box::of(b[j], b[j + 1]))) continue;
            if (segment_contact(a[i], a[i + 1], b[j], b[j + 1]) != SegmentContact::None) return false;
        }
    }
    if (a.size() == 1 || b.size() == 1) {
        for (const auto& p : a.size() == 1 ? a : b) {
            const auto& other = a.size() == 1 ? b : a;
            for (std::size_t j = 0; j + 1 < other.size(); ++j)
                if (on_segment(p, other[j], other[j + 1])) return false;
        }
    }
    return true;
}

ModifiedGeodesic modify(const Geodesic& g, const Rational& delta, const SimplePolygon& polygon) {
    const auto safe = safe_delta(polygon);
    if (sgn(delta) <= 0) fail(ErrorKind::DeltaTooLarge, "delta must be positive");
    if (!safe.infinite && delta >= safe.value)
        fail(ErrorKind::DeltaTooLarge, "delta " + to_string(delta) + " not below safe delta " + to_string(safe.value));
    ModifiedGeodesic m{g, delta, g.path};
    if (g.vertices.empty()) return m;
    const double r = delta.get_d() / 2;
    for (std::size_t j = 0; j < g.vertices.size(); ++j) m.path[j + 1] = push_inward(polygon, g.vertices[j], r);
    if (!open_polyline_inside(polygon, m.path) || !polyline_simple(m.path))
        fail(ErrorKind::DeltaTooLarge, "modified geodesic leaves the open polygon");
    return m;
}

std::optional<Rational> boundary_position(const SimplePolygon& polygon, const Point& p) {
    const auto& v = polygon.vertices();
    for (std::size_t e = 0; e < v.size(); ++e) {
        const Point& a = v[e];
        const Point& b = polygon.next(e);
        if (on_segment(p, a, b)) {
            Rational t = param_on(p, a, b);
            if (t == 1) return Rational(static_cast<long>((e + 1) % v.size()));
            return Rational(static_cast<long>(e)) + t;
        }
    }
    return std::nullopt;
}

std::vector<std::vector<Point>> modify_family(const SimplePolygon& polygon, std::span<const Geodesic> family,
                                              Rational delta, int attempts) {
    const Rational n(static_cast<long>(polygon.size()));
    auto mod_n = [&](Rational x) {
        while (sgn(x) < 0) x += n;
        while (x >= n) x -= n;
        return x;
    };
    // Nesting key of member m at vertex k: size of the boundary arc between its ends that contains k.
    struct Visit {
        std::size_t member, slot;
        Rational arc;
    };
    std::map<std::size_t, std::vector<Visit>> at_vertex;
    for (std::size_t m = 0; m < family.size(); ++m) {
        const auto& g = family[m];
        if (g.vertices.empty()) continue;
        auto ua = boundary_position(polygon, g.a), ub = boundary_position(polygon, g.b);
        if (!ua || !ub) fail(ErrorKind::PreconditionViolated, "family member endpoint not on the boundary");
        const Rational span = mod_n(*ub - *ua);
        for (std::size_t j = 0; j < g.vertices.size(); ++j) {
            const Rational pos = mod_n(Rational(static_cast<long>(g.vertices[j])) - *ua);
            at_vertex[g.vertices[j]].push_back({m, j, pos < span ? span : n - span});
        }
    }
    for (auto& [k, visits] : at_vertex)
        std::stable_sort(visits.begin(), visits.end(), [](const Visit& x, const Visit& y) { return x.arc < y.arc; });

    for (int attempt = 0; attempt < attempts; ++attempt, delta /= 2) {
        std::vector<std::vector<Point>> out;
        for (const auto& g : family) out.push_back(g.path);
        for (const auto& [k, visits] : at_vertex) {
            const double count = static_cast<double>(visits.size());
            for (std::size_t r = 0; r < visits.size(); ++r) {
                const double offset = delta.get_d() * (static_cast<double>(r) + 1.0) / (count + 1.0);
                out[visits[r].member][visits[r].slot + 1] = push_inward(polygon, k, offset);
            }
        }
        bool ok = true;
        for (std::size_t m = 0; ok && m < out.size(); ++m)
            ok = (family[m].vertices.empty() || open_polyline_inside(polygon, out[m])) && polyline_simple(out[m]);
        for (std::size_t m = 0; ok && m < out.size(); ++m)
            for (std::size_t l = m + 1; ok && l < out.size(); ++l) ok = polylines_disjoint(out[m], out[l]);
        if (ok) return out;
    }
    fail(ErrorKind::DeltaTooLarge, "no verified modification of the geodesic family");
}

// ---------------------------------------------------------------------------------------------
// Crossings

CrossingResult crossing(std::span<const Point> first, std::span<const Point> second) {
    struct Hit {
        std::size_t seg;
        Rational t;
        Point p;
    };
    std::vector<Hit> hits;
    bool overlap = false;
    const std::size_t segs = first.size() > 0 ? first.size() - 1 : 0;
    auto record = [&](std::size_t i, const Point& p) {
        Rational t = param_on(p, first[i], first[i + 1]);
        if (t == 1 && i + 1 < segs) hits.push_back({i + 1, Rational(0), p});
        else hits.push_back({i, t, p});
    };
    for (std::size_t i = 0; i < segs; ++i) {
        const Point& a = first[i];
        const Point& b = first[i + 1];
        const Box box = Box::of(a, b);
        for (std::size_t j = 0; j + 1 < second.size(); ++j) {
            const Point& c = second[j];
            const Point& d = second[j + 1];
            if (!box.overlaps(Box::of(c, d))) continue;
            switch (segment_contact(a, b, c, d)) {
            case SegmentContact::None: break;
            case SegmentContact::Proper: record(i, lerp(a, b, line_param(a, b, c, d))); break;
            case SegmentContact::Touch:
                for (const Point* q : {&c, &d})
                    if (on_segment(*q, a, b)) record(i, *q);
                for (const Point* q : {&a, &b})
                    if (on_segment(*q, c, d)) record(i, *q);
                break;
            case SegmentContact::Overlap: {
                overlap = true;
                for (const Point* q : {&c, &d})
                    if (on_segment(*q, a, b)) record(i, *q);
                for (const Point* q : {&a, &b})
                    if (on_segment(*q, c, d)) record(i, *q);
                break;
            }
            }
        }
    }
    CrossingResult r;
    if (hits.empty()) return r;
    std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.seg != y.seg ? x.seg < y.seg : x.t < y.t; });
    for (const auto& h : hits)
        if (r.points.empty() || r.points.back() != h.p) r.points.push_back(h.p);
    r.kind = overlap ? CrossingResult::Kind::Overlap
                     : r.points.size() == 1 ? CrossingResult::Kind::Point : CrossingResult::Kind::Points;
    r.last_segment = hits.back().seg;
    r.last_param = hits.back().t;
    r.last = hits.back().p;
    return r;
}

// ---------------------------------------------------------------------------------------------
// Linearization

BoundaryMap delta_linearize(const BoundaryMap& psi, std::span<const Arc> arcs, double delta, bool check_injectivity) {
    if (!psi.is_closed()) fail(ErrorKind::PreconditionViolated, "delta_linearize needs a closed curve");
    const Loop nodes = psi.loop();
    const std::size_t n = nodes.size();
    std::vector<char> corner(n, 0);
    {
        std::size_t k = 0;
        for (std::size_t e = 0; e < psi.edge_count(); ++e) {
            corner[k] = 1;
            k += psi.breakpoints(e).size() - 1;
        }
    }
    std::vector<char> dropped(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> chords;
    for (const auto& arc : arcs) {
        if (arc.from >= n || arc.to >= n || arc.from == arc.to)
            fail(ErrorKind::NotDeltaLinearization, "invalid arc");
        Interval len = Interval::point(0.0);
        for (std::size_t k = arc.from; k != arc.to; k = (k + 1) % n) {
            len += Interval::sqrt_of(dist2(nodes[k].img, nodes[(k + 1) % n].img));
            const std::size_t inner = (k + 1) % n;
            if (inner == arc.to) break;
            if (corner[inner]) fail(ErrorKind::PreconditionViolated, "arc contains a source corner");
            if (dropped[inner]) fail(ErrorKind::NotDeltaLinearization, "arcs overlap");
            dropped[inner] = 1;
        }
        if (!(len.hi < delta)) fail(ErrorKind::NotDeltaLinearization, "arc length not below delta");
        chords.emplace_back(arc.from, arc.to);
    }
    Loop kept;
    for (std::size_t k = 0; k < n; ++k)
        if (!dropped[k]) kept.push_back(nodes[k]);
    BoundaryMap phi = BoundaryMap::from_loop(kept);
    if (check_injectivity) {
        try {
            validate_injective(phi);
        } catch (const Error& e) {
            fail(ErrorKind::NotDeltaLinearization, std::string("linearized curve not injective: ") + e.what());
        }
    }
    // Third condition: an arc meets the linearized curve only on its own chord.
    const Loop out = phi.loop();
    const std::size_t m = out.size();
    for (const auto& [from, to] : chords) {
        const Point& a = nodes[from].img;
        const Point& b = nodes[to].img;
        for (std::size_t k = from; k != to; k = (k + 1) % n) {
            const Point& p = nodes[k].img;
            const Point& q = nodes[(k + 1) % n].img;
            const Box box = Box::of(p, q);
            for (std::size_t s = 0; s < m; ++s) {
                const Point& c = out[s].img;
                const Point& d = out[(s + 1) % m].img;
                if ((c == a && d == b) || !box.overlaps(Box::of(c, d))) continue;
                const auto contact = crossing(std::vector<Point>{p, q}, std::vector<Point>{c, d});
                for (const auto& x : contact.points)
                    if (!on_segment(x, a, b))
                        fail(ErrorKind::NotDeltaLinearization, "arc meets the linearized curve off its chord");
                if (contact.kind == CrossingResult::Kind::Overlap && !(on_segment(c, a, b) && on_segment(d, a, b)))
                    fail(ErrorKind::NotDeltaLinearization, "arc overlaps the linearized curve off its chord");
            }
        }
    }
    return phi;
}

} // namespace minext
