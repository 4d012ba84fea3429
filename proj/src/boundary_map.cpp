#include "minext/boundary_map.hpp"

#include "minext/errors.hpp"

#include <algorithm>

namespace minext {

Rational param_on(const Point& p, const Point& a, const Point& b) {
    if (a.x != b.x) return Rational((p.x - a.x) / (b.x - a.x));
    return Rational((p.y - a.y) / (b.y - a.y));
}

BoundaryMap BoundaryMap::closed(std::vector<Point> corners, std::vector<std::vector<Breakpoint>> per_edge) {
    BoundaryMap m;
    const std::size_t n = corners.size();
    if (n < 3 || per_edge.size() != n) fail(ErrorKind::Validation, "closed boundary map needs one breakpoint list per edge");
    for (std::size_t i = 0; i < n; ++i) m.edges_.push_back({corners[i], corners[(i + 1) % n]});
    m.pieces_ = std::move(per_edge);
    m.closed_ = true;
    m.check();
    return m;
}

BoundaryMap BoundaryMap::open(std::vector<Segment> edges, std::vector<std::vector<Breakpoint>> per_edge) {
    BoundaryMap m;
    if (edges.size() != per_edge.size()) fail(ErrorKind::Validation, "one breakpoint list per edge required");
    m.edges_ = std::move(edges);
    m.pieces_ = std::move(per_edge);
    m.check();
    return m;
}

BoundaryMap BoundaryMap::from_loop(std::span<const Node> loop) {
    const std::size_t n = loop.size();
    if (n < 3) fail(ErrorKind::Validation, "boundary loop needs at least 3 nodes");
    std::vector<std::size_t> corner_idx;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = loop[(i + n - 1) % n].pre;
        const Point& next = loop[(i + 1) % n].pre;
        if (!strictly_inside_segment(loop[i].pre, prev, next)) corner_idx.push_back(i);
    }
    if (corner_idx.size() < 3) fail(ErrorKind::Degenerate, "boundary loop preimage is degenerate");
    std::vector<Point> corners;
    std::vector<std::vector<Breakpoint>> pieces;
    for (std::size_t c = 0; c < corner_idx.size(); ++c) {
        const std::size_t i0 = corner_idx[c], i1 = corner_idx[(c + 1) % corner_idx.size()];
        const Point& a = loop[i0].pre;
        const Point& b = loop[i1].pre;
        corners.push_back(a);
        std::vector<Breakpoint> bp;
        for (std::size_t k = i0;; k = (k + 1) % n) {
            bp.push_back({k == i0 ? Rational(0) : k == i1 ? Rational(1) : param_on(loop[k].pre, a, b), loop[k].img});
            if (k == i1) break;
        }
        pieces.push_back(std::move(bp));
    }
    return closed(std::move(corners), std::move(pieces));
}

BoundaryMap BoundaryMap::along_segment(std::span<const Node> path) {
    if (path.size() < 2) fail(ErrorKind::Validation, "segment map needs two nodes");
    const Point& a = path.front().pre;
    const Point& b = path.back().pre;
    std::vector<Breakpoint> bp;
    for (std::size_t k = 0; k < path.size(); ++k)
        bp.push_back({k == 0 ? Rational(0) : k + 1 == path.size() ? Rational(1) : param_on(path[k].pre, a, b),
                      path[k].img});
    return open({{a, b}}, {std::move(bp)});
}

void BoundaryMap::check() const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& bp = pieces_[e];
        if (edges_[e].a == edges_[e].b) fail(ErrorKind::Degenerate, "zero-length skeleton edge");
        if (bp.size() < 2 || bp.front().t != 0 || bp.back().t != 1)
            fail(ErrorKind::Validation, "edge " + std::to_string(e) + " must have breakpoints at t=0 and t=1");
        for (std::size_t k = 1; k < bp.size(); ++k)
            if (!(bp[k - 1].t < bp[k].t))
                fail(ErrorKind::Validation, "breakpoints on edge " + std::to_string(e) + " not increasing");
        if (closed_ && bp.back().image != pieces_[(e + 1) % edges_.size()].front().image)
            fail(ErrorKind::Validation, "boundary map discontinuous at corner " + std::to_string((e + 1) % edges_.size()));
    }
}

std::vector<Point> BoundaryMap::corners() const {
    std::vector<Point> c;
    for (const auto& e : edges_) c.push_back(e.a);
    return c;
}

SkeletonPoint BoundaryMap::canonical(SkeletonPoint p) const {
    if (p.edge >= edges_.size() || p.t < 0 || p.t > 1) fail(ErrorKind::NotOnSkeleton, "skeleton point out of range");
    if (closed_ && p.t == 1) return {(p.edge + 1) % edges_.size(), Rational(0)};
    return p;
}

Point BoundaryMap::preimage(const SkeletonPoint& p) const {
    if (p.edge >= edges_.size()) fail(ErrorKind::NotOnSkeleton, "no such edge");
    return lerp(edges_[p.edge].a, edges_[p.edge].b, p.t);
}

Point BoundaryMap::eval(const SkeletonPoint& p) const {
    if (p.edge >= edges_.size() || p.t < 0 || p.t > 1) fail(ErrorKind::NotOnSkeleton, "skeleton point out of range");
    const auto& bp = pieces_[p.edge];
    auto it = std::lower_bound(bp.begin(), bp.end(), p.t, [](const Breakpoint& b, const Rational& t) { return b.t < t; });
    if (it->t == p.t) return it->image;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lerp(lo.image, hi.image, (p.t - lo.t) / (hi.t - lo.t));
}

std::optional<SkeletonPoint> BoundaryMap::find(const Point& pre) const {
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (minext::on_segment(pre, edges_[e].a, edges_[e].b))
            return canonical({e, param_on(pre, edges_[e].a, edges_[e].b)});
    return std::nullopt;
}

Point BoundaryMap::eval_at(const Point& pre) const {
    auto sp = find(pre);
    if (!sp) fail(ErrorKind::NotOnSkeleton, "point not on skeleton");
    return eval(*sp);
}

BoundaryMap BoundaryMap::insert_breakpoints(std::span<const SkeletonPoint> points) const {
    BoundaryMap m = *this;
    for (const auto& raw : points) {
        const SkeletonPoint p = canonical(raw);
        auto& bp = m.pieces_[p.edge];
        auto it = std::lower_bound(bp.begin(), bp.end(), p.t, [](const Breakpoint& b, const Rational& t) { return b.t < t; });
        if (it != bp.end() && it->t == p.t) continue;
        const Point img = m.eval(p);
        bp.insert(it, Breakpoint{p.t, img});
    }
    return m;
}

BoundaryMap BoundaryMap::restrict(std::span<const std::size_t> edges) const {
    std::vector<std::size_t> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty()) fail(ErrorKind::NotSubSkeleton, "empty sub-skeleton");
    for (auto e : sorted)
        if (e >= edges_.size()) fail(ErrorKind::NotSubSkeleton, "edge " + std::to_string(e) + " not in skeleton");
    if (closed_ && sorted.size() == edges_.size()) return *this;
    std::vector<Segment> segs;
    std::vector<std::vector<Breakpoint>> pcs;
    for (auto e : sorted) {
        segs.push_back(edges_[e]);
        pcs.push_back(pieces_[e]);
    }
    return open(std::move(segs), std::move(pcs));
}

BoundaryMap BoundaryMap::restrict(const Point& p, const Point& q) const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [a, b] = edges_[e];
        if (!minext::on_segment(p, a, b) || !minext::on_segment(q, a, b)) continue;
        Rational tp = param_on(p, a, b), tq = param_on(q, a, b);
        if (tp == tq) {
            // Degenerate restriction: constant map, evaluation only.
            const Point img = eval({e, tp});
            BoundaryMap m;
            m.edges_.push_back({p, p});
            m.pieces_.push_back({{Rational(0), img}, {Rational(1), img}});
            return m;
        }
        const bool forward = tp < tq;
        const Rational lo = forward ? tp : tq, hi = forward ? tq : tp;
        std::vector<Breakpoint> bp{{Rational(0), eval({e, tp})}};
        std::vector<Breakpoint> inner;
        for (const auto& b0 : pieces_[e])
            if (lo < b0.t && b0.t < hi) inner.push_back({(b0.t - tp) / (tq - tp), b0.image});
        if (!forward) std::reverse(inner.begin(), inner.end());
        bp.insert(bp.end(), inner.begin(), inner.end());
        bp.push_back({Rational(1), eval({e, tq})});
        return open({{p, q}}, {std::move(bp)});
    }
    fail(ErrorKind::NotSubSkeleton, "segment is not contained in a single skeleton edge");
}

Loop BoundaryMap::path(std::size_t e) const {
    Loop out;
    for (const auto& b : pieces_.at(e)) out.push_back({lerp(edges_[e].a, edges_[e].b, b.t), b.image});
    return out;
}

Loop BoundaryMap::loop() const {
    Loop out;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto p = path(e);
        if (closed_) p.pop_back();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

double BoundaryMap::image_length() const {
    double s = 0;
    for (const auto& bp : pieces_)
        for (std::size_t k = 1; k < bp.size(); ++k) s += length(bp[k - 1].image, bp[k].image);
    return s;
}

double BoundaryMap::preimage_length() const {
    double s = 0;
    for (const auto& e : edges_) s += length(e.a, e.b);
    return s;
}

ImagePolygon validate_injective(std::span<const Node> loop) {
    std::vector<Point> img;
    for (const auto& n : loop) img.push_back(n.img);
    PolygonReport rep;
    try {
        rep = validate_polygon(img);
    } catch (const Error& e) {
        fail(ErrorKind::NotInjective, std::string("boundary map not injective (") + e.what() + ")");
    }
    ImagePolygon out;
    out.reversed = rep.was_clockwise;
    if (out.reversed) std::reverse(img.begin(), img.end());
    out.polygon = SimplePolygon::trusted(std::move(img));
    return out;
}

ImagePolygon validate_injective(const BoundaryMap& phi) {
    if (!phi.is_closed()) fail(ErrorKind::Validation, "validate_injective needs a closed boundary map");
    auto loop = phi.loop();
    ImagePolygon out = validate_injective(std::span<const Node>(loop));
    for (std::size_t e = 0; e < phi.edge_count(); ++e) {
        const auto& bp = phi.breakpoints(e);
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) out.correspondence.push_back({e, bp[k].t});
    }
    if (out.reversed) std::reverse(out.correspondence.begin(), out.correspondence.end());
    return out;
}

} // namespace minext
