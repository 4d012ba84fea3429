#include "minext/mesh.hpp"

#include "minext/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace minext {

namespace {

std::string str(const Point& p) { return "(" + to_string(p.x) + ", " + to_string(p.y) + ")"; }

std::string edge_str(std::size_t a, std::size_t b) { return std::to_string(a) + "-" + std::to_string(b); }

void flag(MeshCheck& c, const std::string& witness) {
    if (!c.ok) return;
    c.ok = false;
    c.witness = witness;
}

std::vector<Point> loop_images(const BoundaryMap& phi) {
    std::vector<Point> out;
    for (const auto& n : phi.loop()) out.push_back(n.img);
    return out;
}

std::vector<Point> loop_preimages(const BoundaryMap& phi) {
    std::vector<Point> out;
    for (const auto& n : phi.loop()) out.push_back(n.pre);
    return out;
}

} // namespace

Jacobian jacobian(const Node& a, const Node& b, const Node& c) {
    const Point p1 = b.pre - a.pre, p2 = c.pre - a.pre;
    const Point q1 = b.img - a.img, q2 = c.img - a.img;
    const Rational det = cross(p1, p2);
    if (det == 0) fail(ErrorKind::InvalidMesh, "degenerate preimage triangle");
    // M [p1 p2] = [q1 q2]  =>  M = [q1 q2] [p1 p2]^{-1}
    const Rational i00 = p2.y / det, i01 = -p2.x / det, i10 = -p1.y / det, i11 = p1.x / det;
    return {q1.x * i00 + q2.x * i10, q1.x * i01 + q2.x * i11, q1.y * i00 + q2.y * i10, q1.y * i01 + q2.y * i11};
}

Point affine_image(const Node& a, const Node& b, const Node& c, const Point& p) {
    return a.img + jacobian(a, b, c).apply(p - a.pre);
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const MeshCheck& c) { return c.ok; });
}

const MeshCheck& VerificationReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    fail(ErrorKind::Internal, "no mesh check named " + name);
}

VerificationReport verify_mesh(const AffineMesh& mesh, const BoundaryMap& phi) {
    VerificationReport rep;
    MeshCheck tiling{"tiling", true, {}}, orientation{"orientation", true, {}}, image_orientation{"image_orientation", true, {}},
        continuity{"continuity", true, {}}, boundary_trace{"boundary_trace", true, {}}, image_area{"image_area", true, {}};
    const auto& V = mesh.vertices;
    const auto& T = mesh.triangles;
    const std::size_t nv = V.size();

    const std::vector<Point> domain = loop_preimages(phi);
    const std::vector<Point> target = loop_images(phi);
    const Rational dom2 = signed_area2(domain), img2 = signed_area2(target);
    const int expected = sgn(dom2) * sgn(img2);
    rep.image_sign = expected;
    const std::vector<Point> corners = phi.corners();
    const std::size_t nc = corners.size();

    bool indices_ok = true;
    for (std::size_t k = 0; k < T.size(); ++k)
        for (std::size_t v : T[k])
            if (v >= nv) {
                flag(continuity, "triangle " + std::to_string(k) + " references missing vertex " + std::to_string(v));
                indices_ok = false;
            }
    if (T.empty()) flag(tiling, "mesh has no triangles");

    std::vector<char> used(nv, 0);
    if (indices_ok)
        for (const auto& t : T)
            for (std::size_t v : t) used[v] = 1;

    {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < nv; ++i)
            if (used[i]) order.push_back(i);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return PointLess{}(V[a].pre, V[b].pre); });
        for (std::size_t k = 1; k < order.size(); ++k)
            if (V[order[k]].pre == V[order[k - 1]].pre)
                flag(continuity, "vertices " + std::to_string(order[k - 1]) + " and " + std::to_string(order[k]) +
                                     " share preimage " + str(V[order[k]].pre));
    }

    Rational pre_sum, img_sum;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> directed;
    if (indices_ok) {
        for (std::size_t k = 0; k < T.size(); ++k) {
            const auto& t = T[k];
            const int o = orient(V[t[0]].pre, V[t[1]].pre, V[t[2]].pre);
            if (o <= 0) flag(orientation, "triangle " + std::to_string(k));
            const int oi = orient(V[t[0]].img, V[t[1]].img, V[t[2]].img);
            if (oi == 0) flag(image_orientation, "triangle " + std::to_string(k) + " has a degenerate image");
            else if (oi != expected) flag(image_orientation, "triangle " + std::to_string(k));
            const std::array<Point, 3> p{V[t[0]].pre, V[t[1]].pre, V[t[2]].pre};
            const std::array<Point, 3> q{V[t[0]].img, V[t[1]].img, V[t[2]].img};
            pre_sum += signed_area2(p);
            img_sum += signed_area2(q);
            for (int e = 0; e < 3; ++e) {
                const auto key = std::make_pair(t[e], t[(e + 1) % 3]);
                if (!directed.emplace(key, k).second)
                    flag(continuity, "edge " + edge_str(key.first, key.second) + " used twice in one direction");
            }
        }
    }
    rep.preimage_area = pre_sum / 2;
    rep.image_area = img_sum / 2;
    if (pre_sum != abs(dom2))
        flag(tiling, "triangle areas sum to " + to_string(pre_sum / 2) + " instead of " + to_string(abs(dom2) / 2));
    if (img_sum != Rational(expected * abs(img2)))
        flag(image_area, "image areas sum to " + to_string(img_sum / 2) + " instead of " +
                             to_string(Rational(expected * abs(img2)) / 2));

    // Free edges must lie on the domain boundary and cover it exactly once.
    std::vector<std::vector<std::pair<Rational, Rational>>> cover(nc);
    std::vector<std::vector<Rational>> cover_points(nc);
    for (const auto& [key, tri] : directed) {
        if (directed.count({key.second, key.first})) continue;
        const Point& a = V[key.first].pre;
        const Point& b = V[key.second].pre;
        bool placed = false;
        for (std::size_t e = 0; e < nc && !placed; ++e) {
            const Point& c0 = corners[e];
            const Point& c1 = corners[(e + 1) % nc];
            if (on_segment(a, c0, c1) && on_segment(b, c0, c1)) {
                Rational ta = param_on(a, c0, c1), tb = param_on(b, c0, c1);
                if (ta > tb) std::swap(ta, tb);
                cover[e].emplace_back(ta, tb);
                placed = true;
            }
        }
        if (!placed) flag(tiling, "free edge " + edge_str(key.first, key.second) + " at " + str(a) + " inside the domain");
    }
    for (std::size_t e = 0; e < nc; ++e) {
        auto& c = cover[e];
        std::sort(c.begin(), c.end());
        Rational at(0);
        for (const auto& [ta, tb] : c) {
            if (ta != at) {
                flag(tiling, "domain edge " + std::to_string(e) + " covered irregularly near t=" + to_string(at));
                break;
            }
            at = tb;
            cover_points[e].push_back(ta);
        }
        if (at != 1) flag(tiling, "domain edge " + std::to_string(e) + " not covered beyond t=" + to_string(at));
        cover_points[e].push_back(Rational(1));
    }

    // Boundary values: vertices on the boundary carry phi, and phi is linear along every free edge.
    for (std::size_t i = 0; i < nv; ++i) {
        if (!used[i]) continue;
        const auto sp = phi.find(V[i].pre);
        if (!sp) continue;
        if (phi.eval(*sp) != V[i].img) flag(boundary_trace, "vertex " + std::to_string(i) + " at " + str(V[i].pre));
    }
    for (std::size_t e = 0; e < nc && e < phi.edge_count(); ++e) {
        const auto& pts = cover_points[e];
        for (const auto& bp : phi.breakpoints(e))
            if (!std::binary_search(pts.begin(), pts.end(), bp.t))
                flag(boundary_trace, "breakpoint " + str(lerp(corners[e], corners[(e + 1) % nc], bp.t)) +
                                         " inside a boundary edge");
    }

    rep.checks = {tiling, orientation, image_orientation, continuity, boundary_trace, image_area};
    return rep;
}

AffineMesh merge_meshes(std::span<const AffineMesh> parts, BoundaryMap trace) {
    AffineMesh out;
    out.trace = std::move(trace);
    std::map<Point, std::size_t, PointLess> index;
    for (const auto& part : parts) {
        std::vector<std::size_t> remap(part.vertices.size());
        for (std::size_t i = 0; i < part.vertices.size(); ++i) {
            const Node& n = part.vertices[i];
            auto [it, inserted] = index.emplace(n.pre, out.vertices.size());
            if (inserted) out.vertices.push_back(n);
            else if (out.vertices[it->second].img != n.img)
                fail(ErrorKind::Internal, "pieces disagree at " + str(n.pre));
            remap[i] = it->second;
        }
        for (const auto& t : part.triangles) out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    }

    // Hanging vertices: a vertex strictly inside a free edge of some triangle.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> directed;
    for (std::size_t k = 0; k < out.triangles.size(); ++k)
        for (int e = 0; e < 3; ++e) directed[{out.triangles[k][e], out.triangles[k][(e + 1) % 3]}] = k;
    std::vector<std::size_t> by_x(out.vertices.size());
    for (std::size_t i = 0; i < by_x.size(); ++i) by_x[i] = i;
    std::sort(by_x.begin(), by_x.end(),
              [&](std::size_t a, std::size_t b) { return PointLess{}(out.vertices[a].pre, out.vertices[b].pre); });

    std::map<std::size_t, std::vector<std::vector<std::size_t>>> hanging;  // triangle -> per-edge points
    for (const auto& [key, tri] : directed) {
        if (directed.count({key.second, key.first})) continue;
        const Point& a = out.vertices[key.first].pre;
        const Point& b = out.vertices[key.second].pre;
        const Rational& lo = std::min(a.x, b.x);
        const Rational& hi = std::max(a.x, b.x);
        auto it = std::lower_bound(by_x.begin(), by_x.end(), lo,
                                   [&](std::size_t v, const Rational& x) { return out.vertices[v].pre.x < x; });
        std::vector<std::pair<Rational, std::size_t>> inside;
        for (; it != by_x.end() && out.vertices[*it].pre.x <= hi; ++it)
            if (strictly_inside_segment(out.vertices[*it].pre, a, b))
                inside.emplace_back(param_on(out.vertices[*it].pre, a, b), *it);
        if (inside.empty()) continue;
        std::sort(inside.begin(), inside.end());
        auto& slots = hanging[tri];
        if (slots.empty()) slots.resize(3);
        const auto& t = out.triangles[tri];
        const int e = t[0] == key.first ? 0 : t[1] == key.first ? 1 : 2;
        for (const auto& [param, v] : inside) slots[e].push_back(v);
    }
    if (hanging.empty()) return out;

    std::vector<Triangle> kept;
    for (std::size_t k = 0; k < out.triangles.size(); ++k) {
        auto h = hanging.find(k);
        if (h == hanging.end()) {
            kept.push_back(out.triangles[k]);
            continue;
        }
        const auto t = out.triangles[k];
        const Node a = out.vertices[t[0]], b = out.vertices[t[1]], c = out.vertices[t[2]];
        std::vector<std::size_t> ring;
        for (int e = 0; e < 3; ++e) {
            ring.push_back(t[e]);
            for (std::size_t v : h->second[e]) {
                if (affine_image(a, b, c, out.vertices[v].pre) != out.vertices[v].img)
                    fail(ErrorKind::Internal, "hanging vertex " + str(out.vertices[v].pre) + " breaks continuity");
                ring.push_back(v);
            }
        }
        const Point centre{(a.pre.x + b.pre.x + c.pre.x) / 3, (a.pre.y + b.pre.y + c.pre.y) / 3};
        const std::size_t s = out.vertices.size();
        out.vertices.push_back({centre, affine_image(a, b, c, centre)});
        for (std::size_t r = 0; r < ring.size(); ++r) kept.push_back({s, ring[r], ring[(r + 1) % ring.size()]});
    }
    out.triangles = std::move(kept);
    return out;
}

AffineMesh map_preimages(const AffineMesh& mesh, const Direction& dir, bool to_frame) {
    auto move = [&](const Point& p) { return to_frame ? dir.to_frame(p) : dir.from_frame(p); };
    AffineMesh out;
    out.triangles = mesh.triangles;
    for (const auto& n : mesh.vertices) out.vertices.push_back({move(n.pre), n.img});
    if (mesh.trace.edge_count() > 0) {
        Loop loop = mesh.trace.loop();
        for (auto& n : loop) n.pre = move(n.pre);
        out.trace = BoundaryMap::from_loop(loop);
    }
    return out;
}

} // namespace minext
