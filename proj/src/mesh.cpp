// Copyright (c) the deramg developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "deramg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace deramg
{

namespace
{

inline Point sub(const Point& a, const Point& b)
{
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point cross(const Point& a, const Point& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double dot3(const Point& a, const Point& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double tet_det(const Point& p0, const Point& p1, const Point& p2,
                      const Point& p3)
{
    return dot3(cross(sub(p1, p0), sub(p2, p0)), sub(p3, p0));
}

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 4>> elements,
           std::vector<int> element_attributes,
           const std::vector<std::array<int, 3>>& boundary_facets,
           const std::vector<int>& boundary_attributes)
    : vertices_(std::move(vertices)), elements_(std::move(elements)),
      element_attr_(std::move(element_attributes))
{
    DERAMG_REQUIRE(elements_.size() == element_attr_.size(), TopologyError,
                   "element/attribute count mismatch");
    const int nv = n_vertices();
    for (auto& el : elements_)
    {
        for (const int v : el)
            DERAMG_REQUIRE(v >= 0 && v < nv, TopologyError,
                           "element vertex id out of range");
        std::sort(el.begin(), el.end());
        DERAMG_REQUIRE(el[0] != el[1] && el[1] != el[2] && el[2] != el[3],
                       TopologyError, "degenerate element (repeated vertex)");
        double det = tet_det(vertices_[el[0]], vertices_[el[1]], vertices_[el[2]],
                             vertices_[el[3]]);
        if (det < 0.0)
        {
            std::swap(el[2], el[3]);
            det = -det;
        }
        DERAMG_REQUIRE(det > 0.0, TopologyError, "degenerate element (zero volume)");
        volumes_.push_back(det / 6.0);
    }
    for (const int a : element_attr_)
        DERAMG_REQUIRE(a >= 1, TopologyError, "element attribute must be positive");

    // Derived edges, lexicographic ids.
    {
        std::vector<std::array<int, 2>> all;
        all.reserve(elements_.size() * 6);
        for (const auto& el : elements_)
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b)
                    all.push_back({std::min(el[a], el[b]), std::max(el[a], el[b])});
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        edges_ = std::move(all);
    }

    // Derived facets, lexicographic ids.
    {
        std::vector<std::array<int, 3>> all;
        all.reserve(elements_.size() * 4);
        for (const auto& el : elements_)
            for (int skip = 0; skip < 4; ++skip)
            {
                std::array<int, 3> f;
                int k = 0;
                for (int a = 0; a < 4; ++a)
                    if (a != skip)
                        f[k++] = el[a];
                std::sort(f.begin(), f.end());
                all.push_back(f);
            }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        facets_ = std::move(all);
    }

    facet_elements_.assign(facets_.size(),
                           {std::pair<int, int>{-1, 0}, std::pair<int, int>{-1, 0}});
    element_facets_.resize(elements_.size());
    for (int e = 0; e < n_elements(); ++e)
    {
        const auto& el = elements_[e];
        for (int skip = 0; skip < 4; ++skip)
        {
            std::array<int, 3> f;
            int k = 0;
            for (int a = 0; a < 4; ++a)
                if (a != skip)
                    f[k++] = el[a];
            std::sort(f.begin(), f.end());
            const int fid = facet_id(f[0], f[1], f[2]);
            element_facets_[e][skip] = fid;

            // +1 when the canonical normal points away from the skipped vertex.
            const Point n = cross(sub(vertices_[f[1]], vertices_[f[0]]),
                                  sub(vertices_[f[2]], vertices_[f[0]]));
            const double side = dot3(n, sub(vertices_[el[skip]], vertices_[f[0]]));
            const int sign = side < 0.0 ? 1 : -1;

            auto& slots = facet_elements_[fid];
            if (slots[0].first < 0)
                slots[0] = {e, sign};
            else if (slots[1].first < 0)
                slots[1] = {e, sign};
            else
                throw TopologyError("facet shared by more than two elements");
        }
    }

    facet_attr_.assign(facets_.size(), 0);
    for (int f = 0; f < n_facets(); ++f)
        if (facet_elements_[f][1].first < 0)
            facet_attr_[f] = 1; // default boundary attribute

    for (std::size_t i = 0; i < boundary_facets.size(); ++i)
    {
        auto t = boundary_facets[i];
        std::sort(t.begin(), t.end());
        const int fid = facet_id(t[0], t[1], t[2]);
        DERAMG_REQUIRE(fid >= 0, TopologyError, "boundary facet not in the mesh");
        DERAMG_REQUIRE(facet_elements_[fid][1].first < 0, TopologyError,
                       "listed boundary facet is interior");
        const int attr = i < boundary_attributes.size() ? boundary_attributes[i] : 1;
        DERAMG_REQUIRE(attr >= 1, TopologyError, "boundary attribute must be positive");
        facet_attr_[fid] = attr;
    }
}

Point Mesh::element_centroid(int e) const
{
    const auto& el = elements_[e];
    Point c = {0, 0, 0};
    for (const int v : el)
        for (int d = 0; d < 3; ++d)
            c[d] += vertices_[v][d] * 0.25;
    return c;
}

double Mesh::facet_area(int f) const
{
    const auto& t = facets_[f];
    const Point n = cross(sub(vertices_[t[1]], vertices_[t[0]]),
                          sub(vertices_[t[2]], vertices_[t[0]]));
    return 0.5 * std::sqrt(dot3(n, n));
}

Point Mesh::facet_normal(int f) const
{
    const auto& t = facets_[f];
    Point n = cross(sub(vertices_[t[1]], vertices_[t[0]]),
                    sub(vertices_[t[2]], vertices_[t[0]]));
    const double len = std::sqrt(dot3(n, n));
    return {n[0] / len, n[1] / len, n[2] / len};
}

double Mesh::edge_length(int e) const
{
    const auto& p = edges_[e];
    const Point d = sub(vertices_[p[1]], vertices_[p[0]]);
    return std::sqrt(dot3(d, d));
}

int Mesh::edge_id(int a, int b) const
{
    std::array<int, 2> key = {std::min(a, b), std::max(a, b)};
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    return (it != edges_.end() && *it == key)
               ? static_cast<int>(it - edges_.begin())
               : -1;
}

int Mesh::facet_id(int a, int b, int c) const
{
    std::array<int, 3> key = {a, b, c};
    std::sort(key.begin(), key.end());
    const auto it = std::lower_bound(facets_.begin(), facets_.end(), key);
    return (it != facets_.end() && *it == key)
               ? static_cast<int>(it - facets_.begin())
               : -1;
}

namespace
{

struct TokenStream
{
    explicit TokenStream(std::istream& in) : in_(in) {}

    bool next(std::string& tok)
    {
        while (true)
        {
            if (pos_ >= line_tokens_.size())
            {
                std::string line;
                if (!std::getline(in_, line))
                    return false;
                ++lineno_;
                const auto hash = line.find('#');
                if (hash != std::string::npos)
                    line.resize(hash);
                line_tokens_.clear();
                pos_ = 0;
                std::istringstream ls(line);
                std::string t;
                while (ls >> t)
                    line_tokens_.push_back(t);
                continue;
            }
            tok = line_tokens_[pos_++];
            return true;
        }
    }

    int expect_int(const char* what)
    {
        std::string t;
        if (!next(t))
            throw ParseError(std::string("unexpected end of input, expected ") + what,
                             lineno_);
        try
        {
            std::size_t used = 0;
            const int v = std::stoi(t, &used);
            if (used != t.size())
                throw std::invalid_argument(t);
            return v;
        }
        catch (const std::exception&)
        {
            throw ParseError(std::string("expected integer ") + what + ", got '" + t +
                                 "'",
                             lineno_);
        }
    }

    double expect_real(const char* what)
    {
        std::string t;
        if (!next(t))
            throw ParseError(std::string("unexpected end of input, expected ") + what,
                             lineno_);
        try
        {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size())
                throw std::invalid_argument(t);
            return v;
        }
        catch (const std::exception&)
        {
            throw ParseError(std::string("expected number ") + what + ", got '" + t +
                                 "'",
                             lineno_);
        }
    }

    void expect_keyword(const char* kw)
    {
        std::string t;
        if (!next(t) || t != kw)
            throw ParseError(std::string("expected '") + kw + "'", lineno_);
    }

    int line() const { return lineno_; }

private:
    std::istream& in_;
    std::vector<std::string> line_tokens_;
    std::size_t pos_ = 0;
    int lineno_ = 0;
};

} // namespace

Mesh parse_mesh(std::istream& in)
{
    TokenStream ts(in);
    ts.expect_keyword("amge-mesh");
    ts.expect_keyword("v1");
    ts.expect_keyword("dim");
    const int dim = ts.expect_int("dimension");
    if (dim != 3)
        throw ParseError("only dim 3 is supported", ts.line());

    ts.expect_keyword("vertices");
    const int nv = ts.expect_int("vertex count");
    if (nv < 0)
        throw ParseError("negative vertex count", ts.line());
    std::vector<Point> verts(nv);
    for (int i = 0; i < nv; ++i)
        for (int d = 0; d < 3; ++d)
            verts[i][d] = ts.expect_real("coordinate");

    ts.expect_keyword("elements");
    const int ne = ts.expect_int("element count");
    if (ne < 0)
        throw ParseError("negative element count", ts.line());
    std::vector<std::array<int, 4>> elems(ne);
    std::vector<int> attrs(ne);
    for (int i = 0; i < ne; ++i)
    {
        attrs[i] = ts.expect_int("element attribute");
        if (attrs[i] < 1)
            throw ParseError("element attribute must be >= 1", ts.line());
        for (int k = 0; k < 4; ++k)
        {
            elems[i][k] = ts.expect_int("element vertex");
            if (elems[i][k] < 0 || elems[i][k] >= nv)
                throw ParseError("element vertex id out of range", ts.line());
        }
    }

    ts.expect_keyword("boundary");
    const int nb = ts.expect_int("boundary facet count");
    if (nb < 0)
        throw ParseError("negative boundary count", ts.line());
    std::vector<std::array<int, 3>> bdr(nb);
    std::vector<int> battr(nb);
    for (int i = 0; i < nb; ++i)
    {
        battr[i] = ts.expect_int("boundary attribute");
        if (battr[i] < 1)
            throw ParseError("boundary attribute must be >= 1", ts.line());
        for (int k = 0; k < 3; ++k)
        {
            bdr[i][k] = ts.expect_int("boundary vertex");
            if (bdr[i][k] < 0 || bdr[i][k] >= nv)
                throw ParseError("boundary vertex id out of range", ts.line());
        }
    }

    return Mesh(std::move(verts), std::move(elems), std::move(attrs), bdr, battr);
}

Mesh parse_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    DERAMG_REQUIRE(in.good(), Error, "cannot open mesh file " + path);
    return parse_mesh(in);
}

void write_mesh(const Mesh& m, std::ostream& out)
{
    out << "amge-mesh v1\n";
    out << "dim 3\n";
    out.precision(17);
    out << "vertices " << m.n_vertices() << '\n';
    for (const auto& p : m.vertices())
        out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    out << "elements " << m.n_elements() << '\n';
    for (int e = 0; e < m.n_elements(); ++e)
    {
        const auto& el = m.elements()[e];
        out << m.element_attribute(e) << ' ' << el[0] << ' ' << el[1] << ' ' << el[2]
            << ' ' << el[3] << '\n';
    }
    int nb = 0;
    for (int f = 0; f < m.n_facets(); ++f)
        if (m.facet_attribute(f) > 0)
            ++nb;
    out << "boundary " << nb << '\n';
    for (int f = 0; f < m.n_facets(); ++f)
        if (m.facet_attribute(f) > 0)
        {
            const auto& t = m.facets()[f];
            out << m.facet_attribute(f) << ' ' << t[0] << ' ' << t[1] << ' ' << t[2]
                << '\n';
        }
}

Mesh generate_cube_mesh(int n)
{
    DERAMG_REQUIRE(n >= 1, Error, "cube subdivision count must be >= 1");
    const int s = n + 1;
    auto vid = [s](int i, int j, int k) { return i + s * (j + s * k); };

    std::vector<Point> verts(static_cast<std::size_t>(s) * s * s);
    for (int k = 0; k < s; ++k)
        for (int j = 0; j < s; ++j)
            for (int i = 0; i < s; ++i)
                verts[vid(i, j, k)] = {double(i) / n, double(j) / n, double(k) / n};

    // The six Kuhn tetrahedra of a subcube share the main diagonal, one per
    // axis permutation, so neighbouring subcubes match faces exactly.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<std::array<int, 4>> elems;
    elems.reserve(static_cast<std::size_t>(n) * n * n * 6);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (const auto& p : perms)
                {
                    int c[3] = {i, j, k};
                    std::array<int, 4> tet;
                    tet[0] = vid(c[0], c[1], c[2]);
                    ++c[p[0]];
                    tet[1] = vid(c[0], c[1], c[2]);
                    ++c[p[1]];
                    tet[2] = vid(c[0], c[1], c[2]);
                    ++c[p[2]];
                    tet[3] = vid(c[0], c[1], c[2]);
                    elems.push_back(tet);
                }

    std::vector<int> attrs(elems.size(), 1);
    return Mesh(std::move(verts), std::move(elems), std::move(attrs));
}

Mesh uniform_refine(const Mesh& m)
{
    std::vector<Point> verts = m.vertices();
    verts.reserve(verts.size() + m.n_edges());
    const int nv0 = m.n_vertices();
    // midpoint vertex of edge e gets id nv0 + e
    for (int e = 0; e < m.n_edges(); ++e)
    {
        const auto& pr = m.edges()[e];
        const Point& a = m.vertices()[pr[0]];
        const Point& b = m.vertices()[pr[1]];
        verts.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]),
                         0.5 * (a[2] + b[2])});
    }
    auto mid = [&](int a, int b) { return nv0 + m.edge_id(a, b); };

    std::vector<std::array<int, 4>> elems;
    std::vector<int> attrs;
    elems.reserve(m.n_elements() * 8);
    attrs.reserve(m.n_elements() * 8);
    for (int e = 0; e < m.n_elements(); ++e)
    {
        const auto& t = m.elements()[e];
        const int v0 = t[0], v1 = t[1], v2 = t[2], v3 = t[3];
        const int m01 = mid(v0, v1), m02 = mid(v0, v2), m03 = mid(v0, v3);
        const int m12 = mid(v1, v2), m13 = mid(v1, v3), m23 = mid(v2, v3);
        const std::array<std::array<int, 4>, 8> kids = {{
            {v0, m01, m02, m03},
            {m01, v1, m12, m13},
            {m02, m12, v2, m23},
            {m03, m13, m23, v3},
            // interior octahedron, fixed diagonal m02-m13
            {m01, m02, m03, m13},
            {m01, m02, m12, m13},
            {m02, m03, m13, m23},
            {m02, m12, m13, m23},
        }};
        for (const auto& kid : kids)
        {
            elems.push_back(kid);
            attrs.push_back(m.element_attribute(e));
        }
    }

    std::vector<std::array<int, 3>> bdr;
    std::vector<int> battr;
    for (int f = 0; f < m.n_facets(); ++f)
    {
        const int attr = m.facet_attribute(f);
        if (attr == 0)
            continue;
        const auto& t = m.facets()[f];
        const int a = t[0], b = t[1], c = t[2];
        const int ab = mid(a, b), ac = mid(a, c), bc = mid(b, c);
        for (const auto& kid : {std::array<int, 3>{a, ab, ac},
                                std::array<int, 3>{ab, b, bc},
                                std::array<int, 3>{ac, bc, c},
                                std::array<int, 3>{ab, bc, ac}})
        {
            bdr.push_back(kid);
            battr.push_back(attr);
        }
    }

    return Mesh(std::move(verts), std::move(elems), std::move(attrs), bdr, battr);
}

Mesh assign_attribute_by_region(const Mesh& m,
                                const std::function<bool(const Point&)>& predicate,
                                int attribute)
{
    DERAMG_REQUIRE(attribute >= 1, Error, "attribute must be positive");
    std::vector<int> attrs(m.n_elements());
    for (int e = 0; e < m.n_elements(); ++e)
        attrs[e] =
            predicate(m.element_centroid(e)) ? attribute : m.element_attribute(e);

    std::vector<std::array<int, 3>> bdr;
    std::vector<int> battr;
    for (int f = 0; f < m.n_facets(); ++f)
        if (m.facet_attribute(f) > 0)
        {
            bdr.push_back(m.facets()[f]);
            battr.push_back(m.facet_attribute(f));
        }
    return Mesh(m.vertices(), m.elements(), std::move(attrs), bdr, battr);
}

} // namespace deramg
