#include "reebflow/mesh.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

namespace reebflow {

namespace {

double tri_area(const Point3& a, const Point3& b, const Point3& c)
{
    double u[3], v[3];
    for (int i = 0; i < 3; ++i) {
        u[i] = b[i] - a[i];
        v[i] = c[i] - a[i];
    }
    double x = u[1] * v[2] - u[2] * v[1];
    double y = u[2] * v[0] - u[0] * v[2];
    double z = u[0] * v[1] - u[1] * v[0];
    return 0.5 * std::sqrt(x * x + y * y + z * z);
}

std::pair<std::size_t, std::size_t> key(std::size_t a, std::size_t b)
{
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// true if the triangle traverses a -> b
bool has_directed(const Tri& t, std::size_t a, std::size_t b)
{
    for (int i = 0; i < 3; ++i)
        if (t[i] == a && t[(i + 1) % 3] == b)
            return true;
    return false;
}

}  // namespace

Mesh::Mesh(std::vector<Point3> xyz, std::vector<double> F, std::vector<Tri> tris, SurfaceInfo declared)
    : xyz_(std::move(xyz)), F_(std::move(F)), tris_(std::move(tris)), declared_(declared)
{
    const std::size_t V = xyz_.size();
    if (F_.size() != V)
        throw MeshError("format", "mesh needs one F value per vertex");
    if (tris_.empty())
        throw MeshError("format", "mesh has no triangles");
    for (double f : F_)
        if (!std::isfinite(f))
            throw MeshError("format", "mesh F values must be finite");

    double diag2 = 0.0;
    {
        Point3 lo = xyz_[0], hi = xyz_[0];
        for (const auto& p : xyz_)
            for (int i = 0; i < 3; ++i) {
                lo[i] = std::min(lo[i], p[i]);
                hi[i] = std::max(hi[i], p[i]);
            }
        for (int i = 0; i < 3; ++i)
            diag2 += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        const auto& tr = tris_[t];
        for (auto v : tr)
            if (v >= V)
                throw MeshError("format", "triangle " + std::to_string(t) + " references a missing vertex");
        double a = tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2]
                       ? 0.0
                       : tri_area(xyz_[tr[0]], xyz_[tr[1]], xyz_[tr[2]]);
        if (!(a > 1e-14 * diag2))
            throw MeshError("zero-area", "triangle " + std::to_string(t) + " has zero area");
        area_.push_back(a);
    }

    vertex_tris_.assign(V, {});
    for (std::size_t t = 0; t < tris_.size(); ++t)
        for (int i = 0; i < 3; ++i) {
            auto k = key(tris_[t][i], tris_[t][(i + 1) % 3]);
            auto [it, fresh] = edge_id_.emplace(k, edges_.size());
            if (fresh) {
                edges_.push_back(k);
                edge_tris_.emplace_back();
            }
            edge_tris_[it->second].push_back(t);
            vertex_tris_[tris_[t][i]].push_back(t);
        }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edge_tris_[e].size() > 2)
            throw MeshError("non-manifold", "mesh edge (" + std::to_string(edges_[e].first) + ", "
                                                + std::to_string(edges_[e].second) + ") has "
                                                + std::to_string(edge_tris_[e].size()) + " triangles");
        if (edge_tris_[e].size() == 2 && edge_tris_[e][0] == edge_tris_[e][1])
            throw MeshError("non-manifold", "duplicate edge inside one triangle");
    }
    for (std::size_t v = 0; v < V; ++v)
        if (vertex_tris_[v].empty())
            throw MeshError("disconnected", "vertex " + std::to_string(v) + " belongs to no triangle");

    // connectivity and consistent orientation by BFS over triangles
    std::vector<int> flip(tris_.size(), -1);
    flip[0] = 0;
    std::queue<std::size_t> q;
    q.push(0);
    std::size_t reached = 1;
    while (!q.empty()) {
        std::size_t t = q.front();
        q.pop();
        for (int i = 0; i < 3; ++i) {
            std::size_t a = tris_[t][i], b = tris_[t][(i + 1) % 3];
            if (flip[t])
                std::swap(a, b);
            for (auto u : edge_tris_[edge_id_.at(key(a, b))]) {
                if (u == t)
                    continue;
                // a consistent neighbour traverses b -> a
                int want = has_directed(tris_[u], b, a) ? 0 : 1;
                if (flip[u] < 0) {
                    flip[u] = want;
                    ++reached;
                    q.push(u);
                } else if (flip[u] != want) {
                    throw MeshError("non-orientable", "mesh is not orientable");
                }
            }
        }
    }
    if (reached != tris_.size())
        throw MeshError("disconnected", "mesh has more than one connected component");
    for (std::size_t t = 0; t < tris_.size(); ++t)
        if (flip[t])
            std::swap(tris_[t][1], tris_[t][2]);

    // every vertex star must be a single fan: the link is one path or one cycle
    for (std::size_t v = 0; v < V; ++v) {
        std::map<std::size_t, std::vector<std::size_t>> link;
        for (auto t : vertex_tris_[v]) {
            std::size_t o[2], n = 0;
            for (auto w : tris_[t])
                if (w != v)
                    o[n++] = w;
            link[o[0]].push_back(o[1]);
            link[o[1]].push_back(o[0]);
        }
        std::size_t ends = 0;
        for (const auto& [w, nb] : link) {
            if (nb.size() > 2)
                throw MeshError("non-manifold", "vertex " + std::to_string(v) + " is non-manifold");
            ends += nb.size() == 1;
        }
        std::set<std::size_t> seen{link.begin()->first};
        std::vector<std::size_t> stack{link.begin()->first};
        while (!stack.empty()) {
            auto w = stack.back();
            stack.pop_back();
            for (auto x : link[w])
                if (seen.insert(x).second)
                    stack.push_back(x);
        }
        if (seen.size() != link.size() || ends > 2)
            throw MeshError("non-manifold", "vertex " + std::to_string(v) + " is non-manifold");
    }

    // boundary loops, oriented as their triangles traverse them
    std::map<std::size_t, std::size_t> next;
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edge_tris_[e].size() == 1) {
            const auto& t = tris_[edge_tris_[e][0]];
            auto [a, b] = edges_[e];
            if (!has_directed(t, a, b))
                std::swap(a, b);
            next[a] = b;
        }
    loop_of_.assign(V, npos);
    for (const auto& [start, unused] : next) {
        (void)unused;
        if (loop_of_[start] != npos)
            continue;
        std::vector<std::size_t> loop;
        std::size_t v = start;
        do {
            loop_of_[v] = loops_.size();
            loop.push_back(v);
            v = next.at(v);
        } while (v != start);
        loops_.push_back(std::move(loop));
    }
}

std::size_t Mesh::edge_index(std::size_t u, std::size_t v) const
{
    auto it = edge_id_.find(key(u, v));
    return it == edge_id_.end() ? npos : it->second;
}

double Mesh::area() const
{
    double s = 0.0;
    for (double a : area_)
        s += a;
    return s;
}

int Mesh::euler_characteristic() const
{
    return static_cast<int>(xyz_.size()) - static_cast<int>(edges_.size()) + static_cast<int>(tris_.size());
}

int Mesh::genus() const
{
    return (2 - euler_characteristic() - static_cast<int>(loops_.size())) / 2;
}

Mesh Mesh::with_values(std::vector<double> F) const
{
    return Mesh(xyz_, std::move(F), tris_, declared_);
}

Mesh Mesh::with_declared(SurfaceInfo s) const
{
    Mesh m = *this;
    m.declared_ = s;
    return m;
}

Mesh read_off(std::istream& in)
{
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos)
            line.resize(h);
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> row;
        while (ls >> tok)
            row.push_back(tok);
        if (row.empty())
            continue;
        // keep rows apart so vertex lines with 3 or 4 columns are both accepted
        tokens.push_back(line);
    }
    if (tokens.empty())
        throw MeshError("format", "empty OFF file");
    std::size_t r = 0;
    {
        std::istringstream hs(tokens[0]);
        std::string head;
        hs >> head;
        if (head.rfind("OFF", 0) == 0)
            ++r;
    }
    if (r >= tokens.size())
        throw MeshError("format", "OFF file lacks counts");
    std::size_t nv = 0, nf = 0;
    {
        std::istringstream cs(tokens[r++]);
        if (!(cs >> nv >> nf))
            throw MeshError("format", "bad OFF counts line");
    }
    if (tokens.size() < r + nv + nf)
        throw MeshError("format", "OFF file is truncated");
    std::vector<Point3> xyz;
    std::vector<double> F;
    for (std::size_t i = 0; i < nv; ++i) {
        std::istringstream vs(tokens[r++]);
        std::vector<double> c;
        double x;
        while (vs >> x)
            c.push_back(x);
        if (c.size() < 3)
            throw MeshError("format", "OFF vertex " + std::to_string(i) + " needs 3 coordinates");
        xyz.push_back({c[0], c[1], c[2]});
        F.push_back(c.size() >= 4 ? c[3] : c[2]);
    }
    std::vector<Tri> tris;
    for (std::size_t i = 0; i < nf; ++i) {
        std::istringstream fs(tokens[r++]);
        std::size_t n = 0;
        if (!(fs >> n) || n < 3)
            throw MeshError("format", "bad OFF face " + std::to_string(i));
        std::vector<std::size_t> idx(n);
        for (auto& k : idx)
            if (!(fs >> k))
                throw MeshError("format", "bad OFF face " + std::to_string(i));
        for (std::size_t k = 1; k + 1 < n; ++k)
            tris.push_back({idx[0], idx[k], idx[k + 1]});
    }
    return Mesh(std::move(xyz), std::move(F), std::move(tris));
}

Mesh read_mesh_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MeshError("format", std::string("mesh JSON: ") + e.what());
    }
    try {
        std::vector<Point3> xyz;
        std::vector<double> F;
        std::map<std::string, std::size_t> ids;
        for (const auto& v : j.at("vertices")) {
            if (v.is_array()) {
                xyz.push_back({v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()});
                F.push_back(v.size() > 3 ? v.at(3).get<double>() : xyz.back()[2]);
            } else {
                const auto& p = v.at("xyz");
                xyz.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
                F.push_back(v.contains("F") ? v.at("F").get<double>() : xyz.back()[2]);
                if (v.contains("id"))
                    ids[v.at("id").get<std::string>()] = xyz.size() - 1;
            }
        }
        auto index = [&](const nlohmann::json& x) -> std::size_t {
            if (x.is_string()) {
                auto it = ids.find(x.get<std::string>());
                if (it == ids.end())
                    throw MeshError("format", "unknown vertex id '" + x.get<std::string>() + "'");
                return it->second;
            }
            return x.get<std::size_t>();
        };
        std::vector<Tri> tris;
        for (const auto& t : j.at("triangles")) {
            if (t.size() != 3)
                throw MeshError("format", "triangles need exactly 3 vertices");
            tris.push_back({index(t[0]), index(t[1]), index(t[2])});
        }
        SurfaceInfo s;
        if (j.contains("surface")) {
            const auto& sj = j.at("surface");
            if (sj.contains("genus"))
                s.genus = sj.at("genus").get<int>();
            if (sj.contains("boundary_components"))
                s.boundary_components = sj.at("boundary_components").get<int>();
        }
        return Mesh(std::move(xyz), std::move(F), std::move(tris), s);
    } catch (const nlohmann::json::exception& e) {
        throw MeshError("format", std::string("mesh JSON: ") + e.what());
    }
}

Mesh load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("format", "cannot open mesh file '" + path + "'");
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "json") {
        std::stringstream ss;
        ss << in.rdbuf();
        return read_mesh_json(ss.str());
    }
    return read_off(in);
}

std::string write_off(const Mesh& m)
{
    std::ostringstream os;
    os.precision(17);
    os << "OFF\n" << m.vertex_count() << ' ' << m.triangle_count() << " 0\n";
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        const auto& p = m.positions()[v];
        os << p[0] << ' ' << p[1] << ' ' << p[2] << ' ' << m.values()[v] << '\n';
    }
    for (const auto& t : m.triangles())
        os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    return os.str();
}

// Generators.

namespace {

// Periodic grid in (i, j) with both directions wrapping.
std::vector<Tri> torus_grid(int n, int m)
{
    std::vector<Tri> tris;
    auto id = [&](int i, int j) { return static_cast<std::size_t>(((i + n) % n) * m + (j + m) % m); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return tris;
}

}  // namespace

Mesh make_torus(int n_major, int n_minor, double R, double r, double tilt)
{
    if (n_major < 3 || n_minor < 3)
        throw std::invalid_argument("torus needs at least 3 samples per direction");
    std::vector<Point3> xyz;
    std::vector<double> F;
    const double tau = 2.0 * std::numbers::pi;
    for (int i = 0; i < n_major; ++i)
        for (int j = 0; j < n_minor; ++j) {
            double u = tau * i / n_major, v = tau * j / n_minor;
            Point3 p{(R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u), r * std::sin(v)};
            xyz.push_back(p);
            F.push_back(p[0] + tilt * p[2]);
        }
    SurfaceInfo s;
    s.genus = 1;
    s.boundary_components = 0;
    return Mesh(std::move(xyz), std::move(F), torus_grid(n_major, n_minor), s);
}

Mesh make_sphere(int levels, double tilt)
{
    std::vector<Point3> xyz{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<Tri> tris{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    for (int l = 0; l < levels; ++l) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
        auto midpoint = [&](std::size_t a, std::size_t b) {
            auto k = key(a, b);
            auto it = mid.find(k);
            if (it != mid.end())
                return it->second;
            Point3 p;
            for (int i = 0; i < 3; ++i)
                p[i] = 0.5 * (xyz[a][i] + xyz[b][i]);
            xyz.push_back(p);
            mid[k] = xyz.size() - 1;
            return xyz.size() - 1;
        };
        std::vector<Tri> next;
        for (const auto& t : tris) {
            auto ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    std::vector<double> F;
    for (auto& p : xyz) {
        double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        for (auto& c : p)
            c /= n;
        F.push_back(p[2] + tilt * p[0]);
    }
    SurfaceInfo s;
    s.genus = 0;
    s.boundary_components = 0;
    return Mesh(std::move(xyz), std::move(F), std::move(tris), s);
}

Mesh make_bump_disk(int rings, int sectors, double A, double sigma)
{
    if (rings < 2 || sectors < 3)
        throw std::invalid_argument("disk needs at least 2 rings and 3 sectors");
    std::vector<Point3> xyz{{0, 0, 0}};
    for (int i = 1; i <= rings; ++i)
        for (int j = 0; j < sectors; ++j) {
            double r = static_cast<double>(i) / rings;
            double th = 2.0 * std::numbers::pi * j / sectors;
            xyz.push_back({r * std::cos(th), r * std::sin(th), 0.0});
        }
    auto id = [&](int i, int j) { return static_cast<std::size_t>(1 + (i - 1) * sectors + (j + sectors) % sectors); };
    std::vector<Tri> tris;
    for (int j = 0; j < sectors; ++j)
        tris.push_back({0, id(1, j), id(1, j + 1)});
    for (int i = 1; i < rings; ++i)
        for (int j = 0; j < sectors; ++j) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    std::vector<double> F;
    for (const auto& p : xyz) {
        double r2 = p[0] * p[0] + p[1] * p[1];
        if (&p != &xyz[0] && std::fabs(r2 - 1.0) < 1e-12)
            r2 = 1.0;
        double d2 = (p[0] - 0.5) * (p[0] - 0.5) + p[1] * p[1];
        F.push_back(r2 + A * (1 - r2) * (1 - r2) * std::exp(-d2 / (sigma * sigma)));
    }
    SurfaceInfo s;
    s.genus = 0;
    s.boundary_components = 1;
    return Mesh(std::move(xyz), std::move(F), std::move(tris), s);
}

Mesh make_double_plate(int nx, int ny, double tilt_y, double tilt_z)
{
    // plate [0, 3] x [0, 1] sampled on an nx by ny cell grid; holes are the
    // cells inside [0.5, 1.25] x [0.25, 0.75] and [1.75, 2.5] x [0.25, 0.75]
    // coarser grids leave strips one cell wide whose corners all lie on the
    // seam, and those cells would collapse
    if (nx < 24 || ny < 8)
        throw std::invalid_argument("double plate needs nx >= 24 and ny >= 8");
    const double W = 3.0, Hh = 1.0;
    auto cx = [&](int i) { return W * (i + 0.5) / nx; };
    auto cy = [&](int j) { return Hh * (j + 0.5) / ny; };
    auto hole = [&](int i, int j) {
        double x = cx(i), y = cy(j);
        bool iny = y > 0.25 && y < 0.75;
        return iny && ((x > 0.5 && x < 1.25) || (x > 1.75 && x < 2.5));
    };
    std::vector<std::vector<bool>> solid(nx, std::vector<bool>(ny));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            solid[i][j] = !hole(i, j);

    // a grid vertex is on the seam if it touches a non-solid cell or the frame
    auto cell_solid = [&](int i, int j) { return i >= 0 && j >= 0 && i < nx && j < ny && solid[i][j]; };
    std::vector<std::vector<std::size_t>> top(nx + 1, std::vector<std::size_t>(ny + 1, npos));
    auto bottom = top;
    std::vector<Point3> xyz;
    std::vector<double> F;
    auto add = [&](double x, double y, double z) {
        xyz.push_back({x, y, z});
        F.push_back(x + tilt_y * y + tilt_z * z);
        return xyz.size() - 1;
    };
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            int around = cell_solid(i - 1, j - 1) + cell_solid(i, j - 1) + cell_solid(i - 1, j) + cell_solid(i, j);
            if (around == 0)
                continue;
            double x = W * i / nx, y = Hh * j / ny;
            if (around < 4) {
                top[i][j] = bottom[i][j] = add(x, y, 0.0);
            } else {
                double h = 0.1;
                top[i][j] = add(x, y, h);
                bottom[i][j] = add(x, y, -h);
            }
        }
    std::vector<Tri> tris;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (!solid[i][j])
                continue;
            // split along a diagonal that touches an interior vertex, otherwise
            // the top and bottom triangles coincide
            bool seam_ac = top[i][j] == bottom[i][j] && top[i + 1][j + 1] == bottom[i + 1][j + 1];
            for (const auto* layer : {&top, &bottom}) {
                const auto& L = *layer;
                std::size_t a = L[i][j], b = L[i + 1][j], c = L[i + 1][j + 1], d = L[i][j + 1];
                std::array<Tri, 2> q = seam_ac ? std::array<Tri, 2>{Tri{a, b, d}, Tri{b, c, d}}
                                               : std::array<Tri, 2>{Tri{a, b, c}, Tri{a, c, d}};
                for (auto t : q) {
                    if (layer == &bottom)
                        std::swap(t[1], t[2]);
                    tris.push_back(t);
                }
            }
        }
    SurfaceInfo s;
    s.genus = 2;
    s.boundary_components = 0;
    return Mesh(std::move(xyz), std::move(F), std::move(tris), s);
}

}  // namespace reebflow
