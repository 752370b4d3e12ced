#include "ccfv/mesh.hpp"

#include "ccfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccfv {

const char* side_name(Side s) {
    switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
    }
    return "?";
}

Mesh Mesh::interval(double length, int cells) {
    if (!(length > 0.0))
        throw ConfigError("mesh: interval length must be > 0");
    if (cells < 2)
        throw ConfigError("mesh: cell count must be >= 2 per axis");
    Mesh m;
    m.kind_ = DomainKind::Interval;
    m.nx_ = cells;
    m.ny_ = 1;
    m.lx_ = length;
    m.ly_ = 0.0;
    m.hx_ = length / cells;
    m.hy_ = 0.0;
    m.vol_ = m.hx_;
    m.omega_ = length;
    m.boundary_ = 2.0; // counting measure at the two endpoints
    m.build_faces();
    return m;
}

Mesh Mesh::rectangle(double length_x, double length_y, int cells_x, int cells_y) {
    if (!(length_x > 0.0) || !(length_y > 0.0))
        throw ConfigError("mesh: rectangle side lengths must be > 0");
    if (cells_x < 2 || cells_y < 2)
        throw ConfigError("mesh: cell count must be >= 2 per axis");
    Mesh m;
    m.kind_ = DomainKind::Rectangle;
    m.nx_ = cells_x;
    m.ny_ = cells_y;
    m.lx_ = length_x;
    m.ly_ = length_y;
    m.hx_ = length_x / cells_x;
    m.hy_ = length_y / cells_y;
    m.vol_ = m.hx_ * m.hy_;
    m.omega_ = length_x * length_y;
    m.boundary_ = 2.0 * (length_x + length_y);
    m.build_faces();
    return m;
}

void Mesh::build_faces() {
    interior_.clear();
    bfaces_.clear();
    if (kind_ == DomainKind::Interval) {
        for (int i = 0; i + 1 < nx_; ++i)
            interior_.push_back({i, i + 1, 0, 1.0});
        bfaces_.push_back({0, 0, -1, Side::Left, 1.0});
        bfaces_.push_back({nx_ - 1, 0, +1, Side::Right, 1.0});
        return;
    }
    // x-directed faces, then y-directed faces; fixed order keeps runs reproducible
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i + 1 < nx_; ++i)
            interior_.push_back({cell_index(i, j), cell_index(i + 1, j), 0, hy_});
    for (int j = 0; j + 1 < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            interior_.push_back({cell_index(i, j), cell_index(i, j + 1), 1, hx_});
    for (int j = 0; j < ny_; ++j)
        bfaces_.push_back({cell_index(0, j), 0, -1, Side::Left, hy_});
    for (int j = 0; j < ny_; ++j)
        bfaces_.push_back({cell_index(nx_ - 1, j), 0, +1, Side::Right, hy_});
    for (int i = 0; i < nx_; ++i)
        bfaces_.push_back({cell_index(i, 0), 1, -1, Side::Bottom, hx_});
    for (int i = 0; i < nx_; ++i)
        bfaces_.push_back({cell_index(i, ny_ - 1), 1, +1, Side::Top, hx_});
}

std::array<double, 2> Mesh::cell_center(int index) const {
    const int i = index % nx_;
    const int j = index / nx_;
    return {(i + 0.5) * hx_, kind_ == DomainKind::Interval ? 0.0 : (j + 0.5) * hy_};
}

double CellField::min() const {
    return *std::min_element(values.begin(), values.end());
}

double CellField::max() const {
    return *std::max_element(values.begin(), values.end());
}

bool CellField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v))
            return false;
    return true;
}

BoundaryData BoundaryData::uniform(const Mesh& mesh, double gamma, double g_value) {
    BoundaryData bc;
    bc.gamma = gamma;
    bc.g.assign(mesh.boundary_faces().size(), g_value);
    return bc;
}

BoundaryData BoundaryData::per_side(const Mesh& mesh, double gamma, double left, double right,
                                    double bottom, double top) {
    BoundaryData bc;
    bc.gamma = gamma;
    bc.g.reserve(mesh.boundary_faces().size());
    for (const BoundaryFace& f : mesh.boundary_faces()) {
        switch (f.side) {
        case Side::Left: bc.g.push_back(left); break;
        case Side::Right: bc.g.push_back(right); break;
        case Side::Bottom: bc.g.push_back(bottom); break;
        case Side::Top: bc.g.push_back(top); break;
        }
    }
    return bc;
}

double BoundaryData::min_g() const {
    return *std::min_element(g.begin(), g.end());
}

double BoundaryData::max_g() const {
    return *std::max_element(g.begin(), g.end());
}

double integrate(const CellField& f) {
    const double vol = f.mesh->cell_volume();
    double sum = 0.0;
    for (double v : f.values)
        sum += v;
    return sum * vol;
}

double boundary_integrate(const Mesh& mesh, std::span<const double> trace) {
    const auto& faces = mesh.boundary_faces();
    double sum = 0.0;
    for (size_t k = 0; k < faces.size(); ++k)
        sum += trace[k] * faces[k].measure;
    return sum;
}

double neumann_lambda1(const Mesh& mesh) {
    const double pi = std::numbers::pi;
    const double lx = std::pow(pi / mesh.length_x(), 2);
    if (mesh.kind() == DomainKind::Interval)
        return lx;
    return std::min(lx, std::pow(pi / mesh.length_y(), 2));
}

std::vector<double> face_gradient(const CellField& f) {
    const Mesh& mesh = *f.mesh;
    std::vector<double> grad;
    grad.reserve(mesh.interior_faces().size());
    for (const InteriorFace& face : mesh.interior_faces())
        grad.push_back((f[face.right] - f[face.left]) / mesh.spacing(face.axis));
    return grad;
}

} // namespace ccfv
