#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace ccfv {

enum class DomainKind { Interval, Rectangle };

enum class Side { Left, Right, Bottom, Top };

const char* side_name(Side s);

/// Face separating two cells, oriented along +axis (left = lower coordinate).
struct InteriorFace {
    int left;
    int right;
    int axis;       // 0 = x, 1 = y
    double measure; // length of the face (1 in 1D)
};

/// Face on the domain boundary, owned by a single cell.
struct BoundaryFace {
    int cell;
    int axis;
    int sign; // -1: outward normal points to lower coordinates, +1: higher
    Side side;
    double measure; // 1D convention: counting measure, each endpoint has measure 1
};

/// Uniform cell-centered tensor-product mesh on an interval or an
/// axis-aligned rectangle. Immutable after construction.
class Mesh {
public:
    static Mesh interval(double length, int cells);
    static Mesh rectangle(double length_x, double length_y, int cells_x, int cells_y);

    DomainKind kind() const { return kind_; }
    int dim() const { return kind_ == DomainKind::Interval ? 1 : 2; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int num_cells() const { return nx_ * ny_; }
    double length_x() const { return lx_; }
    double length_y() const { return ly_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double spacing(int axis) const { return axis == 0 ? hx_ : hy_; }
    double cell_volume() const { return vol_; }
    double domain_measure() const { return omega_; }
    double boundary_measure() const { return boundary_; }

    std::array<double, 2> cell_center(int index) const;
    int cell_index(int i, int j) const { return j * nx_ + i; }

    /// Same kind, cell counts and side lengths (distinct objects may be equal).
    friend bool same_geometry(const Mesh& a, const Mesh& b) {
        return a.kind_ == b.kind_ && a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.lx_ == b.lx_ &&
               a.ly_ == b.ly_;
    }

    const std::vector<InteriorFace>& interior_faces() const { return interior_; }
    const std::vector<BoundaryFace>& boundary_faces() const { return bfaces_; }

private:
    Mesh() = default;
    void build_faces();

    DomainKind kind_ = DomainKind::Interval;
    int nx_ = 0, ny_ = 1;
    double lx_ = 0, ly_ = 0;
    double hx_ = 0, hy_ = 0;
    double vol_ = 0, omega_ = 0, boundary_ = 0;
    std::vector<InteriorFace> interior_;
    std::vector<BoundaryFace> bfaces_;
};

/// One scalar value per cell of a fixed mesh.
struct CellField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    CellField() = default;
    CellField(const Mesh& m, double fill = 0.0)
        : mesh(&m), values(static_cast<size_t>(m.num_cells()), fill) {}

    double& operator[](size_t i) { return values[i]; }
    double operator[](size_t i) const { return values[i]; }
    size_t size() const { return values.size(); }

    double min() const;
    double max() const;
    bool all_finite() const;
};

/// Saturation level and per-boundary-face transfer rate of the Robin condition.
struct BoundaryData {
    double gamma = 0.0;
    std::vector<double> g; // one value per boundary face, same order as Mesh::boundary_faces()

    static BoundaryData uniform(const Mesh& mesh, double gamma, double g_value);
    /// g constant per boundary side; for an interval only left/right are used.
    static BoundaryData per_side(const Mesh& mesh, double gamma, double left, double right,
                                 double bottom = 0.0, double top = 0.0);

    double min_g() const;
    double max_g() const;
};

/// Discrete integral over the domain: sum of cell values times cell volumes.
double integrate(const CellField& f);

/// Discrete integral over the boundary: one trace value per boundary face.
double boundary_integrate(const Mesh& mesh, std::span<const double> trace);

/// Smallest positive eigenvalue of the Neumann Laplacian on the continuum
/// domain: (pi/L)^2 on an interval, min over axes for a rectangle.
double neumann_lambda1(const Mesh& mesh);

/// Centered two-point gradient per interior face, (f_right - f_left)/h.
std::vector<double> face_gradient(const CellField& f);

} // namespace ccfv
