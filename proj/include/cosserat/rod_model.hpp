#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cosserat {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec2Array = std::vector<Vec2>;

// Planar cross product, the out-of-plane component: x1*y2 - x2*y1.
inline double cross(const Vec2& x, const Vec2& y) { return x.x() * y.y() - x.y() * y.x(); }

inline Mat2 rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 q;
    q << c, -s, s, c;
    return q;
}

// Quarter-turn matrix [[0,-1],[1,0]]; dQ/dtheta = Q * quarter_turn().
inline Mat2 quarter_turn() {
    Mat2 m;
    m << 0.0, -1.0, 1.0, 0.0;
    return m;
}

// Physical inputs; everything else in RodProperties is derived from these.
struct RodParameters {
    double L0 = 0.2;          // [m]
    int N = 100;
    double phi_base = 0.02;   // [m]
    double phi_tip = 0.008;   // [m]
    double rho = 1042.0;      // [kg/m^3]
    double E = 1.0e4;         // [Pa]
    double zeta = 0.01;       // [kg/s]
    double poisson = 0.5;
};

// Rod geometry and material on the staggered grid. Element fields (A, I,
// S) live at element midpoints, bending rigidity and intrinsic curvature at
// the N-1 interior nodes, lumped areas at the N+1 nodes.
struct RodProperties {
    double L0 = 0;
    int N = 0;
    double phi_base = 0, phi_tip = 0;
    double rho = 0, E = 0, G = 0, zeta = 0;
    double ds = 0;

    std::vector<double> A;          // element cross-section area [m^2]
    std::vector<double> I;          // element second moment of area [m^4]
    Vec2Array S;                    // element diag(EA, GA) [N]
    std::vector<double> B;          // interior-node EI [N m^2]
    std::vector<double> node_area;  // Voronoi-lumped nodal area [m^2]
    Vec2Array nu_intrinsic;         // per element
    std::vector<double> kappa_intrinsic;  // per interior node

    double node_mass(std::size_t i) const { return rho * node_area[i] * ds; }
    double element_inertia(std::size_t j) const { return rho * I[j] * ds; }
};

RodProperties make_rod_properties(const RodParameters& params);

// Linear taper from phi_base at s = 0 to phi_tip at s = L0.
double taper_profile(const RodProperties& props, double s);

struct RodState {
    Vec2Array r;                  // N+1 node positions
    std::vector<double> theta;    // N element angles
    Vec2Array p_r;                // N+1 nodal momenta (integrated over ds)
    std::vector<double> p_theta;  // N element angular momenta (integrated over ds)

    // Intrinsically straight rod along +x from the origin, at rest.
    static RodState straight(const RodProperties& props);

    int segments() const { return static_cast<int>(theta.size()); }
    bool well_sized(int N) const;
    // Largest absolute entry; NaN if any entry is non-finite.
    double max_abs() const;
};

struct StrainField {
    Vec2Array nu;               // N
    std::vector<double> kappa;  // N-1
    Vec2Array sigma;            // N, nu - nu_intrinsic
};

struct InternalLoads {
    Vec2Array n;            // N, material frame
    std::vector<double> m;  // N-1
};

StrainField compute_strains(const RodState& state, const RodProperties& props);
InternalLoads internal_loads(const StrainField& strains, const RodProperties& props);

struct Energies {
    double kinetic = 0;
    double potential = 0;
    double total = 0;
};

Energies energies(const RodState& state, const RodProperties& props);
double potential_energy(const RodState& state, const RodProperties& props);

class SizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void require_sized(const RodState& state, const RodProperties& props);

}  // namespace cosserat
