#pragma once

#include <vector>

#include "microtrap/vec3.hpp"

namespace microtrap {

// TEM00 beam described at its focus.
struct GaussianBeam {
    double power = 0.0;       // W
    double waist = 0.0;       // m, 1/e^2 intensity radius at focus
    double wavelength = 0.0;  // m
    Vec3 focus_position{};
    Vec3 axis{0.0, 0.0, 1.0};  // unit vector
};

void validate(const GaussianBeam& beam);

double rayleigh_range(const GaussianBeam& beam);

// 1/e^2 radius at axial distance z from the focus.
double beam_waist_at(const GaussianBeam& beam, double z);

// On-axis focal intensity 2P / (pi w0^2).
double peak_intensity(double power, double waist);

// Intensity at a lab-frame point: I(r,z) = (2P/pi w(z)^2) exp(-2 r^2/w(z)^2)
// with r, z measured in beam coordinates relative to the focus.
double beam_intensity(const GaussianBeam& beam, const Vec3& point);

enum class LensKind { refractive, diffractive };

// Regular grid of identical spherical lenslets. The lattice is centered on
// the origin of the array plane (z = 0); foci sit at z = focal_length.
struct MicrolensArray {
    double pitch = 0.0;          // m, center-to-center
    double lens_diameter = 0.0;  // m, <= pitch
    double focal_length = 0.0;   // m
    int rows = 1;
    int cols = 1;
    LensKind kind = LensKind::refractive;
};

void validate(const MicrolensArray& array);

inline int site_count(const MicrolensArray& array) { return array.rows * array.cols; }
inline int site_index(const MicrolensArray& array, int row, int col) { return row * array.cols + col; }

// Lenslet center in the array plane, lattice centered on the origin.
Vec3 lenslet_center(const MicrolensArray& array, int row, int col);

// NA = sin(atan(D / 2f)) of a single lenslet.
double numerical_aperture(const MicrolensArray& array);

// Radius of the first Airy minimum q = 0.61 lambda / NA for a uniformly
// illuminated lenslet. Rejects NA outside (0, 1).
double focal_spot_radius(double wavelength, double na);

// Gaussian waist whose 1/e^2 radius approximates an Airy spot of radius q.
double gaussian_waist_from_airy_radius(double airy_radius);

// Two-achromat 4f relay imaging the array focal plane into the chamber.
struct RelayTelescope {
    double focal_length_1 = 0.0;  // m
    double focal_length_2 = 0.0;  // m
    double aperture = 0.0;        // m
};

void validate(const RelayTelescope& telescope);

double magnification(const RelayTelescope& telescope);

// Ideal 4f imaging about the optical (z) axis: transverse coordinates scale
// by -M (inversion), axial offsets from the object plane by M^2.
std::vector<Vec3> relay_image(const RelayTelescope& telescope, const std::vector<Vec3>& source_plane_points);

// Lateral offset f*tan(theta) between the two focal lattices produced by
// illuminating the array with two beams at a small mutual angle.
// Rejects non-paraxial angles (|theta| > 0.2 rad).
double dual_beam_site_offset(const MicrolensArray& array, double angle_between_beams);

// Power collected by each lenslet aperture from a beam hitting the array
// plane head-on: tensor Gauss quadrature (quad_order radial x quad_order
// angular points) of the beam intensity over each circular aperture.
// Result is indexed by flat site index (row * cols + col). Summation order
// is fixed, so results are independent of any evaluation parallelism.
std::vector<double> lenslet_power_share(const MicrolensArray& array, const GaussianBeam& beam,
                                        int quad_order = 32);

// Flat-field share I * pi D^2 / 4, the wide-beam limit of the above.
double uniform_power_share_per_site(const MicrolensArray& array, double intensity);

}  // namespace microtrap
