#include "microtrap/optics.hpp"

#include <cmath>
#include <stdexcept>

#include "microtrap/constants.hpp"
#include "microtrap/quadrature.hpp"

namespace microtrap {

using constants::pi;

void validate(const GaussianBeam& beam) {
    if (!(beam.power >= 0.0)) throw std::invalid_argument("beam power must be >= 0");
    if (!(beam.waist > 0.0)) throw std::invalid_argument("beam waist must be > 0");
    if (!(beam.wavelength > 0.0)) throw std::invalid_argument("beam wavelength must be > 0");
    if (std::abs(norm(beam.axis) - 1.0) > 1e-9)
        throw std::invalid_argument("beam axis must be a unit vector");
}

double rayleigh_range(const GaussianBeam& beam) {
    return pi * beam.waist * beam.waist / beam.wavelength;
}

double beam_waist_at(const GaussianBeam& beam, double z) {
    const double zr = rayleigh_range(beam);
    return beam.waist * std::sqrt(1.0 + (z / zr) * (z / zr));
}

double peak_intensity(double power, double waist) {
    return 2.0 * power / (pi * waist * waist);
}

double beam_intensity(const GaussianBeam& beam, const Vec3& point) {
    validate(beam);
    const Vec3 rel = point - beam.focus_position;
    const double z = dot(rel, beam.axis);
    const Vec3 transverse = rel - z * beam.axis;
    const double r2 = dot(transverse, transverse);
    const double w = beam_waist_at(beam, z);
    return 2.0 * beam.power / (pi * w * w) * std::exp(-2.0 * r2 / (w * w));
}

void validate(const MicrolensArray& array) {
    if (!(array.pitch > 0.0)) throw std::invalid_argument("lens array pitch must be > 0");
    if (!(array.lens_diameter > 0.0) || array.lens_diameter > array.pitch)
        throw std::invalid_argument("lens_diameter must be in (0, pitch]");
    if (!(array.focal_length > 0.0)) throw std::invalid_argument("focal_length must be > 0");
    if (array.rows < 1 || array.cols < 1) throw std::invalid_argument("rows and cols must be >= 1");
    const double na = std::sin(std::atan(array.lens_diameter / (2.0 * array.focal_length)));
    if (!(na > 0.0 && na < 1.0)) throw std::invalid_argument("lenslet NA out of (0, 1)");
}

Vec3 lenslet_center(const MicrolensArray& array, int row, int col) {
    if (row < 0 || row >= array.rows || col < 0 || col >= array.cols)
        throw std::out_of_range("lenslet row/col outside the lattice");
    const double x = (col - 0.5 * (array.cols - 1)) * array.pitch;
    const double y = (row - 0.5 * (array.rows - 1)) * array.pitch;
    return {x, y, 0.0};
}

double numerical_aperture(const MicrolensArray& array) {
    validate(array);
    return std::sin(std::atan(array.lens_diameter / (2.0 * array.focal_length)));
}

double focal_spot_radius(double wavelength, double na) {
    if (!(na > 0.0 && na < 1.0)) throw std::domain_error("NA must lie in (0, 1)");
    if (!(wavelength > 0.0)) throw std::domain_error("wavelength must be > 0");
    return 0.61 * wavelength / na;
}

double gaussian_waist_from_airy_radius(double airy_radius) {
    if (!(airy_radius > 0.0)) throw std::domain_error("Airy radius must be > 0");
    return 0.8 * airy_radius;
}

void validate(const RelayTelescope& telescope) {
    if (!(telescope.focal_length_1 > 0.0) || !(telescope.focal_length_2 > 0.0))
        throw std::invalid_argument("relay focal lengths must be > 0");
    // aperture = 0 means unspecified; it only annotates clipping concerns.
    if (telescope.aperture < 0.0) throw std::invalid_argument("relay aperture must be >= 0");
}

double magnification(const RelayTelescope& telescope) {
    validate(telescope);
    return telescope.focal_length_2 / telescope.focal_length_1;
}

std::vector<Vec3> relay_image(const RelayTelescope& telescope,
                              const std::vector<Vec3>& source_plane_points) {
    const double m = magnification(telescope);
    std::vector<Vec3> imaged;
    imaged.reserve(source_plane_points.size());
    for (const Vec3& p : source_plane_points) {
        imaged.push_back({-m * p.x, -m * p.y, m * m * p.z});
    }
    return imaged;
}

double dual_beam_site_offset(const MicrolensArray& array, double angle_between_beams) {
    validate(array);
    if (std::abs(angle_between_beams) > 0.2)
        throw std::domain_error("beam angle exceeds paraxial limit of 0.2 rad");
    return array.focal_length * std::tan(angle_between_beams);
}

std::vector<double> lenslet_power_share(const MicrolensArray& array, const GaussianBeam& beam,
                                        int quad_order) {
    validate(array);
    validate(beam);
    if (quad_order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    const double axial = std::abs(dot(beam.axis, Vec3{0.0, 0.0, 1.0}));
    if (std::abs(axial - 1.0) > 1e-9)
        throw std::domain_error("beam must hit the lens array plane head-on");

    // Polar tensor rule over each circular aperture:
    //   integral = sum_ij w_i w_j rho_i I(c + rho_i e(phi_j)).
    const QuadratureRule rule = gauss_legendre(quad_order);
    const double radius = 0.5 * array.lens_diameter;
    std::vector<double> rho(quad_order), rho_w(quad_order);
    std::vector<double> phi(quad_order), phi_w(quad_order);
    for (int i = 0; i < quad_order; ++i) {
        rho[i] = 0.5 * radius * (rule.nodes[i] + 1.0);
        rho_w[i] = 0.5 * radius * rule.weights[i];
        phi[i] = pi * (rule.nodes[i] + 1.0);
        phi_w[i] = pi * rule.weights[i];
    }

    std::vector<double> shares(site_count(array), 0.0);
    for (int row = 0; row < array.rows; ++row) {
        for (int col = 0; col < array.cols; ++col) {
            const Vec3 center = lenslet_center(array, row, col);
            double sum = 0.0;
            for (int i = 0; i < quad_order; ++i) {
                for (int j = 0; j < quad_order; ++j) {
                    const Vec3 p{center.x + rho[i] * std::cos(phi[j]),
                                 center.y + rho[i] * std::sin(phi[j]), 0.0};
                    sum += rho_w[i] * phi_w[j] * rho[i] * beam_intensity(beam, p);
                }
            }
            shares[site_index(array, row, col)] = sum;
        }
    }
    return shares;
}

double uniform_power_share_per_site(const MicrolensArray& array, double intensity) {
    validate(array);
    if (!(intensity >= 0.0)) throw std::invalid_argument("intensity must be >= 0");
    return intensity * pi * array.lens_diameter * array.lens_diameter / 4.0;
}

}  // namespace microtrap
