#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fisheye/vec.hpp"

namespace fisheye {

// Radially symmetric camera model: image radius is a function of the field
// angle only, azimuth is preserved.
class RadialCameraModel {
public:
    virtual ~RadialCameraModel() = default;
    virtual double radius_from_field_angle(double theta) const = 0;
    virtual double max_field_angle() const = 0;
    virtual Vec2 principal_point() const = 0;
};

// r(theta) = a1*theta + a2*theta^2 + a3*theta^3 + a4*theta^4, the calibration
// form common on automotive fisheye lenses. Construction rejects coefficient
// sets that are not strictly increasing over [0, max_field_angle].
class PolynomialFisheyeModel : public RadialCameraModel {
public:
    PolynomialFisheyeModel(std::array<double, 4> coeffs, Vec2 principal_point,
                           int image_width, int image_height, double max_field_angle);

    double radius_from_field_angle(double theta) const override;
    double max_field_angle() const override { return max_theta_; }
    Vec2 principal_point() const override { return pp_; }

    const std::array<double, 4>& coeffs() const { return coeffs_; }
    int image_width() const { return width_; }
    int image_height() const { return height_; }

private:
    std::array<double, 4> coeffs_;
    Vec2 pp_;
    int width_;
    int height_;
    double max_theta_;
};

// First-order fisheye model r = a * theta.
class EquidistantModel : public RadialCameraModel {
public:
    EquidistantModel(double a, Vec2 principal_point, double max_field_angle = kPi);

    double radius_from_field_angle(double theta) const override { return a_ * theta; }
    double max_field_angle() const override { return max_theta_; }
    Vec2 principal_point() const override { return pp_; }
    double a() const { return a_; }

private:
    double a_;
    Vec2 pp_;
    double max_theta_;
};

// Division model with an extra scale factor: tan(theta) = r / (f (1 + lambda r^2)).
// With lambda < 0 it stays representable past 90 degrees, which a 190-degree FOV
// requires. Straight 3D lines project to circles under this model.
class DivisionModel : public RadialCameraModel {
public:
    DivisionModel(double f, double lambda, Vec2 principal_point,
                  double max_field_angle = deg_to_rad(95.0));

    double radius_from_field_angle(double theta) const override;
    double max_field_angle() const override { return max_theta_; }
    Vec2 principal_point() const override { return pp_; }

    // Inverse of radius_from_field_angle on the continuous branch.
    double field_angle_from_radius(double r) const;

    double f() const { return f_; }
    double lambda() const { return lambda_; }

private:
    double f_;
    double lambda_;
    Vec2 pp_;
    double max_theta_;
};

struct Line3D {
    Vec3 direction;  // unit
    Vec3 point;

    Vec3 at(double t) const { return direction * t + point; }
};

Line3D make_line(Vec3 direction, Vec3 point);

double field_angle(const Vec3& point_camera);

// Central projection through a radial model. Throws DegeneratePoint at the
// origin and FieldAngleExceeded past the model's limit; on-axis points map to
// the principal point.
Vec2 project_point(const RadialCameraModel& model, const Vec3& point_camera);

std::vector<Vec2> project_line_curve(const RadialCameraModel& model, const Line3D& line,
                                     double t_begin, double t_end, int n_samples);

// Continuous-branch solution r of tan(theta) f (1 + lambda r^2) = r; r(0) = 0,
// r(90 deg) = 1/sqrt(-lambda).
double invert_division_radius(const DivisionModel& model, double theta);

struct DivisionFitResult {
    DivisionModel model;
    std::vector<double> theta_samples;
    std::vector<double> residuals;  // r_division - r_polynomial, pixels
    double max_abs_residual = 0.0;
    double rms_residual = 0.0;
};

// Least-squares (f, lambda) fit of the division model to a polynomial model over
// the given field-angle samples. Coarse grid seed, then damped Gauss-Newton.
DivisionFitResult fit_division_model(const PolynomialFisheyeModel& poly,
                                     std::span<const double> theta_samples);

DivisionFitResult fit_division_model(const PolynomialFisheyeModel& poly, int n_samples = 256);

// Projects line samples through the model and measures the max orthogonal
// distance to the best-fit circle (or line, for radial curves).
double line_circle_residual(const RadialCameraModel& model, const Line3D& line,
                            double t_begin, double t_end, int n_samples);

// Rigid camera pose: x_vehicle = rotation * x_camera + translation.
struct Pose {
    Mat3 rotation;
    Vec3 translation;

    Vec3 to_vehicle(const Vec3& p_camera) const { return rotation * p_camera + translation; }
    Vec3 to_camera(const Vec3& p_vehicle) const {
        return rotation.transposed() * (p_vehicle - translation);
    }
};

// Camera mounted at `position`, heading `yaw_deg` in the vehicle frame
// (x forward, y left, z up), tilted down by `pitch_down_deg`. Camera frame is
// z optical axis, x image-right, y image-down.
Pose make_camera_pose(Vec3 position, double yaw_deg, double pitch_down_deg);

enum class CameraId { front, rear, left, right };

const char* camera_id_name(CameraId id);
CameraId camera_id_from_name(const std::string& name);

struct RigCamera {
    CameraId id;
    Pose pose;
    PolynomialFisheyeModel model;
};

struct CameraRig {
    std::vector<RigCamera> cameras;

    const RigCamera& camera(CameraId id) const;
    bool has(CameraId id) const;
};

}  // namespace fisheye
