#include "fisheye/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fisheye/errors.hpp"
#include "fisheye/geometry.hpp"

namespace fisheye {

PolynomialFisheyeModel::PolynomialFisheyeModel(std::array<double, 4> coeffs, Vec2 principal_point,
                                               int image_width, int image_height,
                                               double max_field_angle)
    : coeffs_(coeffs), pp_(principal_point), width_(image_width), height_(image_height),
      max_theta_(max_field_angle) {
    if (image_width <= 0 || image_height <= 0)
        throw DegenerateInput("PolynomialFisheyeModel: image size must be positive");
    if (!(max_field_angle > 0.0) || max_field_angle > kPi)
        throw DegenerateInput("PolynomialFisheyeModel: max field angle out of range");
    // Strict monotonicity over a dense grid.
    constexpr int kGrid = 1024;
    double prev = 0.0;
    for (int i = 1; i <= kGrid; ++i) {
        const double theta = max_theta_ * i / kGrid;
        const double r = radius_from_field_angle(theta);
        if (!(r > prev))
            throw DegenerateInput("PolynomialFisheyeModel: r(theta) not strictly increasing");
        prev = r;
    }
}

double PolynomialFisheyeModel::radius_from_field_angle(double theta) const {
    return theta * (coeffs_[0] + theta * (coeffs_[1] + theta * (coeffs_[2] + theta * coeffs_[3])));
}

EquidistantModel::EquidistantModel(double a, Vec2 principal_point, double max_field_angle)
    : a_(a), pp_(principal_point), max_theta_(max_field_angle) {
    if (!(a > 0.0)) throw DegenerateInput("EquidistantModel: scale must be positive");
}

DivisionModel::DivisionModel(double f, double lambda, Vec2 principal_point, double max_field_angle)
    : f_(f), lambda_(lambda), pp_(principal_point), max_theta_(max_field_angle) {
    if (!(f > 0.0)) throw DegenerateInput("DivisionModel: scale must be positive");
    if (lambda >= 0.0) {
        // Non-negative lambda cannot represent 90 degrees or beyond.
        double cap = kPi / 2.0 - 1e-9;
        if (lambda > 0.0) cap = std::atan(1.0 / (2.0 * f * std::sqrt(lambda)));
        max_theta_ = std::min(max_theta_, cap);
    }
}

double invert_division_radius(const DivisionModel& model, double theta) {
    if (theta < 0.0) throw AngleOutOfRange("invert_division_radius: negative field angle");
    if (theta == 0.0) return 0.0;
    if (theta >= kPi) throw AngleOutOfRange("invert_division_radius: field angle >= pi");

    const double f = model.f();
    const double lambda = model.lambda();
    // With u = cot(theta), the relation becomes lambda f r^2 - u r + f = 0.
    const double u = std::cos(theta) / std::sin(theta);

    if (lambda == 0.0) {
        if (u <= 0.0) throw Unrepresentable("invert_division_radius: pinhole beyond 90 degrees");
        return f / u;
    }

    const double disc = u * u - 4.0 * lambda * f * f;
    if (disc < 0.0)
        throw Unrepresentable("invert_division_radius: no real root on the continuous branch");
    const double sq = std::sqrt(disc);
    // Branch continuous from r(0) = 0, written to avoid cancellation on each side.
    const double r = u >= 0.0 ? 2.0 * f / (u + sq) : (u - sq) / (2.0 * lambda * f);
    if (!(r >= 0.0) || !std::isfinite(r))
        throw Unrepresentable("invert_division_radius: no nonnegative root");
    return r;
}

double DivisionModel::radius_from_field_angle(double theta) const {
    return invert_division_radius(*this, theta);
}

double DivisionModel::field_angle_from_radius(double r) const {
    if (r < 0.0) throw AngleOutOfRange("field_angle_from_radius: negative radius");
    if (r == 0.0) return 0.0;
    return std::atan2(r, f_ * (1.0 + lambda_ * r * r));
}

Line3D make_line(Vec3 direction, Vec3 point) {
    const double n = norm(direction);
    if (n <= 0.0) throw DegenerateInput("Line3D: zero direction");
    return {direction / n, point};
}

double field_angle(const Vec3& p) {
    return std::atan2(std::hypot(p.x, p.y), p.z);
}

Vec2 project_point(const RadialCameraModel& model, const Vec3& p) {
    const double rho = std::hypot(p.x, p.y);
    const double dist = std::hypot(rho, p.z);
    if (dist < 1e-12) throw DegeneratePoint("project_point: point at camera center");
    if (rho == 0.0) {
        if (p.z < 0.0) throw FieldAngleExceeded("project_point: point behind camera on axis");
        return model.principal_point();
    }
    const double theta = std::atan2(rho, p.z);
    if (theta > model.max_field_angle())
        throw FieldAngleExceeded("project_point: field angle " + std::to_string(theta) +
                                 " exceeds limit " + std::to_string(model.max_field_angle()));
    const double r = model.radius_from_field_angle(theta);
    return model.principal_point() + Vec2{p.x / rho, p.y / rho} * r;
}

std::vector<Vec2> project_line_curve(const RadialCameraModel& model, const Line3D& line,
                                     double t_begin, double t_end, int n_samples) {
    if (n_samples < 2) throw DegenerateInput("project_line_curve: need at least 2 samples");
    std::vector<Vec2> out;
    out.reserve(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        const double t = t_begin + (t_end - t_begin) * k / (n_samples - 1);
        out.push_back(project_point(model, line.at(t)));
    }
    return out;
}

namespace {

double division_sse(const PolynomialFisheyeModel& poly, std::span<const double> thetas,
                    double f, double lambda) {
    if (!(f > 0.0)) return std::numeric_limits<double>::infinity();
    DivisionModel m(f, lambda, poly.principal_point(), kPi - 1e-6);
    double sse = 0.0;
    for (double theta : thetas) {
        if (theta > m.max_field_angle()) return std::numeric_limits<double>::infinity();
        double r;
        try {
            r = m.radius_from_field_angle(theta);
        } catch (const Unrepresentable&) {
            return std::numeric_limits<double>::infinity();
        }
        const double e = r - poly.radius_from_field_angle(theta);
        sse += e * e;
    }
    return sse;
}

}  // namespace

DivisionFitResult fit_division_model(const PolynomialFisheyeModel& poly,
                                     std::span<const double> theta_samples) {
    if (theta_samples.size() < 8)
        throw DegenerateInput("fit_division_model: need at least 8 field-angle samples");
    double theta_max = 0.0;
    for (double t : theta_samples) {
        if (t < 0.0 || t > poly.max_field_angle())
            throw AngleOutOfRange("fit_division_model: sample outside [0, max_field_angle]");
        theta_max = std::max(theta_max, t);
    }

    // Seed: f from the small-angle slope, lambda from matching the far radius.
    const double f0 = poly.coeffs()[0];
    double lambda0 = -1e-6;
    {
        const double r_far = poly.radius_from_field_angle(theta_max);
        const double t_far = std::tan(theta_max);
        if (r_far > 0.0 && std::abs(t_far) > 1e-9) {
            const double cand = (r_far / (f0 * t_far) - 1.0) / (r_far * r_far);
            if (std::isfinite(cand)) lambda0 = cand;
        }
    }

    double best_f = f0, best_lambda = lambda0;
    double best_sse = division_sse(poly, theta_samples, best_f, best_lambda);
    for (int i = -5; i <= 5; ++i) {
        for (int j = -8; j <= 8; ++j) {
            const double f = f0 * (1.0 + 0.02 * i);
            const double lambda = lambda0 * (1.0 + 0.1 * j);
            const double sse = division_sse(poly, theta_samples, f, lambda);
            if (sse < best_sse) {
                best_sse = sse;
                best_f = f;
                best_lambda = lambda;
            }
        }
    }
    const double initial_sse = best_sse;

    // Damped Gauss-Newton with a numeric Jacobian on (f, lambda).
    double damping = 1e-6;
    for (int it = 0; it < 200; ++it) {
        const double hf = std::max(1e-7, 1e-7 * std::abs(best_f));
        const double hl = std::max(1e-13, 1e-7 * std::abs(best_lambda));
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jte0 = 0, jte1 = 0;
        bool ok = true;
        DivisionModel cur(best_f, best_lambda, poly.principal_point(), kPi - 1e-6);
        DivisionModel pf(best_f + hf, best_lambda, poly.principal_point(), kPi - 1e-6);
        DivisionModel mf(std::max(1e-9, best_f - hf), best_lambda, poly.principal_point(), kPi - 1e-6);
        DivisionModel pl(best_f, best_lambda + hl, poly.principal_point(), kPi - 1e-6);
        DivisionModel ml(best_f, best_lambda - hl, poly.principal_point(), kPi - 1e-6);
        for (double theta : theta_samples) {
            double e, df, dl;
            try {
                e = cur.radius_from_field_angle(theta) - poly.radius_from_field_angle(theta);
                df = (pf.radius_from_field_angle(theta) - mf.radius_from_field_angle(theta)) / (2.0 * hf);
                dl = (pl.radius_from_field_angle(theta) - ml.radius_from_field_angle(theta)) / (2.0 * hl);
            } catch (const Error&) {
                ok = false;
                break;
            }
            jtj00 += df * df;
            jtj01 += df * dl;
            jtj11 += dl * dl;
            jte0 += df * e;
            jte1 += dl * e;
        }
        if (!ok) break;
        const double a00 = jtj00 * (1.0 + damping);
        const double a11 = jtj11 * (1.0 + damping);
        const double det = a00 * a11 - jtj01 * jtj01;
        if (std::abs(det) < 1e-300) break;
        const double step_f = -(a11 * jte0 - jtj01 * jte1) / det;
        const double step_l = -(a00 * jte1 - jtj01 * jte0) / det;
        const double cand_f = best_f + step_f;
        const double cand_l = best_lambda + step_l;
        const double cand_sse = division_sse(poly, theta_samples, cand_f, cand_l);
        if (cand_sse < best_sse) {
            best_f = cand_f;
            best_lambda = cand_l;
            const double rel = (best_sse - cand_sse) / std::max(best_sse, 1e-30);
            best_sse = cand_sse;
            damping = std::max(damping * 0.5, 1e-12);
            if (rel < 1e-14) break;
        } else {
            damping *= 8.0;
            if (damping > 1e8) break;
        }
    }

    // Derivative-free fallback: coordinate-wise golden-section refinement.
    if (best_sse > 0.0) {
        auto refine_1d = [&](bool on_f) {
            const double center = on_f ? best_f : best_lambda;
            double lo = center * (on_f ? 0.98 : 1.2);
            double hi = center * (on_f ? 1.02 : 0.8);
            if (lo > hi) std::swap(lo, hi);
            const double gr = 0.61803398875;
            double a = lo, b = hi;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            auto eval = [&](double x) {
                return on_f ? division_sse(poly, theta_samples, x, best_lambda)
                            : division_sse(poly, theta_samples, best_f, x);
            };
            double fc = eval(c), fd = eval(d);
            for (int i = 0; i < 60; ++i) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - gr * (b - a);
                    fc = eval(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + gr * (b - a);
                    fd = eval(d);
                }
            }
            const double x = 0.5 * (a + b);
            const double sx = eval(x);
            if (sx < best_sse) {
                best_sse = sx;
                (on_f ? best_f : best_lambda) = x;
            }
        };
        for (int round = 0; round < 3; ++round) {
            refine_1d(true);
            refine_1d(false);
        }
    }

    if (!(best_sse <= initial_sse) || !std::isfinite(best_sse))
        throw FitDiverged("fit_division_model: optimizer failed to improve on the seed");

    DivisionFitResult out{DivisionModel(best_f, best_lambda, poly.principal_point(),
                                        poly.max_field_angle()),
                          std::vector<double>(theta_samples.begin(), theta_samples.end()),
                          {},
                          0.0,
                          0.0};
    out.residuals.reserve(theta_samples.size());
    double sq = 0.0;
    for (double theta : theta_samples) {
        const double e = out.model.radius_from_field_angle(theta) -
                         poly.radius_from_field_angle(theta);
        out.residuals.push_back(e);
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(e));
        sq += e * e;
    }
    out.rms_residual = std::sqrt(sq / static_cast<double>(theta_samples.size()));
    return out;
}

DivisionFitResult fit_division_model(const PolynomialFisheyeModel& poly, int n_samples) {
    if (n_samples < 8) throw DegenerateInput("fit_division_model: need at least 8 samples");
    std::vector<double> thetas(n_samples);
    for (int i = 0; i < n_samples; ++i)
        thetas[i] = poly.max_field_angle() * i / (n_samples - 1);
    return fit_division_model(poly, thetas);
}

double line_circle_residual(const RadialCameraModel& model, const Line3D& line,
                            double t_begin, double t_end, int n_samples) {
    if (n_samples < 5) throw DegenerateInput("line_circle_residual: need at least 5 samples");
    const std::vector<Vec2> pts = project_line_curve(model, line, t_begin, t_end, n_samples);
    const CircleFitResult fit = fit_circle_kasa(pts);
    return fit.max_residual();
}

Pose make_camera_pose(Vec3 position, double yaw_deg, double pitch_down_deg) {
    // Base orientation: optical axis along vehicle +x, image-right along -y,
    // image-down along -z. Yaw about vehicle z, then pitch about the camera x.
    const Mat3 base{{0, 0, 1,
                     -1, 0, 0,
                     0, -1, 0}};
    const Mat3 r = Mat3::rot_z(deg_to_rad(yaw_deg)) * base * Mat3::rot_x(deg_to_rad(-pitch_down_deg));
    return {r, position};
}

const char* camera_id_name(CameraId id) {
    switch (id) {
        case CameraId::front: return "front";
        case CameraId::rear: return "rear";
        case CameraId::left: return "left";
        case CameraId::right: return "right";
    }
    return "unknown";
}

CameraId camera_id_from_name(const std::string& name) {
    if (name == "front") return CameraId::front;
    if (name == "rear") return CameraId::rear;
    if (name == "left") return CameraId::left;
    if (name == "right") return CameraId::right;
    throw SchemaError("unknown camera id: " + name);
}

const RigCamera& CameraRig::camera(CameraId id) const {
    for (const RigCamera& c : cameras)
        if (c.id == id) return c;
    throw SchemaError(std::string("camera not in rig: ") + camera_id_name(id));
}

bool CameraRig::has(CameraId id) const {
    for (const RigCamera& c : cameras)
        if (c.id == id) return true;
    return false;
}

}  // namespace fisheye
