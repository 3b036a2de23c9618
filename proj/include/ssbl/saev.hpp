#pragma once

// Spatial-softmax feature points: channel distributions, their expected
// coordinates and presence, the radial decoder map, and the three losses.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace ssbl {

/// W x H x C values, channel-major: at(i, j, c) = values[(c*H + j)*W + i],
/// i the column (x), j the row (y).
struct FeatureGrid {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> values;

    FeatureGrid() = default;
    FeatureGrid(int w, int h, int c, double fill = 0.0);

    std::size_t plane() const { return static_cast<std::size_t>(width) * height; }
    double& at(int i, int j, int c) { return values[(static_cast<std::size_t>(c) * height + j) * width + i]; }
    double at(int i, int j, int c) const { return values[(static_cast<std::size_t>(c) * height + j) * width + i]; }
    std::span<const double> channel(int c) const { return std::span(values).subspan(c * plane(), plane()); }
    std::span<double> channel(int c) { return std::span(values).subspan(c * plane(), plane()); }
    bool same_shape(const FeatureGrid& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

struct FeaturePoint {
    double x = 0.0;
    double y = 0.0;
    double presence = 0.0;
};

struct SaevConfig {
    double k = 1.0;  // kernel variance, pixels^2
    double w_err = 1.0;
    double w_pre = 1.0;
    double w_smooth = 1.0;

    void validate() const;
};

FeatureGrid spatial_softmax(const FeatureGrid& logits);

struct Coordinates {
    double x = 0.0;
    double y = 0.0;
};

/// (E[i], E[j]) of one channel laid out row-major with the given width.
Coordinates expected_coordinates(std::span<const double> p, int width, int height);

double presence(std::span<const double> p, int width, int height, double x, double y, double k);

/// Softmax, expectation and presence for every channel.
std::vector<FeaturePoint> feature_points(const FeatureGrid& logits, double k);

double elu(double z);

FeatureGrid delta_map(std::span<const FeaturePoint> points, int width, int height);

struct SaevLosses {
    double err = 0.0;
    double pre = 0.0;
    double smooth = 0.0;
};

/// points_* are the per-time encodings; they must all have equal length.
SaevLosses saev_losses(const FeatureGrid& recon, const FeatureGrid& target,
                       std::span<const FeaturePoint> points_tm1, std::span<const FeaturePoint> points_t,
                       std::span<const FeaturePoint> points_tp1);

/// Weighted loss of the full chain: logits at time t -> points -> Δ map
/// as the reconstruction, with the neighboring encodings held fixed.
double saev_objective(const FeatureGrid& logits_t, const FeatureGrid& target,
                      std::span<const FeaturePoint> points_tm1, std::span<const FeaturePoint> points_tp1,
                      const SaevConfig& cfg);

/// Analytic d(saev_objective)/d(logits_t), same layout as the logits.
std::vector<double> saev_objective_gradient(const FeatureGrid& logits_t, const FeatureGrid& target,
                                            std::span<const FeaturePoint> points_tm1,
                                            std::span<const FeaturePoint> points_tp1, const SaevConfig& cfg);

/// Vector-Jacobian product of one channel's expected coordinates:
/// d(wx*x + wy*y)/dz for the logits z of that channel.
std::vector<double> coordinate_vjp(std::span<const double> logits, int width, int height, double wx, double wy);

struct SaevGradientReport {
    int grids = 0;
    std::size_t entries = 0;
    double max_relative_error = 0.0;
    bool passed = false;
};

inline constexpr double kSaevGradientTolerance = 1e-4;

/// Central differences against the analytic gradient on random grids.
SaevGradientReport saev_gradient_check(std::uint64_t seed, int grids = 20, int width = 8, int height = 8,
                                       int channels = 3, const SaevConfig& cfg = {});

/// Runs the property suite and the gradient check; "passed" is the overall
/// verdict.
nlohmann::json features_check_report(std::uint64_t seed, const SaevConfig& cfg = {});

}  // namespace ssbl
