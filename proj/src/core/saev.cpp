#include "ssbl/saev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssbl/error.hpp"
#include "ssbl/rng.hpp"

namespace ssbl {

FeatureGrid::FeatureGrid(int w, int h, int c, double fill) : width(w), height(h), channels(c) {
    if (w <= 0 || h <= 0 || c <= 0) throw Error(ErrorCode::InvalidArgument, "FeatureGrid: non-positive dimension");
    values.assign(static_cast<std::size_t>(w) * h * c, fill);
}

void SaevConfig::validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorCode::Config, "saev: k must be > 0");
    for (double w : {w_err, w_pre, w_smooth})
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::Config, "saev: loss weights must be >= 0");
}

FeatureGrid spatial_softmax(const FeatureGrid& logits) {
    FeatureGrid out = logits;
    for (int c = 0; c < logits.channels; ++c) {
        std::span<double> ch = out.channel(c);
        const double peak = *std::max_element(ch.begin(), ch.end());
        double sum = 0.0;
        for (double& v : ch) {
            v = std::exp(v - peak);
            sum += v;
        }
        for (double& v : ch) v /= sum;
    }
    return out;
}

Coordinates expected_coordinates(std::span<const double> p, int width, int height) {
    Coordinates c;
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < width; ++i) {
            const double v = p[static_cast<std::size_t>(j) * width + i];
            c.x += v * i;
            c.y += v * j;
        }
    return c;
}

double presence(std::span<const double> p, int width, int height, double x, double y, double k) {
    double rho = 0.0;
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < width; ++i) {
            const double dx = i - x, dy = j - y;
            rho += p[static_cast<std::size_t>(j) * width + i] * std::exp(-(dx * dx + dy * dy) / (2.0 * k));
        }
    return rho;
}

std::vector<FeaturePoint> feature_points(const FeatureGrid& logits, double k) {
    const FeatureGrid p = spatial_softmax(logits);
    std::vector<FeaturePoint> pts(static_cast<std::size_t>(p.channels));
    for (int c = 0; c < p.channels; ++c) {
        const Coordinates xy = expected_coordinates(p.channel(c), p.width, p.height);
        pts[c] = {xy.x, xy.y, presence(p.channel(c), p.width, p.height, xy.x, xy.y, k)};
    }
    return pts;
}

double elu(double z) { return z >= 0.0 ? z : std::expm1(z); }

namespace {

double elu_grad(double z) { return z >= 0.0 ? 1.0 : std::exp(z); }

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void flatten(std::span<const FeaturePoint> pts, std::vector<double>& out) {
    out.clear();
    for (const FeaturePoint& p : pts) {
        out.push_back(p.x);
        out.push_back(p.y);
        out.push_back(p.presence);
    }
}

}  // namespace

FeatureGrid delta_map(std::span<const FeaturePoint> points, int width, int height) {
    FeatureGrid out(width, height, static_cast<int>(points.size()));
    for (int c = 0; c < out.channels; ++c) {
        const FeaturePoint& fp = points[c];
        for (int j = 0; j < height; ++j)
            for (int i = 0; i < width; ++i) out.at(i, j, c) = elu(fp.presence - std::hypot(i - fp.x, j - fp.y));
    }
    return out;
}

SaevLosses saev_losses(const FeatureGrid& recon, const FeatureGrid& target,
                       std::span<const FeaturePoint> points_tm1, std::span<const FeaturePoint> points_t,
                       std::span<const FeaturePoint> points_tp1) {
    if (!recon.same_shape(target)) throw Error(ErrorCode::InvalidArgument, "saev_losses: recon/target shape mismatch");
    if (points_tm1.size() != points_t.size() || points_tp1.size() != points_t.size())
        throw Error(ErrorCode::InvalidArgument, "saev_losses: encoding length mismatch");
    SaevLosses l;
    std::vector<double> diff(recon.values.size());
    for (std::size_t n = 0; n < diff.size(); ++n) diff[n] = recon.values[n] - target.values[n];
    l.err = norm(diff);
    if (!points_t.empty()) {
        for (const FeaturePoint& p : points_t) l.pre += 1.0 - p.presence;
        l.pre /= static_cast<double>(points_t.size());
    }
    std::vector<double> a, b, c;
    flatten(points_tm1, a);
    flatten(points_t, b);
    flatten(points_tp1, c);
    std::vector<double> second(b.size());
    for (std::size_t n = 0; n < b.size(); ++n) second[n] = (c[n] - b[n]) - (b[n] - a[n]);
    l.smooth = norm(second);
    return l;
}

double saev_objective(const FeatureGrid& logits_t, const FeatureGrid& target,
                      std::span<const FeaturePoint> points_tm1, std::span<const FeaturePoint> points_tp1,
                      const SaevConfig& cfg) {
    const std::vector<FeaturePoint> pts = feature_points(logits_t, cfg.k);
    const FeatureGrid recon = delta_map(pts, logits_t.width, logits_t.height);
    const SaevLosses l = saev_losses(recon, target, points_tm1, pts, points_tp1);
    return cfg.w_err * l.err + cfg.w_pre * l.pre + cfg.w_smooth * l.smooth;
}

std::vector<double> saev_objective_gradient(const FeatureGrid& logits_t, const FeatureGrid& target,
                                            std::span<const FeaturePoint> points_tm1,
                                            std::span<const FeaturePoint> points_tp1, const SaevConfig& cfg) {
    const int W = logits_t.width, H = logits_t.height, C = logits_t.channels;
    if (!logits_t.same_shape(target)) throw Error(ErrorCode::InvalidArgument, "saev: logits/target shape mismatch");
    if (points_tm1.size() != static_cast<std::size_t>(C) || points_tp1.size() != static_cast<std::size_t>(C))
        throw Error(ErrorCode::InvalidArgument, "saev: encoding length mismatch");

    const FeatureGrid p = spatial_softmax(logits_t);
    std::vector<FeaturePoint> pts(static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) {
        const Coordinates xy = expected_coordinates(p.channel(c), W, H);
        pts[c] = {xy.x, xy.y, presence(p.channel(c), W, H, xy.x, xy.y, cfg.k)};
    }
    const FeatureGrid recon = delta_map(pts, W, H);

    double err = 0.0;
    for (std::size_t n = 0; n < recon.values.size(); ++n) {
        const double d = recon.values[n] - target.values[n];
        err += d * d;
    }
    err = std::sqrt(err);

    std::vector<double> second(3 * static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) {
        second[3 * c + 0] = points_tp1[c].x - 2.0 * pts[c].x + points_tm1[c].x;
        second[3 * c + 1] = points_tp1[c].y - 2.0 * pts[c].y + points_tm1[c].y;
        second[3 * c + 2] = points_tp1[c].presence - 2.0 * pts[c].presence + points_tm1[c].presence;
    }
    const double smooth = norm(second);

    std::vector<double> grad(logits_t.values.size(), 0.0);
    std::vector<double> d_p(p.plane());
    for (int c = 0; c < C; ++c) {
        const FeaturePoint& fp = pts[c];
        // Upstream gradients on (x, y, rho).
        double gx = 0.0, gy = 0.0, gr = -cfg.w_pre / C;
        if (smooth > 0.0) {
            gx += cfg.w_smooth * -2.0 * second[3 * c + 0] / smooth;
            gy += cfg.w_smooth * -2.0 * second[3 * c + 1] / smooth;
            gr += cfg.w_smooth * -2.0 * second[3 * c + 2] / smooth;
        }
        if (err > 0.0) {
            for (int j = 0; j < H; ++j)
                for (int i = 0; i < W; ++i) {
                    const double dx = i - fp.x, dy = j - fp.y;
                    const double r = std::hypot(dx, dy);
                    const double up = cfg.w_err * (recon.at(i, j, c) - target.at(i, j, c)) / err *
                                      elu_grad(fp.presence - r);
                    gr += up;
                    if (r > 0.0) {
                        gx += up * dx / r;
                        gy += up * dy / r;
                    }
                }
        }
        // rho depends on P directly and through (x, y).
        std::span<const double> pc = p.channel(c);
        double Gx = 0.0, Gy = 0.0;
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i) {
                const double dx = i - fp.x, dy = j - fp.y;
                const double pg = pc[static_cast<std::size_t>(j) * W + i] * std::exp(-(dx * dx + dy * dy) / (2.0 * cfg.k));
                Gx += pg * dx / cfg.k;
                Gy += pg * dy / cfg.k;
            }
        double dot = 0.0;
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i) {
                const std::size_t n = static_cast<std::size_t>(j) * W + i;
                const double dx = i - fp.x, dy = j - fp.y;
                const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * cfg.k));
                d_p[n] = gx * i + gy * j + gr * (g + i * Gx + j * Gy);
                dot += pc[n] * d_p[n];
            }
        std::span<double> out = std::span(grad).subspan(c * p.plane(), p.plane());
        for (std::size_t n = 0; n < out.size(); ++n) out[n] = pc[n] * (d_p[n] - dot);
    }
    return grad;
}

std::vector<double> coordinate_vjp(std::span<const double> logits, int width, int height, double wx, double wy) {
    FeatureGrid g(width, height, 1);
    std::copy(logits.begin(), logits.end(), g.values.begin());
    const FeatureGrid p = spatial_softmax(g);
    const Coordinates xy = expected_coordinates(p.values, width, height);
    std::vector<double> out(p.values.size());
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < width; ++i) {
            const std::size_t n = static_cast<std::size_t>(j) * width + i;
            out[n] = p.values[n] * (wx * (i - xy.x) + wy * (j - xy.y));
        }
    return out;
}

namespace {

FeatureGrid random_grid(Rng& rng, int w, int h, int c, double lo, double hi) {
    FeatureGrid g(w, h, c);
    for (double& v : g.values) v = rng.uniform(lo, hi);
    return g;
}

std::vector<FeaturePoint> random_points(Rng& rng, int w, int h, int c) {
    std::vector<FeaturePoint> pts(static_cast<std::size_t>(c));
    for (FeaturePoint& p : pts) p = {rng.uniform(0.0, w - 1.0), rng.uniform(0.0, h - 1.0), rng.uniform(0.0, 1.0)};
    return pts;
}

}  // namespace

SaevGradientReport saev_gradient_check(std::uint64_t seed, int grids, int width, int height, int channels,
                                       const SaevConfig& cfg) {
    cfg.validate();
    SaevGradientReport rep;
    Rng rng(seed);
    constexpr double kStep = 1e-3;
    constexpr double kFloor = 1e-6;
    for (int g = 0; g < grids; ++g) {
        FeatureGrid logits = random_grid(rng, width, height, channels, -2.0, 2.0);
        const FeatureGrid target = random_grid(rng, width, height, channels, -1.0, 1.0);
        const std::vector<FeaturePoint> prev = random_points(rng, width, height, channels);
        const std::vector<FeaturePoint> next = random_points(rng, width, height, channels);
        const std::vector<double> analytic = saev_objective_gradient(logits, target, prev, next, cfg);
        auto central = [&](std::size_t n, double h) {
            const double keep = logits.values[n];
            logits.values[n] = keep + h;
            const double up = saev_objective(logits, target, prev, next, cfg);
            logits.values[n] = keep - h;
            const double down = saev_objective(logits, target, prev, next, cfg);
            logits.values[n] = keep;
            return (up - down) / (2.0 * h);
        };
        for (std::size_t n = 0; n < analytic.size(); ++n) {
            // Richardson extrapolation of two central differences.
            const double numeric = (4.0 * central(n, kStep / 2.0) - central(n, kStep)) / 3.0;
            const double denom = std::max({std::abs(analytic[n]), std::abs(numeric), kFloor});
            rep.max_relative_error = std::max(rep.max_relative_error, std::abs(analytic[n] - numeric) / denom);
        }
        rep.entries += analytic.size();
        ++rep.grids;
    }
    rep.passed = rep.max_relative_error < kSaevGradientTolerance;
    return rep;
}

nlohmann::json features_check_report(std::uint64_t seed, const SaevConfig& cfg) {
    cfg.validate();
    using nlohmann::json;
    json checks = json::array();
    bool all = true;
    auto record = [&](const char* name, bool ok, json detail) {
        all = all && ok;
        checks.push_back({{"name", name}, {"passed", ok}, {"detail", std::move(detail)}});
    };
    Rng rng(derive_seed(seed, 1, 0));

    {
        double worst_sum = 0.0;
        bool non_negative = true;
        double worst_shift = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            FeatureGrid z = random_grid(rng, 8, 8, 3, -5.0, 5.0);
            const FeatureGrid p = spatial_softmax(z);
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (double v : p.channel(c)) {
                    s += v;
                    non_negative = non_negative && v >= 0.0;
                }
                worst_sum = std::max(worst_sum, std::abs(s - 1.0));
                const double shift = rng.uniform(-10.0, 10.0);
                for (double& v : z.channel(c)) v += shift;
            }
            const FeatureGrid q = spatial_softmax(z);
            for (std::size_t n = 0; n < q.values.size(); ++n)
                worst_shift = std::max(worst_shift, std::abs(q.values[n] - p.values[n]));
        }
        record("softmax_normalized", worst_sum <= 1e-6 && non_negative, {{"max_sum_error", worst_sum}});
        record("softmax_shift_invariant", worst_shift <= 1e-12, {{"max_abs_diff", worst_shift}});
    }
    {
        double worst = 0.0;
        for (int w : {3, 4, 8, 9}) {
            const FeatureGrid p = spatial_softmax(FeatureGrid(w, w + 1, 1, 0.7));
            const Coordinates xy = expected_coordinates(p.values, w, w + 1);
            worst = std::max({worst, std::abs(xy.x - (w - 1) / 2.0), std::abs(xy.y - w / 2.0)});
        }
        record("uniform_expectation_center", worst <= 1e-12, {{"max_abs_error", worst}});
    }
    {
        double worst = 0.0;
        FeatureGrid p(8, 8, 1);
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) {
                std::fill(p.values.begin(), p.values.end(), 0.0);
                p.at(i, j, 0) = 1.0;
                const Coordinates xy = expected_coordinates(p.values, 8, 8);
                worst = std::max(worst, std::abs(presence(p.values, 8, 8, xy.x, xy.y, cfg.k) - 1.0));
            }
        record("point_mass_presence", worst <= 1e-12, {{"max_abs_error", worst}});
    }
    {
        const FeatureGrid p = spatial_softmax(FeatureGrid(32, 32, 1));
        const Coordinates xy = expected_coordinates(p.values, 32, 32);
        const double rho = presence(p.values, 32, 32, xy.x, xy.y, 1.0);
        record("uniform_presence_low", rho < 0.1, {{"presence", rho}});
    }
    {
        bool ordered = true;
        for (double k : {0.5, 1.0, 4.0}) {
            FeatureGrid narrow(9, 9, 1), wide(9, 9, 1);
            for (int j = 0; j < 9; ++j)
                for (int i = 0; i < 9; ++i) {
                    const double r2 = (i - 4.0) * (i - 4.0) + (j - 4.0) * (j - 4.0);
                    narrow.at(i, j, 0) = -r2 / 2.0;
                    wide.at(i, j, 0) = -r2 / 8.0;
                }
            const auto a = feature_points(narrow, k), b = feature_points(wide, k);
            ordered = ordered && a[0].presence > b[0].presence;
        }
        record("localization_ordering", ordered, json::object());
    }
    {
        const std::vector<FeaturePoint> pts{{2.5, 3.0, 0.8}, {0.0, 7.0, 0.3}};
        const FeatureGrid d = delta_map(pts, 64, 64);
        bool monotone = true;
        for (int c = 0; c < 2; ++c) {
            double prev = std::numeric_limits<double>::infinity();
            for (int i = static_cast<int>(std::ceil(pts[c].x)); i < 64; ++i) {
                const double v = d.at(i, static_cast<int>(pts[c].y), c);
                monotone = monotone && v <= prev;
                prev = v;
            }
        }
        const double peak = delta_map(std::vector<FeaturePoint>{{3.0, 3.0, 0.8}}, 8, 8).at(3, 3, 0);
        const double far = d.at(63, 63, 1);
        record("delta_map_shape", monotone && std::abs(peak - 0.8) <= 1e-12 && std::abs(far + 1.0) < 1e-12,
               {{"peak", peak}, {"far", far}});
    }
    {
        const FeatureGrid t = random_grid(rng, 8, 8, 2, -1.0, 1.0);
        const std::vector<FeaturePoint> a{{1, 2, 1}, {3, 3, 1}}, b{{2, 3, 1}, {3, 4, 1}}, c{{3, 4, 1}, {3, 5, 1}};
        const SaevLosses l = saev_losses(t, t, a, b, c);
        record("losses_vanish", l.err == 0.0 && l.pre == 0.0 && std::abs(l.smooth) <= 1e-12,
               {{"err", l.err}, {"pre", l.pre}, {"smooth", l.smooth}});
    }
    {
        const std::vector<double> flat(64, 0.3);
        double worst = 0.0;
        for (double v : coordinate_vjp(flat, 8, 8, 1.0, 0.0)) worst = std::max(worst, std::abs(v));
        for (double v : coordinate_vjp(flat, 8, 8, 0.0, 1.0)) worst = std::max(worst, std::abs(v));
        double sum = 0.0;
        std::vector<double> z(64);
        for (double& v : z) v = rng.uniform(-2.0, 2.0);
        for (double v : coordinate_vjp(z, 8, 8, 1.0, 1.0)) sum += v;
        record("uniform_shift_gradient_zero", std::abs(sum) <= 1e-12,
               {{"uniform_shift_response", sum}, {"max_gradient_at_constant", worst}});
    }
    const SaevGradientReport g = saev_gradient_check(derive_seed(seed, 2, 0), 20, 8, 8, 3, cfg);
    const SaevGradientReport again = saev_gradient_check(derive_seed(seed, 2, 0), 20, 8, 8, 3, cfg);
    record("gradient_check", g.passed,
           {{"grids", g.grids}, {"entries", g.entries}, {"max_relative_error", g.max_relative_error},
            {"tolerance", kSaevGradientTolerance}});
    record("gradient_check_deterministic", g.max_relative_error == again.max_relative_error, json::object());

    return {{"seed", seed}, {"k", cfg.k}, {"checks", checks}, {"passed", all}};
}

}  // namespace ssbl
