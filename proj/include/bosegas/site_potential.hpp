#pragma once

#include <vector>

namespace bosegas {

enum class SiteShape { box, triangle, tabulated, delta_spike };

/// Repulsive single-site potential u >= 0 supported on
/// [-support_left, support_right], scaled by a nonnegative strength factor.
/// The delta_spike shape is the point-interaction limit: zero support width,
/// weight `height`; it has no pointwise values and is special-cased during
/// grid assembly (weight/h at the nearest cell).
///
/// strength_scale == 0 is allowed and means "potential switched off"
/// (free-operator control runs).
class SingleSitePotential {
public:
    static SingleSitePotential box(double height, double support_left,
                                   double support_right, double strength_scale);
    static SingleSitePotential triangle(double peak, double support_left,
                                        double support_right, double strength_scale);
    /// samples: >= 2 nonnegative values on a uniform grid spanning
    /// [-support_left, support_right]; the profile is their linear interpolant.
    static SingleSitePotential tabulated(std::vector<double> samples,
                                         double support_left, double support_right,
                                         double strength_scale);
    static SingleSitePotential delta_spike(double weight, double strength_scale);

    SiteShape shape() const { return shape_; }
    double support_left() const { return support_left_; }
    double support_right() const { return support_right_; }
    /// total support width C_u = C_left + C_right (0 for delta_spike)
    double support_width() const { return support_left_ + support_right_; }
    double strength_scale() const { return scale_; }
    /// shape parameter: box height, triangle peak, or delta weight
    double height() const { return height_; }

    /// Unscaled profile u(x); zero outside the support.  Not defined for
    /// delta_spike (throws).
    double profile_value(double x) const;
    /// Scaled potential value strength_scale * u(x).
    double value(double x) const { return scale_ * profile_value(x); }

    /// Exact integral of the unscaled profile over [lo, hi] (clipped to the
    /// support).  For delta_spike: weight if 0 in [lo, hi], else 0.
    double profile_integral(double lo, double hi) const;

    /// Effective obstacle strength of the scaled potential:
    /// strength_scale * min(int_0^Cr u, int_{-Cl}^0 u).
    /// For delta_spike: strength_scale * weight.
    double strength() const;

    /// Returns a copy with a different strength scale (used by per-size
    /// strength ladders).
    SingleSitePotential with_strength_scale(double scale) const;

private:
    SingleSitePotential() = default;

    SiteShape shape_ = SiteShape::box;
    double support_left_ = 0.0;
    double support_right_ = 0.0;
    double scale_ = 1.0;
    double height_ = 1.0;            // box height / triangle peak / delta weight
    std::vector<double> samples_;    // tabulated only
};

} // namespace bosegas
