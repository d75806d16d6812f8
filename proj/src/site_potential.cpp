#include "bosegas/site_potential.hpp"

#include <algorithm>
#include <cmath>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

void check_supports(double left, double right) {
    if (!(left > 0.0) || !std::isfinite(left) || !(right > 0.0) || !std::isfinite(right))
        throw InvalidParameter("SingleSitePotential: support bounds must be positive");
}

void check_scale(double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw InvalidParameter("SingleSitePotential: strength scale must be nonnegative");
}

} // namespace

SingleSitePotential SingleSitePotential::box(double height, double support_left,
                                             double support_right, double strength_scale) {
    check_supports(support_left, support_right);
    check_scale(strength_scale);
    if (!(height > 0.0))
        throw InvalidParameter("SingleSitePotential::box: height must be positive");
    SingleSitePotential u;
    u.shape_ = SiteShape::box;
    u.height_ = height;
    u.support_left_ = support_left;
    u.support_right_ = support_right;
    u.scale_ = strength_scale;
    return u;
}

SingleSitePotential SingleSitePotential::triangle(double peak, double support_left,
                                                  double support_right,
                                                  double strength_scale) {
    check_supports(support_left, support_right);
    check_scale(strength_scale);
    if (!(peak > 0.0))
        throw InvalidParameter("SingleSitePotential::triangle: peak must be positive");
    SingleSitePotential u;
    u.shape_ = SiteShape::triangle;
    u.height_ = peak;
    u.support_left_ = support_left;
    u.support_right_ = support_right;
    u.scale_ = strength_scale;
    return u;
}

SingleSitePotential SingleSitePotential::tabulated(std::vector<double> samples,
                                                   double support_left,
                                                   double support_right,
                                                   double strength_scale) {
    check_supports(support_left, support_right);
    check_scale(strength_scale);
    if (samples.size() < 2)
        throw InvalidParameter("SingleSitePotential::tabulated: need at least 2 samples");
    for (double v : samples)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidParameter("SingleSitePotential::tabulated: samples must be nonnegative");
    SingleSitePotential u;
    u.shape_ = SiteShape::tabulated;
    u.samples_ = std::move(samples);
    u.support_left_ = support_left;
    u.support_right_ = support_right;
    u.scale_ = strength_scale;
    return u;
}

SingleSitePotential SingleSitePotential::delta_spike(double weight, double strength_scale) {
    check_scale(strength_scale);
    if (!(weight > 0.0))
        throw InvalidParameter("SingleSitePotential::delta_spike: weight must be positive");
    SingleSitePotential u;
    u.shape_ = SiteShape::delta_spike;
    u.height_ = weight;
    u.support_left_ = 0.0;
    u.support_right_ = 0.0;
    u.scale_ = strength_scale;
    return u;
}

double SingleSitePotential::profile_value(double x) const {
    switch (shape_) {
    case SiteShape::box:
        return (x >= -support_left_ && x <= support_right_) ? height_ : 0.0;
    case SiteShape::triangle:
        if (x < -support_left_ || x > support_right_) return 0.0;
        if (x <= 0.0) return height_ * (1.0 + x / support_left_);
        return height_ * (1.0 - x / support_right_);
    case SiteShape::tabulated: {
        if (x < -support_left_ || x > support_right_) return 0.0;
        const double width = support_left_ + support_right_;
        const double step = width / static_cast<double>(samples_.size() - 1);
        double t = (x + support_left_) / step;
        auto last = static_cast<double>(samples_.size() - 1);
        if (t <= 0.0) return samples_.front();
        if (t >= last) return samples_.back();
        const auto i = static_cast<std::size_t>(t);
        const double frac = t - static_cast<double>(i);
        return samples_[i] * (1.0 - frac) + samples_[i + 1] * frac;
    }
    case SiteShape::delta_spike:
        throw DomainError("SingleSitePotential: delta_spike has no pointwise values");
    }
    return 0.0;
}

double SingleSitePotential::profile_integral(double lo, double hi) const {
    if (!(hi >= lo))
        throw InvalidParameter("profile_integral: requires hi >= lo");
    if (shape_ == SiteShape::delta_spike)
        return (lo <= 0.0 && hi >= 0.0) ? height_ : 0.0;

    const double a = std::max(lo, -support_left_);
    const double b = std::min(hi, support_right_);
    if (!(b > a)) return 0.0;

    switch (shape_) {
    case SiteShape::box:
        return height_ * (b - a);
    case SiteShape::triangle: {
        // integrate the two linear pieces separately
        auto piece = [this](double x0, double x1) {
            // both endpoints on the same side of 0
            const double m = 0.5 * (x0 + x1);
            return (x1 - x0) * profile_value(m); // exact: linear integrand
        };
        double total = 0.0;
        if (a < 0.0) total += piece(a, std::min(b, 0.0));
        if (b > 0.0) total += piece(std::max(a, 0.0), b);
        return total;
    }
    case SiteShape::tabulated: {
        const double width = support_left_ + support_right_;
        const double step = width / static_cast<double>(samples_.size() - 1);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
            const double x0 = -support_left_ + step * static_cast<double>(i);
            const double x1 = x0 + step;
            const double c0 = std::max(a, x0);
            const double c1 = std::min(b, x1);
            if (c1 > c0) // trapezoid on the clipped segment, exact for the interpolant
                total += (c1 - c0) * 0.5 * (profile_value(c0) + profile_value(c1));
        }
        return total;
    }
    case SiteShape::delta_spike:
        break;
    }
    return 0.0;
}

double SingleSitePotential::strength() const {
    if (shape_ == SiteShape::delta_spike)
        return scale_ * height_;
    const double right = profile_integral(0.0, support_right_);
    const double left = profile_integral(-support_left_, 0.0);
    return scale_ * std::min(left, right);
}

SingleSitePotential SingleSitePotential::with_strength_scale(double scale) const {
    check_scale(scale);
    SingleSitePotential u = *this;
    u.scale_ = scale;
    return u;
}

} // namespace bosegas
