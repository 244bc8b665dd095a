#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "warpspec/error.hpp"

namespace warpspec {

enum class ProfileKind { model_lower_bound, radial_curvature };

inline std::string_view to_string(ProfileKind k)
{
    return k == ProfileKind::model_lower_bound ? "model_lower_bound" : "radial_curvature";
}

inline ProfileKind parse_profile_kind(std::string_view s)
{
    if (s == "model_lower_bound") return ProfileKind::model_lower_bound;
    if (s == "radial_curvature") return ProfileKind::radial_curvature;
    throw InvalidArgument("unknown profile kind '" + std::string(s) + "'");
}

/// Parameters of the inverse-square tail  -kappa + beta / r^2  (r >= r_join).
struct TailParams {
    double kappa = 0.0;
    double beta = 0.0;
    double r_join = 0.0;
};

/// A nonpositive radial curvature function.
///
/// Three flavours share one value type:
///  - tail profiles: constant on [0, r_join), -kappa + beta/r^2 beyond;
///  - tabulated profiles: piecewise-linear through (r_i, v_i), constant past the last knot;
///  - shifted copies of either, p.shifted(a)(r) = p(max(r - a, 0)).
/// Only unshifted tail profiles expose kappa/beta; everything else is "custom".
class CurvatureProfile {
public:
    static CurvatureProfile make(double kappa, double beta, double r_join,
                                 ProfileKind kind = ProfileKind::model_lower_bound)
    {
        detail::require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
        detail::require(std::isfinite(r_join) && r_join > 0.0, "r_join must be positive");
        detail::require(std::isfinite(beta) && beta >= 0.0, "beta must be nonnegative");
        detail::require(beta <= kappa * r_join * r_join,
                        "beta > kappa * r_join^2: profile would be positive at the join");
        CurvatureProfile p;
        p.kind_ = kind;
        p.tail_ = TailParams{kappa, beta, r_join};
        p.inner_ = -kappa + beta / (r_join * r_join);
        return p;
    }

    static CurvatureProfile tabulated(std::vector<double> r, std::vector<double> v,
                                      ProfileKind kind = ProfileKind::model_lower_bound)
    {
        detail::require(!r.empty() && r.size() == v.size(), "tabulated profile needs matching, nonempty knots");
        detail::require(r.front() == 0.0, "tabulated profile must start at r = 0");
        for (std::size_t i = 1; i < r.size(); ++i)
            detail::require(r[i] > r[i - 1], "tabulated radii must be strictly increasing");
        for (double x : v)
            detail::require(std::isfinite(x) && x <= 0.0, "tabulated profile must be nonpositive");
        CurvatureProfile p;
        p.kind_ = kind;
        p.inner_ = v.front();
        p.knots_r_ = std::move(r);
        p.knots_v_ = std::move(v);
        return p;
    }

    static CurvatureProfile constant(double value, ProfileKind kind = ProfileKind::model_lower_bound)
    {
        return tabulated({0.0}, {value}, kind);
    }

    static CurvatureProfile zero(ProfileKind kind = ProfileKind::model_lower_bound)
    {
        return constant(0.0, kind);
    }

    CurvatureProfile shifted(double offset) const
    {
        detail::require(std::isfinite(offset) && offset >= 0.0, "shift must be nonnegative");
        CurvatureProfile p = *this;
        p.shift_ += offset;
        return p;
    }

    double operator()(double r) const
    {
        if (shift_ != 0.0) r = std::max(r - shift_, 0.0);
        if (tail_) {
            if (r < tail_->r_join) return inner_;
            return -tail_->kappa + tail_->beta / (r * r);
        }
        if (r >= knots_r_.back()) return knots_v_.back();
        auto it = std::upper_bound(knots_r_.begin(), knots_r_.end(), r);
        const auto i = static_cast<std::size_t>(it - knots_r_.begin());
        const double w = (r - knots_r_[i - 1]) / (knots_r_[i] - knots_r_[i - 1]);
        return (1.0 - w) * knots_v_[i - 1] + w * knots_v_[i];
    }

    ProfileKind kind() const { return kind_; }
    double shift() const { return shift_; }
    bool has_tail() const { return tail_.has_value() && shift_ == 0.0; }

    const TailParams& tail() const
    {
        if (!has_tail()) throw InvalidArgument("operation needs a (kappa, beta) tail profile");
        return *tail_;
    }
    double kappa() const { return tail().kappa; }
    double beta() const { return tail().beta; }
    double r_join() const { return tail().r_join; }

    /// Value on the innermost region (at r = 0).
    double inner_value() const { return inner_; }

    /// Points where the profile is not smooth; ODE grids put nodes there.
    std::vector<double> breakpoints() const
    {
        std::vector<double> out;
        if (shift_ > 0.0) out.push_back(shift_);
        if (tail_) out.push_back(tail_->r_join + shift_);
        for (std::size_t i = 1; i < knots_r_.size(); ++i) out.push_back(knots_r_[i] + shift_);
        return out;
    }

    /// Largest |value| attained anywhere; sets the curvature length scale.
    double max_abs_value() const
    {
        double m = std::abs(inner_);
        if (tail_) m = std::max(m, tail_->kappa);
        for (double v : knots_v_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Lowest admissible r_join for a tail profile, scaled by 1.01 off the validity edge.
    static double default_r_join(double kappa, double beta)
    {
        return std::max(1.0, std::sqrt(beta / kappa) * 1.01);
    }

private:
    CurvatureProfile() = default;

    ProfileKind kind_ = ProfileKind::model_lower_bound;
    std::optional<TailParams> tail_;
    double inner_ = 0.0;
    double shift_ = 0.0;
    std::vector<double> knots_r_;
    std::vector<double> knots_v_;
};

/// Flat `key = value` block with keys kappa, beta, r_join, kind.
inline std::string to_text(const CurvatureProfile& p)
{
    const auto& t = p.tail();
    std::ostringstream os;
    os.precision(17);
    os << "kappa = " << t.kappa << "\nbeta = " << t.beta << "\nr_join = " << t.r_join
       << "\nkind = " << to_string(p.kind()) << "\n";
    return os.str();
}

inline CurvatureProfile profile_from_text(std::string_view text)
{
    std::map<std::string, std::string> kv;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw InvalidArgument("profile line without '=': " + line);
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto number = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw InvalidArgument(std::string("profile is missing '") + key + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(it->second, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != it->second.size() || it->second.empty())
            throw InvalidArgument(std::string("profile key '") + key + "' is not a number");
        return v;
    };
    for (const auto& [k, v] : kv)
        if (k != "kappa" && k != "beta" && k != "r_join" && k != "kind")
            throw InvalidArgument("unknown profile key '" + k + "'");
    const ProfileKind kind = kv.count("kind") ? parse_profile_kind(kv["kind"]) : ProfileKind::model_lower_bound;
    return CurvatureProfile::make(number("kappa"), number("beta"), number("r_join"), kind);
}

} // namespace warpspec
