#pragma once

#include <cmath>
#include <ostream>

namespace coclab {

/// Real value extended by tagged +/-infinity. The tag is explicit so that an
/// infinite result can never leak into arithmetic as an IEEE sentinel.
class ext_real {
  public:
    constexpr ext_real() : value_(0.0), tag_(tag::finite) {}
    constexpr ext_real(double v) : value_(v), tag_(tag::finite) {}

    static constexpr ext_real neg_inf() { return ext_real(0.0, tag::neg_inf); }
    static constexpr ext_real pos_inf() { return ext_real(0.0, tag::pos_inf); }

    constexpr bool finite() const { return tag_ == tag::finite; }
    constexpr bool is_neg_inf() const { return tag_ == tag::neg_inf; }
    constexpr bool is_pos_inf() const { return tag_ == tag::pos_inf; }

    /// Finite value; calling this on an infinite tag is a logic error, so the
    /// accessor traps loudly in that case.
    double value() const {
        if (!finite())
            std::abort();
        return value_;
    }

    /// |u| as an ext_real (infinite tags map to +inf).
    ext_real abs() const {
        if (finite())
            return ext_real(std::fabs(value_));
        return pos_inf();
    }

    /// |u| >= t for finite t; infinite tags compare as expected.
    bool abs_geq(double t) const {
        if (finite())
            return std::fabs(value_) >= t;
        return true;
    }

    friend bool operator==(const ext_real& a, const ext_real& b) {
        return a.tag_ == b.tag_ && (a.tag_ != tag::finite || a.value_ == b.value_);
    }

    friend std::ostream& operator<<(std::ostream& os, const ext_real& x) {
        if (x.is_neg_inf())
            return os << "-inf";
        if (x.is_pos_inf())
            return os << "+inf";
        return os << x.value_;
    }

  private:
    enum class tag { finite, neg_inf, pos_inf };
    constexpr ext_real(double v, tag t) : value_(v), tag_(t) {}

    double value_;
    tag tag_;
};

} // namespace coclab
