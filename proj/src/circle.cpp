#include "arnoldflow/circle.hpp"

namespace arnoldflow {

namespace {

u128 frac_to_turns(double y) {
    // y in [0,1)
    if (y == 0.0) return 0;
    int e = 0;
    double m = std::frexp(y, &e);  // y = m 2^e, m in [0.5,1)
    auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
    int shift = 128 + e - 53;
    if (shift >= 0) return static_cast<u128>(mant) << shift;
    if (shift <= -64) return 0;
    return static_cast<u128>(mant >> (-shift));
}

}  // namespace

CirclePoint CirclePoint::from_double(double x) {
    double y = std::fmod(x, 1.0);
    if (y >= 0.0) return CirclePoint{frac_to_turns(y)};
    return CirclePoint{static_cast<u128>(-frac_to_turns(-y))};
}

double turns_to_double(u128 t) {
    double v = std::ldexp(static_cast<double>(t), -128);
    return v;
}

double CirclePoint::value() const {
    double v = turns_to_double(turns);
    if (v >= 1.0) v = std::nextafter(1.0, 0.0);
    return v;
}

double CirclePoint::complement() const {
    if (turns == 0) return 1.0;
    return turns_to_double(static_cast<u128>(-turns));
}

double CirclePoint::dist() const { return turns_to_double(dist_turns()); }

}  // namespace arnoldflow
