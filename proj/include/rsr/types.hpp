#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsr {

using cplx = std::complex<double>;
using PointTuple = std::vector<cplx>;
using RealTuple = std::vector<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline PointTuple to_points(const RealTuple& r)
{
    return PointTuple(r.begin(), r.end());
}

inline RealTuple real_part(const PointTuple& p)
{
    RealTuple out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out[i] = p[i].real();
    return out;
}

inline PointTuple negate(const PointTuple& p)
{
    PointTuple out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out[i] = -p[i];
    return out;
}

inline double rel_diff(cplx a, cplx b, double floor = 1e-300)
{
    double d = std::max({std::abs(a), std::abs(b), floor});
    return std::abs(a - b) / d;
}

} // namespace rsr
