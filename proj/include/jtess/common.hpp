#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jtess {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

inline cplx unit(double turns) { return std::polar(1.0, kTwoPi * turns); }

struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};
struct NoConvergence : NumericsError {
    explicit NoConvergence(const std::string& what) : NumericsError(what) {}
};
struct Escaped : NumericsError {
    explicit Escaped(const std::string& what) : NumericsError(what) {}
};
struct NotInBasin : NumericsError {
    explicit NotInBasin(const std::string& what) : NumericsError(what) {}
};

}  // namespace jtess
