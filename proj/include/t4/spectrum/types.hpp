#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace t4 {

inline constexpr double pi = 3.14159265358979323846;

/// Symmetry class of an eigenfunction. `Constant` marks the rigid mode
/// (u = const, mu = 0 for every tension) of the free rod, which is not part
/// of any even branch.
enum class Parity { Even, Odd, Periodic, Constant };

enum class Boundary { Free, Periodic };

/// How a spectrum value was obtained.
enum class Method { Parameterized, Determinant, FiniteDifference, Exact };

struct EigenBranchId {
    Parity parity = Parity::Even;
    int index = 0;

    friend bool operator==(const EigenBranchId&, const EigenBranchId&) = default;
};

/// The interval (-R, R).
struct DomainInterval {
    double R;

    explicit DomainInterval(double half_length) : R(half_length) {
        if (!(half_length > 0.0) || !std::isfinite(half_length))
            throw std::invalid_argument("interval half-length must be positive");
    }
};

/// The operator u'''' - tau u'' with the given boundary conditions.
struct TensionedOperator {
    double tau = 0.0;
    Boundary bc = Boundary::Free;
};

struct SpectrumPoint {
    EigenBranchId branch;
    double tau = 0.0;
    double R = 1.0;
    double mu = 0.0;
    Method method = Method::Parameterized;
};

/// A point (alpha, beta) on a free-rod branch in the upper half of the
/// spectral plane. On the unit interval it encodes tau = beta^2 - alpha^2 and
/// mu = alpha^2 beta^2.
struct BranchParameterization {
    double alpha = 0.0;
    double beta = 0.0;
    Parity parity = Parity::Odd;

    double tension() const { return beta * beta - alpha * alpha; }
    double mu() const { return alpha * alpha * beta * beta; }
};

inline std::string_view to_string(Parity p) {
    switch (p) {
        case Parity::Even: return "even";
        case Parity::Odd: return "odd";
        case Parity::Periodic: return "periodic";
        case Parity::Constant: return "constant";
    }
    return "?";
}

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::Parameterized: return "param";
        case Method::Determinant: return "det";
        case Method::FiniteDifference: return "fd";
        case Method::Exact: return "exact";
    }
    return "?";
}

inline std::string_view to_string(Boundary b) {
    return b == Boundary::Free ? "free" : "periodic";
}

}  // namespace t4
