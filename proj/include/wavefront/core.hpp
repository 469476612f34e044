#pragma once
/**
 * @file core.hpp
 * @brief Shared vocabulary for the wavefront library: 2D vectors, angles,
 *        the error hierarchy and shortest round-trip number formatting.
 *
 * Everything in this library reports failures by exception. The CLI maps
 * each exception type onto a process exit code:
 *
 *   PreconditionError -> 1   (invalid arguments / inputs)
 *   NumericalFailure  -> 2   (event or sample budget exceeded)
 *   IoError           -> 3
 *   ParseError        -> 3   (malformed snapshot / input document)
 */

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace wavefront {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double X, double Y) : x(X), y(Y) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline Vec2 unit_direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Distance from point q to the segment [a, a + d].
inline double point_segment_distance(Vec2 q, Vec2 a, Vec2 d) {
    const Vec2 w = q - a;
    const double dd = d.dot(d);
    double lambda = 0.0;
    if (dd > 0.0) {
        lambda = w.dot(d) / dd;
        if (lambda < 0.0) lambda = 0.0;
        if (lambda > 1.0) lambda = 1.0;
    }
    return (w - d * lambda).norm();
}

/// x mod m, in [0, m).
inline double wrap_mod(double x, double m) {
    double r = std::fmod(x, m);
    if (r < 0.0) r += m;
    if (r >= m) r -= m;  // fmod of tiny negatives can round up to m
    return r;
}

/// x mod m, in [-m/2, m/2).
inline double wrap_centered(double x, double m) {
    return x - m * std::floor(x / m + 0.5);
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

struct PreconditionError : Error {
    using Error::Error;
    const char* kind() const noexcept override { return "precondition"; }
};

struct NumericalFailure : Error {
    using Error::Error;
    const char* kind() const noexcept override { return "numerical"; }
};

struct IoError : Error {
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line_, std::size_t column_)
        : Error(what + " (line " + std::to_string(line_) + ", column " +
                std::to_string(column_) + ")"),
          line(line_), column(column_) {}
    const char* kind() const noexcept override { return "parse"; }
    std::size_t line;
    std::size_t column;
};

inline void require(bool ok, const std::string& message) {
    if (!ok) throw PreconditionError(message);
}

// ---------------------------------------------------------------------------
// Numbers
// ---------------------------------------------------------------------------

/// Shortest decimal that parses back to exactly the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }

/// Strict parse of a whole string as a finite double.
inline bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && std::isfinite(out);
}

}  // namespace wavefront
