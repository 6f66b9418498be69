#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace evmaas {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the file and line.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// External solver crashed or produced output we could not read.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::string raw_output)
        : Error(what), raw_output_(std::move(raw_output)) {}

    const std::string& raw_output() const { return raw_output_; }

private:
    std::string raw_output_;
};

struct Point {
    double x = 0.0;  // km
    double y = 0.0;  // km

    friend bool operator==(const Point&, const Point&) = default;
};

inline double euclidean(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

constexpr double kMinutesPerHour = 60.0;

}  // namespace evmaas
