#include "pulsekit/shape_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pulsekit {
namespace {

using nlohmann::json;

constexpr double kDegPerRad = 57.295779513082320876798154814105;

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0) w += 360.0;
    if (w >= 360.0) w = 0.0;
    return w;
}

double uniform_dt(const PulseShape& shape) {
    const double dt = shape.digits.front().dt;
    for (const auto& d : shape.digits)
        if (d.dt != dt)
            throw ShapeIoError("native shape format requires a uniform digit duration");
    return dt;
}

[[noreturn]] void fail_at_line(const std::string& path, int line, const std::string& what) {
    throw ShapeIoError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void write_shape_native(const PulseShape& shape, const std::string& path) {
    shape.validate();
    json doc;
    doc["dt_us"] = uniform_dt(shape) * 1e6;
    doc["basis"] = shape.basis.name();
    if (shape.basis.kind == BasisKind::PhaseOnly)
        doc["theta_xy_const_rad"] = shape.basis.theta_xy_const;
    json digits = json::array();
    for (const auto& d : shape.digits) digits.push_back(d.controls);
    doc["digits"] = std::move(digits);
    std::ofstream os(path);
    if (!os) throw ShapeIoError("cannot open '" + path + "' for writing");
    os << doc.dump(2) << '\n';
}

PulseShape read_shape_native(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ShapeIoError("cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        // nlohmann reports byte offsets; recover the line number for the message.
        std::ifstream again(path);
        std::string text((std::istreambuf_iterator<char>(again)),
                         std::istreambuf_iterator<char>());
        const std::size_t upto = std::min(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() +
                                                         static_cast<std::ptrdiff_t>(upto), '\n'));
        fail_at_line(path, line, e.what());
    }
    if (!doc.is_object()) throw ShapeIoError(path + ": top level must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "dt_us" && key != "basis" && key != "digits" && key != "theta_xy_const_rad")
            throw ShapeIoError(path + ": unknown key '" + key + "'");
    if (!doc.contains("dt_us") || !doc["dt_us"].is_number())
        throw ShapeIoError(path + ": missing numeric 'dt_us'");
    if (!doc.contains("basis") || !doc["basis"].is_string())
        throw ShapeIoError(path + ": missing string 'basis'");
    if (!doc.contains("digits") || !doc["digits"].is_array() || doc["digits"].empty())
        throw ShapeIoError(path + ": missing non-empty array 'digits'");

    PulseShape shape;
    shape.basis = ControlBasis::parse(doc["basis"].get<std::string>(),
                                      doc.value("theta_xy_const_rad", 0.0));
    const double dt = doc["dt_us"].get<double>() * 1e-6;
    const auto arity = static_cast<std::size_t>(shape.basis.arity());
    for (const auto& row : doc["digits"]) {
        if (!row.is_array() || row.size() != arity)
            throw ShapeIoError(path + ": digit control count does not match basis '" +
                               shape.basis.name() + "'");
        Digit d;
        d.dt = dt;
        for (const auto& v : row) {
            if (!v.is_number()) throw ShapeIoError(path + ": digit controls must be numbers");
            d.controls.push_back(v.get<double>());
        }
        shape.digits.push_back(std::move(d));
    }
    shape.validate();
    return shape;
}

PulseShape to_physical_polar(const PulseShape& shape, const ConstraintSpec* constraint) {
    shape.validate();
    const auto& basis = shape.basis;
    std::vector<double> amps = shape.amplitudes();
    if (basis.is_reduced()) {
        if (constraint == nullptr)
            throw std::invalid_argument("reduced basis requires a constraint");
        amps = clamp_shape(*constraint, amps).reduced;
    }
    PulseShape out;
    out.basis.kind = basis.has_z_control() ? BasisKind::PolarAmpPhaseZ : BasisKind::PolarAmpPhase;
    out.digits.reserve(shape.size());
    for (std::size_t j = 0; j < shape.size(); ++j) {
        const auto& d = shape.digits[j];
        double amp = amps[j];
        double phase;
        if (basis.is_cartesian())
            phase = (d.controls[0] == 0.0 && d.controls[1] == 0.0)
                        ? 0.0
                        : std::atan2(d.controls[1], d.controls[0]);
        else if (basis.kind == BasisKind::PhaseOnly)
            phase = d.controls[0];
        else
            phase = d.controls[1];
        if (amp < 0) {  // fold sign into the phase
            amp = -amp;
            phase += kTwoPi / 2.0;
        }
        Digit nd;
        nd.dt = d.dt;
        nd.controls = {amp, phase};
        if (basis.has_z_control()) nd.controls.push_back(d.controls[2]);
        out.digits.push_back(std::move(nd));
    }
    return out;
}

void write_shape_jcamp(const PulseShape& shape, const std::string& path,
                       const ConstraintSpec* constraint, const std::string& title) {
    const PulseShape phys = to_physical_polar(shape, constraint);
    double max_amp = 0;
    for (const auto& d : phys.digits) max_amp = std::max(max_amp, d.controls[0]);
    std::ofstream os(path);
    if (!os) throw ShapeIoError("cannot open '" + path + "' for writing");
    os << "##TITLE=" << title << '\n';
    os << "##NPOINTS=" << phys.size() << '\n';
    os << "##XYPOINTS= (XY..XY)\n";
    char buf[64];
    for (const auto& d : phys.digits) {
        const double pct = max_amp > 0 ? 100.0 * d.controls[0] / max_amp : 0.0;
        const double deg = wrap_degrees(d.controls[1] * kDegPerRad);
        std::snprintf(buf, sizeof buf, "%.6f, %.6f\n", pct, deg);
        os << buf;
    }
    os << "##END=\n";
}

PulseShape read_shape_jcamp(const std::string& path, double max_amplitude_rad,
                            double dt_seconds) {
    std::ifstream is(path);
    if (!is) throw ShapeIoError("cannot open '" + path + "'");
    PulseShape shape;
    shape.basis.kind = BasisKind::PolarAmpPhase;
    long npoints = -1;
    bool in_body = false, ended = false;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("##", 0) == 0) {
            if (line.rfind("##NPOINTS=", 0) == 0) {
                try {
                    npoints = std::stol(line.substr(10));
                } catch (const std::exception&) {
                    fail_at_line(path, lineno, "bad ##NPOINTS value");
                }
            } else if (line.rfind("##XYPOINTS=", 0) == 0) {
                in_body = true;
            } else if (line.rfind("##END=", 0) == 0) {
                ended = true;
                break;
            }
            continue;
        }
        if (!in_body) fail_at_line(path, lineno, "data before ##XYPOINTS=");
        double pct, deg;
        char trailing;
        const int got = std::sscanf(line.c_str(), "%lf , %lf %c", &pct, &deg, &trailing);
        if (got != 2) fail_at_line(path, lineno, "expected 'amplitude, phase'");
        Digit d;
        d.dt = dt_seconds;
        d.controls = {pct / 100.0 * max_amplitude_rad, deg / kDegPerRad};
        shape.digits.push_back(std::move(d));
    }
    if (!ended) fail_at_line(path, lineno, "missing ##END=");
    if (npoints < 0) fail_at_line(path, lineno, "missing ##NPOINTS=");
    if (static_cast<long>(shape.digits.size()) != npoints)
        throw ShapeIoError(path + ": ##NPOINTS=" + std::to_string(npoints) + " but " +
                           std::to_string(shape.digits.size()) + " data rows");
    shape.validate();
    return shape;
}

}  // namespace pulsekit
