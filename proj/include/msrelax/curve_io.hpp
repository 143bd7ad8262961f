#pragma once

#include <iosfwd>
#include <string>

#include "msrelax/geometry.hpp"

// Text serialization of a RadialCurve:
//   msrc v1 <N> <R> plane <pole_x> <pole_y>
//   msrc v1 <N> <R> torus <L> <pole_x> <pole_y>
// followed by N lines "<a_k> <b_k>" for k = 0..N-1, 17 significant digits.
namespace msrelax::curve_io {

void write(std::ostream& out, const geometry::RadialCurve& curve);
geometry::RadialCurve read(std::istream& in);

void save(const std::string& path, const geometry::RadialCurve& curve);
geometry::RadialCurve load(const std::string& path);

}  // namespace msrelax::curve_io
