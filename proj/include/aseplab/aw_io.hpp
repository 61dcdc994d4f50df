#pragma once

// JSON form of an Askey-Wilson signed measure: quadruple, atom table,
// density sign, support summary and build tolerances. Values are written at
// double precision; round-trips preserve them to the stated tolerances, not
// bit-exactly.

#include <string>

#include "aseplab/aw_measure.hpp"

namespace aseplab {

std::string to_json(const AwMeasure<Real>& mu);
AwMeasure<Real> measure_from_json(const std::string& text);

}  // namespace aseplab
