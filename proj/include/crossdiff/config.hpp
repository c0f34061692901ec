#pragma once

#include <iosfwd>
#include <string>

#include "crossdiff/model.hpp"

namespace crossdiff {

/// Flat key-value model configuration ("key = value" lines, '#' comments).
/// Documented keys: family (e1|e2|bt-limit|custom), alpha1, alpha2,
/// beta11..beta22, b, delta, and for custom families the 16 tensor entries
/// d{i}{j}_{m}{n} (e.g. d11_10). Values round-trip at 17 significant digits.
ModelParams load_model(std::istream& in);
ModelParams load_model_file(const std::string& path);

void save_model(std::ostream& out, const ModelParams& p);
void save_model_file(const std::string& path, const ModelParams& p);

/// Shortest decimal form that parses back to the same double (up to 17
/// significant digits); used by every CSV/JSON writer in the project.
std::string fmt_double(double v);

}  // namespace crossdiff
