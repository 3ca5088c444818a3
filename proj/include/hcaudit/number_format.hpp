#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace hcaudit {

/// Shortest round-tripping decimal text for `v`: "0.01", "100", "1000000".
/// Plain notation for magnitudes in [1e-6, 1e21), scientific otherwise.
inline std::string format_number(double v) {
    char buf[400];
    if (v == 0) return "0";
    double mag = std::fabs(v);
    auto fmt = (mag >= 1e-6 && mag < 1e21) ? std::chars_format::fixed
                                            : std::chars_format::scientific;
    auto res = std::to_chars(buf, buf + sizeof buf, v, fmt);
    return std::string(buf, res.ptr);
}

/// Locale-independent full-string parse; nullopt unless all of `text` is a
/// finite decimal number.
inline std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace hcaudit
