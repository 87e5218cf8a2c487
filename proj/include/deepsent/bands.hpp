#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepsent/error.hpp"

namespace deepsent {

// The 12 Sentinel-2 L2A bands handled by the network (B10 is excluded).
enum class BandId : std::uint8_t {
    B01, B02, B03, B04, B05, B06, B07, B08, B08a, B09, B11, B12,
};

inline constexpr int kBandCount = 12;

inline constexpr std::array<BandId, kBandCount> kAllBands = {
    BandId::B01, BandId::B02, BandId::B03,  BandId::B04, BandId::B05, BandId::B06,
    BandId::B07, BandId::B08, BandId::B08a, BandId::B09, BandId::B11, BandId::B12,
};

enum class ResolutionGroup : std::uint8_t { g10m, g20m, g60m };

inline constexpr std::array<ResolutionGroup, 3> kAllGroups = {
    ResolutionGroup::g10m, ResolutionGroup::g20m, ResolutionGroup::g60m};

constexpr int gsd_m(ResolutionGroup g) {
    switch (g) {
        case ResolutionGroup::g10m: return 10;
        case ResolutionGroup::g20m: return 20;
        case ResolutionGroup::g60m: return 60;
    }
    return 0;
}

// Linear size of one group pixel measured in 10 m pixels.
constexpr int downscale_vs_10m(ResolutionGroup g) {
    switch (g) {
        case ResolutionGroup::g10m: return 1;
        case ResolutionGroup::g20m: return 2;
        case ResolutionGroup::g60m: return 6;
    }
    return 0;
}

// Magnification needed to reach the common output grid (3x the 10 m grid).
constexpr int upscale_to_output(ResolutionGroup g) { return 3 * downscale_vs_10m(g); }

constexpr ResolutionGroup band_group(BandId b) {
    switch (b) {
        case BandId::B02:
        case BandId::B03:
        case BandId::B04:
        case BandId::B08: return ResolutionGroup::g10m;
        case BandId::B05:
        case BandId::B06:
        case BandId::B07:
        case BandId::B08a:
        case BandId::B11:
        case BandId::B12: return ResolutionGroup::g20m;
        case BandId::B01:
        case BandId::B09: return ResolutionGroup::g60m;
    }
    return ResolutionGroup::g60m;
}

inline std::string band_code(BandId b) {
    switch (b) {
        case BandId::B01: return "B01";
        case BandId::B02: return "B02";
        case BandId::B03: return "B03";
        case BandId::B04: return "B04";
        case BandId::B05: return "B05";
        case BandId::B06: return "B06";
        case BandId::B07: return "B07";
        case BandId::B08: return "B08";
        case BandId::B08a: return "B08a";
        case BandId::B09: return "B09";
        case BandId::B11: return "B11";
        case BandId::B12: return "B12";
    }
    return "?";
}

inline std::optional<BandId> band_from_code(std::string_view code) {
    for (BandId b : kAllBands)
        if (band_code(b) == code) return b;
    return std::nullopt;
}

inline BandId require_band(std::string_view code) {
    auto b = band_from_code(code);
    if (!b) throw_config("unknown band code '" + std::string(code) + "'");
    return *b;
}

// Ascending wavelength within each group; fixes the concatenation order of
// the spectral fusion stage.
inline const std::vector<BandId>& group_bands(ResolutionGroup g) {
    static const std::vector<BandId> b10 = {BandId::B02, BandId::B03, BandId::B04, BandId::B08};
    static const std::vector<BandId> b20 = {BandId::B05, BandId::B06,  BandId::B07,
                                            BandId::B08a, BandId::B11, BandId::B12};
    static const std::vector<BandId> b60 = {BandId::B01, BandId::B09};
    switch (g) {
        case ResolutionGroup::g10m: return b10;
        case ResolutionGroup::g20m: return b20;
        case ResolutionGroup::g60m: return b60;
    }
    return b60;
}

}  // namespace deepsent
