#include "deepsent/scene.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "deepsent/resample.hpp"

static_assert(std::endian::native == std::endian::little, "container format assumes a little-endian host");

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace deepsent {

const BandSeries& SceneStack::at(BandId b) const {
    auto it = series.find(b);
    if (it == series.end()) throw_config("band " + band_code(b) + " not present in scene '" + scene_id + "'");
    return it->second;
}

std::vector<BandId> SceneStack::bands() const {
    std::vector<BandId> out;
    out.reserve(series.size());
    for (const auto& [b, s] : series) out.push_back(b);
    return out;
}

StackGeometry validate_stack(const SceneStack& stack) {
    if (stack.series.empty()) throw_config("scene '" + stack.scene_id + "' has no bands");

    for (const auto& [b, s] : stack.series) {
        if (s.band != b) throw_internal("band key/series mismatch in scene '" + stack.scene_id + "'");
        if (s.images.empty()) throw_config("band " + band_code(b) + " has no images");
        for (const Raster& r : s.images)
            if (r.height != s.height() || r.width != s.width())
                throw_config("band " + band_code(b) + " images differ in size");
        if (!s.timestamps.empty()) {
            if (s.timestamps.size() != s.images.size())
                throw_config("band " + band_code(b) + " timestamp count != image count");
            if (!std::is_sorted(s.timestamps.begin(), s.timestamps.end()))
                throw_config("band " + band_code(b) + " timestamps not monotone");
        }
    }

    // Within one resolution group all series must agree exactly.
    std::map<ResolutionGroup, std::pair<int, int>> group_dims;
    for (const auto& [b, s] : stack.series) {
        const auto g = band_group(b);
        const auto dims = std::make_pair(s.height(), s.width());
        auto [it, inserted] = group_dims.emplace(g, dims);
        if (!inserted && it->second != dims)
            throw_config("bands of the " + std::to_string(gsd_m(g)) + " m group differ in size");
    }

    StackGeometry geo;
    geo.uniform = true;
    geo.lr_grouped = true;
    const auto& [g0, d0] = *group_dims.begin();
    for (const auto& [g, d] : group_dims) {
        if (d != d0) geo.uniform = false;
        // LR geometry: dims scale with the inverse of the group's footprint.
        const long lhs_h = long(d.first) * downscale_vs_10m(g);
        const long rhs_h = long(d0.first) * downscale_vs_10m(g0);
        const long lhs_w = long(d.second) * downscale_vs_10m(g);
        const long rhs_w = long(d0.second) * downscale_vs_10m(g0);
        if (lhs_h != rhs_h || lhs_w != rhs_w) geo.lr_grouped = false;
    }
    if (!geo.uniform && !geo.lr_grouped)
        throw_config("scene '" + stack.scene_id + "' has inconsistent cross-group dimensions");
    return geo;
}

const BandStatistics::Moments& BandStatistics::at(BandId b) const {
    auto it = per_band.find(b);
    if (it == per_band.end()) throw_config("no statistics for band " + band_code(b));
    return it->second;
}

void BandStatistics::set(BandId b, double mean, double std) {
    if (!(std > 0.0)) throw_config("band " + band_code(b) + " statistics require std > 0");
    per_band[b] = {mean, std};
}

// --- container I/O -----------------------------------------------------

Raster load_raster_raw(const std::string& path, int height, int width) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw_io("missing raster file: " + path);
    f.seekg(0, std::ios::end);
    const auto bytes = std::size_t(f.tellg());
    const auto expected = std::size_t(height) * width * sizeof(float);
    if (bytes != expected)
        throw_io("raster size mismatch for " + path + ": file holds " + std::to_string(bytes / sizeof(float)) +
                 " values, manifest expects " + std::to_string(std::size_t(height) * width));
    f.seekg(0);
    Raster r(height, width);
    f.read(reinterpret_cast<char*>(r.values.data()), std::streamsize(expected));
    if (!f) throw_io("failed reading " + path);
    if (!r.all_finite()) throw_numeric("non-finite values in " + path);
    return r;
}

void save_raster_raw(const Raster& r, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw_io("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(r.values.data()), std::streamsize(r.size() * sizeof(float)));
    if (!f) throw_io("failed writing " + path);
}

static std::string raster_filename(BandId b, int index) {
    return band_code(b) + "_" + std::to_string(index) + ".raw";
}

SceneStack load_scene(const std::string& dir) {
    const fs::path root(dir);
    std::ifstream mf(root / "manifest.json");
    if (!mf) throw_io("missing manifest.json in " + dir);
    json m;
    try {
        m = json::parse(mf);
    } catch (const json::exception& e) {
        throw_io("invalid manifest.json in " + dir + ": " + e.what());
    }

    SceneStack stack;
    try {
        stack.scene_id = m.at("scene_id").get<std::string>();
        if (m.at("dtype").get<std::string>() != "f32le")
            throw_io("unsupported dtype in " + dir);
        if (m.contains("degradation_ref")) stack.degradation_ref = m["degradation_ref"].get<std::string>();

        for (const auto& be : m.at("bands")) {
            const BandId b = require_band(be.at("code").get<std::string>());
            if (be.at("gsd_m").get<int>() != gsd_m(band_group(b)))
                throw_io("manifest gsd_m does not match band " + band_code(b) + " in " + dir);
            const int n = be.at("n_images").get<int>();
            const int h = be.at("height").get<int>();
            const int w = be.at("width").get<int>();
            if (n < 1 || h < 1 || w < 1) throw_io("invalid band entry for " + band_code(b) + " in " + dir);
            BandSeries s;
            s.band = b;
            s.images.reserve(std::size_t(n));
            for (int i = 0; i < n; ++i)
                s.images.push_back(load_raster_raw((root / raster_filename(b, i)).string(), h, w));
            stack.series.emplace(b, std::move(s));
        }
    } catch (const json::exception& e) {
        throw_io("invalid manifest.json in " + dir + ": " + e.what());
    }
    validate_stack(stack);
    return stack;
}

void save_scene(const SceneStack& stack, const std::string& dir) {
    validate_stack(stack);
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw_io("cannot create directory " + dir + ": " + ec.message());

    json bands = json::array();
    for (const auto& [b, s] : stack.series) {
        bands.push_back({{"code", band_code(b)},
                         {"gsd_m", gsd_m(band_group(b))},
                         {"n_images", s.n_images()},
                         {"height", s.height()},
                         {"width", s.width()}});
        for (int i = 0; i < s.n_images(); ++i)
            save_raster_raw(s.images[std::size_t(i)], (root / raster_filename(b, i)).string());
    }
    json m = {{"scene_id", stack.scene_id}, {"dtype", "f32le"}, {"bands", bands}};
    if (!stack.degradation_ref.empty()) m["degradation_ref"] = stack.degradation_ref;

    std::ofstream mf(root / "manifest.json", std::ios::trunc);
    if (!mf) throw_io("cannot write manifest.json in " + dir);
    mf << m.dump(2) << "\n";
    if (!mf) throw_io("failed writing manifest.json in " + dir);
}

// --- shared processing ops ---------------------------------------------

Raster median_band(const BandSeries& series) {
    if (series.images.empty()) throw_config("median_band: empty series");
    const int n = series.n_images();
    if (n == 1) return series.images.front();

    Raster out(series.height(), series.width());
    std::vector<float> vals(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < out.size(); ++p) {
        for (int i = 0; i < n; ++i) vals[std::size_t(i)] = series.images[std::size_t(i)].values[p];
        std::sort(vals.begin(), vals.end());
        out.values[p] = (n % 2 == 1) ? vals[std::size_t(n / 2)]
                                     : float((double(vals[std::size_t(n / 2 - 1)]) + double(vals[std::size_t(n / 2)])) * 0.5);
    }
    return out;
}

Raster zscore_normalize(const Raster& r, BandId band, const BandStatistics& stats) {
    const auto& m = stats.at(band);
    Raster out(r.height, r.width);
    for (std::size_t i = 0; i < r.size(); ++i)
        out.values[i] = float((double(r.values[i]) - m.mean) / m.std);
    return out;
}

Raster zscore_denormalize(const Raster& r, BandId band, const BandStatistics& stats) {
    const auto& m = stats.at(band);
    Raster out(r.height, r.width);
    for (std::size_t i = 0; i < r.size(); ++i)
        out.values[i] = float(double(r.values[i]) * m.std + m.mean);
    return out;
}

Raster temporal_mean(const BandSeries& series) {
    if (series.images.empty()) throw_config("temporal_mean: empty series");
    Raster out(series.height(), series.width());
    const double inv_n = 1.0 / double(series.n_images());
    for (std::size_t p = 0; p < out.size(); ++p) {
        double s = 0.0;
        for (const Raster& img : series.images) s += img.values[p];
        out.values[p] = float(s * inv_n);
    }
    return out;
}

Raster temporal_mean_bicubic(const BandSeries& series, int factor) {
    const int expected = upscale_to_output(band_group(series.band));
    if (factor != expected)
        throw_config("temporal_mean_bicubic: factor " + std::to_string(factor) + " does not match band " +
                     band_code(series.band) + " (expects " + std::to_string(expected) + ")");
    const Raster mean = temporal_mean(series);
    return bicubic_resize(mean, mean.height * factor, mean.width * factor);
}

}  // namespace deepsent
