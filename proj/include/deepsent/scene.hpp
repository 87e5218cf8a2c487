#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deepsent/bands.hpp"
#include "deepsent/raster.hpp"

namespace deepsent {

// Temporal series of one band's low-resolution acquisitions.
struct BandSeries {
    BandId band = BandId::B01;
    std::vector<Raster> images;
    std::vector<double> timestamps;  // optional; monotone when present

    int n_images() const { return int(images.size()); }
    int height() const { return images.empty() ? 0 : images.front().height; }
    int width() const { return images.empty() ? 0 : images.front().width; }
};

// A multitemporal multispectral scene: any nonempty subset of the 12 bands.
struct SceneStack {
    std::string scene_id;
    std::map<BandId, BandSeries> series;
    std::string degradation_ref;  // optional pointer to the record that produced this stack

    bool has(BandId b) const { return series.count(b) != 0; }
    const BandSeries& at(BandId b) const;
    std::vector<BandId> bands() const;
};

// Which geometries a stack satisfies. Network input requires lr_grouped;
// HR references and SR outputs are stored on a single uniform grid.
struct StackGeometry {
    bool lr_grouped = false;
    bool uniform = false;
};

// Checks per-series consistency and classifies the cross-group geometry.
// Throws if the stack is empty, a series is empty, or dims are inconsistent
// within a series or group, or the stack fits neither geometry.
StackGeometry validate_stack(const SceneStack& stack);

// Per-band normalization statistics, frozen over a training corpus.
struct BandStatistics {
    struct Moments {
        double mean = 0.0;
        double std = 1.0;
    };
    std::map<BandId, Moments> per_band;

    const Moments& at(BandId b) const;
    void set(BandId b, double mean, double std);
    bool has(BandId b) const { return per_band.count(b) != 0; }
};

// --- container I/O -----------------------------------------------------
//
// A scene container is a directory with manifest.json plus one raw file per
// (band, time) named <code>_<index>.raw (index 0-based), each holding
// height x width float32 little-endian values, row-major.

SceneStack load_scene(const std::string& dir);
void save_scene(const SceneStack& stack, const std::string& dir);

Raster load_raster_raw(const std::string& path, int height, int width);
void save_raster_raw(const Raster& r, const std::string& path);

// --- shared processing ops ---------------------------------------------

// Per-pixel temporal median; even counts use the midpoint of the central pair.
Raster median_band(const BandSeries& series);

Raster zscore_normalize(const Raster& r, BandId band, const BandStatistics& stats);
Raster zscore_denormalize(const Raster& r, BandId band, const BandStatistics& stats);

// Per-pixel temporal mean.
Raster temporal_mean(const BandSeries& series);

// Temporal mean followed by bicubic upsampling; factor must equal the band
// group's upscale_to_output (3, 6, or 18).
Raster temporal_mean_bicubic(const BandSeries& series, int factor);

}  // namespace deepsent
