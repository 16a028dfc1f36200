#pragma once

#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "simval/image.hpp"
#include "simval/manifold.hpp"
#include "simval/patches.hpp"
#include "simval/protocol.hpp"

namespace simval {

/// A real (or exported) image sequence with annotated patches.
struct IngestedSequence {
    std::vector<int> frame_numbers;  // ascending, as found in the file names
    std::vector<LdrImage> frames;
    int reference_frame = 0;         // index into frames
    std::vector<Patch> patches;      // Patch::frame indexes frames
    /// Flow from the reference frame to frame i, when a .flo was supplied.
    std::map<int, FlowField> flows;
    /// BC / GC may assume zero motion for frames without a flow file.
    bool zero_flow = false;
};

/// Loads numbered frames (<digits>.ppm) from `directory` and the patch
/// annotation JSON:
///   {"reference_frame": 0, "zero_flow": true,
///    "patches": [{"x": 4, "y": 6, "side": 5, "context": "Diffuse", "frame": 1}]}
/// Optional flows are read from flow_<i>.flo (reference to frame i).
/// Throws IngestError for malformed annotations, missing frames, size
/// mismatches or rectangles outside the image.
IngestedSequence ingest_sequence(const std::filesystem::path &directory, const std::filesystem::path &annotation);

/// Writes frames as <index>.ppm plus an annotation file; the inverse of
/// ingest_sequence for exporting simulated data.
void export_sequence(const std::filesystem::path &directory, const std::vector<LdrImage> &frames,
                     const std::vector<Patch> &patches, int reference_frame, bool zero_flow);

/// Evaluates OC, BC or GC on the annotated patches against the reference
/// frame. theta_w is the frame index and theta_v the patch side. Throws
/// IngestError for models that need data an ingested sequence cannot carry.
Manifold evaluate_ingested(const IngestedSequence &seq, ModelKind model, bool exclude_occluded = false);

}  // namespace simval
