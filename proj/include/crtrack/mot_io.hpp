#pragma once

#include <string>

#include "crtrack/metrics.hpp"
#include "crtrack/synth.hpp"

namespace crtrack {

// Comma-separated MOT files. On disk frames are 1-based (MOT convention); in
// memory they are 0-based. The shift happens here and nowhere else. Numbers
// are written in shortest round-trip form, so write(read(f)) is stable.
//
// gt.txt rows:      frame,id,x,y,w,h,conf,class,visibility
// results.txt rows: frame,id,x,y,w,h,score,-1,-1,-1
// det.txt rows:     frame,-1,x,y,w,h,score,-1,-1,-1
//
// Parse failures (non-numeric fields, non-positive box sizes, frame < 1)
// throw with the offending line numbers listed.

GtSequence read_gt(const std::string& path);
void write_gt(const std::string& path, const GtSequence& gt);

ResultSequence read_results(const std::string& path);
void write_results(const std::string& path, const ResultSequence& res);

DetectionMap read_detections(const std::string& path);
void write_detections(const std::string& path, const DetectionMap& dets);

// Embedding sidecar (.emb.csv): header "frame,det,d0,...,d{D-1}", rows sorted
// by (frame, det index). det indexes the frame's detections, 0-based, same on
// disk and in memory. Detections without a row stay embedding-free and
// associate motion-only. Inconsistent dimensions or out-of-range indices are
// errors.
void read_embeddings(const std::string& path, DetectionMap& dets);
void write_embeddings(const std::string& path, const DetectionMap& dets);

}  // namespace crtrack
