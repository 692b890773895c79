#include "crtrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace crtrack {

namespace {

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string fmt(long long v) { return std::to_string(v); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return false;
  std::size_t b = s.find_last_not_of(" \t");
  const char* first = s.data() + a;
  const char* last = s.data() + b + 1;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

struct LineErrors {
  std::vector<std::string> items;

  void add(int line, const std::string& what) {
    if (items.size() < 20) items.push_back("line " + std::to_string(line) + ": " + what);
  }
  void raise_if_any(const std::string& path) const {
    if (items.empty()) return;
    std::string msg = path + ": parse error";
    for (const auto& it : items) msg += "\n  " + it;
    throw std::runtime_error(msg);
  }
};

// Shared row shape: frame,id,x,y,w,h,value[,f8[,f9[,f10]]]. Returns false and
// records the reason when the row is unusable.
struct MotRow {
  long long frame = 0;
  long long id = 0;
  BoundingBox box;
  double conf = 0.0;
  double f8 = -1.0, f9 = -1.0;  // class / visibility slots in gt files
  bool has8 = false, has9 = false;
};

bool parse_row(const std::string& line, int lineno, LineErrors& errs, MotRow& row) {
  const auto fields = split_csv(line);
  if (fields.size() < 7 || fields.size() > 10) {
    errs.add(lineno, "expected 7 to 10 fields, got " + std::to_string(fields.size()));
    return false;
  }
  double vals[10];
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (!parse_double(fields[i], vals[i])) {
      errs.add(lineno, "field " + std::to_string(i + 1) + " is not a finite number");
      return false;
    }
  row.frame = static_cast<long long>(vals[0]);
  row.id = static_cast<long long>(vals[1]);
  if (vals[0] != static_cast<double>(row.frame) || row.frame < 1) {
    errs.add(lineno, "frame must be an integer >= 1");
    return false;
  }
  if (vals[1] != static_cast<double>(row.id)) {
    errs.add(lineno, "id must be an integer");
    return false;
  }
  row.box = {vals[2], vals[3], vals[4], vals[5]};
  if (!(vals[4] > 0.0) || !(vals[5] > 0.0)) {
    errs.add(lineno, "box width and height must be positive");
    return false;
  }
  row.conf = vals[6];
  row.has8 = fields.size() >= 8;
  row.has9 = fields.size() >= 9;
  if (row.has8) row.f8 = vals[7];
  if (row.has9) row.f9 = vals[8];
  return true;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

bool skippable(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

GtSequence read_gt(const std::string& path) {
  auto in = open_in(path);
  GtSequence out;
  LineErrors errs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    MotRow row;
    if (!parse_row(line, lineno, errs, row)) continue;
    if (row.id < 1) {
      errs.add(lineno, "ground truth id must be >= 1");
      continue;
    }
    GtBox b;
    b.id = static_cast<int>(row.id);
    b.box = row.box;
    b.cls = row.has8 ? static_cast<int>(row.f8) : 1;
    b.visibility = row.has9 ? row.f9 : 1.0;
    out[static_cast<int>(row.frame) - 1].push_back(b);
  }
  errs.raise_if_any(path);
  return out;
}

void write_gt(const std::string& path, const GtSequence& gt) {
  auto out = open_out(path);
  for (const auto& [frame, boxes] : gt)
    for (const auto& b : boxes)
      out << fmt(static_cast<long long>(frame) + 1) << ',' << fmt(static_cast<long long>(b.id))
          << ',' << fmt(b.box.x_left) << ',' << fmt(b.box.y_top) << ',' << fmt(b.box.width)
          << ',' << fmt(b.box.height) << ",1," << fmt(static_cast<long long>(b.cls)) << ','
          << fmt(b.visibility) << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

ResultSequence read_results(const std::string& path) {
  auto in = open_in(path);
  ResultSequence out;
  LineErrors errs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    MotRow row;
    if (!parse_row(line, lineno, errs, row)) continue;
    if (row.id < 1) {
      errs.add(lineno, "result id must be >= 1");
      continue;
    }
    ResBox b;
    b.id = static_cast<int>(row.id);
    b.box = row.box;
    b.score = row.conf;
    out[static_cast<int>(row.frame) - 1].push_back(b);
  }
  errs.raise_if_any(path);
  return out;
}

void write_results(const std::string& path, const ResultSequence& res) {
  auto out = open_out(path);
  for (const auto& [frame, boxes] : res)
    for (const auto& b : boxes)
      out << fmt(static_cast<long long>(frame) + 1) << ',' << fmt(static_cast<long long>(b.id))
          << ',' << fmt(b.box.x_left) << ',' << fmt(b.box.y_top) << ',' << fmt(b.box.width)
          << ',' << fmt(b.box.height) << ',' << fmt(b.score) << ",-1,-1,-1\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

DetectionMap read_detections(const std::string& path) {
  auto in = open_in(path);
  DetectionMap out;
  LineErrors errs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    MotRow row;
    if (!parse_row(line, lineno, errs, row)) continue;
    Detection d;
    d.frame = static_cast<int>(row.frame) - 1;
    d.box = row.box;
    d.score = row.conf;
    out[d.frame].push_back(std::move(d));
  }
  errs.raise_if_any(path);
  return out;
}

void write_detections(const std::string& path, const DetectionMap& dets) {
  auto out = open_out(path);
  for (const auto& [frame, boxes] : dets)
    for (const auto& d : boxes)
      out << fmt(static_cast<long long>(frame) + 1) << ",-1," << fmt(d.box.x_left) << ','
          << fmt(d.box.y_top) << ',' << fmt(d.box.width) << ',' << fmt(d.box.height) << ','
          << fmt(d.score) << ",-1,-1,-1\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

void read_embeddings(const std::string& path, DetectionMap& dets) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  {
    const auto fields = split_csv(line);
    if (fields.size() < 3 || fields[0] != "frame" || fields[1] != "det")
      throw std::runtime_error(path + ": header must be frame,det,d0,...");
    for (std::size_t i = 2; i < fields.size(); ++i)
      if (fields[i] != "d" + std::to_string(i - 2))
        throw std::runtime_error(path + ": header dimension columns must be d0,d1,...");
  }
  const std::size_t dim = split_csv(line).size() - 2;

  LineErrors errs;
  int lineno = 1;
  long long prev_frame = -1, prev_det = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != dim + 2) {
      errs.add(lineno, "expected " + std::to_string(dim + 2) + " fields, got " +
                           std::to_string(fields.size()));
      continue;
    }
    double dframe, ddet;
    if (!parse_double(fields[0], dframe) || !parse_double(fields[1], ddet)) {
      errs.add(lineno, "frame and det must be numbers");
      continue;
    }
    const long long frame = static_cast<long long>(dframe);
    const long long det = static_cast<long long>(ddet);
    if (dframe != static_cast<double>(frame) || frame < 1 || ddet != static_cast<double>(det) ||
        det < 0) {
      errs.add(lineno, "frame must be an integer >= 1 and det an integer >= 0");
      continue;
    }
    if (frame < prev_frame || (frame == prev_frame && det <= prev_det)) {
      errs.add(lineno, "rows must be sorted by (frame, det)");
      continue;
    }
    prev_frame = frame;
    prev_det = det;

    const auto fit = dets.find(static_cast<int>(frame) - 1);
    if (fit == dets.end() || det >= static_cast<long long>(fit->second.size())) {
      errs.add(lineno, "no detection at frame " + std::to_string(frame) + " det " +
                           std::to_string(det));
      continue;
    }
    EmbeddingVec e{std::vector<double>(dim)};
    bool ok = true;
    for (std::size_t i = 0; i < dim; ++i)
      if (!parse_double(fields[i + 2], e.values[i])) {
        errs.add(lineno, "field " + std::to_string(i + 3) + " is not a finite number");
        ok = false;
        break;
      }
    if (ok) fit->second[det].embedding = std::move(e);
  }
  errs.raise_if_any(path);
}

void write_embeddings(const std::string& path, const DetectionMap& dets) {
  std::size_t dim = 0;
  for (const auto& [frame, boxes] : dets)
    for (const auto& d : boxes) {
      if (!d.embedding) continue;
      if (dim == 0)
        dim = d.embedding->dim();
      else if (d.embedding->dim() != dim)
        throw std::runtime_error(path + ": embeddings have mixed dimensions");
    }
  if (dim == 0) throw std::runtime_error(path + ": no embeddings to write");

  auto out = open_out(path);
  out << "frame,det";
  for (std::size_t i = 0; i < dim; ++i) out << ",d" << i;
  out << '\n';
  for (const auto& [frame, boxes] : dets)
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const auto& d = boxes[i];
      if (!d.embedding) continue;
      out << fmt(static_cast<long long>(frame) + 1) << ',' << i;
      for (double v : d.embedding->values) out << ',' << fmt(v);
      out << '\n';
    }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace crtrack
