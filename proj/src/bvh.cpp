#include "mocap/bvh.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace mocap {
namespace {

struct Token {
  std::string text;
  int line;
};

// Splits on any run of spaces/tabs/newlines; CRLF and LF both accepted.
std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  std::string current;
  int current_line = 1;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!current.empty()) {
        tokens.push_back({current, current_line});
        current.clear();
      }
      if (c == '\n') ++line;
    } else {
      if (current.empty()) current_line = line;
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back({current, current_line});
  return tokens;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    if (done()) throw MalformedHierarchy("unexpected end of file", last_line());
    return tokens_[pos_];
  }
  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }
  void expect(std::string_view word) {
    Token t = next();
    if (t.text != word) {
      throw MalformedHierarchy("expected '" + std::string(word) + "', got '" + t.text + "'",
                               t.line);
    }
  }
  int last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }

  std::vector<Token> drain() {
    std::vector<Token> rest(tokens_.begin() + static_cast<std::ptrdiff_t>(pos_), tokens_.end());
    pos_ = tokens_.size();
    return rest;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

double parse_real(const Token& t) {
  double value = 0.0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw NonNumericValue("expected a number, got '" + t.text + "'", t.line);
  }
  return value;
}

long parse_count(const Token& t) {
  long value = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw NonNumericValue("expected a non-negative integer, got '" + t.text + "'", t.line);
  }
  return value;
}

Channel parse_channel(const Token& t) {
  static const std::pair<std::string_view, Channel> table[] = {
      {"Xposition", Channel::Xposition}, {"Yposition", Channel::Yposition},
      {"Zposition", Channel::Zposition}, {"Xrotation", Channel::Xrotation},
      {"Yrotation", Channel::Yrotation}, {"Zrotation", Channel::Zrotation},
  };
  for (auto [name, ch] : table) {
    if (t.text == name) return ch;
  }
  throw MalformedHierarchy("unknown channel '" + t.text + "'", t.line);
}

// Parses the body of a joint: OFFSET, CHANNELS (optional for end sites),
// nested JOINT / End Site blocks, closing brace.
Joint parse_joint_body(Cursor& cur, const std::string& name, bool end_site) {
  Joint joint;
  joint.name = name;
  joint.is_end_site = end_site;
  cur.expect("{");
  cur.expect("OFFSET");
  for (int i = 0; i < 3; ++i) joint.offset[i] = parse_real(cur.next());

  while (true) {
    Token t = cur.next();
    if (t.text == "}") break;
    if (t.text == "CHANNELS") {
      if (end_site) throw MalformedHierarchy("End Site may not declare channels", t.line);
      long n = parse_count(cur.next());
      for (long i = 0; i < n; ++i) joint.channels.push_back(parse_channel(cur.next()));
    } else if (t.text == "JOINT") {
      if (end_site) throw MalformedHierarchy("End Site may not have children", t.line);
      Token child_name = cur.next();
      joint.children.push_back(parse_joint_body(cur, child_name.text, false));
    } else if (t.text == "End") {
      if (end_site) throw MalformedHierarchy("End Site may not have children", t.line);
      cur.expect("Site");
      joint.children.push_back(parse_joint_body(cur, name + "_end", true));
    } else {
      throw MalformedHierarchy("unexpected token '" + t.text + "' in joint block", t.line);
    }
  }
  return joint;
}

void flatten(const Joint& joint, int parent, int& channel_offset,
             std::vector<JointEntry>& out) {
  JointEntry entry;
  entry.name = joint.name;
  entry.offset = joint.offset;
  entry.channels = joint.channels;
  entry.channel_offset = channel_offset;
  entry.parent = parent;
  entry.is_end_site = joint.is_end_site;
  channel_offset += static_cast<int>(joint.channels.size());
  int self = static_cast<int>(out.size());
  out.push_back(std::move(entry));
  for (const Joint& child : joint.children) flatten(child, self, channel_offset, out);
}

Skeleton build_skeleton(Joint root) {
  Skeleton skeleton;
  skeleton.root = std::move(root);
  int channels = 0;
  flatten(skeleton.root, -1, channels, skeleton.joint_index);
  skeleton.total_channels = channels;
  return skeleton;
}

void write_joint(std::ostringstream& out, const Joint& joint, int depth, bool root) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  if (joint.is_end_site) {
    out << indent << "End Site\n";
  } else {
    out << indent << (root ? "ROOT " : "JOINT ") << joint.name << "\n";
  }
  out << indent << "{\n";
  char buf[64];
  out << indent << "  OFFSET";
  for (double v : joint.offset) {
    std::snprintf(buf, sizeof(buf), " %.6f", v);
    out << buf;
  }
  out << "\n";
  if (!joint.channels.empty()) {
    out << indent << "  CHANNELS " << joint.channels.size();
    for (Channel c : joint.channels) out << " " << channel_name(c);
    out << "\n";
  }
  for (const Joint& child : joint.children) write_joint(out, child, depth + 1, false);
  out << indent << "}\n";
}

}  // namespace

bool is_rotation(Channel c) {
  return c == Channel::Xrotation || c == Channel::Yrotation || c == Channel::Zrotation;
}

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::Xposition: return "Xposition";
    case Channel::Yposition: return "Yposition";
    case Channel::Zposition: return "Zposition";
    case Channel::Xrotation: return "Xrotation";
    case Channel::Yrotation: return "Yrotation";
    case Channel::Zrotation: return "Zrotation";
  }
  return "";
}

std::vector<int> Skeleton::rotation_channel_columns() const {
  std::vector<int> columns;
  for (const JointEntry& entry : joint_index) {
    for (std::size_t i = 0; i < entry.channels.size(); ++i) {
      if (is_rotation(entry.channels[i])) {
        columns.push_back(entry.channel_offset + static_cast<int>(i));
      }
    }
  }
  return columns;
}

BvhFile parse_bvh(std::string_view text) {
  Cursor cur(tokenize(text));

  cur.expect("HIERARCHY");
  cur.expect("ROOT");
  Token root_name = cur.next();
  Skeleton skeleton = build_skeleton(parse_joint_body(cur, root_name.text, false));

  cur.expect("MOTION");
  cur.expect("Frames:");
  long frame_count = parse_count(cur.next());
  cur.expect("Frame");
  cur.expect("Time:");
  double frame_time = parse_real(cur.next());

  // Motion rows: one line per frame, exactly C values each.
  const int c = skeleton.total_channels;
  std::vector<std::vector<Token>> rows;
  for (Token& t : cur.drain()) {
    if (rows.empty() || rows.back().front().line != t.line) rows.emplace_back();
    rows.back().push_back(std::move(t));
  }
  if (static_cast<long>(rows.size()) != frame_count) {
    throw FrameCountMismatch("declared " + std::to_string(frame_count) + " frames but found " +
                             std::to_string(rows.size()));
  }
  Eigen::MatrixXd frames(frame_count, c);
  for (long f = 0; f < frame_count; ++f) {
    const auto& row = rows[static_cast<std::size_t>(f)];
    if (static_cast<int>(row.size()) != c) {
      throw ChannelArityMismatch("frame " + std::to_string(f) + " (line " +
                                 std::to_string(row.front().line) + ") has " +
                                 std::to_string(row.size()) + " values, expected " +
                                 std::to_string(c));
    }
    for (int col = 0; col < c; ++col) {
      frames(f, col) = parse_real(row[static_cast<std::size_t>(col)]);
    }
  }

  MotionClip clip;
  clip.frame_time = frame_time;
  clip.frames = std::move(frames);
  return {std::move(skeleton), std::move(clip)};
}

std::string write_bvh(const Skeleton& skeleton, const MotionClip& clip) {
  if (clip.frames.cols() != skeleton.total_channels) {
    throw ChannelArityMismatch("clip has " + std::to_string(clip.frames.cols()) +
                               " channels, skeleton declares " +
                               std::to_string(skeleton.total_channels));
  }
  std::ostringstream out;
  out << "HIERARCHY\n";
  write_joint(out, skeleton.root, 0, true);
  out << "MOTION\n";
  out << "Frames: " << clip.frames.rows() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7f", clip.frame_time);
  out << "Frame Time: " << buf << "\n";
  for (Eigen::Index f = 0; f < clip.frames.rows(); ++f) {
    for (Eigen::Index col = 0; col < clip.frames.cols(); ++col) {
      std::snprintf(buf, sizeof(buf), "%.6f", clip.frames(f, col));
      if (col > 0) out << ' ';
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::vector<Violation> validate(const Skeleton& skeleton, const MotionClip& clip) {
  std::vector<Violation> violations;
  for (const JointEntry& entry : skeleton.joint_index) {
    if (entry.is_end_site && !entry.channels.empty()) {
      violations.push_back({Violation::Kind::EndSiteHasChannels, -1, -1, entry.name,
                            "end site '" + entry.name + "' declares channels"});
    }
  }
  if (clip.frames.rows() < 1) {
    violations.push_back({Violation::Kind::NoFrames, -1, -1, "", "clip has no frames"});
  }
  if (clip.frame_time <= 0.0) {
    violations.push_back({Violation::Kind::NonPositiveFrameTime, -1, -1, "",
                          "frame_time must be positive"});
  }
  if (clip.frames.cols() != skeleton.total_channels) {
    violations.push_back({Violation::Kind::ChannelArityMismatch, 0,
                          static_cast<int>(clip.frames.cols()), "",
                          "row length " + std::to_string(clip.frames.cols()) +
                              " != skeleton channels " +
                              std::to_string(skeleton.total_channels)});
    return violations;
  }
  for (Eigen::Index f = 0; f < clip.frames.rows(); ++f) {
    for (Eigen::Index col = 0; col < clip.frames.cols(); ++col) {
      if (!std::isfinite(clip.frames(f, col))) {
        violations.push_back({Violation::Kind::NonFinite, static_cast<int>(f),
                              static_cast<int>(col), "",
                              "non-finite value at frame " + std::to_string(f) + ", column " +
                                  std::to_string(col)});
      }
    }
  }
  return violations;
}

}  // namespace mocap
