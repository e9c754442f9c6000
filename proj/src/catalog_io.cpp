#include "silc/catalog_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "silc/digest.hpp"
#include "silc/error.hpp"

namespace silc {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return {buf, end};
}

namespace {

constexpr const char* kCatalogColumns[] = {"video_id", "size_bytes", "duration_ms",
                                           "play_count"};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("line " + std::to_string(line_no) + ": cannot parse '" +
                  std::string(s) + "'");
  return v;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_catalog(std::ostream& out, const Catalog& catalog, char sep) {
  if (sep != '\t' && sep != ',') throw ConfigError("separator", "must be tab or comma");
  for (int i = 0; i < 4; ++i) out << (i ? std::string(1, sep) : "") << kCatalogColumns[i];
  out << '\n';
  for (const auto& r : catalog.records())
    out << r.video_id << sep << r.size_bytes << sep << r.duration_ms << sep
        << format_double(r.play_count) << '\n';
}

Catalog read_catalog(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("catalog: missing header");
  strip_cr(line);
  const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split(line, sep);
  if (header.size() != 4)
    throw IoError("catalog: header must name 4 columns");
  for (int i = 0; i < 4; ++i)
    if (header[i] != kCatalogColumns[i])
      throw IoError("catalog: unexpected column '" + std::string(header[i]) + "'");
  std::vector<VideoRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, sep);
    if (f.size() != 4) throw IoError("catalog line " + std::to_string(line_no) + ": expected 4 fields");
    records.push_back({parse_field<std::uint64_t>(f[0], line_no),
                       parse_field<std::uint64_t>(f[1], line_no),
                       parse_field<std::uint32_t>(f[2], line_no),
                       parse_field<double>(f[3], line_no)});
  }
  return Catalog(std::move(records));
}

void write_participants(std::ostream& out,
                        std::span<const ParticipantHistory> participants) {
  out << "participant_id\ttimestamp_s\tvideo_id\n";
  for (const auto& p : participants)
    for (const auto& e : p.events)
      out << p.participant_id << '\t' << e.timestamp_s << '\t' << e.video_id << '\n';
}

std::vector<ParticipantHistory> read_participants(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("participants: missing header");
  std::vector<ParticipantHistory> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw IoError("participants line " + std::to_string(line_no) + ": expected 3 fields");
    const auto pid = parse_field<ParticipantId>(f[0], line_no);
    if (out.empty() || out.back().participant_id != pid) {
      // Participants with no events are not listed; keep ids dense.
      while (out.size() < pid) out.push_back({static_cast<ParticipantId>(out.size()), {}});
      if (out.size() != pid)
        throw IoError("participants: records not grouped by participant");
      out.push_back({pid, {}});
    }
    out.back().events.push_back({parse_field<std::int64_t>(f[1], line_no),
                                 parse_field<VideoId>(f[2], line_no)});
  }
  return out;
}

void write_users(std::ostream& out, std::span<const EmulatedUser> users) {
  for (const auto& u : users) {
    json j = {{"user_id", u.user_id},
              {"beta", u.beta},
              {"personality", u.personality},
              {"window", {u.window_start_s, u.window_end_s}},
              {"video_sequence", u.video_sequence}};
    out << j.dump() << '\n';
  }
}

std::vector<EmulatedUser> read_users(std::istream& in) {
  std::vector<EmulatedUser> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    EmulatedUser u;
    u.user_id = j.at("user_id").get<UserId>();
    u.beta = j.at("beta").get<double>();
    u.personality = j.at("personality").get<std::vector<ParticipantId>>();
    u.window_start_s = j.at("window").at(0).get<std::int64_t>();
    u.window_end_s = j.at("window").at(1).get<std::int64_t>();
    u.video_sequence = j.at("video_sequence").get<std::vector<VideoId>>();
    out.push_back(std::move(u));
  }
  return out;
}

void write_manifests(std::ostream& out, std::span<const ManifestFile> manifests,
                     double beta) {
  for (const auto& m : manifests) {
    json j = {{"user_id", m.user_id},
              {"beta", beta},
              {"sequence_no", m.sequence_no},
              {"entries", m.entries}};
    out << j.dump() << '\n';
  }
}

std::vector<BetaManifest> read_manifests(std::istream& in) {
  std::vector<BetaManifest> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    out.push_back({j.at("beta").get<double>(),
                   {j.at("user_id").get<UserId>(), j.at("sequence_no").get<std::uint32_t>(),
                    j.at("entries").get<std::vector<VideoId>>()}});
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return to_hex(sha256(buf.str()));
}

}  // namespace silc
