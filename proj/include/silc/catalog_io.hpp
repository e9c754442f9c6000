#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "silc/catalog.hpp"

namespace silc {

// Catalog: a header line naming the columns, separated by the file's
// delimiter (tab or comma), then one record per line:
//   video_id  size_bytes  duration_ms  play_count
void write_catalog(std::ostream& out, const Catalog& catalog, char sep = '\t');
Catalog read_catalog(std::istream& in);

// Participants: "participant_id\ttimestamp_s\tvideo_id" with a header line.
void write_participants(std::ostream& out,
                        std::span<const ParticipantHistory> participants);
std::vector<ParticipantHistory> read_participants(std::istream& in);

// Users and manifests: one JSON object per line.
void write_users(std::ostream& out, std::span<const EmulatedUser> users);
std::vector<EmulatedUser> read_users(std::istream& in);

void write_manifests(std::ostream& out, std::span<const ManifestFile> manifests,
                     double beta);
struct BetaManifest {
  double beta;
  ManifestFile manifest;
};
std::vector<BetaManifest> read_manifests(std::istream& in);

/// Formats a double with the shortest round-trip representation.
std::string format_double(double v);

/// Hex SHA-256 of a file's contents.
std::string file_digest(const std::filesystem::path& path);

}  // namespace silc
