#pragma once

#include "microrl/q_network.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace microrl {

/// Text checkpoint: header "psmagds-v1 <inputs> <hidden> <outputs>" followed by one
/// parameter per line in flat layout, written with 17 significant digits.
inline constexpr std::string_view kCheckpointMagic = "psmagds-v1";

std::string checkpoint_text(const QNetworkd& net);

/// Throws CheckpointError naming `source` and the offending line.
QNetworkd parse_checkpoint(std::string_view text, const std::string& source = "<memory>");

void save_checkpoint(const QNetworkd& net, const std::filesystem::path& path);
QNetworkd load_checkpoint(const std::filesystem::path& path);

/// Hash of the exact parameter bits, for purity and chain-integrity checks.
std::uint64_t parameter_hash(const QNetworkd& net);

}  // namespace microrl
