#include "microrl/checkpoint.hpp"

#include "microrl/errors.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace microrl {

namespace {

std::string format_double(double v) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return {buf.data(), res.ptr};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

}  // namespace

std::string checkpoint_text(const QNetworkd& net) {
    std::string out;
    out.reserve(static_cast<std::size_t>(net.size()) * 24 + 32);
    out += kCheckpointMagic;
    out += ' ' + std::to_string(net.inputs()) + ' ' + std::to_string(net.hidden()) + ' ' +
           std::to_string(net.outputs()) + '\n';
    for (Eigen::Index i = 0; i < net.size(); ++i) {
        out += format_double(net.params()[i]);
        out += '\n';
    }
    return out;
}

QNetworkd parse_checkpoint(std::string_view text, const std::string& source) {
    auto fail = [&](std::size_t line, const std::string& what) -> CheckpointError {
        return CheckpointError(source + ":" + std::to_string(line) + ": " + what);
    };

    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) return false;
        const std::size_t end = text.find('\n', pos);
        line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        ++line_no;
        return true;
    };

    std::string_view header;
    if (!next_line(header)) throw fail(1, "empty checkpoint");
    std::istringstream hs{std::string(trim(header))};
    std::string magic;
    int inputs = 0, hidden = 0, outputs = 0;
    if (!(hs >> magic >> inputs >> hidden >> outputs) || magic != kCheckpointMagic)
        throw fail(1, "bad header, expected '" + std::string(kCheckpointMagic) + " <inputs> <hidden> <outputs>'");
    if (inputs < 1 || hidden < 1 || outputs < 1) throw fail(1, "non-positive dimension in header");

    const Eigen::Index count = QNetworkd::parameter_count(inputs, hidden, outputs);
    Eigen::VectorXd params(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        std::string_view line;
        if (!next_line(line))
            throw fail(line_no + 1, "truncated: expected " + std::to_string(count) + " parameters, found " +
                                        std::to_string(i));
        line = trim(line);
        double v = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size())
            throw fail(line_no, "malformed number '" + std::string(line) + "'");
        if (!std::isfinite(v)) throw fail(line_no, "non-finite parameter");
        params[i] = v;
    }
    std::string_view rest;
    while (next_line(rest))
        if (!trim(rest).empty()) throw fail(line_no, "trailing data after parameters");
    return QNetworkd(inputs, hidden, outputs, std::move(params));
}

void save_checkpoint(const QNetworkd& net, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
        out << checkpoint_text(net);
        if (!out) throw CheckpointError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

QNetworkd load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_checkpoint(ss.str(), path.string());
}

std::uint64_t parameter_hash(const QNetworkd& net) {
    // FNV-1a over dimensions and raw parameter bytes.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    const int dims[3] = {net.inputs(), net.hidden(), net.outputs()};
    mix(dims, sizeof dims);
    mix(net.params().data(), static_cast<std::size_t>(net.size()) * sizeof(double));
    return h;
}

}  // namespace microrl
