#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skyfed {

// Base of every error raised by the library. `code` is a stable machine
// readable identifier that is carried verbatim into the HTTP error envelope.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message,
          std::optional<std::size_t> offset = std::nullopt)
        : std::runtime_error(message), code_(std::move(code)), offset_(offset) {}

    const std::string& code() const noexcept { return code_; }
    std::optional<std::size_t> offset() const noexcept { return offset_; }

private:
    std::string code_;
    std::optional<std::size_t> offset_;
};

// Aggregates every problem found while validating a document.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error("validation_error", join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

class MissingBandError : public Error {
public:
    explicit MissingBandError(std::string band)
        : Error("missing_band", "missing band: " + band), band_(std::move(band)) {}
    const std::string& band() const noexcept { return band_; }

private:
    std::string band_;
};

class FluxError : public Error {
public:
    FluxError(std::uint64_t row_id, double flux)
        : Error("nonpositive_flux",
                "non-positive flux " + std::to_string(flux) + " for row " + std::to_string(row_id)),
          row_id_(row_id) {}
    std::uint64_t row_id() const noexcept { return row_id_; }

private:
    std::uint64_t row_id_;
};

}  // namespace skyfed
