#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cds {

enum class Errc {
    InvalidGrid,
    InvalidPassword,
    WrongImageCount,
    DuplicateImageId,
    NoEligibleCells,
    EmptyPolyline,
    TooFewImages,
    UndecodableImage,
    InvalidRange,
    SpaceTooLarge,
    TooFewSamples,
    CorruptRecord,
    DuplicateUser,
    WrongPasswordLength,
    UnknownImageId,
    DuplicatePassImage,
    UnknownUser,
    UnknownNonce,
    ExpiredNonce,
    ConsumedNonce,
    CellOutOfRange,
    InvalidConfig,
    IoError,
    BadRequest,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above, so
/// callers (the HTTP layer, the CLI, the Python bindings) can branch on the
/// kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace cds
