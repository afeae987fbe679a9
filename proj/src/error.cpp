#include "cds/error.hpp"

namespace cds {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidGrid: return "InvalidGrid";
        case Errc::InvalidPassword: return "InvalidPassword";
        case Errc::WrongImageCount: return "WrongImageCount";
        case Errc::DuplicateImageId: return "DuplicateImageId";
        case Errc::NoEligibleCells: return "NoEligibleCells";
        case Errc::EmptyPolyline: return "EmptyPolyline";
        case Errc::TooFewImages: return "TooFewImages";
        case Errc::UndecodableImage: return "UndecodableImage";
        case Errc::InvalidRange: return "InvalidRange";
        case Errc::SpaceTooLarge: return "SpaceTooLarge";
        case Errc::TooFewSamples: return "TooFewSamples";
        case Errc::CorruptRecord: return "CorruptRecord";
        case Errc::DuplicateUser: return "DuplicateUser";
        case Errc::WrongPasswordLength: return "WrongPasswordLength";
        case Errc::UnknownImageId: return "UnknownImageId";
        case Errc::DuplicatePassImage: return "DuplicatePassImage";
        case Errc::UnknownUser: return "UnknownUser";
        case Errc::UnknownNonce: return "UnknownNonce";
        case Errc::ExpiredNonce: return "ExpiredNonce";
        case Errc::ConsumedNonce: return "ConsumedNonce";
        case Errc::CellOutOfRange: return "CellOutOfRange";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::IoError: return "IoError";
        case Errc::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

}  // namespace cds
