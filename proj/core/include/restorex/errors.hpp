#pragma once

#include <stdexcept>
#include <string>

namespace restorex {

/// Typed failure conditions. Every parser and numeric operation either
/// returns a value or throws Error with one of these codes; nothing crashes
/// on malformed input.
enum class errc {
    bad_magic,
    dim_mismatch,
    non_finite,
    ndim_unsupported,
    schema_error,
    range_error,
    box_error,
    primary_conflict,
    stage_order_error,
    epoch_overlap_error,
    empty_label,
    channel_mismatch,
    shrink_unsupported,
    box_out_of_bounds,
    empty_class_list,
    empty_stage,
    missing_explain_prob,
    no_ground_truth,
    zero_baseline,
    io_error,
    usage_error,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          message_(message) {}

    errc code() const noexcept { return code_; }

    /// Message without the "<code>: " prefix, for rewrapping with context.
    const std::string& message() const noexcept { return message_; }

private:
    errc code_;
    std::string message_;
};

} // namespace restorex
