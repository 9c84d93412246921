#include "restorex/errors.hpp"

namespace restorex {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::bad_magic: return "bad_magic";
        case errc::dim_mismatch: return "dim_mismatch";
        case errc::non_finite: return "non_finite";
        case errc::ndim_unsupported: return "ndim_unsupported";
        case errc::schema_error: return "schema_error";
        case errc::range_error: return "range_error";
        case errc::box_error: return "box_error";
        case errc::primary_conflict: return "primary_conflict";
        case errc::stage_order_error: return "stage_order_error";
        case errc::epoch_overlap_error: return "epoch_overlap_error";
        case errc::empty_label: return "empty_label";
        case errc::channel_mismatch: return "channel_mismatch";
        case errc::shrink_unsupported: return "shrink_unsupported";
        case errc::box_out_of_bounds: return "box_out_of_bounds";
        case errc::empty_class_list: return "empty_class_list";
        case errc::empty_stage: return "empty_stage";
        case errc::missing_explain_prob: return "missing_explain_prob";
        case errc::no_ground_truth: return "no_ground_truth";
        case errc::zero_baseline: return "zero_baseline";
        case errc::io_error: return "io_error";
        case errc::usage_error: return "usage_error";
    }
    return "unknown";
}

} // namespace restorex
