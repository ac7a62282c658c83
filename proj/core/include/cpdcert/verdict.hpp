#ifndef CPDCERT_VERDICT_HPP
#define CPDCERT_VERDICT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpdcert/linalg.hpp"

namespace cpdcert {

enum class Cond { Km, Hm, Cm, Um, Wm };
enum class Status { Holds, Fails, Undetermined };

inline const char* to_string(Cond c) {
    switch (c) {
        case Cond::Km: return "K";
        case Cond::Hm: return "H";
        case Cond::Cm: return "C";
        case Cond::Um: return "U";
        case Cond::Wm: return "W";
    }
    return "?";
}

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        case Status::Undetermined: return "undetermined";
    }
    return "?";
}

/// Verdict for one named condition at one m. (Um) and (Wm) are
/// three-valued: Holds and Fails both carry a checkable justification,
/// Undetermined means neither a sound rule fired nor a witness was found.
/// A Fails witness is re-verified by direct evaluation before the verdict
/// is returned.
template <class S>
struct ConditionVerdict {
    Cond condition{};
    int m = 0;
    Status status = Status::Undetermined;
    std::optional<std::vector<S>> witness_d;        // Um/Wm: d; Cm: kernel vector in d-hat space
    std::optional<std::vector<S>> witness_x;        // Wm: preimage with d = C^T x
    std::optional<std::vector<int>> witness_subset; // Hm: minimizing subset; Um: dependent columns
    std::optional<int> witness_delta;               // Hm: violating subset size
    std::vector<std::string> provenance;            // ordered inference steps

    bool holds() const { return status == Status::Holds; }
    bool fails() const { return status == Status::Fails; }
};

/// H(delta) for delta = 1..R, computed exhaustively, with the
/// lexicographically first minimizing subset per delta.
struct HProfile {
    std::vector<int> values;
    std::vector<std::vector<int>> argmin;
};

/// Options for condition checking. Randomized pieces (the (Um)
/// counterexample search) are fully determined by `seed`.
struct CheckOptions : NumericOptions {
    std::uint64_t seed = 0;
    bool enable_search = true;      // randomized (Um) counterexample search
    int search_restarts = 200;      // restarts per candidate support
    int search_sweeps = 60;         // coordinate sweeps per restart
    std::int64_t max_supports_per_size = 512;
    std::int64_t denominator_bound = 1'000'000; // rational reconstruction
    int wm_max_zero_columns = 8;    // structural (Wm) gate
    int wm_max_rank_c = 6;          // structural (Wm) gate
    int wm_max_r = 16;              // structural (Wm) support enumeration gate
};

} // namespace cpdcert

#endif
