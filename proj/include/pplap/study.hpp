#pragma once

#include "pplap/config.hpp"
#include "pplap/report.hpp"
#include "pplap/verify.hpp"

#include <iosfwd>
#include <vector>

namespace pplap {

struct StudyMember {
    int n = 0;
    std::vector<EstimateReport> reports;
};

/// Estimate suite on a refinement family n, 2n, 4n, ... and the drift of
/// every fitted constant between consecutive members.
struct StudyResult {
    double p = 2.0;
    std::vector<StudyMember> members;
    std::vector<EstimateReport> drifts;

    bool pass() const;
};

/// Members are independent and run concurrently when `parallel` is set.
StudyResult refinement_study(const DomainSpec& spec, double p, unsigned seed, int levels = 3, bool parallel = true);

Json to_json(const StudyResult& study);

/// Plot-ready drift table: p,name,n_coarse,n_fine,C_coarse,C_fine,drift,pass.
void write_drift_csv(std::ostream& out, const std::vector<StudyResult>& studies);

}  // namespace pplap
