#include "pplap/study.hpp"

#include "pplap/errors.hpp"

#include <algorithm>
#include <future>
#include <ostream>

namespace pplap {

bool StudyResult::pass() const {
    return std::all_of(drifts.begin(), drifts.end(), [](const EstimateReport& r) { return r.pass; });
}

StudyResult refinement_study(const DomainSpec& spec, double p, unsigned seed, int levels, bool parallel) {
    if (spec.kind == "graph") throw UnsupportedOperation("a refinement study needs a grid domain");
    if (levels < 2) throw ParameterError("a refinement study needs at least 2 levels");
    std::vector<int> sizes;
    for (int l = 0, n = spec.n; l < levels; ++l, n *= 2) sizes.push_back(n);

    auto run = [&](int n) {
        StudyMember m;
        m.n = n;
        m.reports = estimate_suite(spec.refined(n).build(), p, seed);
        return m;
    };

    StudyResult out;
    out.p = p;
    if (parallel) {
        std::vector<std::future<StudyMember>> futures;
        for (int n : sizes) futures.push_back(std::async(std::launch::async, run, n));
        for (auto& f : futures) out.members.push_back(f.get());
    } else {
        for (int n : sizes) out.members.push_back(run(n));
    }

    for (std::size_t l = 1; l < out.members.size(); ++l) {
        for (const auto& coarse : out.members[l - 1].reports) {
            const auto& fine_reports = out.members[l].reports;
            const auto it = std::find_if(fine_reports.begin(), fine_reports.end(),
                                         [&](const EstimateReport& r) { return r.name == coarse.name; });
            if (it == fine_reports.end()) continue;
            EstimateReport d = refinement_drift(coarse, *it);
            d.set("p", p);
            out.drifts.push_back(std::move(d));
        }
    }
    return out;
}

Json to_json(const StudyResult& study) {
    Json j;
    j["p"] = json_number(study.p);
    j["pass"] = study.pass();
    Json members = Json::array();
    for (const auto& m : study.members) {
        Json mj;
        mj["n"] = m.n;
        mj["reports"] = to_json(m.reports);
        members.push_back(std::move(mj));
    }
    j["members"] = std::move(members);
    j["drifts"] = to_json(study.drifts);
    return j;
}

void write_drift_csv(std::ostream& out, const std::vector<StudyResult>& studies) {
    out << "p,name,n_coarse,n_fine,C_coarse,C_fine,drift,pass\n";
    for (const auto& s : studies)
        for (const auto& d : s.drifts)
            out << format_double(s.p) << ',' << d.name << ',' << format_double(d.get("n_coarse")) << ','
                << format_double(d.get("n_fine")) << ',' << format_double(d.lhs) << ',' << format_double(d.rhs) << ','
                << format_double(d.fitted_constant) << ',' << (d.pass ? 1 : 0) << '\n';
}

}  // namespace pplap
