#include "rfmix/report.hpp"

#include <cmath>

namespace rfmix {

Json real_json(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return x;
}

Json complex_json(cplx z)
{
    return Json::array({real_json(z.real()), real_json(z.imag())});
}

Json to_json(const BudgetReport& r)
{
    Json stages = Json::array();
    for (const auto& s : r.stages) {
        stages.push_back({{"label", s.label},
                          {"kind", s.kind},
                          {"gain_db", real_json(s.gain_db)},
                          {"nf_db", real_json(s.nf_db)},
                          {"iip3_dbm", real_json(s.iip3_dbm)},
                          {"cum_gain_db", real_json(s.cum_gain_db)},
                          {"cum_nf_db", real_json(s.cum_nf_db)},
                          {"cum_iip3_dbm", real_json(s.cum_iip3_dbm)},
                          {"input_dbm", real_json(s.input_dbm)},
                          {"output_dbm", real_json(s.output_dbm)},
                          {"compression_warning", s.compression_warning}});
    }
    return {{"role", std::string(to_string(r.role))},
            {"input_dbm", real_json(r.input_dbm)},
            {"conversion_gain_db", real_json(r.total_gain_db)},
            {"noise_figure_db", real_json(r.total_nf_db)},
            {"iip3_dbm", real_json(r.total_iip3_dbm)},
            {"output_dbm", real_json(r.output_dbm)},
            {"warnings", r.warnings},
            {"stages", stages}};
}

Json to_json(const LinearityReport& r)
{
    return {{"amp_linearity", real_json(r.amp_linearity)},
            {"phase_linearity_rad", real_json(r.phase_linearity)},
            {"freq_hz", real_json(r.freq)},
            {"n_points", r.n_points}};
}

Json to_json(const IqImbalanceEstimate& e)
{
    return {{"mu_hat", complex_json(e.mu_hat)},
            {"nu_hat", complex_json(e.nu_hat)},
            {"c_hat", complex_json(e.c_hat)},
            {"irr_dbc", real_json(e.irr_dbc)}};
}

Json to_json(const RbFit& f, const RbDataset& data)
{
    Json curve = Json::array();
    for (std::size_t i = 0; i < data.points.size() && i < f.curve.size(); ++i) {
        curve.push_back({{"m", data.points[i].m},
                         {"survival", real_json(data.points[i].survival)},
                         {"fit", real_json(f.curve[i])}});
    }
    return {{"dimension", data.dimension},
            {"A", real_json(f.A)},
            {"p", real_json(f.p)},
            {"process_infidelity", real_json(f.process_infidelity)},
            {"se_A", real_json(f.se_A)},
            {"se_p", real_json(f.se_p)},
            {"se_p_binomial", real_json(f.se_p_binomial)},
            {"se_infidelity", real_json(f.se_infidelity)},
            {"iterations", f.iterations},
            {"status", std::string(to_string(f.status))},
            {"curve", curve}};
}

Json to_json(const Settings& s)
{
    const auto m = s.predistorter.matrix();
    return {{"bias", {{"b_i", real_json(s.bias.b_i)}, {"b_q", real_json(s.bias.b_q)}}},
            {"predistorter", {{"matrix", {{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}}}}};
}

} // namespace rfmix
