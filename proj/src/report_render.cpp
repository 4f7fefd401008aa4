#include "sicreg/report_render.hpp"

#include <iomanip>
#include <sstream>

#include "sicreg/csv.hpp"

namespace sicreg {

namespace {

std::string pad(const std::string& s, size_t width, bool right = true) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

std::string num_or_blank(bool present, double v, int sig = 4) {
    return present ? format_num(v, sig) : "";
}

}  // namespace

std::string render_fit_table(const FitResult& fit,
                             const std::vector<std::string>& predictor_names) {
    const int p = fit.theta_orig.p();
    if (static_cast<int>(predictor_names.size()) != p)
        throw DimensionMismatch("predictor name count does not match fit");

    const auto find = [](const std::vector<int>& v, int j) {
        for (size_t k = 0; k < v.size(); ++k)
            if (v[k] == j) return static_cast<int>(k);
        return -1;
    };
    const auto delta_for = [](const std::vector<std::pair<int, double>>& d, int j) {
        for (const auto& [idx, v] : d)
            if (idx == j) return std::make_pair(true, v);
        return std::make_pair(false, 0.0);
    };

    std::ostringstream out;
    out << "BIC " << format_num(fit.bic_value, 6) << "\n";
    out << pad("", 14, false) << pad("location", 30) << pad("dispersion", 32) << "\n";
    out << pad("predictor", 14, false) << pad("estimate", 12) << pad("(se)", 10) << pad("dBIC", 8)
        << pad("estimate", 12) << pad("(se)", 10) << pad("dBIC", 8) << "\n";

    for (int j = 0; j <= p; ++j) {
        const std::string name =
            j == 0 ? "(intercept)" : predictor_names[static_cast<size_t>(j - 1)];
        const int kb = find(fit.active.beta, j);
        const int ka = find(fit.active.alpha, j);
        const auto [has_db, db] = delta_for(fit.delta_bic_beta, j);
        const auto [has_da, da] = delta_for(fit.delta_bic_alpha, j);

        out << pad(name, 14, false);
        out << pad(num_or_blank(kb >= 0, fit.theta_orig.beta[j]), 12);
        out << pad(kb >= 0 ? "(" + format_num(fit.se_beta[static_cast<size_t>(kb)], 3) + ")" : "",
                   10);
        out << pad(num_or_blank(has_db, db), 8);
        out << pad(num_or_blank(ka >= 0, fit.theta_orig.alpha[j]), 12);
        out << pad(ka >= 0 ? "(" + format_num(fit.se_alpha[static_cast<size_t>(ka)], 3) + ")" : "",
                   10);
        out << pad(num_or_blank(has_da, da), 8);
        out << "\n";
    }
    return out.str();
}

std::string render_path_csv(const FitTrace& trace,
                            const std::vector<std::string>& predictor_names) {
    std::ostringstream out;
    out << "step,epsilon,component,predictor,value\n";
    for (size_t t = 0; t < trace.per_step.size(); ++t) {
        const auto& rec = trace.per_step[t];
        for (const char* component : {"location", "dispersion"}) {
            const bool loc = component[0] == 'l';
            for (size_t j = 0; j < predictor_names.size(); ++j) {
                const double v = loc ? rec.theta.beta[static_cast<Eigen::Index>(j + 1)]
                                     : rec.theta.alpha[static_cast<Eigen::Index>(j + 1)];
                out << (t + 1) << ',' << format_num(rec.eps, 10) << ',' << component << ','
                    << predictor_names[j] << ',' << format_num(v, 10) << "\n";
            }
        }
    }
    return out.str();
}

namespace {

void csv_row(std::ostringstream& out, long n, const std::string& method,
             const std::string& component, const std::string& coefficient,
             const std::string& metric, double value) {
    out << n << ',' << method << ',' << component << ',' << coefficient << ',' << metric << ','
        << format_num(value, 10) << "\n";
}

std::string coef_name(int j, const std::vector<std::string>& names) {
    if (j == 0) return "(intercept)";
    return names[static_cast<size_t>(j - 1)];
}

std::vector<std::string> scenario_predictor_names(const Scenario& sc) {
    std::vector<std::string> names;
    for (int j = 1; j <= sc.p(); ++j) names.push_back("x" + std::to_string(j));
    return names;
}

}  // namespace

std::string render_study_csv(const StudyReport& report) {
    const auto names = scenario_predictor_names(report.scenario);
    std::ostringstream out;
    out << "n,method,component,coefficient,metric,value\n";
    for (const auto& cell : report.cells) {
        const std::string method = method_name(cell.method);
        for (const auto& [label, comp] :
             {std::pair<const char*, const ComponentMetrics*>{"location", &cell.beta},
              {"dispersion", &cell.alpha}}) {
            csv_row(out, cell.n, method, label, "", "C", comp->c);
            csv_row(out, cell.n, method, label, "", "IC", comp->ic);
            csv_row(out, cell.n, method, label, "", "PT", comp->pt);
            csv_row(out, cell.n, method, label, "", "MSE", comp->mse);
        }
        csv_row(out, cell.n, method, "both", "", "PT", cell.pt_joint);

        for (const auto& [label, coefs] :
             {std::pair<const char*, const std::vector<CoefficientSummary>*>{"location",
                                                                             &cell.coef_beta},
              {"dispersion", &cell.coef_alpha}}) {
            for (size_t j = 0; j < coefs->size(); ++j) {
                const auto& s = (*coefs)[j];
                const std::string cname = coef_name(static_cast<int>(j), names);
                csv_row(out, cell.n, method, label, cname, "est", s.mean_est);
                csv_row(out, cell.n, method, label, cname, "SE", s.emp_se);
                csv_row(out, cell.n, method, label, cname, "SEE", s.mean_see);
                csv_row(out, cell.n, method, label, cname, "CP", s.cp);
            }
        }

        csv_row(out, cell.n, method, "both", "", "PCP", cell.pcp_overall);
        csv_row(out, cell.n, method, "both", "", "PCP_low", cell.pcp_low);
        csv_row(out, cell.n, method, "both", "", "PCP_medium", cell.pcp_medium);
        csv_row(out, cell.n, method, "both", "", "PCP_high", cell.pcp_high);
        csv_row(out, cell.n, method, "both", "", "failed_replicates",
                static_cast<double>(cell.n_failed));
    }
    return out.str();
}

std::string render_study_text(const StudyReport& report) {
    const auto names = scenario_predictor_names(report.scenario);
    std::ostringstream out;
    out << "study: " << (report.scenario.name.empty() ? "(unnamed)" : report.scenario.name)
        << "  replicates=" << report.scenario.replicates << "  seed=" << report.scenario.seed
        << "\n";

    for (const auto& cell : report.cells) {
        out << "\n== n=" << cell.n << "  " << method_name(cell.method)
            << " ==========================================\n";
        out << pad("", 12, false) << pad("C", 8) << pad("IC", 8) << pad("PT", 8) << pad("MSE", 10)
            << "\n";
        for (const auto& [label, comp] :
             {std::pair<const char*, const ComponentMetrics*>{"location", &cell.beta},
              {"dispersion", &cell.alpha}}) {
            out << pad(label, 12, false) << pad(format_num(comp->c, 4), 8)
                << pad(format_num(comp->ic, 4), 8) << pad(format_num(comp->pt, 4), 8)
                << pad(format_num(comp->mse, 4), 10) << "\n";
        }
        out << "joint PT " << format_num(cell.pt_joint, 4) << "   failed " << cell.n_failed << "/"
            << report.scenario.replicates << "   mean fit time "
            << format_num(cell.mean_seconds, 3) << " s\n\n";

        out << pad("component", 12, false) << pad("coef", 12, false) << pad("true", 8)
            << pad("est", 10) << pad("SE", 10) << pad("SEE", 10) << pad("CP", 8) << "\n";
        for (const auto& [label, coefs] :
             {std::pair<const char*, const std::vector<CoefficientSummary>*>{"location",
                                                                             &cell.coef_beta},
              {"dispersion", &cell.coef_alpha}}) {
            for (size_t j = 0; j < coefs->size(); ++j) {
                const auto& s = (*coefs)[j];
                out << pad(label, 12, false)
                    << pad(coef_name(static_cast<int>(j), names), 12, false)
                    << pad(format_num(s.true_value, 3), 8) << pad(format_num(s.mean_est, 4), 10)
                    << pad(format_num(s.emp_se, 4), 10) << pad(format_num(s.mean_see, 4), 10)
                    << pad(format_num(s.cp, 4), 8) << "\n";
            }
        }
        out << "PCP overall " << format_num(cell.pcp_overall, 4) << " | low "
            << format_num(cell.pcp_low, 4) << "  medium " << format_num(cell.pcp_medium, 4)
            << "  high " << format_num(cell.pcp_high, 4) << "\n";
    }
    return out.str();
}

std::string render_coverage(const CoverageReport& rep) {
    std::ostringstream out;
    out << "prediction coverage (n=" << rep.n_total << ", sigma thresholds "
        << format_num(rep.threshold_low_med, 4) << " / " << format_num(rep.threshold_med_high, 4)
        << ")\n";
    const auto line = [&](const char* label, const std::optional<double>& v, long count) {
        out << pad(label, 10, false);
        out << pad(v ? format_num(*v, 4) : "-", 8) << pad("(" + std::to_string(count) + ")", 8)
            << "\n";
    };
    line("low", rep.low, rep.n_low);
    line("medium", rep.medium, rep.n_medium);
    line("high", rep.high, rep.n_high);
    out << pad("overall", 10, false) << pad(format_num(rep.overall, 4), 8)
        << pad("(" + std::to_string(rep.n_total) + ")", 8) << "\n";
    return out.str();
}

}  // namespace sicreg
