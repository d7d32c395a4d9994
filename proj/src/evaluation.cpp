#include "parktrack/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv_util.hpp"
#include "parktrack/errors.hpp"

namespace parktrack {

using nlohmann::json;

namespace {

void require_records(const std::vector<ComparisonRecord>& records) {
    if (records.empty()) {
        throw InvalidParameter("comparison table must not be empty");
    }
    for (const ComparisonRecord& record : records) {
        if (!std::isfinite(record.dlicp_kcal) || record.dlicp_kcal <= 0.0) {
            throw InvalidParameter("record " + record.subject_id +
                                   ": dlicp_kcal must be > 0");
        }
        if (!std::isfinite(record.reference_kcal) ||
            record.reference_kcal < 0.0) {
            throw InvalidParameter("record " + record.subject_id +
                                   ": reference_kcal must be >= 0");
        }
    }
}

double parse_double_field(const std::string& text, const std::string& where) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(text, &consumed);
        if (consumed != text.size() || !std::isfinite(value)) {
            throw std::invalid_argument(text);
        }
        return value;
    } catch (const std::exception&) {
        throw ParseError(where + ": not a finite number: '" + text + "'");
    }
}

}  // namespace

double mean_absolute_error(const std::vector<ComparisonRecord>& records) {
    require_records(records);
    double sum = 0.0;
    for (const ComparisonRecord& record : records) {
        sum += std::abs(record.dlicp_kcal - record.reference_kcal);
    }
    return sum / static_cast<double>(records.size());
}

double mean_percentage_error(const std::vector<ComparisonRecord>& records) {
    require_records(records);
    double sum = 0.0;
    for (const ComparisonRecord& record : records) {
        sum += (record.dlicp_kcal - record.reference_kcal) /
               record.dlicp_kcal * 100.0;
    }
    return sum / static_cast<double>(records.size());
}

double mean_absolute_percentage_error(
    const std::vector<ComparisonRecord>& records) {
    require_records(records);
    double sum = 0.0;
    for (const ComparisonRecord& record : records) {
        sum += std::abs(record.dlicp_kcal - record.reference_kcal) /
               record.dlicp_kcal * 100.0;
    }
    return sum / static_cast<double>(records.size());
}

std::vector<SubjectDeviation> deviation_table(
    const std::vector<ComparisonRecord>& records) {
    require_records(records);
    std::vector<SubjectDeviation> result;
    result.reserve(records.size());
    for (const ComparisonRecord& record : records) {
        result.push_back(
            {record.subject_id, record.dlicp_kcal - record.reference_kcal});
    }
    return result;
}

std::vector<ReproducedRow> reproduce_calorie_table(
    const std::vector<PaceRosterRow>& roster, double duration_s) {
    if (!std::isfinite(duration_s) || duration_s <= 0.0) {
        throw InvalidParameter("duration must be positive and finite");
    }
    std::vector<ReproducedRow> rows;
    rows.reserve(roster.size());
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const PaceRosterRow& in = roster[i];
        try {
            ReproducedRow row;
            row.subject_id = in.subject_id;
            row.weight_kg = in.weight_kg;
            row.avg_pace_kmh = in.avg_pace_kmh;
            row.met = classify_met(in.avg_pace_kmh);
            row.kcal_per_min = calories_per_minute(row.met, in.weight_kg);
            row.total_kcal = total_calories(row.kcal_per_min, duration_s);
            rows.push_back(std::move(row));
        } catch (const Error& e) {
            throw InvalidParameter("roster row " + std::to_string(i + 1) +
                                   " (" + in.subject_id + "): " + e.what());
        }
    }
    return rows;
}

EvalReport evaluate(const std::vector<ComparisonRecord>& records) {
    EvalReport report;
    report.n = records.size();
    report.mae_kcal = mean_absolute_error(records);
    report.mpe_percent = mean_percentage_error(records);
    report.mape_percent = mean_absolute_percentage_error(records);
    report.per_subject = deviation_table(records);
    report.mae_matches_published =
        std::abs(report.mae_kcal - report.paper_mae_kcal) <= 0.005;
    report.mpe_matches_published =
        std::abs(report.mpe_percent - report.paper_mpe_percent) <= 0.005;
    return report;
}

std::string eval_report_to_json(const EvalReport& report,
                                const std::vector<ComparisonRecord>& records) {
    json per_subject = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        per_subject.push_back({
            {"subject_id", records[i].subject_id},
            {"dlicp_kcal", records[i].dlicp_kcal},
            {"reference_kcal", records[i].reference_kcal},
            {"deviation_kcal", report.per_subject[i].deviation_kcal},
        });
    }
    const json doc = {
        {"n", report.n},
        {"mae", report.mae_kcal},
        {"mpe", report.mpe_percent},
        {"mape", report.mape_percent},
        {"paper_mae", report.paper_mae_kcal},
        {"paper_mpe", report.paper_mpe_percent},
        {"mae_matches_paper", report.mae_matches_published},
        {"mpe_matches_paper", report.mpe_matches_published},
        {"per_subject", per_subject},
    };
    return doc.dump(2);
}

std::vector<PaceRosterRow> load_pace_roster_csv(std::istream& in) {
    const auto rows = csv::read_rows(in);
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"subject_id", "weight_kg",
                                                 "avg_pace_kmh"}) {
        throw ParseError(
            "pace roster CSV must start with header "
            "'subject_id,weight_kg,avg_pace_kmh'");
    }
    std::vector<PaceRosterRow> result;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "pace roster row " + std::to_string(i + 1);
        if (row.size() != 3) {
            throw ParseError(where + ": expected 3 fields");
        }
        PaceRosterRow entry;
        entry.subject_id = row[0];
        entry.weight_kg = parse_double_field(row[1], where + " weight_kg");
        entry.avg_pace_kmh =
            parse_double_field(row[2], where + " avg_pace_kmh");
        result.push_back(std::move(entry));
    }
    return result;
}

std::vector<PaceRosterRow> load_pace_roster_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open pace roster CSV: " + path);
    }
    return load_pace_roster_csv(in);
}

std::vector<ComparisonRecord> load_comparison_csv(std::istream& in) {
    const auto rows = csv::read_rows(in);
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"subject_id", "dlicp_kcal",
                                                 "reference_kcal"}) {
        throw ParseError(
            "comparison CSV must start with header "
            "'subject_id,dlicp_kcal,reference_kcal'");
    }
    std::vector<ComparisonRecord> result;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "comparison row " + std::to_string(i + 1);
        if (row.size() != 3) {
            throw ParseError(where + ": expected 3 fields");
        }
        ComparisonRecord record;
        record.subject_id = row[0];
        record.dlicp_kcal = parse_double_field(row[1], where + " dlicp_kcal");
        record.reference_kcal =
            parse_double_field(row[2], where + " reference_kcal");
        result.push_back(std::move(record));
    }
    return result;
}

std::vector<ComparisonRecord> load_comparison_csv_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open comparison CSV: " + path);
    }
    return load_comparison_csv(in);
}

namespace {

std::string pad(const std::string& text, std::size_t width) {
    return text.size() >= width ? text
                                : text + std::string(width - text.size(), ' ');
}

std::string number(double value, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, value);
    return buf;
}

}  // namespace

std::string render_calorie_table(const std::vector<ReproducedRow>& rows) {
    std::ostringstream out;
    out << pad("Subject", 9) << pad("Weight(kg)", 12) << pad("Pace(km/h)", 12)
        << pad("MET", 6) << pad("kcal/min", 10) << "Total kcal\n";
    for (const ReproducedRow& row : rows) {
        out << pad(row.subject_id, 9) << pad(number(row.weight_kg, "%g"), 12)
            << pad(number(row.avg_pace_kmh, "%g"), 12)
            << pad(format_met(row.met), 6) << pad(format_2dp(row.kcal_per_min), 10)
            << format_2dp(row.total_kcal) << '\n';
    }
    return out.str();
}

std::string render_deviation_table(
    const std::vector<ComparisonRecord>& records) {
    std::ostringstream out;
    out << pad("Subject", 9) << pad("Engine(kcal)", 14)
        << pad("Reference(kcal)", 17) << "Deviation(kcal)\n";
    for (const ComparisonRecord& record : records) {
        const double deviation = record.dlicp_kcal - record.reference_kcal;
        out << pad(record.subject_id, 9)
            << pad(format_2dp(record.dlicp_kcal), 14)
            << pad(number(record.reference_kcal, "%g"), 17)
            << number(deviation, "%+.2f") << '\n';
    }
    return out.str();
}

std::string render_metric_summary(const EvalReport& report) {
    std::ostringstream out;
    out << "n = " << report.n << '\n';
    out << "MAE  recomputed " << number(report.mae_kcal, "%.2f")
        << " kcal   | published " << number(report.paper_mae_kcal, "%.2f")
        << " kcal" << (report.mae_matches_published ? "" : "   [DISCREPANCY]")
        << '\n';
    out << "MPE  recomputed " << number(report.mpe_percent, "%.2f")
        << " %      | published " << number(report.paper_mpe_percent, "%.2f")
        << " %" << (report.mpe_matches_published ? "" : "      [DISCREPANCY]")
        << '\n';
    out << "MAPE recomputed " << number(report.mape_percent, "%.2f")
        << " %      (absolute-deviation diagnostic)\n";
    if (!report.mae_matches_published || !report.mpe_matches_published) {
        out << "note: the published figures are not reproducible from the "
               "shipped comparison table; both values are reported "
               "unadjusted.\n";
    }
    return out.str();
}

}  // namespace parktrack
