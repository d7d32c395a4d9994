#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "parktrack/activity_model.hpp"

namespace parktrack {

/// Published accuracy figures this harness compares its own recomputation
/// against. Recomputing the comparison table does not reproduce them; the
/// report shows both side by side and flags the gap.
inline constexpr double kPublishedMaeKcal = 5.64;
inline constexpr double kPublishedMpePercent = 1.96;

/// Paired engine-vs-reference-device calorie readings for one subject.
struct ComparisonRecord {
    std::string subject_id;
    double dlicp_kcal = 0.0;      // must be > 0 (the MPE denominator)
    double reference_kcal = 0.0;  // the wrist-worn reference device
};

/// Mean absolute error in kcal: (1/N) sum |dlicp - reference|.
double mean_absolute_error(const std::vector<ComparisonRecord>& records);

/// Signed mean percentage error: (1/N) sum (dlicp - reference) / dlicp x 100.
/// Deviations keep their signs and may cancel.
double mean_percentage_error(const std::vector<ComparisonRecord>& records);

/// Diagnostics variant of the MPE with absolute per-record deviations.
double mean_absolute_percentage_error(
    const std::vector<ComparisonRecord>& records);

struct SubjectDeviation {
    std::string subject_id;
    double deviation_kcal = 0.0;  // dlicp - reference
};

std::vector<SubjectDeviation> deviation_table(
    const std::vector<ComparisonRecord>& records);

/// One roster row for reproducing the calorie table.
struct PaceRosterRow {
    std::string subject_id;
    double weight_kg = 0.0;
    double avg_pace_kmh = 0.0;
};

struct ReproducedRow {
    std::string subject_id;
    double weight_kg = 0.0;
    double avg_pace_kmh = 0.0;
    double met = 0.0;
    double kcal_per_min = 0.0;  // full precision; truncate for display
    double total_kcal = 0.0;
};

/// Applies pace -> MET -> kcal/min -> total over duration_s to every row.
/// Invalid rows raise InvalidParameter naming the row index.
std::vector<ReproducedRow> reproduce_calorie_table(
    const std::vector<PaceRosterRow>& roster, double duration_s = 1800.0);

struct EvalReport {
    std::size_t n = 0;
    double mae_kcal = 0.0;
    double mpe_percent = 0.0;
    double mape_percent = 0.0;
    std::vector<SubjectDeviation> per_subject;
    double paper_mae_kcal = kPublishedMaeKcal;
    double paper_mpe_percent = kPublishedMpePercent;
    bool mae_matches_published = false;  // within half a printed decimal
    bool mpe_matches_published = false;
};

EvalReport evaluate(const std::vector<ComparisonRecord>& records);

/// Machine-readable report:
///   {"n", "mae", "mpe", "mape", "paper_mae", "paper_mpe",
///    "mae_matches_paper", "mpe_matches_paper",
///    "per_subject": [{"subject_id", "dlicp_kcal", "reference_kcal",
///                     "deviation_kcal"}]}
std::string eval_report_to_json(const EvalReport& report,
                                const std::vector<ComparisonRecord>& records);

/// CSV inputs. Pace roster: `subject_id,weight_kg,avg_pace_kmh`.
/// Comparison table: `subject_id,dlicp_kcal,reference_kcal`.
std::vector<PaceRosterRow> load_pace_roster_csv(std::istream& in);
std::vector<PaceRosterRow> load_pace_roster_csv_file(const std::string& path);
std::vector<ComparisonRecord> load_comparison_csv(std::istream& in);
std::vector<ComparisonRecord> load_comparison_csv_file(
    const std::string& path);

/// Fixed-width renderings of the reproduced table, the deviation table and
/// the metric summary, mirroring the published column order.
std::string render_calorie_table(const std::vector<ReproducedRow>& rows);
std::string render_deviation_table(
    const std::vector<ComparisonRecord>& records);
std::string render_metric_summary(const EvalReport& report);

}  // namespace parktrack
