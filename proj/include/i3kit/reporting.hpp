#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "i3kit/aggregation.hpp"
#include "i3kit/indicators.hpp"
#include "i3kit/inference.hpp"
#include "i3kit/quantiles.hpp"

namespace i3kit {

struct GazetteerEntry {
    std::string city;
    std::string country;
    double latitude = 0.0;  // degrees, |lat| <= 90
    double longitude = 0.0; // degrees, |lon| <= 180
};

struct LatLon {
    double latitude = 0.0;
    double longitude = 0.0;
};

/// Lookup seam for city coordinates; the bundled implementation is a local
/// CSV gazetteer, but anything that resolves (city, country) keys fits here.
class Geocoder {
public:
    virtual ~Geocoder() = default;
    virtual std::optional<LatLon> lookup(const std::string& city,
                                         const std::string& country) const = 0;
};

/// CSV gazetteer with header `city,country,lat,lon`, keyed exactly as the
/// address parser emits city and country.
class Gazetteer : public Geocoder {
public:
    static Gazetteer load_csv(const std::string& path);

    std::optional<LatLon> lookup(const std::string& city,
                                 const std::string& country) const override;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, std::string>, LatLon> entries_;
};

enum class NodeColor { Green, Red, Gray };

std::string to_string(NodeColor color);

/// Display size on a log scale: 4..24 units, log10(1+n) normalized by the
/// largest unit on the map.
double map_node_size(double n_papers, double n_papers_max);

NodeColor color_for_flag(FlagLevel flag);

/// Flags attached to one unit's report row.
struct UnitFlags {
    FlaggedZ i3;
    FlaggedZ pr6;
};

/// Compute observed-vs-expected flags for every report row under the given
/// expectation mode.
std::map<std::string, UnitFlags> flag_report(const IndicatorReport& report, ExpectMode mode);

/// Ranked table: rows ordered by i3 share, rank brackets on the paper-count
/// and share columns, significance flags appended to the share columns.
/// top_k = 0 keeps all rows.
void emit_rank_table(const IndicatorReport& report,
                     const std::map<std::string, UnitFlags>& flags, std::size_t top_k,
                     const std::string& path);

/// `unit,observed,expected,z,flag` for the I3-vs-publications test.
void emit_ztest_csv(const IndicatorReport& report,
                    const std::map<std::string, UnitFlags>& flags, const std::string& path);

/// `unit,n_papers,mean_quantile,z,flag` for units meeting the min-n cutoff.
void emit_ri3r_csv(const IndicatorReport& report, const std::string& path);

/// Pajek .net file: `*Vertices N` with quoted labels and 1-based ids, then
/// `*Edges` as id pairs. Vertex order follows graph.nodes (sorted labels).
void emit_pajek(const ComparisonGraph& graph, const std::string& path);

/// `unit_a,unit_b,p` for the graph's edges.
void emit_edges_csv(const ComparisonGraph& graph, const std::string& path);

/// `unit,core` core numbers per node.
void emit_cores_csv(const ComparisonGraph& graph, const std::string& path);

struct CityResult {
    std::string city;
    std::string country;
    double n_papers = 0;
    double z = 0.0;
    FlagLevel flag = FlagLevel::NotSignificant;
};

enum class OverlayFormat { GeoJSON, KML };

struct SkipReport {
    std::vector<SkipEntry> entries; // key + reason
};

/// One feature per geocodable city with properties
/// {city, country, n_papers, z, flag, size, color}; cities missing from the
/// gazetteer land in the returned skip report.
SkipReport emit_geo_overlay(const std::vector<CityResult>& cities, const Geocoder& geocoder,
                            OverlayFormat format, const std::string& path);

void write_skip_report(const std::vector<SkipEntry>& entries, const std::string& path);

enum class OverlayMode { ZTest, Ri3r };
enum class CompareVariable { TimesCited, Quantile };

/// Everything one full evaluation run needs.
struct PipelineConfig {
    std::string export_path;    // raw tab-delimited export
    std::string links_path;     // optional citation links for fractional weighting
    std::string gazetteer_path; // required for the map stage
    std::string alias_path;     // optional unit-key aliases
    std::string out_dir;

    CountingRule rule;
    ScoreField score_field = ScoreField::TimesCited;
    UnitKind unit = UnitKind::Journal;
    Counting counting = Counting::Integer;
    CompareVariable compare_variable = CompareVariable::TimesCited;
    ExpectMode expect = ExpectMode::I3Points;
    OverlayMode overlay = OverlayMode::ZTest;
    OverlayFormat overlay_format = OverlayFormat::GeoJSON;
    double alpha = 0.05;
    int min_n = 5;
    std::size_t top_k = 0;
    unsigned threads = 1;
};

/// ingest -> score -> aggregate -> indicate -> flag -> emit. The scored CSV is
/// persisted in out_dir and re-read by the ranking stage, so a rerun from the
/// persisted file is byte-identical. Returns a process exit status: 0 on
/// success, 1 on runtime failure (diagnostics on stderr).
int run_pipeline(const PipelineConfig& config);

/// Bridge from unit subsets (record ids) to indicator members (indices into a
/// scored set sorted by record_id). Unresolvable ids throw UnknownRecordId.
UnitMap resolve_units(const std::map<std::string, std::vector<WeightedRef>>& subsets,
                      const ScoredSet& scored);

/// Per-unit sample of the chosen variable, for distribution comparison.
std::map<std::string, std::vector<double>> unit_samples(const UnitMap& units,
                                                        const ScoredSet& scored,
                                                        CompareVariable variable);

} // namespace i3kit
