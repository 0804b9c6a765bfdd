#include "i3kit/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "i3kit/csv.hpp"
#include "i3kit/errors.hpp"

namespace i3kit {

Gazetteer Gazetteer::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw GazetteerMissing(path);
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row))
        throw GazetteerMissing(path + " (empty)");
    if (row.size() < 4 || csv::trim(row[0]) != "city" || csv::trim(row[1]) != "country" ||
        csv::trim(row[2]) != "lat" || csv::trim(row[3]) != "lon")
        throw MissingHeaderTag("city,country,lat,lon");

    Gazetteer g;
    while (reader.next(row)) {
        if (row.size() == 1 && csv::trim(row[0]).empty())
            continue;
        if (row.size() != 4)
            throw MalformedRow(reader.line(), "expected 4 fields");
        GazetteerEntry e;
        e.city = std::string(csv::trim(row[0]));
        e.country = std::string(csv::trim(row[1]));
        e.latitude = csv::parse_double(row[2]);
        e.longitude = csv::parse_double(row[3]);
        if (std::abs(e.latitude) > 90.0)
            throw MalformedRow(reader.line(), "latitude out of range");
        if (std::abs(e.longitude) > 180.0)
            throw MalformedRow(reader.line(), "longitude out of range");
        const auto [it, inserted] =
            g.entries_.emplace(std::make_pair(e.city, e.country), LatLon{e.latitude, e.longitude});
        if (!inserted)
            throw MalformedRow(reader.line(), "duplicate gazetteer key: " + e.city + ", " + e.country);
    }
    return g;
}

std::optional<LatLon> Gazetteer::lookup(const std::string& city,
                                        const std::string& country) const {
    const auto it = entries_.find(std::make_pair(city, country));
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::string to_string(NodeColor color) {
    switch (color) {
    case NodeColor::Green: return "green";
    case NodeColor::Red: return "red";
    case NodeColor::Gray: return "gray";
    }
    return "gray";
}

double map_node_size(double n_papers, double n_papers_max) {
    constexpr double kMin = 4.0;
    constexpr double kMax = 24.0;
    if (n_papers <= 0.0 || n_papers_max <= 0.0)
        return kMin;
    return kMin + (kMax - kMin) * std::log10(1.0 + n_papers) / std::log10(1.0 + n_papers_max);
}

NodeColor color_for_flag(FlagLevel flag) {
    switch (flag) {
    case FlagLevel::AboveP01:
    case FlagLevel::AboveP05:
        return NodeColor::Green;
    case FlagLevel::BelowP01:
    case FlagLevel::BelowP05:
        return NodeColor::Red;
    case FlagLevel::NotSignificant:
        return NodeColor::Gray;
    }
    return NodeColor::Gray;
}

std::map<std::string, UnitFlags> flag_report(const IndicatorReport& report, ExpectMode mode) {
    std::map<std::string, UnitFlags> flags;
    for (const auto& row : report.rows) {
        UnitFlags f;
        f.i3 = flag_indicator(row.i3, report.i3_reference, row.n_papers,
                              static_cast<double>(report.n_reference), mode);
        f.pr6 = flag_indicator(row.pr6, report.pr6_reference, row.n_papers,
                               static_cast<double>(report.n_reference), mode);
        flags.emplace(row.unit_id, f);
    }
    return flags;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    return out;
}

/// 1-based positions after sorting descending by `value`, ties broken by
/// unit id so ranks are reproducible.
std::map<std::string, std::size_t> ranks_by(const std::vector<IndicatorResult>& rows,
                                            double IndicatorResult::* value) {
    std::vector<const IndicatorResult*> order;
    order.reserve(rows.size());
    for (const auto& r : rows)
        order.push_back(&r);
    std::sort(order.begin(), order.end(),
              [value](const IndicatorResult* a, const IndicatorResult* b) {
                  if (a->*value != b->*value)
                      return a->*value > b->*value;
                  return a->unit_id < b->unit_id;
              });
    std::map<std::string, std::size_t> ranks;
    for (std::size_t i = 0; i < order.size(); ++i)
        ranks.emplace(order[i]->unit_id, i + 1);
    return ranks;
}

std::string with_rank(std::string text, std::size_t rank) {
    return std::move(text) + " [" + std::to_string(rank) + "]";
}

std::string with_flag(std::string text, FlagLevel flag) {
    const std::string f = to_string(flag);
    if (f.empty())
        return text;
    return std::move(text) + " " + f;
}

} // namespace

void emit_rank_table(const IndicatorReport& report,
                     const std::map<std::string, UnitFlags>& flags, std::size_t top_k,
                     const std::string& path) {
    const auto paper_ranks = ranks_by(report.rows, &IndicatorResult::n_papers);
    const auto i3_ranks = ranks_by(report.rows, &IndicatorResult::i3_share);
    const auto pr6_ranks = ranks_by(report.rows, &IndicatorResult::pr6_share);

    auto out = open_out(path);
    csv::Writer w(out);
    w.row(std::vector<std::string>{"unit", "n_papers", "citations", "c_per_p", "i3", "i3_pct",
                                   "expected_i3", "pr6", "pr6_pct", "mean_quantile", "ri3r_z"});

    const std::size_t limit =
        top_k == 0 ? report.rows.size() : std::min(top_k, report.rows.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const auto& r = report.rows[i];
        const auto fit = flags.find(r.unit_id);
        const UnitFlags f = fit == flags.end() ? UnitFlags{} : fit->second;
        const std::vector<std::string> row = {
            r.unit_id,
            with_rank(csv::fmt_count(r.n_papers), paper_ranks.at(r.unit_id)),
            csv::fmt_count(r.sum_citations),
            csv::fmt_fixed(r.mean_citations, 2),
            csv::fmt_fixed(r.i3, 0),
            with_flag(with_rank(csv::fmt_fixed(100.0 * r.i3_share, 2), i3_ranks.at(r.unit_id)),
                      f.i3.flag),
            csv::fmt_fixed(r.expected_i3, 0),
            csv::fmt_count(r.pr6),
            with_flag(
                with_rank(csv::fmt_fixed(100.0 * r.pr6_share, 2), pr6_ranks.at(r.unit_id)),
                f.pr6.flag),
            csv::fmt_fixed(r.mean_quantile, 2),
            r.ri3r_z ? csv::fmt_fixed(*r.ri3r_z, 3) : std::string(),
        };
        w.row(row);
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

void emit_ztest_csv(const IndicatorReport& report,
                    const std::map<std::string, UnitFlags>& flags, const std::string& path) {
    auto out = open_out(path);
    csv::Writer w(out);
    w.row(std::vector<std::string>{"unit", "observed", "expected", "z", "flag"});
    for (const auto& r : report.rows) {
        const auto fit = flags.find(r.unit_id);
        const FlaggedZ f = fit == flags.end() ? FlaggedZ{} : fit->second.i3;
        w.row(std::vector<std::string>{
            r.unit_id,
            csv::fmt_fixed(r.i3, 0),
            csv::fmt_fixed(r.expected_i3, 0),
            csv::fmt_fixed(f.z, 3),
            to_string(f.flag),
        });
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

void emit_ri3r_csv(const IndicatorReport& report, const std::string& path) {
    auto out = open_out(path);
    csv::Writer w(out);
    w.row(std::vector<std::string>{"unit", "n_papers", "mean_quantile", "z", "flag"});
    for (const auto& r : report.rows) {
        if (!r.ri3r_z)
            continue;
        w.row(std::vector<std::string>{
            r.unit_id,
            csv::fmt_count(r.n_papers),
            csv::fmt_fixed(r.mean_quantile, 2),
            csv::fmt_fixed(*r.ri3r_z, 3),
            to_string(flag_for_z(*r.ri3r_z)),
        });
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

void emit_pajek(const ComparisonGraph& graph, const std::string& path) {
    if (graph.nodes.empty())
        throw Error("pajek: empty graph");
    auto out = open_out(path);
    out << "*Vertices " << graph.nodes.size() << "\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        std::string label = graph.nodes[i];
        std::replace(label.begin(), label.end(), '"', '\'');
        out << (i + 1) << " \"" << label << "\"\n";
    }
    out << "*Edges\n";
    for (const auto& e : graph.edges)
        out << (e.a + 1) << " " << (e.b + 1) << "\n";
    if (!out)
        throw IoFailure("write failed: " + path);
}

void emit_edges_csv(const ComparisonGraph& graph, const std::string& path) {
    auto out = open_out(path);
    csv::Writer w(out);
    w.row(std::vector<std::string>{"unit_a", "unit_b", "p"});
    for (const auto& e : graph.edges) {
        w.row(std::vector<std::string>{graph.nodes[e.a], graph.nodes[e.b],
                                       csv::fmt_shortest(e.p)});
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

void emit_cores_csv(const ComparisonGraph& graph, const std::string& path) {
    auto out = open_out(path);
    csv::Writer w(out);
    w.row(std::vector<std::string>{"unit", "core"});
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        w.row(std::vector<std::string>{graph.nodes[i], std::to_string(graph.core_number[i])});
    if (!out)
        throw IoFailure("write failed: " + path);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char* kml_color(NodeColor color) {
    // KML colors are aabbggrr
    switch (color) {
    case NodeColor::Green: return "ff00c800";
    case NodeColor::Red: return "ff0000c8";
    case NodeColor::Gray: return "ff808080";
    }
    return "ff808080";
}

} // namespace

SkipReport emit_geo_overlay(const std::vector<CityResult>& cities, const Geocoder& geocoder,
                            OverlayFormat format, const std::string& path) {
    std::vector<CityResult> sorted = cities;
    std::sort(sorted.begin(), sorted.end(), [](const CityResult& a, const CityResult& b) {
        if (a.city != b.city)
            return a.city < b.city;
        return a.country < b.country;
    });

    SkipReport skips;
    struct Placed {
        CityResult city;
        LatLon pos;
        double size;
        NodeColor color;
    };
    std::vector<Placed> placed;
    for (const auto& c : sorted) {
        const auto pos = geocoder.lookup(c.city, c.country);
        if (!pos) {
            skips.entries.push_back({c.city + ", " + c.country, "not in gazetteer"});
            continue;
        }
        placed.push_back({c, *pos, 0.0, color_for_flag(c.flag)});
    }
    // node sizes normalize against the largest city actually on the map
    double n_max = 0.0;
    for (const auto& p : placed)
        n_max = std::max(n_max, p.city.n_papers);
    for (auto& p : placed)
        p.size = map_node_size(p.city.n_papers, n_max);

    auto out = open_out(path);
    if (format == OverlayFormat::GeoJSON) {
        nlohmann::json features = nlohmann::json::array();
        for (const auto& p : placed) {
            nlohmann::json feature = {
                {"type", "Feature"},
                {"geometry",
                 {{"type", "Point"}, {"coordinates", {p.pos.longitude, p.pos.latitude}}}},
                {"properties",
                 {{"city", p.city.city},
                  {"country", p.city.country},
                  {"n_papers", p.city.n_papers},
                  {"z", p.city.z},
                  {"flag", to_string(p.city.flag)},
                  {"size", p.size},
                  {"color", to_string(p.color)}}},
            };
            features.push_back(std::move(feature));
        }
        const nlohmann::json fc = {{"type", "FeatureCollection"}, {"features", features}};
        out << fc.dump(2) << "\n";
    } else {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n"
            << "<Document>\n";
        for (const auto& p : placed) {
            out << "  <Placemark>\n"
                << "    <name>" << xml_escape(p.city.city + ", " + p.city.country)
                << "</name>\n"
                << "    <description>papers: " << csv::fmt_count(p.city.n_papers)
                << ", z: " << csv::fmt_fixed(p.city.z, 3) << ", flag: "
                << xml_escape(to_string(p.city.flag)) << "</description>\n"
                << "    <Style><IconStyle><color>" << kml_color(p.color) << "</color>"
                << "<scale>" << csv::fmt_fixed(p.size / 10.0, 2) << "</scale>"
                << "<Icon><href>http://maps.google.com/mapfiles/kml/shapes/placemark_circle.png"
                << "</href></Icon></IconStyle></Style>\n"
                << "    <Point><coordinates>" << csv::fmt_shortest(p.pos.longitude) << ","
                << csv::fmt_shortest(p.pos.latitude) << ",0</coordinates></Point>\n"
                << "  </Placemark>\n";
        }
        out << "</Document>\n</kml>\n";
    }
    if (!out)
        throw IoFailure("write failed: " + path);
    return skips;
}

void write_skip_report(const std::vector<SkipEntry>& entries, const std::string& path) {
    auto out = open_out(path);
    csv::Writer w(out);
    w.row(std::vector<std::string>{"key", "reason"});
    for (const auto& e : entries)
        w.row(std::vector<std::string>{e.record_id, e.reason});
    if (!out)
        throw IoFailure("write failed: " + path);
}

UnitMap resolve_units(const std::map<std::string, std::vector<WeightedRef>>& subsets,
                      const ScoredSet& scored) {
    UnitMap units;
    for (const auto& [key, refs] : subsets) {
        UnitMembers members;
        members.reserve(refs.size());
        for (const auto& ref : refs) {
            const auto it = std::lower_bound(
                scored.begin(), scored.end(), ref.record_id,
                [](const ScoredRecord& r, const std::string& id) { return r.record_id < id; });
            if (it == scored.end() || it->record_id != ref.record_id)
                throw UnknownRecordId(ref.record_id);
            members.push_back(
                {static_cast<std::size_t>(it - scored.begin()), ref.weight});
        }
        units.emplace(key, std::move(members));
    }
    return units;
}

std::map<std::string, std::vector<double>> unit_samples(const UnitMap& units,
                                                        const ScoredSet& scored,
                                                        CompareVariable variable) {
    std::map<std::string, std::vector<double>> samples;
    for (const auto& [key, members] : units) {
        std::vector<double> values;
        values.reserve(members.size());
        for (const auto& m : members) {
            values.push_back(variable == CompareVariable::TimesCited
                                 ? static_cast<double>(scored[m.scored_index].times_cited)
                                 : scored[m.scored_index].quantile.value());
        }
        samples.emplace(key, std::move(values));
    }
    return samples;
}

int run_pipeline(const PipelineConfig& config) {
    std::string stage = "config";
    try {
        std::filesystem::create_directories(config.out_dir);
        const auto out = [&](const std::string& name) { return config.out_dir + "/" + name; };

        stage = "ingest";
        RecordSet records = filter_citable(parse_export(config.export_path));
        if (!config.links_path.empty())
            records = apply_fractional_weights(records, load_links(config.links_path));
        write_records_csv(records, out("records.csv"));
        if (records.empty())
            throw Error("no citable records in " + config.export_path);

        stage = "score";
        const ScoringResult scoring =
            score_set(records, config.rule, config.score_field, config.threads);
        write_scored_csv(scoring.scored, out("scored.csv"));
        if (!scoring.small_strata.empty())
            std::cerr << "note: " << scoring.small_strata.size()
                      << (scoring.small_strata.size() == 1 ? " stratum has" : " strata have")
                      << " fewer than 5 records; quantiles there are kept but coarse\n";

        stage = "rank";
        const ScoredSet scored = read_scored_csv(out("scored.csv"));
        AssignmentResult assigned = assign_units(records, config.unit, config.counting);
        if (!config.alias_path.empty())
            assigned = apply_aliases(assigned, load_aliases(config.alias_path), config.counting);
        const auto subsets = unit_subsets(assigned.assignments);
        const UnitMap units = resolve_units(subsets, scored);
        if (units.empty())
            throw Error("no units of kind " + to_string(config.unit));
        const IndicatorReport report = indicator_report(scored, units, config.min_n);
        const auto flags = flag_report(report, config.expect);
        emit_rank_table(report, flags, config.top_k, out("rank.csv"));
        emit_ztest_csv(report, flags, out("ztest.csv"));
        emit_ri3r_csv(report, out("ri3r.csv"));
        write_skip_report(assigned.skipped, out("skips_units.csv"));

        stage = "compare";
        if (units.size() >= 2) {
            if (units.size() > 50)
                std::cerr << "note: " << units.size() << " units -> "
                          << units.size() * (units.size() - 1) / 2
                          << " pairwise tests; this may take a while\n";
            const auto samples = unit_samples(units, scored, config.compare_variable);
            const ComparisonGraph graph =
                homogeneity_graph(samples, config.alpha, config.threads);
            emit_pajek(graph, out("graph.net"));
            emit_edges_csv(graph, out("edges.csv"));
            emit_cores_csv(graph, out("cores.csv"));
        } else {
            std::cerr << "note: fewer than 2 units, skipping distribution comparison\n";
        }

        stage = "map";
        if (!config.gazetteer_path.empty()) {
            const Gazetteer gazetteer = Gazetteer::load_csv(config.gazetteer_path);
            AssignmentResult city_assigned =
                assign_units(records, UnitKind::City, config.counting);
            if (!config.alias_path.empty())
                city_assigned = apply_aliases(city_assigned, load_aliases(config.alias_path),
                                              config.counting);
            const auto city_units = resolve_units(unit_subsets(city_assigned.assignments), scored);
            if (!city_units.empty()) {
                const IndicatorReport city_report =
                    indicator_report(scored, city_units, config.min_n);
                const auto city_flags = flag_report(city_report, config.expect);

                std::vector<CityResult> cities;
                for (const auto& row : city_report.rows) {
                    CityResult c;
                    const auto sep = row.unit_id.find(", ");
                    c.city = row.unit_id.substr(0, sep);
                    c.country = sep == std::string::npos ? "" : row.unit_id.substr(sep + 2);
                    c.n_papers = row.n_papers;
                    if (config.overlay == OverlayMode::Ri3r) {
                        if (!row.ri3r_z)
                            continue;
                        c.z = *row.ri3r_z;
                        c.flag = flag_for_z(c.z);
                    } else {
                        const auto& f = city_flags.at(row.unit_id).i3;
                        c.z = f.z;
                        c.flag = f.flag;
                    }
                    cities.push_back(std::move(c));
                }
                const std::string overlay_path =
                    out(config.overlay_format == OverlayFormat::GeoJSON ? "overlay.json"
                                                                        : "overlay.kml");
                const SkipReport skips =
                    emit_geo_overlay(cities, gazetteer, config.overlay_format, overlay_path);
                write_skip_report(skips.entries, out("skips_map.csv"));
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 1;
    }
}

} // namespace i3kit
