#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "i3kit/aggregation.hpp"
#include "i3kit/csv.hpp"
#include "i3kit/indicators.hpp"
#include "i3kit/inference.hpp"
#include "i3kit/quantiles.hpp"
#include "i3kit/records.hpp"
#include "i3kit/reporting.hpp"

namespace {

using namespace i3kit;

UnitKind parse_unit(const std::string& s) {
    if (s == "journal") return UnitKind::Journal;
    if (s == "country") return UnitKind::Country;
    if (s == "city") return UnitKind::City;
    if (s == "institute") return UnitKind::Institute;
    return UnitKind::Author;
}

std::set<DocKind> parse_types(const std::string& csv_list) {
    std::set<DocKind> kinds;
    for (const auto& name : csv::split(csv_list, ",")) {
        const auto t = csv::trim(name);
        if (t == "article") kinds.insert(DocKind::Article);
        else if (t == "review") kinds.insert(DocKind::Review);
        else if (t == "proceedings") kinds.insert(DocKind::ProceedingsPaper);
        else if (t == "letter") kinds.insert(DocKind::Letter);
        else if (t == "other") kinds.insert(DocKind::Other);
        else if (t == "all")
            return {DocKind::Article, DocKind::Review, DocKind::ProceedingsPaper,
                    DocKind::Letter, DocKind::Other};
        else
            throw CLI::ValidationError("--types", "unknown doc type: " + std::string(t));
    }
    if (kinds.empty())
        throw CLI::ValidationError("--types", "empty type list");
    return kinds;
}

/// Scored records either re-read from a persisted CSV or computed on the fly.
ScoredSet obtain_scored(const RecordSet& records, const std::string& scored_path,
                        const CountingRule& rule, ScoreField field, unsigned threads) {
    if (!scored_path.empty())
        return read_scored_csv(scored_path);
    auto result = score_set(records, rule, field, threads);
    if (!result.small_strata.empty())
        std::cerr << "note: " << result.small_strata.size()
                  << (result.small_strata.size() == 1 ? " stratum has" : " strata have")
                  << " fewer than 5 records\n";
    return std::move(result.scored);
}

UnitMap build_units(const RecordSet& records, const ScoredSet& scored, UnitKind kind,
                    Counting counting, const std::string& alias_path,
                    std::vector<SkipEntry>* skipped = nullptr) {
    AssignmentResult assigned = assign_units(records, kind, counting);
    if (!alias_path.empty())
        assigned = apply_aliases(assigned, load_aliases(alias_path), counting);
    if (skipped)
        *skipped = assigned.skipped;
    return resolve_units(unit_subsets(assigned.assignments), scored);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"i3kit - percentile-based citation impact evaluation"};
    app.require_subcommand(1);

    // global flags, available to every subcommand
    std::string rule_name = "strict";
    bool mutz = false;
    std::string counting_name = "integer";
    std::string unit_name = "journal";
    double alpha = 0.05;
    int min_n = 5;
    std::string expect_name = "i3points";
    std::string overlay_name = "ztest";
    std::string score_field_name = "tc";
    std::string variable_name = "tc";
    unsigned threads = 1;

    app.add_option("--rule", rule_name, "counting rule for quantiles")
        ->check(CLI::IsMember({"strict", "leq", "tieavg"}));
    app.add_flag("--mutz", mutz, "add 0.9 to percentile values (strict rule only)");
    app.add_option("--counting", counting_name, "address/author counting")
        ->check(CLI::IsMember({"integer", "fractional"}));
    app.add_option("--unit", unit_name, "aggregation unit")
        ->check(CLI::IsMember({"journal", "country", "city", "institute", "author"}));
    app.add_option("--alpha", alpha, "significance level before family-wise correction")
        ->check(CLI::Range(1e-12, 1.0));
    app.add_option("--min-n", min_n, "minimum unit size for the per-paper impact test")
        ->check(CLI::PositiveNumber);
    app.add_option("--expect", expect_name, "expectation mode for the z-test")
        ->check(CLI::IsMember({"i3points", "shares"}));
    app.add_option("--overlay", overlay_name, "which test feeds the map overlay")
        ->check(CLI::IsMember({"ztest", "ri3r"}));
    app.add_option("--score-field", score_field_name, "citation score used for quantiles")
        ->check(CLI::IsMember({"tc", "score"}));
    app.add_option("--variable", variable_name, "variable compared across distributions")
        ->check(CLI::IsMember({"tc", "quantile"}));
    app.add_option("--threads", threads, "worker threads for scoring and pairwise tests")
        ->check(CLI::PositiveNumber);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse a tab-delimited export into records CSV");
    std::string ingest_in, ingest_out = "records.csv", ingest_types = "citable";
    ingest->add_option("export", ingest_in, "tab-delimited export file")->required();
    ingest->add_option("-o,--out", ingest_out, "records CSV to write");
    ingest->add_option("--types", ingest_types,
                       "comma list of article,review,proceedings,letter,other or all");

    // fractional
    auto* fractional =
        app.add_subcommand("fractional", "apply 1/NRef citation weights from a link file");
    std::string frac_records, frac_links, frac_out = "records_fractional.csv";
    fractional->add_option("records", frac_records, "records CSV")->required();
    fractional->add_option("links", frac_links, "citation-link CSV")->required();
    fractional->add_option("-o,--out", frac_out, "records CSV to write");

    // score
    auto* score = app.add_subcommand("score", "assign quantiles and PR6 classes");
    std::string score_records, score_out = "scored.csv";
    score->add_option("records", score_records, "records CSV")->required();
    score->add_option("-o,--out", score_out, "scored CSV to write");

    // rank
    auto* rank = app.add_subcommand("rank", "ranked indicator table with significance flags");
    std::string rank_records, rank_scored, rank_out = "rank.csv";
    std::string rank_ztest, rank_ri3r, rank_skips, rank_alias;
    std::size_t top_k = 0;
    rank->add_option("records", rank_records, "records CSV")->required();
    rank->add_option("--scored", rank_scored, "persisted scored CSV (scores on the fly if absent)");
    rank->add_option("-o,--out", rank_out, "rank table to write");
    rank->add_option("--ztest", rank_ztest, "also write the z-test file here");
    rank->add_option("--ri3r", rank_ri3r, "also write the per-paper impact file here");
    rank->add_option("--skips", rank_skips, "skip report for records without units");
    rank->add_option("--alias", rank_alias, "unit-key alias CSV");
    rank->add_option("--top-k", top_k, "emit only the K highest-impact units (0 = all)");

    // compare
    auto* compare = app.add_subcommand("compare", "homogeneity graph over unit distributions");
    std::string cmp_records, cmp_scored, cmp_out = "graph.net";
    std::string cmp_edges, cmp_cores, cmp_alias;
    compare->add_option("records", cmp_records, "records CSV")->required();
    compare->add_option("--scored", cmp_scored, "persisted scored CSV");
    compare->add_option("-o,--out", cmp_out, "Pajek network file to write");
    compare->add_option("--edges", cmp_edges, "edge list CSV with p-values");
    compare->add_option("--cores", cmp_cores, "k-core membership CSV");
    compare->add_option("--alias", cmp_alias, "unit-key alias CSV");

    // map
    auto* map_cmd = app.add_subcommand("map", "geographic overlay of city results");
    std::string map_records, map_scored, map_gaz, map_out = "overlay.json";
    std::string map_skips, map_alias, map_format = "geojson";
    map_cmd->add_option("records", map_records, "records CSV")->required();
    map_cmd->add_option("--scored", map_scored, "persisted scored CSV");
    map_cmd->add_option("--gazetteer", map_gaz, "city coordinates CSV")->required();
    map_cmd->add_option("-o,--out", map_out, "overlay file to write");
    map_cmd->add_option("--format", map_format, "overlay format")
        ->check(CLI::IsMember({"geojson", "kml"}));
    map_cmd->add_option("--skips", map_skips, "skip report for cities missing coordinates");
    map_cmd->add_option("--alias", map_alias, "unit-key alias CSV");

    // run
    auto* run = app.add_subcommand("run", "whole pipeline: ingest, score, rank, compare, map");
    std::string run_export, run_outdir = "out";
    std::string run_gaz, run_links, run_alias;
    std::size_t run_top_k = 0;
    std::string run_format = "geojson";
    run->add_option("export", run_export, "tab-delimited export file")->required();
    run->add_option("-o,--out-dir", run_outdir, "output directory");
    run->add_option("--gazetteer", run_gaz, "city coordinates CSV (enables the map stage)");
    run->add_option("--links", run_links, "citation-link CSV for fractional weighting");
    run->add_option("--alias", run_alias, "unit-key alias CSV");
    run->add_option("--top-k", run_top_k, "emit only the K highest-impact units (0 = all)");
    run->add_option("--format", run_format, "overlay format")
        ->check(CLI::IsMember({"geojson", "kml"}));

    for (auto* sub : {ingest, fractional, score, rank, compare, map_cmd, run})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    CountingRule rule;
    try {
        RuleVariant variant = RuleVariant::StrictLess;
        if (rule_name == "leq")
            variant = RuleVariant::LessOrEqual;
        else if (rule_name == "tieavg")
            variant = RuleVariant::TieAveraged;
        rule = CountingRule(variant, mutz);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const Counting counting =
        counting_name == "fractional" ? Counting::Fractional : Counting::Integer;
    const UnitKind unit = parse_unit(unit_name);
    const ScoreField field =
        score_field_name == "score" ? ScoreField::CitationScore : ScoreField::TimesCited;
    const ExpectMode expect =
        expect_name == "shares" ? ExpectMode::Shares : ExpectMode::I3Points;
    const CompareVariable variable = variable_name == "quantile" ? CompareVariable::Quantile
                                                                 : CompareVariable::TimesCited;

    try {
        if (app.got_subcommand(ingest)) {
            const auto set = parse_export(ingest_in);
            const auto kept = ingest_types == "citable" ? filter_citable(set)
                                                        : filter_citable(set, parse_types(ingest_types));
            write_records_csv(kept, ingest_out);
            std::cerr << "ingested " << set.size() << " records, kept " << kept.size() << "\n";
            return 0;
        }

        if (app.got_subcommand(fractional)) {
            const auto set = read_records_csv(frac_records);
            const auto links = load_links(frac_links);
            write_records_csv(apply_fractional_weights(set, links), frac_out);
            std::cerr << "weighted " << set.size() << " records from " << links.size()
                      << " links\n";
            return 0;
        }

        if (app.got_subcommand(score)) {
            const auto set = read_records_csv(score_records);
            const auto result = score_set(set, rule, field, threads);
            if (!result.small_strata.empty())
                std::cerr << "note: " << result.small_strata.size()
                          << (result.small_strata.size() == 1 ? " stratum has" : " strata have")
                          << " fewer than 5 records\n";
            write_scored_csv(result.scored, score_out);
            return 0;
        }

        if (app.got_subcommand(rank)) {
            const auto records = read_records_csv(rank_records);
            const auto scored = obtain_scored(records, rank_scored, rule, field, threads);
            std::vector<SkipEntry> skipped;
            const auto units = build_units(records, scored, unit, counting, rank_alias, &skipped);
            const auto report = indicator_report(scored, units, min_n);
            const auto flags = flag_report(report, expect);
            emit_rank_table(report, flags, top_k, rank_out);
            if (!rank_ztest.empty())
                emit_ztest_csv(report, flags, rank_ztest);
            if (!rank_ri3r.empty())
                emit_ri3r_csv(report, rank_ri3r);
            if (!rank_skips.empty())
                write_skip_report(skipped, rank_skips);
            return 0;
        }

        if (app.got_subcommand(compare)) {
            const auto records = read_records_csv(cmp_records);
            const auto scored = obtain_scored(records, cmp_scored, rule, field, threads);
            const auto units = build_units(records, scored, unit, counting, cmp_alias);
            if (units.size() > 50)
                std::cerr << "note: " << units.size() << " units -> "
                          << units.size() * (units.size() - 1) / 2 << " pairwise tests\n";
            const auto graph =
                homogeneity_graph(unit_samples(units, scored, variable), alpha, threads);
            emit_pajek(graph, cmp_out);
            if (!cmp_edges.empty())
                emit_edges_csv(graph, cmp_edges);
            if (!cmp_cores.empty())
                emit_cores_csv(graph, cmp_cores);
            return 0;
        }

        if (app.got_subcommand(map_cmd)) {
            const auto records = read_records_csv(map_records);
            const auto scored = obtain_scored(records, map_scored, rule, field, threads);
            const auto units =
                build_units(records, scored, UnitKind::City, counting, map_alias);
            const auto report = indicator_report(scored, units, min_n);
            const auto flags = flag_report(report, expect);

            std::vector<CityResult> cities;
            for (const auto& row : report.rows) {
                CityResult c;
                const auto sep = row.unit_id.find(", ");
                c.city = row.unit_id.substr(0, sep);
                c.country = sep == std::string::npos ? "" : row.unit_id.substr(sep + 2);
                c.n_papers = row.n_papers;
                if (overlay_name == "ri3r") {
                    if (!row.ri3r_z)
                        continue;
                    c.z = *row.ri3r_z;
                    c.flag = flag_for_z(c.z);
                } else {
                    const auto& f = flags.at(row.unit_id).i3;
                    c.z = f.z;
                    c.flag = f.flag;
                }
                cities.push_back(std::move(c));
            }
            const auto gazetteer = Gazetteer::load_csv(map_gaz);
            const auto format =
                map_format == "kml" ? OverlayFormat::KML : OverlayFormat::GeoJSON;
            const auto skips = emit_geo_overlay(cities, gazetteer, format, map_out);
            if (!map_skips.empty())
                write_skip_report(skips.entries, map_skips);
            if (!skips.entries.empty())
                std::cerr << "note: " << skips.entries.size() << " cities not in gazetteer\n";
            return 0;
        }

        if (app.got_subcommand(run)) {
            PipelineConfig config;
            config.export_path = run_export;
            config.out_dir = run_outdir;
            config.gazetteer_path = run_gaz;
            config.links_path = run_links;
            config.alias_path = run_alias;
            config.rule = rule;
            // weighted runs score by the fractional citation score unless the
            // user explicitly chose a field
            config.score_field = !run_links.empty() && app.count("--score-field") == 0
                                     ? ScoreField::CitationScore
                                     : field;
            config.unit = unit;
            config.counting = counting;
            config.compare_variable = variable;
            config.expect = expect;
            config.overlay = overlay_name == "ri3r" ? OverlayMode::Ri3r : OverlayMode::ZTest;
            config.overlay_format =
                run_format == "kml" ? OverlayFormat::KML : OverlayFormat::GeoJSON;
            config.alpha = alpha;
            config.min_n = min_n;
            config.top_k = run_top_k;
            config.threads = threads;
            return run_pipeline(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
