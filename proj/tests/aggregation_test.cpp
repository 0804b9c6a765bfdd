#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "i3kit/aggregation.hpp"
#include "i3kit/records.hpp"

using namespace i3kit;

namespace {

CitationRecord record_with_addresses(std::string id, std::vector<std::string> addresses) {
    CitationRecord r;
    r.record_id = std::move(id);
    r.journal = "J Test";
    r.pub_year = 2007;
    r.doc_type = DocType::article();
    r.addresses = std::move(addresses);
    r.authors = {"Smith, J"};
    return r;
}

double weight_of(const std::vector<UnitAssignment>& assignments, const std::string& record,
                 const std::string& key) {
    double w = 0.0;
    for (const auto& a : assignments) {
        if (a.record_id == record && a.unit_key == key)
            w += a.weight;
    }
    return w;
}

} // namespace

TEST_SUITE("aggregation") {

TEST_CASE("address triples from the rank tables parse cleanly") {
    const ParsedAddress cas = parse_address("Chinese Acad Sci, Beijing, Peoples R China");
    CHECK(cas.institute == "Chinese Acad Sci");
    CHECK(cas.city == "Beijing");
    CHECK(cas.country == "Peoples R China");

    const ParsedAddress mit = parse_address("MIT, Cambridge, MA 02139 USA");
    CHECK(mit.institute == "MIT");
    CHECK(mit.city == "Cambridge");
    CHECK(mit.country == "USA");

    const ParsedAddress cam = parse_address("Univ Cambridge, Cambridge, UK");
    CHECK(cam.institute == "Univ Cambridge");
    CHECK(cam.city == "Cambridge");
    CHECK(cam.country == "UK");
}

TEST_CASE("US endings and postal codes") {
    CHECK(parse_address("MIT, Cambridge, USA").country == "USA");
    CHECK(parse_address("Harvard Univ, Boston, MA USA").country == "USA");
    CHECK(parse_address("Harvard Univ, Boston, MA USA").city == "Boston");
    // trailing digit-bearing tokens are stripped from the city segment
    CHECK(parse_address("Free Univ Berlin, Berlin D-14195, Germany").city == "Berlin");
    CHECK(parse_address("Univ Oxford, Oxford OX1 3PU, England").city == "Oxford");
}

TEST_CASE("degenerate and unparseable addresses") {
    CHECK_THROWS_AS(parse_address("MIT"), UnparseableAddress);
    CHECK_THROWS_AS(parse_address(""), UnparseableAddress);
    // city token entirely postal: parse degrades to country-only
    const ParsedAddress degraded = parse_address("Inst X, 90210, USA");
    CHECK(degraded.country == "USA");
    CHECK(degraded.country_only());
}

TEST_CASE("integer and fractional country counting") {
    const RecordSet set(
        {record_with_addresses("A", {"MIT, Cambridge, MA 02139 USA",
                                     "Peking Univ, Beijing, Peoples R China"})},
        {});
    const auto integer = assign_units(set, UnitKind::Country, Counting::Integer);
    CHECK(weight_of(integer.assignments, "A", "USA") == 1.0);
    CHECK(weight_of(integer.assignments, "A", "Peoples R China") == 1.0);

    const auto fractional = assign_units(set, UnitKind::Country, Counting::Fractional);
    CHECK(weight_of(fractional.assignments, "A", "USA") == doctest::Approx(0.5));
    CHECK(weight_of(fractional.assignments, "A", "Peoples R China") == doctest::Approx(0.5));
}

TEST_CASE("two labs in one city still credit the city once under integer counting") {
    const RecordSet set({record_with_addresses(
                            "A", {"Peking Univ, Beijing, Peoples R China",
                                  "Chinese Acad Sci, Beijing, Peoples R China"})},
                        {});
    const auto integer = assign_units(set, UnitKind::City, Counting::Integer);
    REQUIRE(integer.assignments.size() == 1);
    CHECK(integer.assignments[0].unit_key == "Beijing, Peoples R China");
    CHECK(integer.assignments[0].weight == 1.0);

    // fractional: both halves land on the same key
    const auto fractional = assign_units(set, UnitKind::City, Counting::Fractional);
    REQUIRE(fractional.assignments.size() == 1);
    CHECK(fractional.assignments[0].weight == doctest::Approx(1.0));
}

TEST_CASE("city keys are namespaced by country") {
    const RecordSet set(
        {record_with_addresses("A", {"MIT, Cambridge, MA 02139 USA"}),
         record_with_addresses("B", {"Univ Cambridge, Cambridge, UK"})},
        {});
    const auto result = assign_units(set, UnitKind::City, Counting::Integer);
    const auto subsets = unit_subsets(result.assignments);
    CHECK(subsets.size() == 2);
    CHECK(subsets.contains("Cambridge, USA"));
    CHECK(subsets.contains("Cambridge, UK"));
}

TEST_CASE("institute keys carry the full triple") {
    const RecordSet set({record_with_addresses("A", {"MIT, Cambridge, MA 02139 USA"})}, {});
    const auto result = assign_units(set, UnitKind::Institute, Counting::Integer);
    REQUIRE(result.assignments.size() == 1);
    CHECK(result.assignments[0].unit_key == "MIT, Cambridge, USA");
}

TEST_CASE("journal and author assignment") {
    CitationRecord r = record_with_addresses("A", {"X, Y, France"});
    r.authors = {"Smith, J", "li, w", "Smith, J"};
    const RecordSet set({r}, {});

    const auto journals = assign_units(set, UnitKind::Journal, Counting::Integer);
    REQUIRE(journals.assignments.size() == 1);
    CHECK(journals.assignments[0].unit_key == "J Test");

    const auto authors = assign_units(set, UnitKind::Author, Counting::Integer);
    REQUIRE(authors.assignments.size() == 2); // names uppercased, duplicate collapsed
    CHECK(weight_of(authors.assignments, "A", "SMITH, J") == 1.0);
    CHECK(weight_of(authors.assignments, "A", "LI, W") == 1.0);

    const auto frac = assign_units(set, UnitKind::Author, Counting::Fractional);
    CHECK(weight_of(frac.assignments, "A", "SMITH, J") == doctest::Approx(2.0 / 3.0));
    CHECK(weight_of(frac.assignments, "A", "LI, W") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("records without usable addresses land in the skip report") {
    const RecordSet set(
        {record_with_addresses("A", {}), record_with_addresses("B", {"nonsense"}),
         record_with_addresses("C", {"MIT, Cambridge, MA 02139 USA"})},
        {});
    const auto result = assign_units(set, UnitKind::Country, Counting::Integer);
    REQUIRE(result.skipped.size() == 2);
    CHECK(result.skipped[0].record_id == "A");
    CHECK(result.skipped[1].record_id == "B");
    REQUIRE(result.assignments.size() == 1);
    CHECK(result.assignments[0].record_id == "C");
}

TEST_CASE("fractional counting conserves one point per record") {
    const RecordSet set(
        {record_with_addresses("A", {"X, Paris, France", "Y, Berlin, Germany",
                                     "Z, Madrid, Spain"}),
         record_with_addresses("B", {"X, Paris, France", "bad-address"})},
        {});
    const auto result = assign_units(set, UnitKind::Country, Counting::Fractional);
    for (const auto* id : {"A", "B"}) {
        double total = 0.0;
        for (const auto& a : result.assignments) {
            if (a.record_id == id)
                total += a.weight;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("unit subsets keep weighted membership") {
    // r1 (q=80) in {A,B}, r2 (q=40) in {A}: fractional weights 0.5/0.5 and 1
    const std::vector<UnitAssignment> assignments = {
        {"r1", UnitKind::Country, "A", 0.5},
        {"r1", UnitKind::Country, "B", 0.5},
        {"r2", UnitKind::Country, "A", 1.0},
    };
    const auto subsets = unit_subsets(assignments);
    REQUIRE(subsets.at("A").size() == 2);
    REQUIRE(subsets.at("B").size() == 1);

    // weighted i3 as the caller would compute it: 0.5*80 + 1*40 = 80 and 0.5*80 = 40
    const std::map<std::string, double> quantiles = {{"r1", 80.0}, {"r2", 40.0}};
    double a = 0.0, b = 0.0;
    for (const auto& m : subsets.at("A"))
        a += m.weight * quantiles.at(m.record_id);
    for (const auto& m : subsets.at("B"))
        b += m.weight * quantiles.at(m.record_id);
    CHECK(a == doctest::Approx(80.0));
    CHECK(b == doctest::Approx(40.0));
}

TEST_CASE("aliases merge keys and integer counting collapses duplicates") {
    const RecordSet set(
        {record_with_addresses("A", {"Univ Cambridge, Cambridge, UK",
                                     "Univ Oxford, Oxford, England"})},
        {});
    const std::map<std::string, std::string> aliases = {{"England", "UK"}};

    const auto integer =
        apply_aliases(assign_units(set, UnitKind::Country, Counting::Integer), aliases,
                      Counting::Integer);
    REQUIRE(integer.assignments.size() == 1);
    CHECK(integer.assignments[0].unit_key == "UK");
    CHECK(integer.assignments[0].weight == 1.0);

    const auto fractional =
        apply_aliases(assign_units(set, UnitKind::Country, Counting::Fractional), aliases,
                      Counting::Fractional);
    REQUIRE(fractional.assignments.size() == 1);
    CHECK(fractional.assignments[0].weight == doctest::Approx(1.0));
}

TEST_CASE("every fixture address parses, deterministically") {
    const RecordSet set = parse_export(std::string(FIXTURE_DIR) + "/nano200.txt");
    std::size_t parsed = 0;
    for (const auto& record : set.records()) {
        for (const auto& raw : record.addresses) {
            const ParsedAddress once = parse_address(raw);
            const ParsedAddress twice = parse_address(raw);
            CHECK(once.institute == twice.institute);
            CHECK(once.city == twice.city);
            CHECK(once.country == twice.country);
            CHECK_FALSE(once.country.empty());
            ++parsed;
        }
    }
    CHECK(parsed > 200);
}

TEST_CASE("alias file round trip") {
    const std::string path = "tmp_aliases.csv";
    {
        std::ofstream out(path);
        out << "from_key,to_key\nEngland,UK\nPeoples R China,China\n";
    }
    const auto aliases = load_aliases(path);
    CHECK(aliases.size() == 2);
    CHECK(aliases.at("England") == "UK");
    std::remove(path.c_str());
}

} // TEST_SUITE
