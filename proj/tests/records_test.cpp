#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "i3kit/records.hpp"

using namespace i3kit;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("tmp_" + name) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

CitationRecord make_record(std::string id, std::string journal, int year, DocType type,
                           long long tc) {
    CitationRecord r;
    r.record_id = std::move(id);
    r.journal = std::move(journal);
    r.pub_year = year;
    r.doc_type = type;
    r.times_cited = tc;
    r.citation_score = static_cast<double>(tc);
    return r;
}

const char* kHeader = "UT\tAU\tTI\tSO\tDT\tPY\tTC\tNR\tC1\n";

} // namespace

TEST_SUITE("records") {

TEST_CASE("doc types map case-insensitively, everything else is Other") {
    CHECK(DocType::from_label("Article").kind == DocKind::Article);
    CHECK(DocType::from_label("ARTICLE").kind == DocKind::Article);
    CHECK(DocType::from_label("review").kind == DocKind::Review);
    CHECK(DocType::from_label("Proceedings Paper").kind == DocKind::ProceedingsPaper);
    CHECK(DocType::from_label("proceedings paper").kind == DocKind::ProceedingsPaper);
    CHECK(DocType::from_label("Letter").kind == DocKind::Letter);
    const DocType editorial = DocType::from_label("Editorial Material");
    CHECK(editorial.kind == DocKind::Other);
    CHECK(editorial.label == "Editorial Material");
}

TEST_CASE("header with zero data rows parses to an empty set") {
    TempFile f("empty_body.txt", kHeader);
    const RecordSet set = parse_export(f.path);
    CHECK(set.size() == 0);
}

TEST_CASE("four-row fixture covers each citable type once") {
    TempFile f("types.txt",
               std::string(kHeader) +
                   "W1\tA, B\tT1\tJ One\tArticle\t2007\t3\t10\tX, Paris, France\n"
                   "W2\tA, B\tT2\tJ One\tReview\t2007\t4\t10\tX, Paris, France\n"
                   "W3\tA, B\tT3\tJ One\tProceedings Paper\t2007\t5\t10\tX, Paris, France\n"
                   "W4\tA, B\tT4\tJ One\tLetter\t2007\t6\t10\tX, Paris, France\n");
    const RecordSet set = parse_export(f.path);
    const auto counts = set.counts_by_type();
    CHECK(counts.at("Article") == 1);
    CHECK(counts.at("Review") == 1);
    CHECK(counts.at("Proceedings Paper") == 1);
    CHECK(counts.at("Letter") == 1);
}

TEST_CASE("fields are copied verbatim") {
    TempFile f("fields.txt",
               std::string(kHeader) +
                   "W1\tSmith, J; Li, W\tT\tJ Foo\tArticle\t2008\t17\t42\t"
                   "[Smith, J; Li, W] MIT, Cambridge, MA 02139 USA; "
                   "Peking Univ, Beijing, Peoples R China\n");
    const RecordSet set = parse_export(f.path);
    REQUIRE(set.size() == 1);
    const auto& r = set.records()[0];
    CHECK(r.record_id == "W1");
    CHECK(r.times_cited == 17);
    CHECK(r.citation_score == 17.0);
    CHECK(r.n_refs == 42);
    CHECK(r.pub_year == 2008);
    REQUIRE(r.authors.size() == 2);
    CHECK(r.authors[0] == "Smith, J");
    REQUIRE(r.addresses.size() == 2);
    // the bracketed author-group prefix is stripped before splitting
    CHECK(r.addresses[0] == "MIT, Cambridge, MA 02139 USA");
    CHECK(r.addresses[1] == "Peking Univ, Beijing, Peoples R China");
}

TEST_CASE("rows without C1 or AU yield empty lists") {
    TempFile f("no_c1.txt", std::string(kHeader) + "W1\t\tT\tJ\tArticle\t2007\t2\t5\t\n");
    const RecordSet set = parse_export(f.path);
    REQUIRE(set.size() == 1);
    CHECK(set.records()[0].addresses.empty());
    CHECK(set.records()[0].authors.empty());
}

TEST_CASE("missing TC is rejected with the offending line number") {
    TempFile f("no_tc.txt", std::string(kHeader) +
                                "W1\tA\tT\tJ\tArticle\t2007\t4\t5\tX, Y, Z\n"
                                "W2\tA\tT\tJ\tArticle\t2007\t\t5\tX, Y, Z\n");
    try {
        parse_export(f.path);
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("export errors") {
    TempFile empty("really_empty.txt", "");
    CHECK_THROWS_AS(parse_export(empty.path), EmptyFile);

    TempFile no_tag("no_dt.txt", "UT\tAU\tTI\tSO\tPY\tTC\tNR\tC1\nW\tA\tT\tJ\t2007\t1\t2\tX\n");
    CHECK_THROWS_AS(parse_export(no_tag.path), MissingHeaderTag);

    TempFile bad_year("bad_year.txt", std::string(kHeader) +
                                          "W1\tA\tT\tJ\tArticle\t1776\t4\t5\tX, Y\n");
    CHECK_THROWS_AS(parse_export(bad_year.path), MalformedRow);

    TempFile dup("dup_id.txt", std::string(kHeader) +
                                   "W1\tA\tT\tJ\tArticle\t2007\t4\t5\tX, Y\n"
                                   "W1\tA\tT2\tJ\tArticle\t2007\t5\t5\tX, Y\n");
    CHECK_THROWS_AS(parse_export(dup.path), MalformedRow);
}

TEST_CASE("exports with BOM and CRLF endings parse the same") {
    const std::string body = "W1\tA, B\tT\tJ X\tArticle\t2007\t5\t9\tY, Paris, France";
    TempFile plain("lf.txt", std::string(kHeader) + body + "\n");
    TempFile windows("crlf.txt", "\xef\xbb\xbfUT\tAU\tTI\tSO\tDT\tPY\tTC\tNR\tC1\r\n" + body + "\r\n");
    const RecordSet a = parse_export(plain.path);
    const RecordSet b = parse_export(windows.path);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a.records()[0].record_id == b.records()[0].record_id);
    CHECK(a.records()[0].journal == b.records()[0].journal);
    CHECK(a.records()[0].addresses == b.records()[0].addresses);
}

TEST_CASE("records without UT get a deterministic synthesized id") {
    const std::string body = "A\tT one\tJ\tArticle\t2007\t4\t5\tX, Y\n";
    TempFile f("no_ut.txt", std::string("AU\tTI\tSO\tDT\tPY\tTC\tNR\tC1\n") + body);
    TempFile g("no_ut2.txt", std::string("AU\tTI\tSO\tDT\tPY\tTC\tNR\tC1\n") + body);
    const auto a = parse_export(f.path);
    const auto b = parse_export(g.path);
    REQUIRE(a.size() == 1);
    CHECK(a.records()[0].record_id == b.records()[0].record_id);
    CHECK(a.records()[0].record_id.starts_with("R"));
}

TEST_CASE("default citable filter") {
    std::vector<CitationRecord> records;
    for (int i = 0; i < 3; ++i)
        records.push_back(make_record("A" + std::to_string(i), "J", 2007, DocType::article(), i));
    records.push_back(make_record("E1", "J", 2007, DocType::other("Editorial Material"), 1));
    records.push_back(make_record("E2", "J", 2007, DocType::other("News Item"), 1));
    const RecordSet set(records, {});

    const RecordSet citable = filter_citable(set);
    CHECK(citable.size() == 3);

    const RecordSet all = filter_citable(
        set, {DocKind::Article, DocKind::Review, DocKind::ProceedingsPaper, DocKind::Letter,
              DocKind::Other});
    CHECK(all.size() == set.size());
}

TEST_CASE("citable filter on the 1/1000-scale type mix keeps 31 of 33") {
    // 25 articles + 5 proceedings papers + 1 review + 2 editorials
    std::vector<CitationRecord> records;
    int id = 0;
    for (int i = 0; i < 25; ++i)
        records.push_back(make_record("R" + std::to_string(id++), "J", 2007, DocType::article(), i));
    for (int i = 0; i < 5; ++i)
        records.push_back(
            make_record("R" + std::to_string(id++), "J", 2007, DocType::proceedings_paper(), i));
    records.push_back(make_record("R" + std::to_string(id++), "J", 2007, DocType::review(), 9));
    for (int i = 0; i < 2; ++i)
        records.push_back(make_record("R" + std::to_string(id++), "J", 2007,
                                      DocType::other("Editorial Material"), i));
    const RecordSet set(records, {});
    CHECK(filter_citable(set).size() == 31);
}

TEST_CASE("citable filter is idempotent and order-preserving") {
    std::vector<CitationRecord> records;
    for (int i = 0; i < 10; ++i) {
        records.push_back(make_record("R" + std::to_string(i), "J", 2007,
                                      i % 3 == 0 ? DocType::other("News Item")
                                                 : DocType::article(),
                                      i));
    }
    const RecordSet set(records, {});
    const RecordSet once = filter_citable(set);
    const RecordSet twice = filter_citable(once);
    REQUIRE(once.size() == twice.size());
    std::string prev;
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once.records()[i].record_id == twice.records()[i].record_id);
        CHECK(once.records()[i].record_id > prev); // input was id-ordered
        prev = once.records()[i].record_id;
    }
}

TEST_CASE("fractional weighting follows 1/NRef") {
    std::vector<CitationRecord> records = {
        make_record("A", "J", 2007, DocType::article(), 2),
        make_record("B", "J", 2007, DocType::article(), 0),
        make_record("C", "J", 2007, DocType::article(), 10),
    };
    const RecordSet set(records, {});

    std::vector<CitationLink> links = {{"A", 4}, {"A", 5}};
    for (int i = 0; i < 10; ++i)
        links.push_back({"C", 10});

    const RecordSet weighted = apply_fractional_weights(set, links);
    CHECK(weighted.records()[0].citation_score == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(weighted.records()[1].citation_score == 0.0);
    CHECK(weighted.records()[2].citation_score == doctest::Approx(1.0).epsilon(1e-12));
    // times_cited untouched
    CHECK(weighted.records()[0].times_cited == 2);
    CHECK(weighted.records()[2].times_cited == 10);
}

TEST_CASE("fractional weighting is permutation-invariant and conserving") {
    std::mt19937_64 rng(7);
    std::vector<CitationRecord> records;
    for (int i = 0; i < 20; ++i)
        records.push_back(make_record("R" + std::to_string(i), "J", 2007, DocType::article(),
                                      static_cast<long long>(rng() % 50)));
    const RecordSet set(records, {});

    std::vector<CitationLink> links;
    double expected_total = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto target = "R" + std::to_string(rng() % 20);
        const auto nrefs = static_cast<long long>(1 + rng() % 60);
        links.push_back({target, nrefs});
        expected_total += 1.0 / static_cast<double>(nrefs);
    }

    const RecordSet forward = apply_fractional_weights(set, links);
    std::vector<CitationLink> shuffled = links;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const RecordSet backward = apply_fractional_weights(set, shuffled);

    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(forward.records()[i].citation_score == backward.records()[i].citation_score);
        CHECK(forward.records()[i].times_cited == set.records()[i].times_cited);
        total += forward.records()[i].citation_score;
    }
    CHECK(total == doctest::Approx(expected_total).epsilon(1e-9));
}

TEST_CASE("fractional weighting rejects bad links") {
    const RecordSet set({make_record("A", "J", 2007, DocType::article(), 1)}, {});
    CHECK_THROWS_AS(apply_fractional_weights(set, {{"nope", 3}}), UnknownRecordId);
    CHECK_THROWS_AS(apply_fractional_weights(set, {{"A", 0}}), ZeroNRefs);
}

TEST_CASE("link file round trip") {
    TempFile f("links.csv", "cited_id,citing_nrefs\nA,4\nA,5\nB,10\n");
    const auto links = load_links(f.path);
    REQUIRE(links.size() == 3);
    CHECK(links[0].cited_record_id == "A");
    CHECK(links[0].citing_n_refs == 4);

    TempFile zero("links_zero.csv", "cited_id,citing_nrefs\nA,0\n");
    CHECK_THROWS_AS(load_links(zero.path), ZeroNRefs);
}

TEST_CASE("canonical CSV round trip is a fixpoint") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> journals = {"J Foo", "Nano, Comma & Quote \"J\"",
                                               "Plain Journal"};
    const std::vector<DocType> types = {DocType::article(), DocType::review(),
                                        DocType::proceedings_paper(), DocType::letter(),
                                        DocType::other("Editorial Material")};
    std::vector<CitationRecord> records;
    for (int i = 0; i < 50; ++i) {
        CitationRecord r = make_record("R" + std::to_string(i), journals[rng() % journals.size()],
                                       2007 + static_cast<int>(rng() % 2),
                                       types[rng() % types.size()],
                                       static_cast<long long>(rng() % 100));
        r.n_refs = static_cast<long long>(rng() % 80);
        r.citation_score = static_cast<double>(rng() % 1000) / 7.0;
        if (rng() % 2)
            r.addresses = {"MIT, Cambridge, MA 02139 USA", "Peking Univ, Beijing, Peoples R China"};
        if (rng() % 2)
            r.authors = {"Smith, J", "Li, W"};
        records.push_back(std::move(r));
    }
    const RecordSet set(records, {});

    const std::string path1 = "tmp_roundtrip1.csv";
    const std::string path2 = "tmp_roundtrip2.csv";
    write_records_csv(set, path1);
    const RecordSet reread = read_records_csv(path1);
    write_records_csv(reread, path2);

    std::ifstream a(path1, std::ios::binary), b(path2, std::ios::binary);
    const std::string bytes1((std::istreambuf_iterator<char>(a)), {});
    const std::string bytes2((std::istreambuf_iterator<char>(b)), {});
    CHECK(bytes1 == bytes2);

    REQUIRE(reread.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(reread.records()[i].record_id == set.records()[i].record_id);
        CHECK(reread.records()[i].journal == set.records()[i].journal);
        CHECK(reread.records()[i].doc_type == set.records()[i].doc_type);
        CHECK(reread.records()[i].times_cited == set.records()[i].times_cited);
        CHECK(reread.records()[i].citation_score == set.records()[i].citation_score);
        CHECK(reread.records()[i].addresses == set.records()[i].addresses);
        CHECK(reread.records()[i].authors == set.records()[i].authors);
    }
    std::remove(path1.c_str());
    std::remove(path2.c_str());
}

} // TEST_SUITE
