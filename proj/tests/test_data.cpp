#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hadr/dataset.hpp"
#include "hadr/errors.hpp"
#include "hadr/io.hpp"
#include "hadr/serialize.hpp"
#include "hadr/synth.hpp"

using namespace hadr;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& contents)
        : path((std::filesystem::temp_directory_path() / name).string()) {
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("load_csv: label mapping, errors") {
    TempFile f("hadr_t1.csv",
               "x,y,cls\n"
               "1.0,2.0,a\n"
               "1.5,2.5,b\n"
               "0.5,1.0,a\n"
               "2.0,3.0,b\n");
    const Dataset d = load_csv(f.path, "cls", "b");
    CHECK(d.n() == 4);
    CHECK(d.m() == 2);
    CHECK(d.labels == std::vector<int>{0, 1, 0, 1});
    CHECK(d.feature_names == std::vector<std::string>{"x", "y"});

    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "cls", "b"), DataError);
    CHECK_THROWS_AS(load_csv(f.path, "missing", "b"), DataError);

    TempFile bad("hadr_t2.csv", "x,cls\noops,a\n1.0,b\n");
    CHECK_THROWS_WITH_AS(load_csv(bad.path, "cls", "b"),
                         doctest::Contains("row 2"), DataError);

    TempFile three("hadr_t3.csv", "x,cls\n1,a\n2,b\n3,c\n");
    CHECK_THROWS_AS(load_csv(three.path, "cls", "b"), DataError);
}

TEST_CASE("load_csv: label column by index") {
    TempFile f("hadr_t4.csv", "a,b\n1,pos\n2,neg\n3,neg\n");
    const Dataset d = load_csv(f.path, "1", "pos");
    CHECK(d.m() == 1);
    CHECK(d.labels == std::vector<int>{1, 0, 0});
}

TEST_CASE("load_keel_dat: header parsing, minority auto-detection") {
    TempFile f("hadr_t5.dat",
               "@relation tiny\n"
               "@attribute A1 real [0.0, 5.0]\n"
               "@attribute A2 integer [0, 9]\n"
               "@attribute Class {negative, positive}\n"
               "@inputs A1, A2\n"
               "@outputs Class\n"
               "@data\n"
               "1.0, 3, negative\n"
               "2.0, 4, negative\n"
               "1.5, 2, negative\n"
               "4.0, 8, positive\n");
    const Dataset d = load_keel_dat(f.path);
    CHECK(d.n() == 4);
    CHECK(d.m() == 2);
    CHECK(d.count(1) == 1); // positive is the minority
    CHECK(d.labels[3] == 1);
    CHECK(d.feature_names == std::vector<std::string>{"A1", "A2"});

    // Override flips the mapping.
    const Dataset flipped = load_keel_dat(f.path, std::string("negative"));
    CHECK(flipped.count(1) == 3);
}

TEST_CASE("load_keel_dat: categorical inputs are coded, malformed files rejected") {
    TempFile f("hadr_t6.dat",
               "@relation cat\n"
               "@attribute Sex {M, F, I}\n"
               "@attribute Len real\n"
               "@attribute Class {neg, pos}\n"
               "@data\n"
               "M, 1.0, neg\n"
               "F, 2.0, neg\n"
               "I, 3.0, pos\n");
    const Dataset d = load_keel_dat(f.path);
    CHECK(d.features(0, 0) == 0.0);
    CHECK(d.features(1, 0) == 1.0);
    CHECK(d.features(2, 0) == 2.0);

    TempFile nodata("hadr_t7.dat", "@relation x\n@attribute A real\n@attribute C {a,b}\n");
    CHECK_THROWS_AS(load_keel_dat(nodata.path), DataError);

    TempFile emptydata("hadr_t7b.dat",
                       "@relation x\n@attribute A real\n@attribute C {a,b}\n@data\n\n");
    CHECK_THROWS_AS(load_keel_dat(emptydata.path), DataError);

    TempFile badtype("hadr_t8.dat",
                     "@relation x\n@attribute A string\n@attribute C {a,b}\n@data\n1,a\n");
    CHECK_THROWS_AS(load_keel_dat(badtype.path), DataError);
}

TEST_CASE("stratified_split: exact per-class arithmetic and determinism") {
    Dataset d = make_imbalanced_blobs(90, 10, 3, 3.0, 1);
    const SplitPair s = stratified_split(d, 0.7, 42);
    CHECK(s.train.count(0) == 63);
    CHECK(s.train.count(1) == 7);
    CHECK(s.test.count(0) == 27);
    CHECK(s.test.count(1) == 3);

    const SplitPair again = stratified_split(d, 0.7, 42);
    CHECK(s.train_indices == again.train_indices);
    CHECK(s.test_indices == again.test_indices);

    const SplitPair other = stratified_split(d, 0.7, 43);
    CHECK(s.train_indices != other.train_indices);
}

TEST_CASE("stratified_split: partition property over 100 seeds") {
    Dataset d = make_imbalanced_blobs(40, 7, 2, 2.0, 9);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SplitPair s = stratified_split(d, 0.65, seed);
        std::vector<std::size_t> all = s.train_indices;
        all.insert(all.end(), s.test_indices.begin(), s.test_indices.end());
        std::sort(all.begin(), all.end());
        REQUIRE(all.size() == d.n());
        for (std::size_t i = 0; i < all.size(); ++i) REQUIRE(all[i] == i);
        REQUIRE(s.train.count(1) >= 1);
        REQUIRE(s.test.count(1) >= 1);
    }
}

TEST_CASE("stratified_split: pc1-shaped counts give a 776-row training side") {
    // 1032 majority + 77 minority at fraction 0.7: 722 + 54 per class.
    const Dataset d = make_imbalanced_blobs(1032, 77, 2, 2.0, 17);
    const SplitPair s = stratified_split(d, 0.7, 3);
    CHECK(s.train.count(0) == 722);
    CHECK(s.train.count(1) == 54);
    CHECK(s.train.n() == 776);
}

TEST_CASE("stratified_split: rejects singleton classes and bad fractions") {
    Dataset d = make_imbalanced_blobs(10, 2, 2, 2.0, 3);
    CHECK_THROWS_AS(stratified_split(d, 0.0, 1), DataError);
    CHECK_THROWS_AS(stratified_split(d, 1.0, 1), DataError);
    d.labels.assign(d.n(), 0);
    d.labels[0] = 1; // single minority sample
    CHECK_THROWS_AS(stratified_split(d, 0.7, 1), DataError);
}

TEST_CASE("standardizer: two-point column, constant column, train-only statistics") {
    Dataset d;
    d.features = Matrix::from_rows({{2.0, 5.0}, {4.0, 5.0}});
    d.labels = {0, 1};
    d.name = "std";
    const Standardizer s = fit_standardizer(d);
    CHECK(s.means[0] == doctest::Approx(3.0));
    CHECK(s.std_devs[0] == doctest::Approx(1.0)); // population std of {2,4}
    CHECK(s.std_devs[1] == doctest::Approx(1.0)); // constant flagged as 1

    const Dataset t = apply_standardizer(s, d);
    CHECK(t.features(0, 0) == doctest::Approx(-1.0));
    CHECK(t.features(1, 0) == doctest::Approx(1.0));
    CHECK(t.features(0, 1) == doctest::Approx(0.0));
    CHECK(t.features(1, 1) == doctest::Approx(0.0));

    // Fit on train, recompute means: all below 1e-9.
    Dataset big = make_imbalanced_blobs(60, 12, 4, 2.0, 5);
    const Standardizer sb = fit_standardizer(big);
    const Dataset tb = apply_standardizer(sb, big);
    for (std::size_t j = 0; j < tb.m(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < tb.n(); ++i) mean += tb.features(i, j);
        mean /= static_cast<double>(tb.n());
        CHECK(std::abs(mean) < 1e-9);
    }

    // A shifted test set keeps its shift: the standardizer never peeks.
    Dataset shifted = big;
    for (double& v : shifted.features.data()) v += 10.0;
    const Dataset ts = apply_standardizer(sb, shifted);
    double mean0 = 0.0;
    for (std::size_t i = 0; i < ts.n(); ++i) mean0 += ts.features(i, 0);
    mean0 /= static_cast<double>(ts.n());
    CHECK(std::abs(mean0) > 0.1);
}

TEST_CASE("dataset json round-trip is bit-exact") {
    const Dataset d = make_imbalanced_blobs(25, 6, 5, 2.5, 77);
    const std::string path =
        (std::filesystem::temp_directory_path() / "hadr_roundtrip.json").string();
    save_dataset_json(d, path);
    const Dataset back = load_dataset_json(path);
    REQUIRE(back.n() == d.n());
    REQUIRE(back.m() == d.m());
    for (std::size_t i = 0; i < d.features.data().size(); ++i) {
        REQUIRE(back.features.data()[i] == d.features.data()[i]);
    }
    CHECK(back.labels == d.labels);
    CHECK(back.feature_names == d.feature_names);
    CHECK(back.name == d.name);

    // Second serialization of the reloaded dataset matches byte for byte.
    const std::string path2 =
        (std::filesystem::temp_directory_path() / "hadr_roundtrip2.json").string();
    save_dataset_json(back, path2);
    std::ifstream a(path), b(path2);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb2((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("dataset validation catches bad labels") {
    Dataset d;
    d.features = Matrix::from_rows({{1.0}, {2.0}});
    d.labels = {0, 2};
    CHECK_THROWS_AS(d.validate(), DataError);
    d.labels = {0};
    CHECK_THROWS_AS(d.validate(), DataError);
}
