#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/util/rng.hpp"
#include "pvyield/util/sha256.hpp"
#include "temp_dir.hpp"

using namespace pvyield;
using pvtest::TempDir;

TEST_CASE("format_double round-trips exactly") {
  const std::vector<double> fixtures{0.0,    1.0,       -1.0,   0.1,    1.0 / 3.0, 1e300,
                                     1e-300, 123456789, 2.5e-5, -42.75, 3.14159265358979};
  for (double v : fixtures) {
    const std::string s = format_double(v);
    CHECK(parse_double(s, "fixture") == v);
  }
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.next_double() - 0.5) * std::pow(10.0, rng.uniform(-20, 20));
    CHECK(parse_double(format_double(v), "random") == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(42) == "42");
}

TEST_CASE("parse_double and parse_long are strict about the whole token") {
  CHECK(parse_double("2.5", "x") == 2.5);
  CHECK(parse_long("-17", "x") == -17);
  CHECK_THROWS_AS(parse_double("2.5kg", "x"), Error);
  CHECK_THROWS_AS(parse_double("", "x"), Error);
  CHECK_THROWS_AS(parse_double(" 2.5", "x"), Error);
  CHECK_THROWS_AS(parse_long("1.5", "x"), Error);
  CHECK_THROWS_AS(parse_long("", "x"), Error);
  try {
    parse_double("abc", "column ghi");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::schema_mismatch);
    CHECK(std::string(e.what()).find("column ghi") != std::string::npos);
  }
}

TEST_CASE("mean and population standard deviation") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(v) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(stdev_population(v) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(stdev_population({3.0}) == 0.0);
}

TEST_CASE("nearly_equal uses relative and absolute tolerances") {
  CHECK(nearly_equal(1.0, 1.0 + 1e-12, 1e-9));
  CHECK_FALSE(nearly_equal(1.0, 1.001, 1e-9));
  CHECK(nearly_equal(0.0, 1e-15, 1e-9, 1e-12));
  CHECK_FALSE(nearly_equal(0.0, 1e-6, 1e-9, 1e-12));
}

TEST_CASE("sha256 matches the standard test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  TempDir tmp("util");
  write_text_file(tmp.file("a.txt"), "abc");
  CHECK(sha256_file(tmp.file("a.txt")) == sha256_hex("abc"));
  CHECK_THROWS_AS(sha256_file(tmp.file("missing.txt")), Error);
}

TEST_CASE("CSV reader enforces header and column count, skips comments") {
  TempDir tmp("util");
  write_text_file(tmp.file("ok.csv"),
                  "a,b,c\r\n# comment line\n1,2,3\n\n4,5,6\n");
  CsvReader reader(tmp.file("ok.csv"), "a,b,c");
  CsvRow row;
  REQUIRE(reader.next(row));
  CHECK(row.fields == std::vector<std::string>{"1", "2", "3"});
  CHECK(row.line == 3);
  REQUIRE(reader.next(row));
  CHECK(row.fields == std::vector<std::string>{"4", "5", "6"});
  CHECK(row.line == 5);
  CHECK_FALSE(reader.next(row));

  write_text_file(tmp.file("badheader.csv"), "a,b\n1,2\n");
  CHECK_THROWS_AS(CsvReader(tmp.file("badheader.csv"), "a,b,c"), Error);

  write_text_file(tmp.file("badcols.csv"), "a,b,c\n1,2\n");
  CsvReader r2(tmp.file("badcols.csv"), "a,b,c");
  CHECK_THROWS_AS(r2.next(row), Error);

  CHECK_THROWS_AS(CsvReader(tmp.file("absent.csv"), "a,b,c"), Error);
}

TEST_CASE("CSV writer round-trips and checks column counts") {
  TempDir tmp("util");
  {
    CsvWriter w(tmp.file("w.csv"), "x,y");
    w.write_row({"1", "2"});
    w.write_row({format_double(0.1), format_double(-3.5)});
    CHECK_THROWS_AS(w.write_row({"only-one"}), Error);
    w.close();
  }
  CsvReader r(tmp.file("w.csv"), "x,y");
  CsvRow row;
  REQUIRE(r.next(row));
  CHECK(row.fields[0] == "1");
  REQUIRE(r.next(row));
  CHECK(parse_double(row.fields[1], "y") == -3.5);
  CHECK_FALSE(r.next(row));
}

TEST_CASE("split_csv_line keeps empty fields") {
  CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
  CHECK(split_csv_line("x,") == std::vector<std::string>{"x", ""});
}

TEST_CASE("error taxonomy distinguishes validation from runtime failures") {
  CHECK(Error(errc::schema_mismatch, "x").is_validation());
  CHECK(Error(errc::bad_config, "x").is_validation());
  CHECK(Error(errc::duplicate_record, "x").is_validation());
  CHECK_FALSE(Error(errc::non_finite_objective, "x").is_validation());
  CHECK_FALSE(Error(errc::too_few_sites, "x").is_validation());
}
