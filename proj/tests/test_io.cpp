#include <doctest.h>

#include <filesystem>
#include <string>

#include "oce/errors.hpp"
#include "oce/io.hpp"

using namespace oce;

namespace {

std::size_t parse_error_line(std::string_view text) {
  try {
    parse_loss_csv(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("loss CSV parsing") {
  CHECK(parse_loss_csv("1\n2\n3\n4\n") == std::vector<double>{1, 2, 3, 4});
  CHECK(parse_loss_csv("loss\n0.5\n\n1e-3\r\n+2") == std::vector<double>{0.5, 1e-3, 2});
  CHECK(parse_loss_csv("  7  ") == std::vector<double>{7});
  CHECK_THROWS_AS(parse_loss_csv(""), ParseError);
  CHECK_THROWS_AS(parse_loss_csv("loss\n"), ParseError);
}

TEST_CASE("loss CSV errors carry line numbers") {
  CHECK(parse_error_line("1\n2\nabc\n") == 3);
  CHECK(parse_error_line("loss\n1\n\n-2\n") == 4);
  CHECK(parse_error_line("1\n2,3\n") == 2);
  CHECK(parse_error_line("1\nnan\n") == 2);
  CHECK(parse_error_line("1\ninf\n") == 2);
  CHECK(parse_error_line("loss\nloss\n") == 2);
  try {
    parse_loss_csv("1\nx\n");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
  }
}

TEST_CASE("loss matrix parsing") {
  const auto m = parse_loss_matrix("0.1,0.2,0.3\n\n0.4, 0.5 ,0.6\n");
  REQUIRE(m.size() == 2);
  CHECK(m[1] == std::vector<double>{0.4, 0.5, 0.6});
  try {
    parse_loss_matrix("1,2\n3\n");
    FAIL("ragged matrix accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_loss_matrix("1,,2\n"), ParseError);
  CHECK_THROWS_AS(parse_loss_matrix("\n\n"), ParseError);
}

TEST_CASE("missing files raise I/O errors") {
  CHECK_THROWS_AS(read_loss_csv("/nonexistent/losses.csv"), IoError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/file"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/out.csv", "x"), IoError);
}

TEST_CASE("text files round-trip") {
  const auto path = std::filesystem::temp_directory_path() / "oce_io_roundtrip.csv";
  write_text_file(path, "loss\n1\n2\n");
  CHECK(read_loss_csv(path) == std::vector<double>{1, 2});
  std::filesystem::remove(path);
}

TEST_CASE("experiment config parsing") {
  const auto defaults = parse_experiment_config("{}");
  CHECK(defaults.task.n_train == 2000);
  CHECK(std::holds_alternative<Erm>(defaults.train.objective));

  const auto cfg = parse_experiment_config(R"({
    "task": {"n_train": 500, "n_test": 200, "dimension": 7, "class_separation": 1.5,
             "label_noise_rate": 0.05, "seed": 3},
    "train": {"objective": {"kind": "eom", "spec": "cvar:0.2"}, "batch_size": 50,
              "epochs": 10, "learning_rate": 0.05, "loss_clip_M": 10, "init_scale": 0.1,
              "seed": 11}
  })");
  CHECK(cfg.task.n_train == 500);
  CHECK(cfg.task.dimension == 7);
  CHECK(cfg.task.label_noise_rate == 0.05);
  CHECK(cfg.train.batch_size == 50);
  CHECK(cfg.train.loss_clip_M == 10.0);
  CHECK(cfg.train.seed == 11);
  const auto* eom = std::get_if<Eom>(&cfg.train.objective);
  REQUIRE(eom != nullptr);
  CHECK(eom->spec.to_string() == Disutility::cvar(0.2).to_string());

  const auto svp = parse_experiment_config(
      R"({"train": {"objective": {"kind": "svp", "penalty_lambda": 0.5}}})");
  CHECK(std::get<Svp>(svp.train.objective).penalty_lambda == 0.5);
  const auto eim = parse_experiment_config(
      R"({"train": {"objective": {"kind": "eim", "spec": "entropic:2"}}})");
  CHECK(std::holds_alternative<Eim>(eim.train.objective));
}

TEST_CASE("experiment config errors") {
  CHECK_THROWS_AS(parse_experiment_config("{"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config("[]"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"tusk": {}})"), DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"task": {"n_trains": 5}})"), DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"task": 5})"), DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"train": []})"), DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"task": {"n_train": "many"}})"), DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"train": {"objective": {"kind": "dro"}}})"),
                  DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"train": {"objective": {"kind": "eom"}}})"),
                  DomainError);
  CHECK_THROWS_AS(
      parse_experiment_config(R"({"train": {"objective": {"kind": "eom", "spec": "cvar:7"}}})"),
      DomainError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"train": {"batch_size": 0}})"), DomainError);
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"task": {"n_train": 10}, "train": {"batch_size": 20}})"),
                  DomainError);
}
