#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "matrec/io.hpp"

using namespace matrec;
using nlohmann::json;

namespace {

struct cli_result {
    int exit_code = -1;
    std::string output; // stdout only
};

cli_result run_cli(const std::string& args) {
    const std::string command = std::string(MATREC_CLI_PATH) + " " + args + " 2>/dev/null";
    std::FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    cli_result result;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_temp_spec(const std::string& name, const json& doc) {
    const std::string path = "/tmp/matrec_io_test_" + name + ".json";
    std::ofstream out(path);
    out << doc.dump(2);
    return path;
}

json golden_spec() {
    return json::parse(R"({
        "kind": "product",
        "S": [1, 2],
        "B": 1.0,
        "initials": [[[2.0]], [[0.5]]],
        "norm": "both"
    })");
}

} // namespace

TEST_CASE("spec files parse into validated recurrences") {
    const auto file = parse_spec_json(golden_spec());
    CHECK(file.spec.kind == recurrence_kind::product);
    CHECK(file.spec.set.elements == std::vector<int>{1, 2});
    CHECK(file.spec.b == complex_matrix::scalar(1.0));
    CHECK(file.spec.initials[0] == complex_matrix::scalar(2.0));
    CHECK(file.spec.initials[1] == complex_matrix::scalar(0.5));
    CHECK(file.spec.order == std::vector<int>{1, 2});
    CHECK(file.norms.size() == 2);
}

TEST_CASE("complex entries and custom order round-trip") {
    const json doc = json::parse(R"({
        "kind": "kronecker",
        "S": [1, 2],
        "B": [0.0, 1.0],
        "initials": [
            [[1.0, [0.5, -0.25]], [3.0, 4.0]],
            [[[0.0, 1.0]], [2.0]]
        ],
        "order": [2, 1],
        "norm": "operator"
    })");
    const auto file = parse_spec_json(doc);
    CHECK(file.spec.b == complex_matrix::scalar(cplx(0.0, 1.0)));
    CHECK(file.spec.initials[0](0, 1) == cplx(0.5, -0.25));
    CHECK(file.spec.initials[0](1, 1) == cplx(4.0, 0.0));
    CHECK(file.spec.initials[1].rows() == 2);
    CHECK(file.spec.initials[1].cols() == 1);
    CHECK(file.spec.order == std::vector<int>{2, 1});
    REQUIRE(file.norms.size() == 1);
    CHECK(file.norms[0] == norm_kind::operator_norm);

    const auto echoed = parse_spec_json(dump_spec(file));
    CHECK(echoed.spec.kind == file.spec.kind);
    CHECK(echoed.spec.set == file.spec.set);
    CHECK(echoed.spec.b == file.spec.b);
    CHECK(echoed.spec.initials == file.spec.initials);
    CHECK(echoed.spec.order == file.spec.order);
    CHECK(echoed.norms == file.norms);
}

TEST_CASE("parse failures carry field paths") {
    auto doc = golden_spec();
    doc["initials"][1] = json::parse(R"([["x"]])");
    try {
        parse_spec_json(doc);
        FAIL("expected a spec error");
    } catch (const spec_error& e) {
        CHECK(std::string(e.what()).find("initials[1][0][0]") != std::string::npos);
    }

    auto bad_kind = golden_spec();
    bad_kind["kind"] = "sum";
    CHECK_THROWS_AS(parse_spec_json(bad_kind), spec_error);

    auto bad_s = golden_spec();
    bad_s["S"] = json::parse("[1, 0]");
    CHECK_THROWS_AS(parse_spec_json(bad_s), spec_error);

    auto missing = golden_spec();
    missing.erase("B");
    CHECK_THROWS_AS(parse_spec_json(missing), spec_error);

    auto extra = golden_spec();
    extra["extra"] = 1;
    CHECK_THROWS_AS(parse_spec_json(extra), spec_error);

    auto wrong_count = golden_spec();
    wrong_count["initials"] = json::parse("[[[2.0]]]");
    CHECK_THROWS_AS(parse_spec_json(wrong_count), spec_error);

    auto ragged = golden_spec();
    ragged["initials"] = json::parse("[[[2.0, 1.0], [3.0]], [[0.5]]]");
    CHECK_THROWS_AS(parse_spec_json(ragged), spec_error);

    auto bad_order = golden_spec();
    bad_order["order"] = json::parse("[1, 1]");
    CHECK_THROWS_AS(parse_spec_json(bad_order), spec_error);
}

TEST_CASE("trajectory CSV emits NA rows after truncation") {
    trajectory<double> traj;
    traj.mode = trajectory_mode::direct;
    traj.n_max = 3;
    traj.steps.push_back(trajectory_step<double>{0, 2, 2, 1.5, std::log(1.5)});
    traj.steps.push_back(trajectory_step<double>{1, 2, 2, std::nullopt, -1.0});
    traj.truncated = trajectory<double>::truncation_info{2, "entry budget exceeded"};
    const std::string csv = trajectory_to_csv(traj);
    CHECK(csv == "n,rows,cols,norm,log_norm\n"
                 "0,2,2,1.5," + format_value(std::log(1.5)) + "\n"
                 "1,2,2,NA,-1\n"
                 "2,NA,NA,NA,NA\n"
                 "3,NA,NA,NA,NA\n");
}

TEST_CASE("surrogate kronecker rows leave unknown dimensions as NA") {
    const json doc = json::parse(R"({
        "kind": "kronecker",
        "S": [1, 2],
        "B": 1.0,
        "initials": [[[2.0, 0.0], [0.0, 2.0]], [[2.0, 0.0], [0.0, 2.0]]]
    })");
    const auto file = parse_spec_json(doc);
    const auto traj = surrogate<double>(file.spec, 6, norm_kind::frobenius);
    const std::string csv = trajectory_to_csv(traj);
    CHECK(csv.find("\n2,NA,NA,") != std::string::npos); // dims unknown from depth on
    CHECK(csv.find("\n0,2,2,") != std::string::npos);   // initial dims are known
}

TEST_CASE("cli analyze emits the per-norm report") {
    const auto path = write_temp_spec("golden", golden_spec());
    const auto run = run_cli("analyze " + path);
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.output);
    CHECK(report["overall_verdict"] == "converges");
    REQUIRE(report["per_norm"].size() == 2);
    CHECK(report["per_norm"][0]["norm"] == "frobenius");
    CHECK(report["per_norm"][0]["m"] == 1);
    CHECK(report["per_norm"][0]["lambda"] == 0);
    CHECK(std::abs(report["per_norm"][0]["margin"].get<double>() + 0.1636) < 1e-3);
    CHECK_FALSE(report["per_norm"][0].contains("kron_ratio"));
}

TEST_CASE("cli analyze --dump-spec round-trips") {
    const auto path = write_temp_spec("dump", golden_spec());
    const auto run = run_cli("analyze --dump-spec " + path);
    REQUIRE(run.exit_code == 0);
    const auto reparsed = parse_spec_json(json::parse(run.output));
    const auto original = parse_spec_json(golden_spec());
    CHECK(reparsed.spec.set == original.spec.set);
    CHECK(reparsed.spec.b == original.spec.b);
    CHECK(reparsed.spec.initials == original.spec.initials);
    CHECK(reparsed.spec.order == original.spec.order);
    CHECK(reparsed.norms == original.norms);
}

TEST_CASE("cli snacci prints exact terms") {
    const auto run = run_cli("snacci --set 1,2 --count 7");
    REQUIRE(run.exit_code == 0);
    CHECK(run.output == "0 1 1 2 3 5 8\n");

    const auto json_run = run_cli("--json snacci --set 2,4 --count 8");
    REQUIRE(json_run.exit_code == 0);
    const json doc = json::parse(json_run.output);
    CHECK(doc["terms"] == json::parse(R"(["0","0","0","1","0","1","0","2"])"));
}

TEST_CASE("cli multiplicity prints counts, b and words") {
    const auto run = run_cli("multiplicity --set 1,2 --n 6 --with-b");
    REQUIRE(run.exit_code == 0);
    CHECK(run.output == "counts: 5 8\nb: 12\n");

    const auto word_run = run_cli("multiplicity --set 2,4 --n 10 --word");
    REQUIRE(word_run.exit_code == 0);
    CHECK(word_run.output ==
          "counts: 3 0 5 0\nword: A_2 A_0 A_2 A_2 A_0 A_2 A_0 A_2\n");
}

TEST_CASE("cli simulate writes the requested number of rows") {
    const json doc = json::parse(R"({
        "kind": "product",
        "S": [1, 2],
        "B": 0.5,
        "initials": [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]]
    })");
    const auto path = write_temp_spec("identity", doc);
    const auto run = run_cli("simulate " + path + " --steps 10 --mode direct");
    REQUIRE(run.exit_code == 0);
    int rows = 0;
    for (char c : run.output) rows += c == '\n';
    CHECK(rows == 11); // header + 10 data rows
    CHECK(run.output.rfind("n,rows,cols,norm,log_norm\n", 0) == 0);

    const auto surrogate_run = run_cli("simulate " + path + " --steps 200 --mode surrogate");
    REQUIRE(surrogate_run.exit_code == 0);
    rows = 0;
    for (char c : surrogate_run.output) rows += c == '\n';
    CHECK(rows == 201);
    CHECK(surrogate_run.output.find("NA,NA,NA,NA") == std::string::npos);
}

TEST_CASE("cli simulate flags kronecker truncation under --strict") {
    const json doc = json::parse(R"({
        "kind": "kronecker",
        "S": [1, 2],
        "B": 1.0,
        "initials": [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]]
    })");
    const auto path = write_temp_spec("kron", doc);
    const auto strict = run_cli("simulate " + path + " --steps 10 --mode direct --strict");
    CHECK(strict.exit_code == 4);
    CHECK(strict.output.find("NA,NA,NA,NA") != std::string::npos);
    const auto loose = run_cli("simulate " + path + " --steps 10 --mode direct");
    CHECK(loose.exit_code == 0);
}

TEST_CASE("cli exit codes distinguish validation from analytic failures") {
    CHECK(run_cli("analyze /tmp/matrec_io_test_missing_file.json").exit_code == 2);

    auto bad = golden_spec();
    bad["kind"] = "nope";
    const auto bad_path = write_temp_spec("badkind", bad);
    CHECK(run_cli("analyze " + bad_path).exit_code == 2);

    const json zero = json::parse(R"({
        "kind": "product",
        "S": [1, 2],
        "B": 1.0,
        "initials": [[[0.0]], [[0.5]]]
    })");
    const auto zero_path = write_temp_spec("zeronorm", zero);
    CHECK(run_cli("analyze " + zero_path).exit_code == 3);

    CHECK(run_cli("snacci --set 1,x --count 5").exit_code == 2);
    CHECK(run_cli("multiplicity --set 1,2 --n 80 --word").exit_code == 3); // letter budget
    CHECK(run_cli("nonsense").exit_code == 2);
}

TEST_CASE("cli output is byte-identical across runs") {
    const auto path = write_temp_spec("determinism", golden_spec());
    const auto a = run_cli("analyze " + path);
    const auto b = run_cli("analyze " + path);
    CHECK(a.output == b.output);
    const auto sim_a = run_cli("simulate " + path + " --steps 40 --mode direct");
    const auto sim_b = run_cli("simulate " + path + " --steps 40 --mode direct");
    CHECK(sim_a.output == sim_b.output);
}

TEST_CASE("cli verify exits zero on consistent specs and five on mismatches") {
    const auto path = write_temp_spec("verify", golden_spec());
    const auto run = run_cli("verify " + path + " --steps 120");
    REQUIRE(run.exit_code == 0);
    const json doc = json::parse(run.output);
    CHECK(doc["consistent"] == true);
    CHECK(doc["overall_verdict"] == "converges");

    const json blended = json::parse(R"({
        "kind": "product",
        "S": [2, 4],
        "B": 1.0,
        "initials": [[[1.0]], [[0.5]], [[1.0]], [[0.5]]],
        "norm": "frobenius"
    })");
    const auto blended_path = write_temp_spec("blended", blended);
    const auto mismatch = run_cli("verify " + blended_path);
    CHECK(mismatch.exit_code == 5);
    CHECK(json::parse(mismatch.output)["consistent"] == false);
}
