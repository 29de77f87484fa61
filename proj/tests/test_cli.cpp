/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "temp_dir.hpp"

#include <nlohmann/json.hpp>

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string err;
};

Run cli(const std::string& args, const fs::path& scratch)
{
    const auto err = scratch / "stderr.txt";
    const std::string cmd = std::string(EWSPIPE_CLI) + " " + args + " > " + (scratch / "stdout.txt").string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream s;
    s << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string read(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("generate-nisir twice gives identical directories")
{
    TempDir t;
    const auto a = t.path / "a", b = t.path / "b";
    CHECK(cli("generate-nisir --noise-kind dem --n-series 10 --seed 7 --out " + a.string(), t.path).code == 0);
    CHECK(cli("generate-nisir --noise-kind dem --n-series 10 --seed 7 --threads 4 --out " + b.string(), t.path).code ==
          0);
    for (const char* f : {"series.csv", "mask.csv", "labels.csv", "manifest.json"}) {
        CHECK(read(a / f) == read(b / f));
    }
}

TEST_CASE("split of 1000 balanced series")
{
    TempDir t;
    const auto out = t.path / "split.json";
    REQUIRE(cli("split --balanced 1000 --ratios 0.8,0.15,0.05 --seed 1 --out " + out.string(), t.path).code == 0);
    const auto j = nlohmann::json::parse(read(out));
    CHECK(j["counts"]["train"] == 800);
    CHECK(j["counts"]["val"] == 150);
    CHECK(j["counts"]["test"] == 50);
    CHECK(fs::exists(out.string() + ".manifest.json"));
}

TEST_CASE("evaluate with a missing id fails with one line")
{
    TempDir t;
    std::ofstream(t.path / "p.csv") << "id,p_transcritical\na,0.9\n";
    std::ofstream(t.path / "l.csv") << "id,label\na,transcritical\nb,null\n";
    const auto r = cli("evaluate --preds " + (t.path / "p.csv").string() + " --labels " + (t.path / "l.csv").string(),
                       t.path);
    CHECK(r.code != 0);
    CHECK(r.err == "error: MissingPrediction: b\n");
}

TEST_CASE("usage errors name the flag")
{
    TempDir t;
    const auto r = cli("generate-rapo --seed notanumber --n-series 2 --out x", t.path);
    CHECK(r.code == 2);
    CHECK(r.err.find("--seed") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("testbed, score and roc end to end")
{
    TempDir t;
    const auto tb = t.path / "tb";
    REQUIRE(cli("generate-testbed --model seir --seed 3 --out " + tb.string(), t.path).code == 0);
    const auto preds = t.path / "preds.csv";
    REQUIRE(cli("ewi-score --in " + tb.string() + " --out " + preds.string(), t.path).code == 0);
    CHECK(fs::exists(preds.string() + ".manifest.json"));
    const auto roc = t.path / "roc.csv";
    REQUIRE(cli("roc --preds " + preds.string() + " --dataset " + tb.string() + " --out " + roc.string(), t.path)
                .code == 0);
    CHECK(read(roc).rfind("threshold,fpr,tpr\ninf,0,0\n", 0) == 0);
    CHECK(read(t.path / "roc.svg").find("<polyline") != std::string::npos);
    CHECK(fs::exists(roc.string() + ".manifest.json"));
    const auto metrics = t.path / "m.json";
    REQUIRE(cli("evaluate --preds " + preds.string() + " --dataset " + tb.string() + " --out " + metrics.string(),
                t.path)
                .code == 0);
    CHECK(nlohmann::json::parse(read(metrics)).contains("auc"));
}

TEST_CASE("preprocess and replay")
{
    TempDir t;
    const auto raw = t.path / "raw", pre = t.path / "pre", again = t.path / "again";
    REQUIRE(cli("generate-nisir --noise-kind white --n-series 4 --seed 2 --out " + raw.string(), t.path).code == 0);
    REQUIRE(cli("preprocess --in " + raw.string() + " --seed 5 --span 0.25 --out " + pre.string(), t.path).code == 0);
    REQUIRE(cli("replay --manifest " + (pre / "manifest.json").string() + " --out " + again.string(), t.path).code ==
            0);
    CHECK(read(pre / "series.csv") == read(again / "series.csv"));
    CHECK(read(pre / "manifest.json") == read(again / "manifest.json"));
}

TEST_CASE("import-csv pads segments with masked zeros")
{
    TempDir t;
    std::ofstream(t.path / "cases.csv") << "date,cases\n1,3\n2,4\n3,5\n20,1\n21,2\n";
    const auto out = t.path / "imp";
    REQUIRE(cli("import-csv --in " + (t.path / "cases.csv").string() + " --out " + out.string(), t.path).code == 0);
    CHECK(read(out / "mask.csv") == "id,m0,m1,m2\ncases_seg0,1,1,1\ncases_seg1,1,1,0\n");
}

}
