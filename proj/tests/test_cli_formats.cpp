// Copyright 2026 The qpt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

#ifndef QPT_BIN
#define QPT_BIN "./qpt"
#endif

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(QPT_BIN) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

TEST(Cli, ByteIdenticalReruns) {
  ASSERT_EQ(run("montecarlo --gadget cnot-exrec --eps 2e-3 --samples 100000 "
                "--seed 11 --out /tmp/qpt_mc_a.json"),
            0);
  ASSERT_EQ(run("montecarlo --gadget cnot-exrec --eps 2e-3 --samples 100000 "
                "--seed 11 --out /tmp/qpt_mc_b.json"),
            0);
  const std::string a = slurp("/tmp/qpt_mc_a.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp("/tmp/qpt_mc_b.json"));

  ASSERT_EQ(run("count-malignant --gadget cnot-conexrec --out /tmp/qpt_cm_a.json"), 0);
  ASSERT_EQ(run("count-malignant --gadget cnot-conexrec --out /tmp/qpt_cm_b.json"), 0);
  EXPECT_EQ(slurp("/tmp/qpt_cm_a.json"), slurp("/tmp/qpt_cm_b.json"));
}

TEST(Cli, ThresholdEpsZeroGivesZeroColumn) {
  ASSERT_EQ(run("threshold --eps 0 --kmax 4 --format csv --out /tmp/qpt_th.csv"),
            0);
  const std::string csv = slurp("/tmp/qpt_th.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    EXPECT_NE(line.find("0,0,0,0"), std::string::npos) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 5);  // levels 0..4
}

TEST(Cli, CheckModeExitCodes) {
  EXPECT_EQ(run("count-malignant --gadget cnot-exrec --check --out /dev/null"),
            0);
  EXPECT_EQ(run("count-malignant --gadget zed --check --out /dev/null"), 0);
  // The overly adversarial deviation family lands far outside the golden
  // tolerance and must be reported as a regression.
  EXPECT_EQ(run("count-malignant --gadget cnot-exrec --check "
                "--b-model weight1 --out /dev/null"),
            2);
  EXPECT_EQ(run("count-malignant --gadget no-such-gadget --out /dev/null"), 1);
}

TEST(Cli, DumpGadgetEmitsSchema) {
  ASSERT_EQ(run("dump-gadget --gadget zed --out /tmp/qpt_zed.json"), 0);
  const std::string dump = slurp("/tmp/qpt_zed.json");
  EXPECT_NE(dump.find("qpt.circuit/1"), std::string::npos);
  EXPECT_NE(dump.find("outcome_bits"), std::string::npos);
}

TEST(Cli, DecodeErrorRuns) {
  ASSERT_EQ(run("decode-error --eps 1.04e-3 --kmax 7 --out /tmp/qpt_dec.json"),
            0);
  const std::string j = slurp("/tmp/qpt_dec.json");
  EXPECT_NE(j.find("eps_dec_total"), std::string::npos);
}

}  // namespace
