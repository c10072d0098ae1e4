// Copyright 2026 The dailoc Authors
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

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"

namespace dailoc::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), dir).string()] = testing::read_file(e.path());
    }
  }
  return files;
}

TEST(Cli, UnknownFlagFails) {
  const auto r = invoke({"generate", "--bogus", "1", "--out", "x"});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingInputsAreIoErrors) {
  testing::TempDir dir("cli");
  const auto r = invoke({"pretrain", "--scenario", (dir.path() / "nope").string(), "--out",
                         (dir.path() / "c.json").string()});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("not found"), std::string::npos) << r.err;
  EXPECT_EQ(invoke({"report", "--eval", (dir.path() / "e.json").string(), "--out",
                    dir.path().string()})
                .code,
            kExitIo);
}

TEST(Cli, BadPresetIsInputError) {
  testing::TempDir dir("cli");
  const auto r =
      invoke({"generate", "--preset", "mall", "--out", (dir.path() / "s").string()});
  EXPECT_EQ(r.code, kExitError);
}

TEST(Cli, GenerateIsByteReproducible) {
  testing::TempDir dir("cli");
  const auto a = dir.path() / "a";
  const auto b = dir.path() / "b";
  for (const auto& p : {a, b}) {
    const auto r = invoke({"generate", "--preset", "building1", "--seed", "7", "--out", p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto sa = snapshot(a);
  EXPECT_GT(sa.size(), 2u);
  EXPECT_EQ(sa, snapshot(b));
  EXPECT_TRUE(sa.contains("manifest.json"));
  EXPECT_TRUE(sa.contains("run-manifest.json"));
}

TEST(Cli, GradcheckPasses) {
  const auto r = invoke({"gradcheck", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS gradient check"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, AdaptingAnUnknownDeviceIsRejected) {
  testing::TempDir dir("cli");
  const auto s = (dir.path() / "s").string();
  const auto c = (dir.path() / "c.json").string();
  ASSERT_EQ(invoke({"generate", "--preset", "toy", "--devices", "2", "--epochs", "2", "--out", s})
                .code,
            0);
  ASSERT_EQ(invoke({"pretrain", "--scenario", s, "--out", c, "--pretrain-epochs", "2"}).code, 0);
  const auto r = invoke({"adapt", "--scenario", s, "--checkpoint", c, "--device", "HTC",
                         "--epoch", "1", "--out", (dir.path() / "d.json").string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_TRUE(fs::exists(c + ".manifest.json"));
}

}  // namespace
}  // namespace dailoc::cli
