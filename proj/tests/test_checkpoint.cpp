#include <doctest.h>

#include "sarv/nn/checkpoint.hpp"
#include "sarv/nn/layers.hpp"
#include "support.hpp"

using namespace sarv;
using namespace sarv::nn;

namespace {

struct Net {
  Dense<double> a{"a", 3, 2};
  Dense<double> b{"b", 2, 1};
  ParameterList<double> params() {
    ParameterList<double> p;
    a.collect(p);
    b.collect(p);
    return p;
  }
};

}  // namespace

TEST_CASE("save and load round trip with manifest") {
  testing::TempDir dir;
  Net n;
  Rng rng(9);
  n.a.init_glorot(rng);
  n.b.init_glorot(rng);
  const auto ck = snapshot(n.params(), {{"epoch", 3}});
  const auto sha = save_checkpoint(ck, dir / "m.bin");
  CHECK(sha.size() == 64);
  CHECK(std::filesystem::exists(manifest_path_for(dir / "m.bin")));
  const auto back = load_checkpoint(dir / "m.bin");
  CHECK(back.metadata["epoch"] == 3);
  CHECK(back.precision == Precision::double_);
  Net m;
  restore(back, m.params());
  CHECK(m.a.weight().value == n.a.weight().value);
  CHECK(m.b.bias().value == n.b.bias().value);
  CHECK(encode_checkpoint(decode_checkpoint(encode_checkpoint(ck))) == encode_checkpoint(ck));
}

TEST_CASE("single precision checkpoints store floats") {
  Dense<float> d("d", 2, 2);
  Rng rng(1);
  d.init_glorot(rng);
  ParameterList<float> p;
  d.collect(p);
  const auto ck = snapshot(p);
  CHECK(ck.precision == Precision::single);
  Dense<float> e("d", 2, 2);
  ParameterList<float> q;
  e.collect(q);
  restore(decode_checkpoint(encode_checkpoint(ck)), q);
  CHECK(e.weight().value == d.weight().value);
}

TEST_CASE("shape mismatch lists expected and found") {
  Net n;
  const auto ck = snapshot(n.params());
  Dense<double> wrong_a("a", 4, 2);
  Dense<double> b("b", 2, 1);
  ParameterList<double> p;
  wrong_a.collect(p);
  b.collect(p);
  try {
    restore(ck, p);
    FAIL("expected CheckpointMismatch");
  } catch (const CheckpointMismatch& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[4x2]") != std::string::npos);
    CHECK(msg.find("[3x2]") != std::string::npos);
  }
  ParameterList<double> fewer;
  b.collect(fewer);
  CHECK_THROWS_AS(restore(ck, fewer), CheckpointMismatch);
}

TEST_CASE("corruption is detected") {
  testing::TempDir dir;
  Net n;
  save_checkpoint(snapshot(n.params()), dir / "m.bin");
  auto bytes = testing::read_file(dir / "m.bin");
  bytes[bytes.size() - 1] ^= 0x01;
  testing::write_file(dir / "m.bin", bytes);
  CHECK_THROWS_AS(load_checkpoint(dir / "m.bin"), DataError);
  CHECK_THROWS_AS(decode_checkpoint("NOTACKPT"), DataError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.bin"), DataError);
}
