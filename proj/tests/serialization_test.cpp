#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lemsched/error.hpp"
#include "lemsched/serialization.hpp"
#include "test_support.hpp"

namespace lemsched {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(LEMSCHED_TEST_TMPDIR) / "serialization" / name;
    fs::remove_all(dir);
    return dir;
}

TEST(LayoutRecord, RoundTripIsExact) {
    SimConfig cfg;
    cfg.seed = 31;
    const Layout l = generate_layout(cfg, 4);
    const std::string line = layout_to_jsonl(l);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const Layout back = layout_from_jsonl(line, cfg);
    EXPECT_EQ(back.index, 4u);
    EXPECT_EQ(back.tx, l.tx);
    EXPECT_EQ(back.rx, l.rx);
    EXPECT_EQ(back.config.field_length, 500.0);
    EXPECT_EQ(back.config.K, 10u);
}

TEST(LayoutRecord, FieldsAndPrecision) {
    SimConfig cfg;
    cfg.K = 1;
    const Layout l{cfg, 2, {{1.0 / 3.0, 250.0}}, {{10.0 / 3.0, 260.0}}};
    const auto j = nlohmann::json::parse(layout_to_jsonl(l));
    for (const char* key : {"index", "field_length", "K", "tx", "rx"}) EXPECT_TRUE(j.contains(key)) << key;
    const std::string text = j.at("tx").at(0).at(0).dump();
    EXPECT_GE(text.size(), 14u);  // "0.3333333333333333"
}

TEST(LayoutRecord, Malformed) {
    const SimConfig cfg;
    EXPECT_THROW(layout_from_jsonl("not json", cfg), ValidationError);
    EXPECT_THROW(layout_from_jsonl(R"({"index":0,"field_length":500,"K":1,"tx":[[1,2]]})", cfg), ValidationError);
    EXPECT_THROW(layout_from_jsonl(R"({"index":0,"field_length":500,"K":1,"tx":[[1]],"rx":[[1,2]]})", cfg),
                 ValidationError);
    EXPECT_THROW(layout_from_jsonl(R"({"index":0,"field_length":500,"K":1,"tx":[[100,100]],"rx":[[300,300]]})", cfg),
                 ValidationError);
}

TEST(LayoutFile, WriteReadAndDeterminism) {
    const fs::path dir = scratch("layouts");
    SimConfig cfg;
    cfg.seed = 32;
    std::vector<Layout> ls;
    for (std::size_t i = 0; i < 5; ++i) ls.push_back(generate_layout(cfg, i));
    write_layouts(dir / "a.jsonl", ls);
    write_layouts(dir / "b.jsonl", ls);
    EXPECT_EQ(read_text_file(dir / "a.jsonl"), read_text_file(dir / "b.jsonl"));
    const auto back = read_layouts(dir / "a.jsonl", cfg);
    ASSERT_EQ(back.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(back[i].rx, ls[i].rx);
}

TEST(TextFile, MissingFileNamesPath) {
    try {
        read_text_file("/nonexistent/dir/file.txt");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/file.txt"), std::string::npos);
    }
}

SvmModel trained_model() {
    Rng rng(33);
    const TrainSet ts = testing::cluster_train_set(rng, 12, 4, 1.0, 1.8, 1.0);
    SvmHyper hp;
    hp.C = 7.5;
    hp.kernel.gamma_kernel = 1.3;
    return train(ts, hp);
}

TEST(ModelFile, RoundTripReproducesDecisionValues) {
    const SvmModel m = trained_model();
    const fs::path path = scratch("model") / "m.json";
    save_model(m, path);
    const SvmModel back = load_model(path);
    EXPECT_EQ(back.support_points().size(), m.support_points().size());
    EXPECT_EQ(back.dual_coeffs(), m.dual_coeffs());
    EXPECT_EQ(back.bias(), m.bias());
    EXPECT_EQ(back.hyper().C, 7.5);
    EXPECT_EQ(back.hyper().kernel.gamma_kernel, 1.3);
    EXPECT_EQ(back.c_positive(), m.c_positive());
    EXPECT_EQ(back.converged(), m.converged());
    Rng rng(34);
    for (int probe = 0; probe < 20; ++probe) {
        const SpdMatrix s = testing::random_spd(rng, 4, 0.3, 5.0);
        EXPECT_NEAR(back.decision_value(s), m.decision_value(s), 1e-9);
    }
    EXPECT_EQ(model_to_string(back), model_to_string(m));
}

TEST(ModelFile, ConstantModelAndExponent) {
    SvmHyper hp;
    hp.kernel.exponent = KernelExponent::literal_fourth_power;
    const SvmModel back = model_from_string(model_to_string(SvmModel::constant(0, hp)));
    EXPECT_TRUE(back.is_constant());
    EXPECT_EQ(back.bias(), -1.0);
    EXPECT_EQ(back.hyper().kernel.exponent, KernelExponent::literal_fourth_power);
}

TEST(ModelFile, RejectsWrongSchema) {
    auto j = nlohmann::json::parse(model_to_string(trained_model()));
    j["schema_version"] = 99;
    EXPECT_THROW(model_from_string(j.dump()), ValidationError);
    j = nlohmann::json::parse(model_to_string(trained_model()));
    j["schema"] = "something.else";
    EXPECT_THROW(model_from_string(j.dump()), ValidationError);
    EXPECT_THROW(model_from_string("{}"), ValidationError);
    EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}

TEST(KernelExponent, StringRoundTrip) {
    for (auto e : {KernelExponent::squared_norm, KernelExponent::literal_fourth_power})
        EXPECT_EQ(kernel_exponent_from_string(to_string(e)), e);
    EXPECT_THROW(kernel_exponent_from_string("cubic"), ValidationError);
}

}  // namespace
}  // namespace lemsched
