#include <gtest/gtest.h>

#include "metaforge/quality_report.hpp"
#include "support/fixtures.hpp"

using namespace metaforge;
using testsupport::load_instance;
using testsupport::load_template;

namespace {

FieldStatus status_of(const QualityReport& r, const std::string& path) {
    for (const auto& s : r.field_statuses)
        if (s.path == path) return s.status;
    throw std::runtime_error("no status for " + path);
}

}  // namespace

TEST(QualityReport, FourOfFiveRequiredIsPointEight) {
    auto t = load_template("rnaseq_assay");
    auto r = generate_report(t, load_instance(t, "rnaseq_four_of_five"));
    EXPECT_EQ(r.counts.required_total, 5u);
    EXPECT_EQ(r.counts.required_filled, 4u);
    EXPECT_EQ(r.completeness, 0.8);
    EXPECT_EQ(status_of(r, "analyte_class"), FieldStatus::missing);
    EXPECT_EQ(r.field_statuses.size(), 6u);
}

TEST(QualityReport, CompleteAndEmptyBounds) {
    auto t = load_template("rnaseq_assay");
    EXPECT_EQ(generate_report(t, load_instance(t, "rnaseq_complete")).completeness, 1.0);
    EXPECT_EQ(generate_report(t, new_instance(t)).completeness, 0.0);
    auto empty = load_template("empty");
    auto r = generate_report(empty, new_instance(empty));
    EXPECT_EQ(r.completeness, 1.0);
    EXPECT_TRUE(r.field_statuses.empty());
}

TEST(QualityReport, StatusPrecedence) {
    auto t = load_template("rich_types");
    auto inst = load_instance(t, "rich_types_complete");
    inst = set_value(t, inst, "run_label", Literal{"nope", "xsd:string"});
    inst = set_value(t, inst, "assay_term", Literal{"rna sequencing", "xsd:string"});
    auto r = generate_report(t, inst, std::string("run-42"));
    EXPECT_EQ(status_of(r, "run_label"), FieldStatus::invalid);
    EXPECT_EQ(status_of(r, "assay_term"), FieldStatus::unresolved_term);
    EXPECT_EQ(status_of(r, "started_at"), FieldStatus::complete);
    EXPECT_EQ(status_of(r, "internal_batch"), FieldStatus::missing);
    EXPECT_EQ(r.counts.invalid, 1u);
    auto j = to_json(r);
    EXPECT_EQ(j["instanceRef"], "run-42");
    EXPECT_FALSE(j["generatedAt"].get<std::string>().empty());
}

TEST(QualityReport, CompletenessIsMonotoneUnderRandomFillOrder) {
    testsupport::ValueGen gen(1234);
    for (const auto& name : testsupport::template_names()) {
        auto t = load_template(name);
        for (int trial = 0; trial < 25; ++trial) {
            auto inst = testsupport::random_instance(t, gen, 0.0);
            auto slots = testsupport::field_slots(t, inst);
            std::shuffle(slots.begin(), slots.end(), gen.rng);
            double last = generate_report(t, inst).completeness;
            for (const auto& [node, slot] : slots) {
                inst = set_values(t, inst, slot, gen.values_for(*node));
                double now = generate_report(t, inst).completeness;
                ASSERT_GE(now, last) << name << " " << slot;
                last = now;
            }
            EXPECT_EQ(last, 1.0) << name;
        }
    }
}

TEST(QualityReport, TextFormat) {
    auto t = load_template("rnaseq_assay");
    auto text = render_report_text(generate_report(t, load_instance(t, "rnaseq_four_of_five"), std::string("demo")));
    EXPECT_EQ(text,
              "quality report for https://metaforge.example.org/templates/rnaseq-assay (instance demo)\n"
              "missing\tanalyte_class\n"
              "totals: required 4/5, optional 1/1, invalid 0, completeness 0.8\n");
}
