#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <sstream>

#include "../support/oracles.hpp"

using namespace chardecomp;

namespace {

FeatureSchema gender_number() {
    FeatureSchema s;
    s.language = "test";
    s.classes = {detail::make_class("Gender", {"Fem", "Masc"}), detail::make_class("Number", {"Sing", "Plur"}),
                 detail::make_class("Case", {"Nom"})};
    return s;
}

std::vector<WordSample> parse(const std::string& text, const FeatureSchema& schema, ConlluOptions opt = {},
                              ConlluStats* stats = nullptr) {
    std::istringstream in(text);
    return parse_conllu(in, schema, opt, stats);
}

WordSample sample(std::u32string surface, std::string number) {
    WordSample w;
    w.surface = std::move(surface);
    w.features["Number"] = std::move(number);
    return w;
}

}  // namespace

TEST(Conllu, FeatsSplitIntoSchemaClasses) {
    const auto words = parse("# sent_id = 1\n1\tcasas\tcasa\tNOUN\t_\tGender=Fem|Number=Plur|Foo=Bar\t0\troot\t_\t_\n",
                             gender_number());
    ASSERT_EQ(words.size(), 1u);
    EXPECT_EQ(words[0].surface, U"casas");
    EXPECT_EQ(words[0].label("Gender"), "Fem");
    EXPECT_EQ(words[0].label("Number"), "Plur");
    EXPECT_EQ(words[0].label("Case"), "NA");
    EXPECT_EQ(words[0].features.size(), 3u);
}

TEST(Conllu, UnderscoreFeatsAllNotApplicable) {
    const auto words = parse("1\ty\ty\tCCONJ\t_\t_\t0\troot\t_\t_\n", gender_number());
    ASSERT_EQ(words.size(), 1u);
    for (const auto& [name, value] : words[0].features) EXPECT_EQ(value, "NA") << name;
}

TEST(Conllu, MultiwordRangesAndEmptyNodesSkipped) {
    ConlluStats stats;
    const auto words = parse(
        "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n1\tde\tde\tADP\t_\t_\t0\troot\t_\t_\n"
        "2\tel\tel\tDET\t_\tGender=Masc\t1\tdet\t_\t_\n2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n",
        gender_number(), {}, &stats);
    EXPECT_EQ(words.size(), 2u);
    EXPECT_EQ(stats.skipped_multiword, 2u);
}

TEST(Conllu, WrongColumnCountReportsLine) {
    try {
        parse("# c\n1\tx\tx\n", gender_number());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Conllu, UnknownValueNamesClassAndValue) {
    try {
        parse("1\tx\tx\tNOUN\t_\tGender=Xyz\t0\troot\t_\t_\n", gender_number());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("Gender"), std::string::npos);
        EXPECT_NE(msg.find("Xyz"), std::string::npos);
    }
    ConlluOptions lenient;
    lenient.strict_values = false;
    ConlluStats stats;
    const auto words = parse("1\tx\tx\tNOUN\t_\tGender=Xyz\t0\troot\t_\t_\n", gender_number(), lenient, &stats);
    EXPECT_EQ(words[0].label("Gender"), "NA");
    EXPECT_EQ(stats.unknown_values, 1u);
}

TEST(Conllu, SkipLinesDropsLeadingPhysicalLines) {
    const std::string text = "1\tbad\n1\tuno\tuno\tNUM\t_\t_\t0\troot\t_\t_\n";
    ConlluOptions opt;
    opt.skip_lines = 1;
    const auto words = parse(text, gender_number(), opt);
    ASSERT_EQ(words.size(), 1u);
    EXPECT_EQ(words[0].surface, U"uno");
}

TEST(Conllu, SchemaTotality) {
    const auto words = parse("1\ta\ta\tX\t_\tNumber=Sing\t0\troot\t_\t_\n\n1\tb\tb\tX\t_\t_\t0\troot\t_\t_\n",
                             gender_number());
    for (const auto& w : words) EXPECT_EQ(w.features.size(), gender_number().classes.size());
}

TEST(Schema, BuiltinClassCounts) {
    EXPECT_EQ(builtin_schema("fi").classes.size(), 12u);
    EXPECT_EQ(builtin_schema("es").classes.size(), 6u);
    EXPECT_EQ(builtin_schema("sv").classes.size(), 9u);
    EXPECT_THROW(builtin_schema("xx"), SchemaError);
    for (const char* lang : {"fi", "es", "sv"}) {
        const auto s = builtin_schema(lang);
        EXPECT_NO_THROW(s.validate());
        for (const auto& c : s.classes) EXPECT_EQ(c.labels.front(), "NA");
    }
}

TEST(Dedupe, FirstOccurrenceWins) {
    const auto r = dedupe({sample(U"cat", "Sing"), sample(U"cat", "Sing"), sample(U"dog", "Sing")});
    ASSERT_EQ(r.samples.size(), 2u);
    EXPECT_EQ(r.samples[0].surface, U"cat");
    EXPECT_EQ(r.samples[1].surface, U"dog");
    EXPECT_EQ(r.duplicates, 1u);
    EXPECT_EQ(r.conflicts, 0u);
    EXPECT_THROW(dedupe({}), std::invalid_argument);
}

TEST(Dedupe, ConflictsCountedOnHandMadeCorpus) {
    const auto r = dedupe({sample(U"a", "Sing"), sample(U"b", "Plur"), sample(U"a", "Plur"), sample(U"b", "Plur"),
                           sample(U"c", "Sing")});
    ASSERT_EQ(r.samples.size(), 3u);
    EXPECT_EQ(r.samples[0].label("Number"), "Sing");
    EXPECT_EQ(r.duplicates, 2u);
    EXPECT_EQ(r.conflicts, 1u);
    ASSERT_EQ(r.conflict_surfaces.size(), 1u);
    EXPECT_EQ(r.conflict_surfaces[0], U"a");
}

TEST(Segmentation, EconomicasExample) {
    std::istringstream in("# word\tfeature\tindices\neconómicas\tlemma=económico\t0,1,2,3,4,5,6,7\n"
                          "económicas\tGender=Fem\t8\neconómicas\tNumber=Plur\t9\n");
    const auto a = parse_segmentation(in);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0].index_set, (std::vector<std::size_t>{8}));
    EXPECT_EQ(a[0].feature_class, "Gender");
    EXPECT_EQ(a[1].index_set, (std::vector<std::size_t>{9}));
    EXPECT_EQ(a[1].value, "Plur");
}

TEST(Segmentation, WholeWordAnnotation) {
    std::istringstream in("les\tNumber=Plur\t0,1,2\n");
    const auto a = parse_segmentation(in);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].index_set, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Segmentation, Errors) {
    std::istringstream out_of_range("abc\tNumber=Plur\t3\n");
    EXPECT_THROW(parse_segmentation(out_of_range), ParseError);
    const FeatureSchema s = gender_number();
    std::istringstream unknown_class("abc\tMood=Ind\t1\n");
    EXPECT_THROW(parse_segmentation(unknown_class, &s), ParseError);
}

TEST(Segmentation, WriteParseRoundTrip) {
    const std::vector<SegmentAnnotation> a{{U"kronor", "Number", "Plur", {4, 5}}, {U"año", "Number", "Sing", {2}}};
    std::stringstream io;
    write_segmentation(io, a);
    EXPECT_EQ(parse_segmentation(io), a);
}

TEST(EncodeWord, BoundariesAndPadding) {
    const CharVocab v(std::vector<char32_t>{U'a', U'b'});
    EXPECT_EQ(encode_word(U"ab", v), (std::vector<int>{CharVocab::kStart, v.id(U'a'), v.id(U'b'), CharVocab::kEnd}));
    EXPECT_EQ(encode_word(U"a", v, 6), (std::vector<int>{CharVocab::kStart, v.id(U'a'), CharVocab::kEnd, CharVocab::kPad,
                                                          CharVocab::kPad, CharVocab::kPad}));
    EXPECT_EQ(encode_word(U"az", v)[2], CharVocab::kUnknown);
    EXPECT_EQ(v.render(CharVocab::kStart), "^");
    EXPECT_EQ(v.render(CharVocab::kEnd), "$");
}

TEST(EncodeWord, RoundTripForInVocabularyWords) {
    Rng rng(4);
    const CharVocab v = oracle::small_vocab();
    for (int i = 0; i < 200; ++i) {
        std::u32string w;
        const auto n = 1 + rng.below(10);
        for (std::uint64_t k = 0; k < n; ++k) w.push_back(static_cast<char32_t>(U'a' + rng.below(8)));
        EXPECT_EQ(decode_word(encode_word(w, v, 6), v), w);
    }
}

TEST(Vocab, ReservedIdsDistinctAndMappingInjective) {
    const CharVocab v = oracle::small_vocab();
    std::set<int> ids{CharVocab::kPad, CharVocab::kUnknown, CharVocab::kStart, CharVocab::kEnd};
    EXPECT_EQ(ids.size(), 4u);
    for (char32_t c : v.chars()) EXPECT_TRUE(ids.insert(v.id(c)).second);
}

TEST(Synthetic, FullProbabilityMarksExactlyPositives) {
    std::vector<WordSample> words;
    for (int i = 0; i < 200; ++i) words.push_back(sample(U"abc", i % 2 ? "Sing" : "Plur"));
    SyntheticConfig cfg;
    Rng rng(1);
    const auto r = inject_synthetic(words, cfg, rng);
    for (std::size_t i = 0; i < words.size(); ++i) {
        EXPECT_EQ(r.injected[i], cfg.is_positive(words[i]));
        if (r.injected[i]) {
            EXPECT_EQ(r.samples[i].surface, std::u32string(1, cfg.symbol) + U"abc");
        }
    }
}

TEST(Synthetic, RateWithinBinomialBounds) {
    std::vector<WordSample> words(10000, sample(U"abc", "Sing"));
    SyntheticConfig cfg;
    cfg.p_syn = 0.8;
    Rng rng(2);
    const auto r = inject_synthetic(words, cfg, rng);
    const double rate = static_cast<double>(std::count(r.injected.begin(), r.injected.end(), true)) / 10000.0;
    EXPECT_NEAR(rate, 0.8, 0.02);
}

TEST(Synthetic, HalfProbabilityIndependentOfLabel) {
    std::vector<WordSample> words;
    for (int i = 0; i < 10000; ++i) words.push_back(sample(U"abc", i % 2 ? "Sing" : "Plur"));
    SyntheticConfig cfg;
    cfg.p_syn = 0.5;
    Rng rng(3);
    const auto r = inject_synthetic(words, cfg, rng);
    double table[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < words.size(); ++i) table[cfg.is_positive(words[i])][r.injected[i]] += 1.0;
    const double n = 10000.0;
    double chi2 = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double expected = (table[a][0] + table[a][1]) * (table[0][b] + table[1][b]) / n;
            chi2 += (table[a][b] - expected) * (table[a][b] - expected) / expected;
        }
    }
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(1.0), chi2));
    EXPECT_GT(p, 0.01);
}

TEST(Synthetic, Errors) {
    std::vector<WordSample> words{sample(U"abc", "Sing")};
    SyntheticConfig cfg;
    Rng rng(1);
    cfg.p_syn = 1.5;
    EXPECT_THROW(inject_synthetic(words, cfg, rng), std::invalid_argument);
    cfg.p_syn = 1.0;
    words[0].surface = std::u32string(1, cfg.symbol);
    EXPECT_THROW(inject_synthetic(words, cfg, rng), std::invalid_argument);
}

TEST(ToyCorpus, SuffixAnnotationByConstruction) {
    const auto rules = ToyRuleset::parse(std::string("rule\ts\tNumber=Plur\t1\nrule\t-\tNumber=Sing\t1\n"));
    Rng rng(5);
    const auto c = generate_toy_corpus(rules, 200, rng);
    std::size_t plural = 0;
    for (std::size_t i = 0; i < c.samples.size(); ++i) plural += c.samples[i].label("Number") == "Plur";
    ASSERT_EQ(c.annotations.size(), plural);
    for (const auto& a : c.annotations) {
        EXPECT_EQ(a.value, "Plur");
        ASSERT_EQ(a.index_set.size(), 1u);
        EXPECT_EQ(a.index_set[0], a.surface.size() - 1);
        EXPECT_EQ(a.surface.back(), U's');
    }
}

TEST(ToyCorpus, LabelDistributionMatchesWeights) {
    const auto rules = ToyRuleset::parse(std::string("rule\ta\tGender=Fem\t3\nrule\to\tGender=Masc\t1\n"));
    Rng rng(6);
    const auto c = generate_toy_corpus(rules, 1000, rng);
    const double fem = static_cast<double>(std::count_if(c.samples.begin(), c.samples.end(),
                                                         [](const WordSample& w) { return w.label("Gender") == "Fem"; }));
    const double p = 0.75, sd = std::sqrt(1000.0 * p * (1 - p));
    EXPECT_LE(std::abs(fem - 1000.0 * p), 3.0 * sd);
}

TEST(ToyCorpus, DeterministicUnderSeed) {
    const auto rules = ToyRuleset::parse(std::string("rule\ta\tGender=Fem\t1\nrule\to\tGender=Masc\t1\n"));
    Rng a(9), b(9);
    const auto x = generate_toy_corpus(rules, 300, a);
    const auto y = generate_toy_corpus(rules, 300, b);
    EXPECT_EQ(x.samples, y.samples);
    EXPECT_EQ(x.annotations, y.annotations);
}

TEST(ToyCorpus, EmptyRulesetRejected) {
    Rng rng(1);
    EXPECT_THROW(generate_toy_corpus(ToyRuleset{}, 10, rng), std::invalid_argument);
}

TEST(ToyCorpus, AnnotationsAddressRealCharacters) {
    const auto rules = ToyRuleset::parse(std::string("rule\tas\tNumber=Plur\t1\nrule\ta\tNumber=Sing\t1\n"));
    const auto s = make_toy_splits(rules, 500, 3);
    for (const auto& a : s.test_annotations) {
        ASSERT_FALSE(a.index_set.empty());
        for (std::size_t p : a.index_set) EXPECT_LT(p, a.surface.size());
    }
}
