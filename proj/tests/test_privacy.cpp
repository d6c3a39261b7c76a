#include <catch2/catch_amalgamated.hpp>

#include "tspir/privacy.hpp"

using namespace tspir;

TEST_CASE("query-only views of a non-colluding server are uniform") {
    SchemeParams p = SchemeParams::create(2, 1, 1, 2, 3);
    DistTable dt = enumerate_views(p, 1, {2}, false);
    CHECK(dt.outcomes.size() == 9);  // F_3^2
    for (const auto& [o, pr] : dt.outcomes) {
        CHECK(o.size() == 2);
        CHECK(pr == Rational(1, 9));
    }
    CHECK(dt.total() == Rational(1));
}

TEST_CASE("empty subset views are the unit distribution") {
    SchemeParams p = SchemeParams::create(2, 1, 1, 2, 3);
    DistTable dt = enumerate_views(p, 1, {}, true);
    REQUIRE(dt.outcomes.size() == 1);
    CHECK(dt.outcomes.begin()->first.empty());
    CHECK(dt.outcomes.begin()->second == Rational(1));
}

TEST_CASE("query-only pair views on the four-server config are uniform") {
    SchemeParams p = SchemeParams::create(4, 2, 2, 2, 5);
    DistTable dt = enumerate_views(p, 1, {2, 4}, false);  // 5^8 events
    CHECK(dt.outcomes.size() == 390625);
    Rational want(1, 390625);
    for (const auto& [o, pr] : dt.outcomes) CHECK(pr == want);
}

TEST_CASE("full views sum to one and respect the ceiling") {
    SchemeParams p = SchemeParams::create(2, 1, 1, 2, 3);
    DistTable dt = enumerate_views(p, 2, {1}, true);
    CHECK(dt.total() == Rational(1));
    CHECK_THROWS_AS(enumerate_views(p, 1, {1}, true, 10), EnumerationTooLarge);
    CHECK_THROWS_AS(enumerate_views(p, 3, {1}, true), InvalidParams);
    CHECK_THROWS_AS(enumerate_views(p, 1, {1, 1}, true), InvalidParams);
    CHECK_THROWS_AS(enumerate_views(p, 1, {0}, true), InvalidParams);
}

TEST_CASE("independence verdict on tiny hand-built tables") {
    DistTable product;
    for (Felem x = 0; x < 2; ++x)
        for (Felem y = 0; y < 2; ++y) product.outcomes[{x, y}] = Rational(1, 4);
    IndependenceResult ok = independence_verdict(product, 1);
    CHECK(ok.independent);
    CHECK(ok.mi_bits == 0.0);

    DistTable copy;  // y = x, one shared fair bit
    copy.outcomes[{0, 0}] = Rational(1, 2);
    copy.outcomes[{1, 1}] = Rational(1, 2);
    IndependenceResult bad = independence_verdict(copy, 1);
    CHECK_FALSE(bad.independent);
    CHECK(bad.mi_bits == Catch::Approx(1.0));
    REQUIRE(bad.witness.has_value());
}

TEST_CASE("user privacy holds exhaustively on the micro config") {
    SchemeParams p = SchemeParams::create(2, 1, 1, 2, 3);
    PrivacyReport rep = verify_user_privacy(p, AuditMode::exhaustive);
    CHECK(rep.pass);
    // 2 colluding sets x 2 indexes x 3^5 events
    CHECK(rep.enumeration_size == 4 * 243);
}

TEST_CASE("user privacy holds on every small config, both audit modes") {
    for (auto [n, m, t] : {std::array<unsigned, 3>{2, 1, 1}, {3, 1, 1}, {3, 1, 2}, {3, 2, 1}}) {
        std::uint32_t q = n + 1;
        while (!PrimeField::is_prime(q)) ++q;
        SchemeParams p = SchemeParams::create(n, m, t, 2, q);
        CAPTURE(n, m, t);
        PrivacyReport ex = verify_user_privacy(p, AuditMode::exhaustive);
        PrivacyReport st = verify_user_privacy(p, AuditMode::structural);
        CHECK(ex.pass);
        CHECK(st.pass);
    }
}

TEST_CASE("user privacy falls back to exact query marginals when the view space is huge") {
    SchemeParams p = SchemeParams::create(4, 2, 2, 2, 5);
    PrivacyReport rep = verify_user_privacy(p, AuditMode::exhaustive);
    CHECK(rep.pass);
    CHECK(rep.detail.find("query-marginal") != std::string::npos);
    // 6 colluding pairs x 2 indexes x 5^8 query events
    CHECK(rep.enumeration_size == 12u * 390625);
}

TEST_CASE("pinned user randomness is caught by the user-privacy audit") {
    for (auto [n, m, t, q] : {std::array<unsigned, 4>{2, 1, 1, 3}, {3, 1, 2, 5}, {4, 2, 2, 5}}) {
        SchemeParams p = SchemeParams::create(n, m, t, 2, q);
        CAPTURE(n, m, t);
        PrivacyReport rep = verify_user_privacy(p, AuditMode::exhaustive, Mutant::no_randomization);
        CHECK_FALSE(rep.pass);
        REQUIRE(rep.witness.has_value());
        CHECK(rep.mutual_information_bits > 0.0);
    }
}

TEST_CASE("structural audit rejects a defective query code") {
    SchemeParams p = SchemeParams::create(3, 1, 2, 2, 5);
    p.query_code.generator.at(1, 0) = p.query_code.generator.at(1, 1);  // two equal columns
    p.query_code.generator.at(0, 0) = p.query_code.generator.at(0, 1);
    PrivacyReport rep = verify_user_privacy(p, AuditMode::structural);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("user privacy throws when even the marginal space is too big") {
    SchemeParams p = SchemeParams::create(4, 2, 2, 2, 5);
    CHECK_THROWS_AS(verify_user_privacy(p, AuditMode::exhaustive, Mutant::none, 100),
                    EnumerationTooLarge);
}

TEST_CASE("database privacy holds on enumerable configs") {
    SchemeParams micro = SchemeParams::create(2, 1, 1, 2, 3);
    PrivacyReport rep = verify_database_privacy(micro);
    CHECK(rep.pass);
    CHECK(rep.enumeration_size == 2 * 243);  // per desired index

    SchemeParams p312 = SchemeParams::create(3, 1, 2, 2, 5);
    CHECK(verify_database_privacy(p312).pass);
}

TEST_CASE("missing or short masks are caught by the database-privacy audit") {
    SchemeParams micro = SchemeParams::create(2, 1, 1, 2, 3);
    PrivacyReport no_mask = verify_database_privacy(micro, Mutant::no_mask);
    CHECK_FALSE(no_mask.pass);
    CHECK(no_mask.mutual_information_bits > 0.0);
    REQUIRE(no_mask.witness.has_value());

    SchemeParams p312 = SchemeParams::create(3, 1, 2, 2, 5);
    PrivacyReport short_mask = verify_database_privacy(p312, Mutant::short_mask);
    CHECK_FALSE(short_mask.pass);
    CHECK(short_mask.mutual_information_bits > 0.0);

    PrivacyReport no_mask2 = verify_database_privacy(p312, Mutant::no_mask);
    CHECK_FALSE(no_mask2.pass);
}

TEST_CASE("database privacy is vacuous with a single file") {
    SchemeParams p = SchemeParams::create(2, 1, 1, 1, 3, {}, {}, {}, true);
    PrivacyReport rep = verify_database_privacy(p);
    CHECK(rep.pass);
    CHECK(rep.enumeration_size == 0);
}

TEST_CASE("database privacy respects the enumeration ceiling") {
    SchemeParams p = SchemeParams::create(4, 2, 2, 2, 5);
    CHECK_THROWS_AS(verify_database_privacy(p), EnumerationTooLarge);
}

TEST_CASE("answer entropies are index-symmetric on enumerable configs") {
    SchemeParams micro = SchemeParams::create(2, 1, 1, 2, 3);
    PrivacyReport rep = entropy_symmetry_check(micro);  // |set| = M+T-1 = 1
    CHECK(rep.pass);

    SchemeParams p312 = SchemeParams::create(3, 1, 2, 2, 5);
    PrivacyReport rep2 = entropy_symmetry_check(p312);  // |set| = 2
    CHECK(rep2.pass);

    PrivacyReport rep3 = entropy_symmetry_check(p312, 1);
    CHECK(rep3.pass);

    CHECK_THROWS_AS(entropy_symmetry_check(p312, 9), InvalidParams);
    CHECK_THROWS_AS(entropy_symmetry_check(p312, 2, 100), EnumerationTooLarge);

    SchemeParams single = SchemeParams::create(2, 1, 1, 1, 3, {}, {}, {}, true);
    CHECK(entropy_symmetry_check(single).pass);
}

TEST_CASE("single-node answer entropy given queries is one full symbol") {
    // On the micro config a lone answer is <Q, D> plus a uniform mask symbol,
    // so H(answer | queries) is exactly 1 in log-q units.
    SchemeParams micro = SchemeParams::create(2, 1, 1, 2, 3);
    PrivacyReport rep = entropy_symmetry_check(micro);
    CHECK(rep.pass);
    CHECK(rep.detail.find("= 1 log-q units") != std::string::npos);
}
