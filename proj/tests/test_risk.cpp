#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gasplan/risk.hpp"

using namespace gasplan;

namespace {

// Composite-Simpson integration of the standard normal density in long
// double; slow but plenty accurate for an oracle.
long double phi(long double t) {
    const long double inv_sqrt2pi = 0.39894228040143267793994605993438L;
    return inv_sqrt2pi * std::exp(-0.5L * t * t);
}

double cdf_oracle(double z) {
    long double a = 0.0L, b = std::fabs(static_cast<long double>(z));
    const int n = 200000; // even
    long double h = (b - a) / n;
    long double s = phi(a) + phi(b);
    for (int i = 1; i < n; ++i) s += phi(a + h * i) * (i % 2 ? 4.0L : 2.0L);
    long double integral = s * h / 3.0L;
    long double res = z >= 0 ? 0.5L + integral : 0.5L - integral;
    return static_cast<double>(res);
}

} // namespace

TEST_CASE("normal_cdf matches numerical integration to 1e-10 on [-8, 8]") {
    for (int i = -80; i <= 80; ++i) {
        double z = i / 10.0;
        CHECK(std::fabs(normal_cdf(z) - cdf_oracle(z)) < 1e-10);
    }
    CHECK(normal_cdf(0.0) == 0.5); // exact, the q = 0.5 proposition needs it
}

TEST_CASE("normal_cdf known values") {
    CHECK(normal_cdf(-2.0) == Catch::Approx(0.0227501319).margin(1e-9));
    CHECK(normal_cdf(1.959963984540054) == Catch::Approx(0.975).margin(1e-12));
}

namespace {

ForecastResult fr(const std::string& id, std::vector<double> mean, std::vector<double> var) {
    ForecastResult r;
    r.meter_id = id;
    r.start = Day{0};
    r.mean = std::move(mean);
    r.variance = std::move(var);
    return r;
}

Customer simple_customer(const std::string& id, std::vector<std::string> meters) {
    Customer c;
    c.customer_id = id;
    c.meters = std::move(meters);
    c.cylinder_count = 1;
    c.cylinder_capacity = 20.0;
    return c;
}

} // namespace

TEST_CASE("aggregate prefix-sums means and variances across meters") {
    std::map<std::string, ForecastResult> f;
    f["m1"] = fr("m1", {1.0, 1.0}, {0.25, 0.25});
    auto c = simple_customer("c", {"m1"});
    auto d = aggregate(c, f);
    CHECK(d.cum_mean == std::vector<double>{1.0, 2.0});
    CHECK(d.cum_var == std::vector<double>{0.25, 0.5});

    f["m2"] = fr("m2", {1.0, 1.0}, {0.25, 0.25});
    auto c2 = simple_customer("c2", {"m1", "m2"});
    auto d2 = aggregate(c2, f);
    CHECK(d2.cum_mean == std::vector<double>{2.0, 4.0});
    CHECK(d2.cum_var == std::vector<double>{0.5, 1.0});
}

TEST_CASE("aggregate equals a brute-force double loop on random inputs") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::map<std::string, ForecastResult> f;
    std::vector<std::string> ids{"a", "b", "c"};
    int n_f = 5;
    for (const auto& id : ids) {
        std::vector<double> mean, var;
        for (int i = 0; i < n_f; ++i) {
            mean.push_back(u(rng));
            var.push_back(u(rng));
        }
        f[id] = fr(id, mean, var);
    }
    auto c = simple_customer("c", ids);
    auto d = aggregate(c, f);
    for (int i = 0; i < n_f; ++i) {
        double em = 0, ev = 0;
        for (const auto& id : ids)
            for (int j = 0; j <= i; ++j) {
                em += f[id].mean[static_cast<std::size_t>(j)];
                ev += f[id].variance[static_cast<std::size_t>(j)];
            }
        CHECK(d.cum_mean[static_cast<std::size_t>(i)] == Catch::Approx(em));
        CHECK(d.cum_var[static_cast<std::size_t>(i)] == Catch::Approx(ev));
    }
    CHECK_THROWS_AS(aggregate(simple_customer("x", {"missing"}), f), MissingForecastError);
}

TEST_CASE("shortage probability boundary and degenerate cases") {
    CustomerDistribution d;
    d.cum_mean = {3.0, 5.0};
    d.cum_var = {1.0, 0.0};
    // mean equals threshold with positive variance -> exactly one half
    CHECK(shortage_probability(d, 3.0, 0.0, 0) == 0.5);
    // degenerate: zero variance steps at the threshold
    CHECK(shortage_probability(d, 6.0, 0.0, 1) == 0.0);
    CHECK(shortage_probability(d, 5.0, 0.0, 1) == 1.0);
    CHECK(shortage_probability(d, 4.9, 0.0, 1) == 1.0);
    // mean 3, sd 1, threshold 5: P(Z >= 2)
    CHECK(shortage_probability(d, 5.0, 0.0, 0) == Catch::Approx(0.0227501319).margin(1e-9));
}

TEST_CASE("availability shift walks the calendar") {
    auto always = [](Day) { return true; };
    CHECK(availability_shift(always, Day{0}, 3) == 3);
    // The two days after D0+n_f are unavailable.
    auto blocked = [](Day d) { return d != Day{4} && d != Day{5}; };
    CHECK(availability_shift(blocked, Day{0}, 3) == 5);
    auto never = [](Day) { return false; };
    CHECK_THROWS_AS(availability_shift(never, Day{0}, 3), NoAvailableDateError);
}

TEST_CASE("categorize: thresholds, boundary, lookback") {
    // Boundary: r == q_high counts as high.
    auto cat = categorize({0.9}, {0.0}, 0.9, 0.1, 0);
    CHECK(cat[0] == RiskCategory::high);
    // All zero -> low everywhere.
    auto low = categorize({0, 0, 0}, {0, 0, 0}, 0.9, 0.1, 0);
    for (auto c : low) CHECK(c == RiskCategory::low);
    // Turns high on day 3 with D_lbd = 3 -> moderate on days 0..2.
    auto lb = categorize({0, 0, 0, 1.0}, {0, 0, 0, 0}, 0.9, 0.1, 3);
    CHECK(lb[0] == RiskCategory::moderate);
    CHECK(lb[1] == RiskCategory::moderate);
    CHECK(lb[2] == RiskCategory::moderate);
    CHECK(lb[3] == RiskCategory::high);
    // Without lookback those days stay low.
    auto nolb = categorize({0, 0, 0, 1.0}, {0, 0, 0, 0}, 0.9, 0.1, 0);
    CHECK(nolb[0] == RiskCategory::low);
    // high and moderate never overlap
    auto mix = categorize({0.95, 0.2}, {0.9, 0.9}, 0.9, 0.1, 0);
    CHECK(mix[0] == RiskCategory::high);
    CHECK(mix[1] == RiskCategory::moderate);
}

TEST_CASE("proposition: q = 0.5 reduces to a mean comparison") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_int_distribution<int> exact(0, 4);
    int boundary_cases = 0;
    for (int rep = 0; rep < 1100; ++rep) {
        CustomerDistribution d;
        int n = 4;
        double m = 0;
        for (int i = 0; i < n; ++i) {
            m += u(rng);
            d.cum_mean.push_back(m);
            d.cum_var.push_back(u(rng) * (rep % 7 == 0 ? 0.0 : 1.0));
        }
        double remaining = u(rng) * 2.0;
        if (exact(rng) == 0) {
            // Force an exact boundary on a random day.
            remaining = d.cum_mean[static_cast<std::size_t>(exact(rng)) % static_cast<std::size_t>(n)];
            ++boundary_cases;
        }
        for (int j = 0; j < n; ++j) {
            double r = shortage_probability(d, remaining, 0.0, j);
            bool is_high = r >= 0.5;
            bool mean_rule = d.cum_mean[static_cast<std::size_t>(j)] >= remaining;
            CHECK(is_high == mean_rule);
        }
    }
    CHECK(boundary_cases > 50);
}

TEST_CASE("scaling both sides by a positive factor keeps categories") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        double scale = u(rng) * 3.0;
        CustomerDistribution d1, d2;
        double m = 0, v = 0;
        for (int i = 0; i < 3; ++i) {
            m += u(rng);
            v += u(rng);
            d1.cum_mean.push_back(m);
            d1.cum_var.push_back(v);
            d2.cum_mean.push_back(m * scale);
            d2.cum_var.push_back(v * scale * scale); // sd scales linearly
        }
        double thr = u(rng) * 4.0;
        for (int j = 0; j < 3; ++j) {
            double p1 = shortage_probability(d1, thr, 0.0, j);
            double p2 = shortage_probability(d2, thr * scale, 0.0, j);
            CHECK(p1 == Catch::Approx(p2).margin(1e-12));
        }
    }
}

TEST_CASE("probability is non-decreasing in the day index for fixed variance") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int rep = 0; rep < 100; ++rep) {
        CustomerDistribution d;
        double m = 0;
        for (int i = 0; i < 6; ++i) {
            m += u(rng);
            d.cum_mean.push_back(m);
            d.cum_var.push_back(2.0); // held fixed
        }
        double s = u(rng) * 6.0;
        double prev = 0.0;
        for (int j = 0; j < 6; ++j) {
            double p = shortage_probability(d, s, 0.0, j);
            CHECK(p >= prev - 1e-15);
            prev = p;
        }
    }
}

TEST_CASE("estimate_remaining subtracts usage since the reference day") {
    Customer c = simple_customer("c", {"m"});
    c.remaining_gas = 10.0;
    c.reference_day = Day{5};
    std::map<std::string, std::map<Day, double>> du;
    for (int d = 0; d < 12; ++d) du["m"][Day{d}] = 1.0;
    CHECK(estimate_remaining(c, du, Day{9}) == Catch::Approx(6.0)); // days 5..8
    CHECK(estimate_remaining(c, du, Day{5}) == Catch::Approx(10.0));
}

TEST_CASE("assess wires shift, thresholds and lookback together") {
    Hyperparams hp; // alpha_high 0, q_high 0.9, alpha_mdr 5%, q_mdr 0.1, D_lbd 3
    Customer c = simple_customer("c", {});
    c.cylinder_capacity = 10.0;
    CustomerDistribution d;
    // One unit a day, tiny variance.
    for (int i = 1; i <= 9; ++i) {
        d.cum_mean.push_back(static_cast<double>(i));
        d.cum_var.push_back(0.01);
    }
    auto always = [](Day) { return true; };
    double remaining = 4.5; // exhausted during day 4 (cum 5 > 4.5)
    auto a = assess(c, d, remaining, hp, always, Day{0}, 4);
    REQUIRE(a.r_high.size() == 4);
    // Slot j is assessed at cumulative index j+1: out by the next opportunity.
    CHECK(a.shifted_index == std::vector<int>{1, 2, 3, 4});
    // Slot means are 2, 3, 4, 5 against threshold 4.5 at sd 0.1.
    CHECK(a.r_high[3] > 0.99);
    CHECK(a.category[3] == RiskCategory::high);
    CHECK(a.category[2] == RiskCategory::moderate); // r_mdr at threshold 4.0 is 0.5 >= 0.1
    CHECK(a.category[1] == RiskCategory::moderate); // lookback promotion from slot 3
    CHECK(a.category[0] == RiskCategory::moderate); // lookback promotion from slot 3
}
