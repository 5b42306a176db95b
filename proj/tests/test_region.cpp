// SPDX-License-Identifier: Apache-2.0
//
// csiregion - joint uplink/downlink rate regions under imperfect CSI
// Copyright (C) 2026 csiregion contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include "csiregion/numerics.hpp"
#include "csiregion/region.hpp"
#include "oracles.hpp"

using namespace csiregion;
using namespace csiregion::region;

namespace {

RatePoint make_point(double net_ul, double net_dl, const std::string& ul = "a",
                     double n_b = 0.0, double rho_dl = 0.01) {
    RatePoint p;
    p.params.ul_pattern = ul;
    p.params.dl_pattern = "d";
    p.params.n_b = n_b;
    p.params.rho_dl = rho_dl;
    p.params.dl_mode = DlMode::Spatial;
    p.net_ul = net_ul;
    p.net_dl = net_dl;
    p.gross_ul = net_ul;
    p.gross_dl = net_dl;
    return p;
}

config::SystemConfig small_system() {
    config::SystemConfig sys;
    sys.n_bs = 2;
    sys.k = 2;
    sys.profile.set_velocity_kmh(10.0);
    return sys;
}

} // namespace

TEST_CASE("net rate accounting") {
    const channel::PrbGeometry geom;
    OperatingParams params;
    params.dl_mode = DlMode::Spatial;

    SECTION("no overhead, no change") {
        params.n_b = 0.0;
        params.rho_ul = 0.0;
        params.rho_dl = 0.0;
        const NetRates net = net_rates(3.0, 2.0, params, geom, 4, 4);
        CHECK(net.ul == 3.0);
        CHECK(net.dl == 2.0);
    }
    SECTION("reference fixed point") {
        params.n_b = 12.0;
        params.rho_ul = 3.0 / 168.0;
        const NetRates net = net_rates(4.0, 0.0, params, geom, 4, 4);
        CHECK(net.ul == Catch::Approx(2.5714).margin(1e-4));
        CHECK(net.ul == Catch::Approx(432.0 / 168.0).margin(1e-12));
    }
    SECTION("TDM overhead is a single stream") {
        params.dl_mode = DlMode::Tdm;
        params.rho_dl = 0.1;
        const NetRates net = net_rates(0.0, 2.0, params, geom, 4, 4);
        CHECK(net.dl == Catch::Approx(1.8));
    }
    SECTION("exact linear slope in the bit budget") {
        params.dl_mode = DlMode::Spatial;
        params.rho_ul = 0.0;
        const channel::PrbGeometry g;
        double prev = 0.0;
        for (double nb = 0.0; nb <= 10.0; nb += 1.0) {
            params.n_b = nb;
            const NetRates net = net_rates(10.0, 0.0, params, g, 4, 4);
            if (nb > 0.0)
                CHECK(prev - net.ul == Catch::Approx(16.0 / 168.0).margin(1e-12));
            prev = net.ul;
        }
    }
    SECTION("negative uplink clamps to zero") {
        params.n_b = 1000.0;
        const NetRates net = net_rates(0.5, 0.0, params, geom, 4, 4);
        CHECK(net.ul == 0.0);
    }
    SECTION("auto mode is rejected") {
        params.dl_mode = DlMode::Auto;
        CHECK_THROWS_AS(net_rates(1.0, 1.0, params, geom, 4, 4), std::invalid_argument);
    }
}

TEST_CASE("lookup table build and serialization") {
    config::SystemConfig sys = small_system();
    const auto catalog = pilots::default_catalog(sys.geometry);
    const std::vector<pilots::PilotPattern> ul = {catalog[2]};
    const std::vector<pilots::PilotPattern> dl = {catalog[3]};

    SECTION("single node matches direct module calls") {
        const LookupTable t =
            build_lookup(sys, ul, dl, {8.0}, {10.0}, {1.0}, 1);
        REQUIRE(t.values.size() == 1);
        const auto& q = t.values[0];

        const auto mse_ul =
            estimation::estimation_mse(sys.geometry, sys.profile, ul[0], 0.1, 0);
        CHECK(q.sigma_ul_bs == estimation::noise_ratio(mse_ul, 1.0).sigma_sq);
        const auto mse_dl =
            estimation::estimation_mse(sys.geometry, sys.profile, dl[0], 0.1, 0);
        CHECK(q.sigma_dl_ut == estimation::noise_ratio(mse_dl, 1.0).sigma_sq);
        CHECK(q.sigma_dl_ut_tdm == q.sigma_dl_ut);

        feedback::FeedbackConfig fb = sys.fb;
        fb.bits_per_coeff = 8.0;
        const auto csit = feedback::csit_mse(sys.geometry, sys.profile, dl[0], 0.1, fb);
        CHECK(q.sigma_dl_bs == feedback::csit_noise_ratio(csit, mse_dl, 1.0));
    }
    SECTION("sigma_dl_bs is nonincreasing along the bit axis") {
        const LookupTable t = build_lookup(sys, ul, dl, {0, 4, 8, 12, 16, 20, 24},
                                           {30.0}, {1.0}, 2);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < t.n_b.size(); ++c) {
            const double s = t.values[t.flat_index(0, 0, c, 0, 0)].sigma_dl_bs;
            CHECK(s <= prev + 1e-9);
            prev = s;
        }
    }
    SECTION("no feedback at high velocity hits the ceiling") {
        const LookupTable t = build_lookup(sys, ul, dl, {0.0}, {300.0}, {1.0}, 1);
        CHECK(t.values[0].sigma_dl_bs == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("json round trip") {
        const LookupTable t =
            build_lookup(sys, ul, dl, {0.0, 8.0}, {10.0, 50.0}, {1.0}, 2);
        const LookupTable back = LookupTable::from_json(t.to_json());
        REQUIRE(back.values.size() == t.values.size());
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            CHECK(back.values[i].sigma_ul_bs == t.values[i].sigma_ul_bs);
            CHECK(back.values[i].sigma_dl_bs == t.values[i].sigma_dl_bs);
        }
        CHECK(back.n_b == t.n_b);
    }
    SECTION("incomplete grids are rejected") {
        const LookupTable t = build_lookup(sys, ul, dl, {0.0, 8.0}, {10.0}, {1.0}, 1);
        auto doc = nlohmann::json::parse(t.to_json());
        doc["values"].erase(0);
        CHECK_THROWS_AS(LookupTable::from_json(doc.dump()), std::invalid_argument);
    }
}

TEST_CASE("sweep basics") {
    config::SystemConfig sys = small_system();
    const auto catalog = pilots::default_catalog(sys.geometry);
    const std::vector<pilots::PilotPattern> ul = {catalog[2]};
    const std::vector<pilots::PilotPattern> dl = {catalog[2]};
    const std::vector<double> n_b = {8.0};
    const LookupTable t = build_lookup(sys, ul, dl, n_b, {10.0}, {1.0}, 2);

    SECTION("both modes on a unit grid give two points") {
        const auto points = sweep(sys, ul, dl, n_b, t, DlMode::Auto, 4, 7, 1);
        REQUIRE(points.size() == 2);
        CHECK(points[0].params.dl_mode == DlMode::Spatial);
        CHECK(points[1].params.dl_mode == DlMode::Tdm);
        CHECK(points[0].realization_count == 4);
    }
    SECTION("cardinality is the grid product") {
        const std::vector<pilots::PilotPattern> dl2 = {catalog[1], catalog[3]};
        const auto points =
            sweep(sys, ul, dl2, {0.0, 8.0}, build_lookup(sys, ul, dl2, {0.0, 8.0}, {10.0},
                                                         {1.0}, 2),
                  DlMode::Auto, 2, 7, 2);
        CHECK(points.size() == 1 * 2 * 2 * 2);
        for (const auto& p : points) {
            CHECK((p.params.n_b == 0.0 || p.params.n_b == 8.0));
            CHECK((p.params.dl_pattern == catalog[1].id || p.params.dl_pattern == catalog[3].id));
        }
    }
    SECTION("deterministic across worker counts and runs") {
        const auto a = sweep(sys, ul, dl, n_b, t, DlMode::Auto, 6, 13, 1);
        const auto b = sweep(sys, ul, dl, n_b, t, DlMode::Auto, 6, 13, 4);
        const auto c = sweep(sys, ul, dl, n_b, t, DlMode::Auto, 6, 13, 1);
        REQUIRE(a.size() == b.size());
        CHECK(to_csv(a) == to_csv(b));
        CHECK(to_csv(a) == to_csv(c));
    }
    SECTION("evaluate_operating_point matches the swept value") {
        const auto points = sweep(sys, ul, dl, n_b, t, DlMode::Spatial, 5, 21, 1);
        REQUIRE(points.size() == 1);
        const RatePoint direct =
            evaluate_operating_point(sys, points[0].params, t, 5, 21);
        CHECK(direct.gross_ul == points[0].gross_ul);
        CHECK(direct.gross_dl == points[0].gross_dl);
        CHECK(direct.net_ul == points[0].net_ul);
        CHECK(direct.net_dl == points[0].net_dl);
    }
    SECTION("one realization equals the direct single-draw computation") {
        OperatingParams params;
        params.ul_pattern = ul[0].id;
        params.dl_pattern = dl[0].id;
        params.rho_ul = ul[0].density();
        params.rho_dl = dl[0].density();
        params.n_b = 8.0;
        params.dl_mode = DlMode::Spatial;
        const RatePoint point = evaluate_operating_point(sys, params, t, 1, 33);

        const auto& q = t.values[0];
        const auto draw = channel::sample_flat_channels(sys.n_bs, sys.k, 1, 33,
                                                        sys.profile.coeff_variance);
        const double ul_direct =
            capacity::ul_sum_rate(
                capacity::ul_effective_params(draw[0].h_ul, 1.0, q.sigma_ul_bs), 0.1, 1.0)
                .rate;
        const double dl_direct =
            capacity::dl_sum_rate(capacity::dl_effective_params(draw[0].h_dl, 1.0,
                                                                q.sigma_dl_ut, q.sigma_dl_bs),
                                  0.1, 1.0)
                .rate;
        CHECK(point.gross_ul == ul_direct);
        CHECK(point.gross_dl == dl_direct);
        CHECK(point.realization_count == 1);
    }
}

TEST_CASE("pareto frontier") {
    SECTION("mutually nondominated points all stay") {
        const std::vector<RatePoint> pts = {make_point(1, 1, "a"), make_point(2, 0.5, "b"),
                                            make_point(0.5, 2, "c")};
        CHECK(pareto_frontier(pts).size() == 3);
    }
    SECTION("dominated point drops") {
        const std::vector<RatePoint> pts = {make_point(1, 1, "a"), make_point(2, 2, "b")};
        const auto f = pareto_frontier(pts);
        REQUIRE(f.size() == 1);
        CHECK(f[0] == 1);
    }
    SECTION("random sets match the brute-force oracle") {
        numerics::NormalStream stream(17);
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<RatePoint> pts;
            for (int i = 0; i < 100; ++i)
                pts.push_back(make_point(std::abs(stream.next_normal()),
                                         std::abs(stream.next_normal()),
                                         "p" + std::to_string(i)));
            auto fast = pareto_frontier(pts);
            auto slow = oracles::pareto_bruteforce(pts);
            std::sort(slow.begin(), slow.end());
            CHECK(fast == slow);
        }
    }
    SECTION("duplicates keep the smallest id") {
        const std::vector<RatePoint> pts = {make_point(1, 1, "b"), make_point(1, 1, "a")};
        const auto f = pareto_frontier(pts);
        REQUIRE(f.size() == 1);
        CHECK(pts[f[0]].params.ul_pattern == "a");
    }
    SECTION("frontier is invariant under duplication") {
        std::vector<RatePoint> pts = {make_point(1, 2, "a"), make_point(2, 1, "b")};
        auto base = pareto_frontier(pts);
        std::vector<RatePoint> doubled = pts;
        doubled.insert(doubled.end(), pts.begin(), pts.end());
        const auto dup = pareto_frontier(doubled);
        // same coordinates survive, one copy each
        CHECK(dup.size() == base.size());
    }
}

TEST_CASE("convex region") {
    SECTION("single point expands to the time-sharing triangle") {
        const std::vector<RatePoint> pts = {make_point(3, 2, "a")};
        const auto hull = convex_region(pts);
        REQUIRE(hull.size() == 3);
        CHECK(hull[0].net_ul == 0.0);
        CHECK(hull[0].net_dl == 2.0);
        CHECK(hull[1].net_ul == 3.0);
        CHECK(hull[1].net_dl == 2.0);
        CHECK(hull[2].net_ul == 3.0);
        CHECK(hull[2].net_dl == 0.0);
        CHECK(hull[1].point_index.has_value());
    }
    SECTION("collinear middle point is dropped") {
        const std::vector<RatePoint> pts = {make_point(0, 2, "a"), make_point(1, 1, "b"),
                                            make_point(2, 0, "c")};
        const auto hull = convex_region(pts);
        for (const auto& v : hull)
            CHECK(!(v.net_ul == 1.0 && v.net_dl == 1.0));
    }
    SECTION("every input point lies on or below the hull") {
        numerics::NormalStream stream(23);
        for (int rep = 0; rep < 6; ++rep) {
            std::vector<RatePoint> pts;
            for (int i = 0; i < 60; ++i)
                pts.push_back(make_point(std::abs(stream.next_normal()),
                                         std::abs(stream.next_normal()),
                                         "p" + std::to_string(i)));
            const auto hull = convex_region(pts);
            REQUIRE(hull.size() >= 2);
            for (const auto& p : pts) {
                for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
                    const auto& a = hull[s];
                    const auto& b = hull[s + 1];
                    if (p.net_ul < std::min(a.net_ul, b.net_ul) ||
                        p.net_ul > std::max(a.net_ul, b.net_ul))
                        continue;
                    const double cross = (b.net_ul - a.net_ul) * (p.net_dl - a.net_dl) -
                                         (b.net_dl - a.net_dl) * (p.net_ul - a.net_ul);
                    CHECK(cross <= 1e-9);
                }
            }
        }
    }
    SECTION("hull vertices come from the frontier or the axis anchors") {
        numerics::NormalStream stream(31);
        std::vector<RatePoint> pts;
        for (int i = 0; i < 50; ++i)
            pts.push_back(make_point(std::abs(stream.next_normal()),
                                     std::abs(stream.next_normal()),
                                     "p" + std::to_string(i)));
        const auto frontier = pareto_frontier(pts);
        for (const auto& v : convex_region(pts)) {
            if (v.point_index) {
                CHECK(std::find(frontier.begin(), frontier.end(), *v.point_index) !=
                      frontier.end());
            } else {
                CHECK((v.net_ul == 0.0 || v.net_dl == 0.0));
            }
        }
    }
    SECTION("hull never loses to raw points under any weight") {
        numerics::NormalStream stream(29);
        std::vector<RatePoint> pts;
        for (int i = 0; i < 40; ++i)
            pts.push_back(make_point(std::abs(stream.next_normal()),
                                     std::abs(stream.next_normal()),
                                     "p" + std::to_string(i)));
        const auto hull = convex_region(pts);
        for (double w : {0.0, 0.3, 0.5, 0.8, 1.0}) {
            const auto& best = pts[weighted_optimum(pts, w)];
            const double raw = w * best.net_ul + (1 - w) * best.net_dl;
            double best_hull = 0.0;
            for (const auto& v : hull)
                best_hull = std::max(best_hull, w * v.net_ul + (1 - w) * v.net_dl);
            CHECK(best_hull >= raw - 1e-12);
        }
    }
}

TEST_CASE("weighted optimum") {
    std::vector<RatePoint> pts = {make_point(3, 1, "a", 4.0), make_point(1, 3, "b", 8.0),
                                  make_point(2, 2, "c", 2.0)};
    CHECK(pts[weighted_optimum(pts, 1.0)].params.ul_pattern == "a");
    CHECK(pts[weighted_optimum(pts, 0.0)].params.ul_pattern == "b");

    SECTION("equal objective falls back to fewer bits") {
        std::vector<RatePoint> tie = {make_point(2, 2, "x", 8.0), make_point(2, 2, "y", 4.0)};
        CHECK(tie[weighted_optimum(tie, 0.5)].params.n_b == 4.0);
    }
    SECTION("weight bounds are validated") {
        CHECK_THROWS_AS(weighted_optimum(pts, 1.5), std::invalid_argument);
    }
}

TEST_CASE("csv output") {
    const std::vector<RatePoint> pts = {make_point(1.5, 0.25, "ulp", 6.0, 0.125)};
    const std::string csv = to_csv(pts);
    CHECK(csv.find("ul_pattern,dl_pattern,rho_ul,rho_dl,n_b,dl_mode,feedback_mode,"
                   "gross_ul,gross_dl,net_ul,net_dl,pareto,hull\n") == 0);
    CHECK(csv.find("ulp,d,0,0.125,6,spatial,redundant,1.5,0.25,1.5,0.25,0,0\n") !=
          std::string::npos);
}
