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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csiregion/numerics.hpp"
#include "csiregion/region.hpp"

namespace py = pybind11;
using namespace csiregion;

namespace {

py::array_t<std::complex<double>> to_numpy(const arma::cx_mat& m) {
    py::array_t<std::complex<double>> out({m.n_rows, m.n_cols});
    auto r = out.mutable_unchecked<2>();
    for (arma::uword i = 0; i < m.n_rows; ++i)
        for (arma::uword j = 0; j < m.n_cols; ++j)
            r(i, j) = m(i, j);
    return out;
}

py::array_t<double> to_numpy(const arma::vec& v) {
    py::array_t<double> out(v.n_elem);
    auto r = out.mutable_unchecked<1>();
    for (arma::uword i = 0; i < v.n_elem; ++i)
        r(i) = v(i);
    return out;
}

arma::cx_mat to_arma(const py::array_t<std::complex<double>,
                                       py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-D complex array");
    arma::cx_mat m(a.shape(0), a.shape(1));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            m(i, j) = r(i, j);
    return m;
}

arma::mat to_arma_real(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-D real array");
    arma::mat m(a.shape(0), a.shape(1));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            m(i, j) = r(i, j);
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Joint uplink/downlink rate regions under imperfect CSI";

    py::register_exception<NumericFailure>(m, "NumericFailure");
    py::register_exception<UnusableLink>(m, "UnusableLink");

    // numerics
    m.def("bessel_j0", &numerics::bessel_j0, py::arg("x"));
    m.def("si", &numerics::si, py::arg("x"));
    m.def(
        "sample_correlated",
        [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>&
               cov,
           std::size_t count, std::uint64_t seed) {
            return to_numpy(numerics::sample_correlated(to_arma(cov), count, seed));
        },
        py::arg("cov"), py::arg("count"), py::arg("seed"));

    // channel
    py::class_<channel::PrbGeometry>(m, "PrbGeometry")
        .def(py::init<>())
        .def_readwrite("n_symbols", &channel::PrbGeometry::n_symbols)
        .def_readwrite("n_subcarriers", &channel::PrbGeometry::n_subcarriers)
        .def_readwrite("symbol_rate_hz", &channel::PrbGeometry::symbol_rate_hz)
        .def_readwrite("subcarrier_spacing_hz", &channel::PrbGeometry::subcarrier_spacing_hz)
        .def_property_readonly("block_length", &channel::PrbGeometry::block_length);

    py::class_<channel::ChannelProfile>(m, "ChannelProfile")
        .def(py::init<>())
        .def_readwrite("carrier_freq_hz", &channel::ChannelProfile::carrier_freq_hz)
        .def_readwrite("velocity_mps", &channel::ChannelProfile::velocity_mps)
        .def_readwrite("max_delay_spread_s", &channel::ChannelProfile::max_delay_spread_s)
        .def_readwrite("coeff_variance", &channel::ChannelProfile::coeff_variance)
        .def("set_velocity_kmh", &channel::ChannelProfile::set_velocity_kmh)
        .def_property_readonly("doppler_hz", &channel::ChannelProfile::doppler_hz);

    m.def(
        "temporal_correlation",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p, int lag) {
            return to_numpy(arma::cx_mat(temporal_correlation(g, p, lag),
                                         arma::mat(g.n_symbols, g.n_symbols,
                                                   arma::fill::zeros)));
        },
        py::arg("geometry"), py::arg("profile"), py::arg("block_lag"));
    m.def(
        "spectral_correlation",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p) {
            return to_numpy(arma::cx_mat(spectral_correlation(g, p),
                                         arma::mat(g.n_subcarriers, g.n_subcarriers,
                                                   arma::fill::zeros)));
        },
        py::arg("geometry"), py::arg("profile"));
    m.def(
        "prb_covariance",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p, int lag) {
            return to_numpy(channel::prb_covariance(g, p, lag));
        },
        py::arg("geometry"), py::arg("profile"), py::arg("block_lag"));

    // pilots
    py::class_<pilots::PilotPattern>(m, "PilotPattern")
        .def_readonly("id", &pilots::PilotPattern::id)
        .def_readonly("positions", &pilots::PilotPattern::positions)
        .def_property_readonly("n_positions", &pilots::PilotPattern::n_positions)
        .def_property_readonly("density", &pilots::PilotPattern::density);
    m.def("lattice_pattern", &pilots::lattice_pattern, py::arg("geometry"), py::arg("dt"),
          py::arg("df"), py::arg("offset") = std::pair<unsigned, unsigned>{0, 0});
    m.def("default_catalog", &pilots::default_catalog, py::arg("geometry"));
    m.def("catalog_to_json", &pilots::catalog_to_json, py::arg("catalog"));
    m.def(
        "selection_matrix",
        [](const pilots::PilotPattern& p) {
            const arma::mat s = pilots::selection_matrix(p);
            py::array_t<double> out({s.n_rows, s.n_cols});
            auto r = out.mutable_unchecked<2>();
            for (arma::uword i = 0; i < s.n_rows; ++i)
                for (arma::uword j = 0; j < s.n_cols; ++j)
                    r(i, j) = s(i, j);
            return out;
        },
        py::arg("pattern"));

    // estimation
    py::enum_<estimation::Reduction>(m, "Reduction")
        .value("MAX", estimation::Reduction::Max)
        .value("MEAN", estimation::Reduction::Mean);
    m.def(
        "estimation_mse",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p,
           const pilots::PilotPattern& pat, double pilot_noise, int lag) {
            return to_numpy(estimation::estimation_mse(g, p, pat, pilot_noise, lag).values);
        },
        py::arg("geometry"), py::arg("profile"), py::arg("pattern"), py::arg("pilot_noise"),
        py::arg("block_lag"));
    m.def(
        "mmse_filter",
        [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>&
               phi0,
           const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>&
               phi_lag,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
           double pilot_noise) {
            return to_numpy(estimation::mmse_filter(to_arma(phi0), to_arma(phi_lag),
                                                    to_arma_real(s), pilot_noise));
        },
        py::arg("phi0"), py::arg("phi_lag"), py::arg("selection"), py::arg("pilot_noise"));
    m.def(
        "noise_ratio",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mse,
           double coeff_variance, estimation::Reduction reduction) {
            estimation::MsePerSymbol v;
            v.values = arma::vec(mse.size());
            auto r = mse.unchecked();
            for (py::ssize_t i = 0; i < mse.size(); ++i)
                v.values(i) = r[i];
            return estimation::noise_ratio(v, coeff_variance, reduction).sigma_sq;
        },
        py::arg("mse"), py::arg("coeff_variance") = 1.0,
        py::arg("reduction") = estimation::Reduction::Max);
    m.def("cramer_rao_noise", &estimation::cramer_rao_noise, py::arg("pilot_noise"),
          py::arg("n_pilots"), py::arg("pilot_power") = 1.0);

    // feedback
    py::enum_<feedback::FeedbackMode>(m, "FeedbackMode")
        .value("REDUNDANT", feedback::FeedbackMode::Redundant)
        .value("SUCCESSIVE", feedback::FeedbackMode::Successive);
    py::class_<feedback::FeedbackConfig>(m, "FeedbackConfig")
        .def(py::init<>())
        .def_readwrite("bits_per_coeff", &feedback::FeedbackConfig::bits_per_coeff)
        .def_readwrite("rank", &feedback::FeedbackConfig::rank)
        .def_readwrite("delay_ttis", &feedback::FeedbackConfig::delay_ttis)
        .def_readwrite("mode", &feedback::FeedbackConfig::mode);
    py::class_<feedback::CsiQuality>(m, "CsiQuality")
        .def_readonly("sigma_ul_bs", &feedback::CsiQuality::sigma_ul_bs)
        .def_readonly("sigma_dl_ut", &feedback::CsiQuality::sigma_dl_ut)
        .def_readonly("sigma_dl_ut_tdm", &feedback::CsiQuality::sigma_dl_ut_tdm)
        .def_readonly("sigma_dl_bs", &feedback::CsiQuality::sigma_dl_bs);
    m.def("quantization_scale", &feedback::quantization_scale, py::arg("bits_per_coeff"),
          py::arg("rank"));
    m.def(
        "predicted_covariance",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p,
           const pilots::PilotPattern& pat, double pilot_noise, int lag) {
            return to_numpy(feedback::predicted_covariance(g, p, pat, pilot_noise, lag));
        },
        py::arg("geometry"), py::arg("profile"), py::arg("pattern"), py::arg("pilot_noise"),
        py::arg("block_lag"));
    m.def(
        "csit_mse",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p,
           const pilots::PilotPattern& pat, double pilot_noise,
           const feedback::FeedbackConfig& fb, double prev_bits) {
            return to_numpy(feedback::csit_mse(g, p, pat, pilot_noise, fb, prev_bits).values);
        },
        py::arg("geometry"), py::arg("profile"), py::arg("pattern"), py::arg("pilot_noise"),
        py::arg("feedback"), py::arg("prev_bits") = 0.0);
    m.def(
        "steady_state_equivalent_bits",
        [](const channel::PrbGeometry& g, const channel::ChannelProfile& p,
           const pilots::PilotPattern& pat, double pilot_noise,
           const feedback::FeedbackConfig& fb) {
            const auto ss = feedback::steady_state_equivalent_bits(g, p, pat, pilot_noise, fb);
            return py::make_tuple(ss.equivalent_bits, ss.degenerate);
        },
        py::arg("geometry"), py::arg("profile"), py::arg("pattern"), py::arg("pilot_noise"),
        py::arg("feedback"));

    // capacity
    m.def(
        "ul_sum_rate",
        [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>&
               h,
           double coeff_variance, double sigma_ul_bs, double sigma_ul, double p_max) {
            const auto eff = capacity::ul_effective_params(to_arma(h), coeff_variance,
                                                           sigma_ul_bs);
            const auto r = capacity::ul_sum_rate(eff, sigma_ul, p_max);
            return py::make_tuple(r.rate, to_numpy(r.powers));
        },
        py::arg("h_ul"), py::arg("coeff_variance"), py::arg("sigma_ul_bs"),
        py::arg("sigma_ul"), py::arg("p_max"));
    m.def(
        "dl_sum_rate",
        [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>&
               h,
           double coeff_variance, double sigma_dl_ut, double sigma_dl_bs, double sigma_dl,
           double p_tot) {
            const auto eff = capacity::dl_effective_params(to_arma(h), coeff_variance,
                                                           sigma_dl_ut, sigma_dl_bs);
            const auto r = capacity::dl_sum_rate(eff, sigma_dl, p_tot);
            return py::make_tuple(r.rate, to_numpy(r.powers));
        },
        py::arg("h_dl"), py::arg("coeff_variance"), py::arg("sigma_dl_ut"),
        py::arg("sigma_dl_bs"), py::arg("sigma_dl"), py::arg("p_tot"));
    m.def(
        "tdm_sum_rate",
        [](const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>&
               h,
           double coeff_variance, double sigma_dl_ut_tdm, double sigma_dl, double p_tot) {
            return capacity::tdm_sum_rate(to_arma(h), coeff_variance, sigma_dl_ut_tdm,
                                          sigma_dl, p_tot);
        },
        py::arg("h_dl"), py::arg("coeff_variance"), py::arg("sigma_dl_ut_tdm"),
        py::arg("sigma_dl"), py::arg("p_tot"));

    // region
    py::enum_<region::DlMode>(m, "DlMode")
        .value("AUTO", region::DlMode::Auto)
        .value("SPATIAL", region::DlMode::Spatial)
        .value("TDM", region::DlMode::Tdm);
    py::class_<region::OperatingParams>(m, "OperatingParams")
        .def(py::init<>())
        .def_readwrite("ul_pattern", &region::OperatingParams::ul_pattern)
        .def_readwrite("dl_pattern", &region::OperatingParams::dl_pattern)
        .def_readwrite("rho_ul", &region::OperatingParams::rho_ul)
        .def_readwrite("rho_dl", &region::OperatingParams::rho_dl)
        .def_readwrite("n_b", &region::OperatingParams::n_b)
        .def_readwrite("dl_mode", &region::OperatingParams::dl_mode)
        .def_readwrite("fb_mode", &region::OperatingParams::fb_mode)
        .def_property_readonly("id", &region::OperatingParams::id);
    py::class_<region::RatePoint>(m, "RatePoint")
        .def_readonly("params", &region::RatePoint::params)
        .def_readonly("gross_ul", &region::RatePoint::gross_ul)
        .def_readonly("gross_dl", &region::RatePoint::gross_dl)
        .def_readonly("net_ul", &region::RatePoint::net_ul)
        .def_readonly("net_dl", &region::RatePoint::net_dl)
        .def_readonly("realization_count", &region::RatePoint::realization_count)
        .def_readonly("feasible", &region::RatePoint::feasible)
        .def_readonly("pareto", &region::RatePoint::pareto)
        .def_readonly("hull", &region::RatePoint::hull);
    py::class_<region::LookupTable>(m, "LookupTable")
        .def("to_json", &region::LookupTable::to_json)
        .def_static("from_json", &region::LookupTable::from_json)
        .def("nearest", &region::LookupTable::nearest, py::arg("rho_ul"), py::arg("rho_dl"),
             py::arg("n_b"), py::arg("v_kmh"), py::arg("tau_max_us"),
             py::return_value_policy::copy);

    py::class_<config::SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("geometry", &config::SystemConfig::geometry)
        .def_readwrite("profile", &config::SystemConfig::profile)
        .def_readwrite("n_bs", &config::SystemConfig::n_bs)
        .def_readwrite("k", &config::SystemConfig::k)
        .def_readwrite("fb", &config::SystemConfig::fb);

    m.def(
        "net_rates",
        [](double gross_ul, double gross_dl, const region::OperatingParams& params,
           const channel::PrbGeometry& geom, unsigned n_bs, unsigned k) {
            const auto net = region::net_rates(gross_ul, gross_dl, params, geom, n_bs, k);
            return py::make_tuple(net.ul, net.dl);
        },
        py::arg("gross_ul"), py::arg("gross_dl"), py::arg("params"), py::arg("geometry"),
        py::arg("n_bs"), py::arg("k"));
    m.def("build_lookup", &region::build_lookup, py::arg("system"), py::arg("ul_patterns"),
          py::arg("dl_patterns"), py::arg("n_b_grid"), py::arg("v_kmh_grid"),
          py::arg("tau_us_grid"), py::arg("threads") = 0);
    m.def("sweep", &region::sweep, py::arg("system"), py::arg("ul_patterns"),
          py::arg("dl_patterns"), py::arg("n_b_grid"), py::arg("lookup"), py::arg("dl_mode"),
          py::arg("realizations"), py::arg("seed"), py::arg("threads") = 0);
    m.def("pareto_frontier", &region::pareto_frontier, py::arg("points"));
    m.def("weighted_optimum", &region::weighted_optimum, py::arg("points"), py::arg("weight"));
    m.def("to_csv", &region::to_csv, py::arg("points"));
}
