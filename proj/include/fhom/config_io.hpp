#ifndef FHOM_CONFIG_IO_HPP
#define FHOM_CONFIG_IO_HPP

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "fhom/config.hpp"
#include "fhom/errors.hpp"

namespace fhom
{
namespace detail
{
inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                                const std::string& where)
{
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw config_error("config " + where + ": unknown key '" + key + "'");
}

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where)
{
    if (!obj.contains(key))
        throw config_error("config " + where + ": missing key '" + key + "'");
    if (!obj[key].is_number())
        throw config_error("config " + where + ": key '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline double optional_number(const nlohmann::json& obj, const std::string& key, double fallback,
                              const std::string& where)
{
    if (!obj.contains(key))
        return fallback;
    if (!obj[key].is_number())
        throw config_error("config " + where + ": key '" + key + "' must be a number");
    return obj[key].get<double>();
}
} // namespace detail

inline BandwidthConvention convention_from_name(const std::string& name)
{
    if (name == "fwhm")
        return BandwidthConvention::fwhm;
    if (name == "hwhm")
        return BandwidthConvention::hwhm;
    if (name == "half_e")
        return BandwidthConvention::half_e;
    if (name == "half_e2")
        return BandwidthConvention::half_e2;
    if (name == "rms_sigma")
        return BandwidthConvention::rms_sigma;
    throw config_error("config: unknown bandwidth_convention '" + name + "'");
}

inline std::string convention_name(BandwidthConvention c)
{
    switch (c)
    {
    case BandwidthConvention::fwhm:      return "fwhm";
    case BandwidthConvention::hwhm:      return "hwhm";
    case BandwidthConvention::half_e:    return "half_e";
    case BandwidthConvention::half_e2:   return "half_e2";
    case BandwidthConvention::rms_sigma: return "rms_sigma";
    }
    return "fwhm";
}

inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw config_error("config: top level must be a JSON object");
    detail::reject_unknown_keys(j,
                                {"label", "repetition_rate_hz", "bandwidth_convention",
                                 "bandwidths_ghz", "loss_budget", "pump_curve", "noise", "input",
                                 "overrides", "pls_reading"},
                                "(top level)");
    ExperimentConfig cfg;
    if (j.contains("label"))
    {
        if (!j["label"].is_string())
            throw config_error("config: 'label' must be a string");
        cfg.label = j["label"].get<std::string>();
    }
    cfg.repetition_rate_hz = detail::optional_number(j, "repetition_rate_hz", 82.0e6, "(top level)");
    if (j.contains("bandwidth_convention"))
    {
        if (!j["bandwidth_convention"].is_string())
            throw config_error("config: 'bandwidth_convention' must be a string");
        cfg.convention = convention_from_name(j["bandwidth_convention"].get<std::string>());
    }

    if (!j.contains("bandwidths_ghz") || !j["bandwidths_ghz"].is_object())
        throw config_error("config: missing object 'bandwidths_ghz'");
    const auto& bw = j["bandwidths_ghz"];
    detail::reject_unknown_keys(
        bw, {"input_upper", "input_lower", "converter", "output_upper", "output_lower"},
        "bandwidths_ghz");
    cfg.bands.in_upper = detail::require_number(bw, "input_upper", "bandwidths_ghz");
    cfg.bands.in_lower = detail::require_number(bw, "input_lower", "bandwidths_ghz");
    cfg.bands.converter = detail::require_number(bw, "converter", "bandwidths_ghz");
    cfg.bands.out_upper = detail::require_number(bw, "output_upper", "bandwidths_ghz");
    cfg.bands.out_lower = detail::require_number(bw, "output_lower", "bandwidths_ghz");

    if (!j.contains("loss_budget") || !j["loss_budget"].is_object())
        throw config_error("config: missing object 'loss_budget'");
    const auto& lb = j["loss_budget"];
    detail::reject_unknown_keys(lb, {"tu", "tl", "mu"}, "loss_budget");
    cfg.budget.tu = detail::require_number(lb, "tu", "loss_budget");
    cfg.budget.tl = detail::require_number(lb, "tl", "loss_budget");
    cfg.budget.mu = detail::require_number(lb, "mu", "loss_budget");

    if (!j.contains("pump_curve") || !j["pump_curve"].is_object())
        throw config_error("config: missing object 'pump_curve'");
    const auto& pc = j["pump_curve"];
    detail::reject_unknown_keys(pc, {"amplitude", "rate_per_mw"}, "pump_curve");
    cfg.pump.amplitude = detail::require_number(pc, "amplitude", "pump_curve");
    cfg.pump.rate_per_mw = detail::require_number(pc, "rate_per_mw", "pump_curve");

    if (j.contains("noise"))
    {
        if (!j["noise"].is_object())
            throw config_error("config: 'noise' must be an object");
        const auto& nm = j["noise"];
        detail::reject_unknown_keys(
            nm, {"du_quad_per_mw2", "du_lin_per_mw", "du_const", "dl_lin_per_mw", "dl_const"},
            "noise");
        cfg.noise.du_quad_per_mw2 = detail::optional_number(nm, "du_quad_per_mw2", 0.0, "noise");
        cfg.noise.du_lin_per_mw = detail::optional_number(nm, "du_lin_per_mw", 0.0, "noise");
        cfg.noise.du_const = detail::optional_number(nm, "du_const", 0.0, "noise");
        cfg.noise.dl_lin_per_mw = detail::optional_number(nm, "dl_lin_per_mw", 0.0, "noise");
        cfg.noise.dl_const = detail::optional_number(nm, "dl_const", 0.0, "noise");
    }

    if (j.contains("input"))
    {
        if (!j["input"].is_object())
            throw config_error("config: 'input' must be an object");
        const auto& in = j["input"];
        detail::reject_unknown_keys(in, {"kind", "mean_photon_number"}, "input");
        if (in.contains("kind"))
        {
            if (!in["kind"].is_string())
                throw config_error("config input: 'kind' must be a string");
            const std::string kind = in["kind"].get<std::string>();
            if (kind == "coherent")
                cfg.input = InputKind::coherent_lower;
            else if (kind == "single_photon")
                cfg.input = InputKind::single_photon_lower;
            else
                throw config_error("config input: unknown kind '" + kind +
                                   "' (expected 'coherent' or 'single_photon')");
        }
        cfg.mean_photon_number = detail::optional_number(in, "mean_photon_number", 0.1, "input");
    }

    if (j.contains("overrides"))
    {
        if (!j["overrides"].is_object())
            throw config_error("config: 'overrides' must be an object");
        const auto& ov = j["overrides"];
        detail::reject_unknown_keys(ov, {"equalize_input_loss", "narrow_upper_input"}, "overrides");
        if (ov.contains("equalize_input_loss"))
        {
            if (!ov["equalize_input_loss"].is_boolean())
                throw config_error("config overrides: 'equalize_input_loss' must be a boolean");
            cfg.equalize_input_loss = ov["equalize_input_loss"].get<bool>();
        }
        if (ov.contains("narrow_upper_input"))
        {
            if (!ov["narrow_upper_input"].is_boolean())
                throw config_error("config overrides: 'narrow_upper_input' must be a boolean");
            cfg.narrow_upper_input = ov["narrow_upper_input"].get<bool>();
        }
    }

    if (j.contains("pls_reading"))
    {
        if (!j["pls_reading"].is_string())
            throw config_error("config: 'pls_reading' must be a string");
        const std::string r = j["pls_reading"].get<std::string>();
        if (r == "structural")
            cfg.pls_reading = StayingTermReading::structural;
        else if (r == "linear_sum")
            cfg.pls_reading = StayingTermReading::linear_sum;
        else
            throw config_error("config: unknown pls_reading '" + r + "'");
    }

    cfg.validate();
    return cfg;
}

// Load a config file; '//' comments are permitted and stripped by the parser.
inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw config_error("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

} // namespace fhom

#endif
