#include "geodc/physics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "geodc/errors.hpp"

namespace geodc::physics {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("physics parameters: " + what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

AmbientCopChiller::AmbientCopChiller(ChillerParams params, double capacity_w)
    : params_(params), capacity_w_(capacity_w) {
    require(finite_positive(capacity_w), "chiller capacity must be > 0");
}

double AmbientCopChiller::cop(double t_drybulb_c) const {
    const double cop = params_.cop_nominal - params_.cop_ambient_slope * (t_drybulb_c - params_.cop_reference_temp_c);
    return std::max(params_.cop_min, cop);
}

double AmbientCopChiller::power_w(double cooling_load_w, double t_drybulb_c) const {
    if (!(cooling_load_w > 0.0)) return 0.0;
    const double load_fraction = std::min(cooling_load_w / capacity_w_, 1.0);
    return std::max(load_fraction, params_.min_part_load) * capacity_w_ / cop(t_drybulb_c);
}

double DcPhysicsParams::supply_approach(int rack) const {
    return supply_approach_temps.empty() ? 0.0 : supply_approach_temps.at(static_cast<std::size_t>(rack));
}

double DcPhysicsParams::return_approach(int rack) const {
    return return_approach_temps.empty() ? 0.0 : return_approach_temps.at(static_cast<std::size_t>(rack));
}

void validate(const DcPhysicsParams& p) {
    require(p.inlet_temp_range[0] < p.inlet_temp_range[1], "INLET_TEMP_RANGE must be increasing");
    require(p.setpoint_range[0] < p.setpoint_range[1], "setpoint range must be increasing");
    require(p.cpu_ratio_lb[0] <= p.cpu_ratio_ub[0] && p.cpu_ratio_lb[1] <= p.cpu_ratio_ub[1],
            "CPU_POWER_RATIO_LB must not exceed CPU_POWER_RATIO_UB");
    require(p.fan_ratio_lb[0] <= p.fan_ratio_ub[0] && p.fan_ratio_lb[1] <= p.fan_ratio_ub[1],
            "IT_FAN_AIRFLOW_RATIO_LB must not exceed IT_FAN_AIRFLOW_RATIO_UB");
    for (double v : {p.cpu_full_w, p.gpu_full_w, p.fan_ref_w, p.fan_ref_ratio, p.fan_full_load_v, p.c_air,
                     p.rho_air, p.crac_fan_ref_w, p.crac_supply_flow_pu, p.crac_ref_flow_pu, p.ct_fan_ref_w,
                     p.ct_ref_air_flow, p.ct_air_delta_t, p.heat_reject_unit_w, p.fan_power_exponent}) {
        require(finite_positive(v), "reference powers, flows and air properties must be > 0");
    }
    require(p.gpu_idle_w >= 0.0 && p.gpu_idle_w <= p.gpu_full_w, "GPU idle power must be in [0, full]");
    for (double eff : {p.cw_pump_eff, p.ct_pump_eff}) {
        require(std::isfinite(eff) && eff > 0.0 && eff <= 1.0, "pump efficiencies must be in (0, 1]");
    }
    require(p.cw_pressure_drop >= 0.0 && p.ct_pressure_drop >= 0.0 && p.cw_flow >= 0.0 && p.ct_flow >= 0.0,
            "pump pressure drops and flows must be >= 0");
    require(p.mem_w_per_gb >= 0.0, "memory power coefficient must be >= 0");
    require(p.num_racks >= 1, "NUM_RACKS must be >= 1");
    require(p.servers_per_rack >= 1, "SERVERS_PER_RACK must be >= 1");
    require(p.gpus_per_server >= 0, "GPUS_PER_SERVER must be >= 0");
    const auto racks = static_cast<std::size_t>(p.num_racks);
    require(p.supply_approach_temps.empty() || p.supply_approach_temps.size() == racks,
            "RACK_SUPPLY_APPROACH_TEMP_LIST needs one entry per rack");
    require(p.return_approach_temps.empty() || p.return_approach_temps.size() == racks,
            "RACK_RETURN_APPROACH_TEMP_LIST needs one entry per rack");
    require(finite_positive(p.thermal.f), "thermal coefficient f must be > 0");
    require(finite_positive(p.chiller.cop_min) && p.chiller.cop_min <= p.chiller.cop_nominal,
            "chiller COP bounds must satisfy 0 < min <= nominal");
    require(p.chiller.cop_ambient_slope >= 0.0, "chiller COP slope must be >= 0");
    require(p.chiller.capacity_w >= 0.0, "chiller capacity must be >= 0");
    require(p.chiller.min_part_load >= 0.0 && p.chiller.min_part_load <= 1.0,
            "chiller part-load floor must be in [0, 1]");
    require(p.ct_range_temp >= 0.0, "cooling tower range must be >= 0");
    require(p.drift_rate >= 0.0, "drift rate must be >= 0");
    require(p.ave_hlp >= 0.0 && p.dc_area_pu >= 0.0 && p.office_area >= 0.0, "heat recovery areas must be >= 0");
}

namespace {

using nlohmann::json;

template <typename T>
void read_key(const json& section, const char* key, T& out) {
    if (!section.contains(key)) return;
    try {
        out = section.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("dc config key ") + key + ": " + e.what());
    }
}

const json& section_of(const json& doc, const char* name) {
    static const json empty = json::object();
    if (!doc.contains(name)) return empty;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ConfigError(std::string("dc config section ") + name + " must be an object");
    return s;
}

}  // namespace

DcPhysicsParams load_dc_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dc config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("dc config '" + path.string() + "': " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("dc config must be a JSON object");

    DcPhysicsParams p;
    const json& dc = section_of(doc, "data_center_configuration");
    read_key(dc, "NUM_RACKS", p.num_racks);
    read_key(dc, "SERVERS_PER_RACK", p.servers_per_rack);
    read_key(dc, "GPUS_PER_SERVER", p.gpus_per_server);
    read_key(dc, "RACK_SUPPLY_APPROACH_TEMP_LIST", p.supply_approach_temps);
    read_key(dc, "RACK_RETURN_APPROACH_TEMP_LIST", p.return_approach_temps);
    if (dc.contains("THERMAL_COEFFS")) {
        std::array<double, 5> k{};
        read_key(dc, "THERMAL_COEFFS", k);
        p.thermal = ThermalCoeffs{k[0], k[1], k[2], k[3], k[4]};
    }

    const json& hv = section_of(doc, "hvac_configuration");
    read_key(hv, "C_AIR", p.c_air);
    read_key(hv, "RHO_AIR", p.rho_air);
    read_key(hv, "CRAC_FAN_REF_P", p.crac_fan_ref_w);
    read_key(hv, "CRAC_SUPPLY_AIR_FLOW_RATE_pu", p.crac_supply_flow_pu);
    read_key(hv, "CRAC_REFERENCE_AIR_FLOW_RATE_pu", p.crac_ref_flow_pu);
    read_key(hv, "CT_FAN_REF_P", p.ct_fan_ref_w);
    read_key(hv, "CT_REFERENCE_AIR_FLOW_RATE", p.ct_ref_air_flow);
    read_key(hv, "CT_AIR_DELTA_T", p.ct_air_delta_t);
    read_key(hv, "CW_PRESSURE_DROP", p.cw_pressure_drop);
    read_key(hv, "CT_PRESSURE_DROP", p.ct_pressure_drop);
    read_key(hv, "CW_PUMP_EFFICIENCY", p.cw_pump_eff);
    read_key(hv, "CT_PUMP_EFFICIENCY", p.ct_pump_eff);
    read_key(hv, "CW_WATER_FLOW_RATE", p.cw_flow);
    read_key(hv, "CT_WATER_FLOW_RATE", p.ct_flow);
    read_key(hv, "CHILLER_COP_NOMINAL", p.chiller.cop_nominal);
    read_key(hv, "CHILLER_COP_AMBIENT_SLOPE", p.chiller.cop_ambient_slope);
    read_key(hv, "CHILLER_COP_MIN", p.chiller.cop_min);
    read_key(hv, "CHILLER_CAPACITY_W", p.chiller.capacity_w);
    read_key(hv, "CHILLER_MIN_PART_LOAD", p.chiller.min_part_load);
    read_key(hv, "CT_RANGE_TEMP", p.ct_range_temp);
    read_key(hv, "DRIFT_RATE", p.drift_rate);
    read_key(hv, "HEAT_REJECT_UNIT_W", p.heat_reject_unit_w);
    read_key(hv, "AVE_HLP", p.ave_hlp);
    read_key(hv, "DC_AREA_PU", p.dc_area_pu);
    read_key(hv, "OFFICE_BUILDING_AREA", p.office_area);
    read_key(hv, "OFFICE_GUIDE_TEMP", p.office_guide_temp);
    read_key(hv, "SETPOINT_RANGE", p.setpoint_range);

    const json& sv = section_of(doc, "server_characteristics");
    read_key(sv, "CPU_POWER_RATIO_LB", p.cpu_ratio_lb);
    read_key(sv, "CPU_POWER_RATIO_UB", p.cpu_ratio_ub);
    read_key(sv, "INLET_TEMP_RANGE", p.inlet_temp_range);
    if (sv.contains("HP_PROLIANT")) {
        Pair w{};
        read_key(sv, "HP_PROLIANT", w);
        p.cpu_idle_w = w[0];
        p.cpu_full_w = w[1];
    }
    if (sv.contains("NVIDIA_V100")) {
        Pair w{};
        read_key(sv, "NVIDIA_V100", w);
        p.gpu_idle_w = w[0];
        p.gpu_full_w = w[1];
    }
    read_key(sv, "IT_FAN_AIRFLOW_RATIO_LB", p.fan_ratio_lb);
    read_key(sv, "IT_FAN_AIRFLOW_RATIO_UB", p.fan_ratio_ub);
    read_key(sv, "IT_FAN_FULL_LOAD_V", p.fan_full_load_v);
    read_key(sv, "ITFAN_REF_V_RATIO", p.fan_ref_ratio);
    read_key(sv, "ITFAN_REF_P", p.fan_ref_w);
    read_key(sv, "FAN_POWER_EXPONENT", p.fan_power_exponent);
    read_key(sv, "MEMORY_POWER_PER_GB", p.mem_w_per_gb);

    validate(p);
    return p;
}

LinearCoeffs cpu_coeffs(const DcPhysicsParams& p) {
    const double m = (p.cpu_ratio_ub[0] - p.cpu_ratio_lb[0]) / (p.inlet_temp_range[1] - p.inlet_temp_range[0]);
    return {m, p.cpu_ratio_ub[0] - m * p.inlet_temp_range[1]};
}

LinearCoeffs fan_coeffs(const DcPhysicsParams& p) {
    const double m = (p.fan_ratio_ub[0] - p.fan_ratio_lb[0]) / (p.inlet_temp_range[1] - p.inlet_temp_range[0]);
    return {m, p.fan_ratio_ub[0] - m * p.inlet_temp_range[1]};
}

double clamp_inlet(const DcPhysicsParams& p, double t_inlet) {
    static std::atomic<bool> warned{false};
    const double lo = p.inlet_temp_range[0];
    const double hi = p.inlet_temp_range[1];
    if (t_inlet >= lo && t_inlet <= hi) return t_inlet;
    if (!warned.exchange(true)) {
        spdlog::warn("inlet temperature {:.2f} C outside [{}, {}]; clamping (further occurrences not logged)", t_inlet,
                     lo, hi);
    }
    return std::clamp(t_inlet, lo, hi);
}

namespace {

void require_fraction(double u, const char* what) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError(std::string(what) + " utilization must be in [0, 1]");
}

}  // namespace

double cpu_power_ratio(const DcPhysicsParams& p, double t_inlet, double u_cpu) {
    require_fraction(u_cpu, "CPU");
    const auto [m, c] = cpu_coeffs(p);
    const double shift = p.cpu_ratio_lb[1] - p.cpu_ratio_lb[0];
    return m * clamp_inlet(p, t_inlet) + c + shift * u_cpu;
}

double cpu_power(const DcPhysicsParams& p, double t_inlet, double u_cpu) {
    return p.cpu_full_w * cpu_power_ratio(p, t_inlet, u_cpu);
}

double gpu_power(const DcPhysicsParams& p, double u_gpu) {
    require_fraction(u_gpu, "GPU");
    return p.gpu_idle_w + (p.gpu_full_w - p.gpu_idle_w) * std::log2(1.0 + u_gpu);
}

double memory_power_per_rack(const DcPhysicsParams& p, double total_mem_gb, int num_racks) {
    if (num_racks <= 0) throw DomainError("memory power needs at least one rack");
    if (!(total_mem_gb >= 0.0)) throw DomainError("installed memory must be >= 0");
    return p.mem_w_per_gb * total_mem_gb / num_racks;
}

double fan_ratio(const DcPhysicsParams& p, double t_inlet, double u_eff) {
    require_fraction(u_eff, "effective");
    const auto [m, c] = fan_coeffs(p);
    const double shift = p.fan_ratio_lb[1] - p.fan_ratio_lb[0];
    return m * clamp_inlet(p, t_inlet) + c + shift * u_eff;
}

double fan_power(const DcPhysicsParams& p, double t_inlet, double u_eff) {
    const double r = fan_ratio(p, t_inlet, u_eff) / p.fan_ref_ratio;
    if (p.fan_power_exponent == 1.0) return p.fan_ref_w * r;
    return p.fan_ref_w * std::pow(r, p.fan_power_exponent);
}

double effective_utilization(double u_cpu, double u_mem, double u_gpu) { return (u_cpu + u_mem + u_gpu) / 3.0; }

ItPower total_it_power(const DcPhysicsParams& p, std::span<const double> inlet_temps, double u_cpu, double u_gpu,
                       double u_mem, double total_mem_gb, std::span<const int> servers_per_rack) {
    if (inlet_temps.size() != servers_per_rack.size()) {
        throw DomainError("layout has " + std::to_string(servers_per_rack.size()) + " racks but " +
                          std::to_string(inlet_temps.size()) + " inlet temperatures");
    }
    require_fraction(u_mem, "memory");
    ItPower out;
    if (servers_per_rack.empty()) {
        if (total_mem_gb != 0.0) throw DomainError("memory installed in a layout without racks");
        return out;
    }
    const int racks = static_cast<int>(servers_per_rack.size());
    const double mem_w = memory_power_per_rack(p, total_mem_gb, racks);
    const double u_eff = effective_utilization(u_cpu, u_mem, u_gpu);
    const double gpu_w = gpu_power(p, u_gpu) * p.gpus_per_server;
    out.rack_power_w.reserve(servers_per_rack.size());
    out.rack_airflow_m3s.reserve(servers_per_rack.size());
    for (std::size_t r = 0; r < servers_per_rack.size(); ++r) {
        const int n = servers_per_rack[r];
        if (n < 0) throw DomainError("negative server count in layout");
        const double t = inlet_temps[r];
        const double server_w = cpu_power(p, t, u_cpu) + fan_power(p, t, u_eff) + gpu_w;
        const double rack_w = n * server_w + mem_w;
        out.rack_power_w.push_back(rack_w);
        out.rack_airflow_m3s.push_back(n * p.fan_full_load_v * fan_ratio(p, t, u_eff));
        out.it_power_w += rack_w;
    }
    return out;
}

double rack_outlet_temp(const DcPhysicsParams& p, double t_in, double rack_power_w, double fan_flow_m3s) {
    if (!(fan_flow_m3s > 0.0)) throw DomainError("rack airflow must be > 0");
    const ThermalCoeffs& k = p.thermal;
    const double heat = k.d == 1.0 ? k.c * rack_power_w : k.c * std::pow(rack_power_w, k.d);
    const double flow = k.e == 1.0 ? fan_flow_m3s : std::pow(fan_flow_m3s, k.e);
    return t_in + heat / (p.c_air * p.rho_air * flow * k.f) + k.g;
}

double crac_return_temp(const DcPhysicsParams& p, std::span<const double> rack_outlet_temps) {
    if (rack_outlet_temps.empty()) throw DomainError("CRAC return temperature needs at least one rack");
    double sum = 0.0;
    for (std::size_t r = 0; r < rack_outlet_temps.size(); ++r) {
        sum += rack_outlet_temps[r] + p.return_approach(static_cast<int>(r));
    }
    return sum / static_cast<double>(rack_outlet_temps.size());
}

double design_it_power(const DcPhysicsParams& p, double total_mem_gb) {
    const std::vector<double> inlets(static_cast<std::size_t>(p.num_racks), p.inlet_temp_range[1]);
    const std::vector<int> layout(static_cast<std::size_t>(p.num_racks), p.servers_per_rack);
    return total_it_power(p, inlets, 1.0, p.gpus_per_server > 0 ? 1.0 : 0.0, 1.0, total_mem_gb, layout).it_power_w;
}

HvacContext make_hvac_context(const DcPhysicsParams& p, double total_mem_gb) {
    HvacContext ctx;
    ctx.design_it_power_w = design_it_power(p, total_mem_gb);
    ctx.chiller_capacity_w = p.chiller.capacity_w > 0.0 ? p.chiller.capacity_w : ctx.design_it_power_w;
    // The tower is built from identical cells, each moving the reference
    // flow at design heat rejection.
    const double design_flow = ctx.chiller_capacity_w / (p.c_air * p.rho_air * p.ct_air_delta_t);
    ctx.ct_cells = std::max(1, static_cast<int>(std::ceil(design_flow / p.ct_ref_air_flow)));
    return ctx;
}

double pump_power(double pressure_drop_pa, double flow_m3s, double efficiency) {
    return pressure_drop_pa * flow_m3s / efficiency;
}

double heat_recovery_w(const DcPhysicsParams& p, double p_it_max_w, double t_drybulb) {
    const double t_delta = std::max(p.office_guide_temp - t_drybulb, 0.0);
    const double q_dc_office = p.ave_hlp * p.dc_area_pu * p_it_max_w * t_delta;
    const double q_ext_office = p.ave_hlp * p.office_area * t_delta;
    return q_dc_office + q_ext_office;
}

double water_intercept(double t_range) { return 0.3528 * t_range + 0.101; }

double normalized_water_rate(double t_wetbulb, double t_range) { return 0.044 * t_wetbulb + water_intercept(t_range); }

double cooling_tower_fan_power(const DcPhysicsParams& p, const HvacContext& ctx, double load_w) {
    if (!(load_w > 0.0)) return 0.0;
    const double v_air = load_w / (p.c_air * p.rho_air * p.ct_air_delta_t);
    const double per_cell = v_air / (ctx.ct_cells * p.ct_ref_air_flow);
    return ctx.ct_cells * p.ct_fan_ref_w * per_cell * per_cell * per_cell;
}

HvacResult hvac_step(const DcPhysicsParams& p, const HvacContext& ctx, double it_power_w, double t_return,
                     double setpoint, double t_drybulb, double t_wetbulb, bool hru_enabled) {
    if (!(setpoint >= p.setpoint_range[0] && setpoint <= p.setpoint_range[1])) {
        throw DomainError("setpoint " + std::to_string(setpoint) + " outside the allowed range");
    }
    if (!(it_power_w >= 0.0)) throw DomainError("IT power must be >= 0");
    HvacResult r;
    const double mass_flow = p.crac_supply_flow_pu * it_power_w;
    r.crac_load_w = mass_flow * p.c_air * std::max(t_return - setpoint, 0.0);

    r.effective_load_w = r.crac_load_w;
    if (hru_enabled) {
        const double recovery = heat_recovery_w(p, ctx.design_it_power_w, t_drybulb);
        const double reduction = std::min(recovery, 0.25 * it_power_w);
        r.effective_load_w = std::max(r.crac_load_w - reduction, 0.0);
        r.hru_recovered_w = r.crac_load_w - r.effective_load_w;
    }

    const double flow_ratio = p.crac_supply_flow_pu / p.crac_ref_flow_pu;
    const double load_fraction = ctx.design_it_power_w > 0.0 ? it_power_w / ctx.design_it_power_w : 0.0;
    r.crac_fan_w = p.crac_fan_ref_w * flow_ratio * flow_ratio * flow_ratio * load_fraction;

    if (p.chiller_override) {
        r.chiller_w = p.chiller_override->power_w(r.effective_load_w, t_drybulb);
    } else {
        r.chiller_w = AmbientCopChiller(p.chiller, ctx.chiller_capacity_w).power_w(r.effective_load_w, t_drybulb);
    }
    r.ct_fan_w = cooling_tower_fan_power(p, ctx, r.effective_load_w);
    r.pump_w = pump_power(p.cw_pressure_drop, p.cw_flow, p.cw_pump_eff) +
               pump_power(p.ct_pressure_drop, p.ct_flow, p.ct_pump_eff);

    const double w_evap = normalized_water_rate(t_wetbulb, p.ct_range_temp) * r.effective_load_w / p.heat_reject_unit_w;
    r.water_m3_per_hr = w_evap + w_evap * p.drift_rate;
    return r;
}

double water_to_15min_liters(double w_total_m3_per_hr) {
    if (!(w_total_m3_per_hr >= 0.0)) throw DomainError("water usage must be >= 0");
    return w_total_m3_per_hr * 1000.0 / 4.0;
}

double apply_hvac_action(const DcPhysicsParams& p, double setpoint, HvacAction action) {
    double next = setpoint;
    if (action == HvacAction::Down1C) next -= 1.0;
    if (action == HvacAction::Up1C) next += 1.0;
    return std::clamp(next, p.setpoint_range[0], p.setpoint_range[1]);
}

DcStepResult dc_physics_step(const DcPhysicsParams& p, const HvacContext& ctx, const DcState& state,
                             const DcLoad& load, const Weather& weather, std::optional<HvacAction> action,
                             bool hru_enabled) {
    DcStepResult out;
    out.setpoint_c = action ? apply_hvac_action(p, state.setpoint_c, *action) : state.setpoint_c;

    const auto racks = static_cast<std::size_t>(p.num_racks);
    out.rack_inlet_temps_c.resize(racks);
    for (std::size_t r = 0; r < racks; ++r) {
        out.rack_inlet_temps_c[r] = out.setpoint_c + p.supply_approach(static_cast<int>(r));
    }
    const std::vector<int> layout(racks, p.servers_per_rack);
    ItPower it = total_it_power(p, out.rack_inlet_temps_c, load.u_cpu, load.u_gpu, load.u_mem, load.installed_mem_gb,
                                layout);
    out.it_power_w = it.it_power_w;
    out.rack_power_w = std::move(it.rack_power_w);
    out.rack_airflow_m3s = std::move(it.rack_airflow_m3s);

    out.rack_outlet_temps_c.resize(racks);
    for (std::size_t r = 0; r < racks; ++r) {
        out.rack_outlet_temps_c[r] =
            rack_outlet_temp(p, out.rack_inlet_temps_c[r], out.rack_power_w[r], out.rack_airflow_m3s[r]);
    }
    out.crac_return_temp_c = crac_return_temp(p, out.rack_outlet_temps_c);

    const HvacResult hv = hvac_step(p, ctx, out.it_power_w, out.crac_return_temp_c, out.setpoint_c, weather.drybulb_c,
                                    weather.wetbulb_c, hru_enabled);
    out.crac_load_w = hv.crac_load_w;
    out.crac_fan_w = hv.crac_fan_w;
    out.chiller_w = hv.chiller_w;
    out.ct_fan_w = hv.ct_fan_w;
    out.pump_w = hv.pump_w;
    out.hru_recovered_w = hv.hru_recovered_w;
    out.total_power_w = out.it_power_w + out.crac_fan_w + out.chiller_w + out.ct_fan_w + out.pump_w;
    out.energy_kwh = out.total_power_w * 0.25 / 1000.0;
    out.water_l_15min = water_to_15min_liters(hv.water_m3_per_hr);
    return out;
}

}  // namespace geodc::physics
