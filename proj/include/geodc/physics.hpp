#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace geodc::physics {

using Pair = std::array<double, 2>;

/// Coefficients (c, d, e, f, g) of the rack outlet model
/// T_out = T_in + c * P^d / (Cp * rho * V^e * f) + g.
struct ThermalCoeffs {
    double c = 1.0;
    double d = 1.0;
    double e = 1.0;
    double f = 1.0;
    double g = 0.0;
};

/// Electrical draw of the chiller for a given effective cooling load.
class ChillerModel {
public:
    virtual ~ChillerModel() = default;
    virtual double power_w(double cooling_load_w, double t_drybulb_c) const = 0;
};

struct ChillerParams {
    double cop_nominal = 5.0;
    double cop_ambient_slope = 0.1;
    double cop_min = 1.5;
    /// Ambient temperature at which COP equals cop_nominal.
    double cop_reference_temp_c = 20.0;
    /// Rated cooling capacity. Zero means size to the design IT load.
    double capacity_w = 0.0;
    /// Part-load floor that stands in for cycling losses.
    double min_part_load = 0.2;
};

/// COP falls linearly with ambient dry-bulb, floored at cop_min; power is
/// max(load_fraction, min_part_load) * capacity / COP while any load remains.
class AmbientCopChiller final : public ChillerModel {
public:
    AmbientCopChiller(ChillerParams params, double capacity_w);
    double cop(double t_drybulb_c) const;
    double power_w(double cooling_load_w, double t_drybulb_c) const override;
    double capacity_w() const { return capacity_w_; }

private:
    ChillerParams params_;
    double capacity_w_;
};

struct DcPhysicsParams {
    // Server curves.
    Pair cpu_ratio_lb{0.01, 1.00};
    Pair cpu_ratio_ub{0.03, 1.02};
    Pair inlet_temp_range{16.0, 28.0};
    double cpu_idle_w = 110.0;
    double cpu_full_w = 170.0;
    double gpu_idle_w = 25.0;
    double gpu_full_w = 250.0;
    Pair fan_ratio_lb{0.01, 0.225};
    Pair fan_ratio_ub{0.225, 1.0};
    double fan_ref_w = 10.0;
    double fan_ref_ratio = 1.0;
    double fan_power_exponent = 1.0;
    double fan_full_load_v = 0.051;
    double mem_w_per_gb = 0.07;

    // Layout. Servers are homogeneous within a DC.
    int num_racks = 20;
    int servers_per_rack = 100;
    int gpus_per_server = 1;
    /// Per-rack offsets; empty means all zero.
    std::vector<double> supply_approach_temps;
    std::vector<double> return_approach_temps;
    ThermalCoeffs thermal;

    // Air side.
    double c_air = 1006.0;
    double rho_air = 1.225;
    double crac_fan_ref_w = 150.0;
    double crac_supply_flow_pu = 5.663e-5;
    double crac_ref_flow_pu = 9.438e-5;

    // Heat rejection.
    double ct_fan_ref_w = 1000.0;
    double ct_ref_air_flow = 2.8315;
    double ct_air_delta_t = 10.0;
    double cw_pressure_drop = 3.0e5;
    double ct_pressure_drop = 3.0e5;
    double cw_pump_eff = 0.87;
    double ct_pump_eff = 0.87;
    double cw_flow = 0.0011;
    double ct_flow = 0.0011;
    ChillerParams chiller;
    /// Replaces the ambient-COP chiller when set.
    std::shared_ptr<const ChillerModel> chiller_override;

    // Water.
    double ct_range_temp = 5.0;
    double drift_rate = 0.002;
    double heat_reject_unit_w = 1.0e6;

    // Heat recovery.
    double ave_hlp = 10.4;
    double dc_area_pu = 1.0e-4;
    double office_area = 1000.0;
    double office_guide_temp = 21.0;

    Pair setpoint_range{18.0, 27.0};

    int total_servers() const { return num_racks * servers_per_rack; }
    double supply_approach(int rack) const;
    double return_approach(int rack) const;
};

/// Throws ConfigError when an invariant of the parameter block is broken.
void validate(const DcPhysicsParams& params);

/// Reads the three-section JSON block. Absent keys keep their defaults.
DcPhysicsParams load_dc_config(const std::filesystem::path& path);

/// Slope and intercept of the linear inlet-temperature baseline.
struct LinearCoeffs {
    double m = 0.0;
    double c = 0.0;
};
LinearCoeffs cpu_coeffs(const DcPhysicsParams& params);
LinearCoeffs fan_coeffs(const DcPhysicsParams& params);

/// Pins `t_inlet` to the operating range, warning once per process.
double clamp_inlet(const DcPhysicsParams& params, double t_inlet);

double cpu_power_ratio(const DcPhysicsParams& params, double t_inlet, double u_cpu);
double cpu_power(const DcPhysicsParams& params, double t_inlet, double u_cpu);
double gpu_power(const DcPhysicsParams& params, double u_gpu);
double memory_power_per_rack(const DcPhysicsParams& params, double total_mem_gb, int num_racks);
double fan_ratio(const DcPhysicsParams& params, double t_inlet, double u_eff);
double fan_power(const DcPhysicsParams& params, double t_inlet, double u_eff);

/// Effective thermal load seen by the server fans.
double effective_utilization(double u_cpu, double u_mem, double u_gpu);

struct ItPower {
    double it_power_w = 0.0;
    std::vector<double> rack_power_w;
    std::vector<double> rack_airflow_m3s;
};

/// Sums server and memory power rack by rack. `servers_per_rack` gives the
/// server count of each rack; `inlet_temps` has one entry per rack.
ItPower total_it_power(const DcPhysicsParams& params, std::span<const double> inlet_temps, double u_cpu,
                       double u_gpu, double u_mem, double total_mem_gb, std::span<const int> servers_per_rack);

double rack_outlet_temp(const DcPhysicsParams& params, double t_in, double rack_power_w, double fan_flow_m3s);
double crac_return_temp(const DcPhysicsParams& params, std::span<const double> rack_outlet_temps);

/// IT power with every server at full load and the hottest inlet.
double design_it_power(const DcPhysicsParams& params, double total_mem_gb);

struct HvacResult {
    double crac_load_w = 0.0;
    double effective_load_w = 0.0;
    double crac_fan_w = 0.0;
    double chiller_w = 0.0;
    double ct_fan_w = 0.0;
    double pump_w = 0.0;
    double water_m3_per_hr = 0.0;
    double hru_recovered_w = 0.0;
};

struct HvacContext {
    double design_it_power_w = 0.0;
    double chiller_capacity_w = 0.0;
    int ct_cells = 1;
};

HvacContext make_hvac_context(const DcPhysicsParams& params, double total_mem_gb);

double pump_power(double pressure_drop_pa, double flow_m3s, double efficiency);
double heat_recovery_w(const DcPhysicsParams& params, double p_it_max_w, double t_drybulb);
double water_intercept(double t_range);
double normalized_water_rate(double t_wetbulb, double t_range);
double cooling_tower_fan_power(const DcPhysicsParams& params, const HvacContext& ctx, double load_w);

HvacResult hvac_step(const DcPhysicsParams& params, const HvacContext& ctx, double it_power_w, double t_return,
                     double setpoint, double t_drybulb, double t_wetbulb, bool hru_enabled);

double water_to_15min_liters(double w_total_m3_per_hr);

enum class HvacAction { Down1C, Hold, Up1C };

double apply_hvac_action(const DcPhysicsParams& params, double setpoint, HvacAction action);

struct Weather {
    double drybulb_c = 20.0;
    double wetbulb_c = 15.0;
};

struct DcState {
    double setpoint_c = 22.0;
};

struct DcLoad {
    double u_cpu = 0.0;
    double u_gpu = 0.0;
    double u_mem = 0.0;
    double installed_mem_gb = 0.0;
};

struct DcStepResult {
    double it_power_w = 0.0;
    double crac_fan_w = 0.0;
    double chiller_w = 0.0;
    double ct_fan_w = 0.0;
    double pump_w = 0.0;
    double total_power_w = 0.0;
    double energy_kwh = 0.0;
    double water_l_15min = 0.0;
    double crac_load_w = 0.0;
    double crac_return_temp_c = 0.0;
    std::vector<double> rack_inlet_temps_c;
    std::vector<double> rack_outlet_temps_c;
    std::vector<double> rack_power_w;
    std::vector<double> rack_airflow_m3s;
    double hru_recovered_w = 0.0;
    double setpoint_c = 0.0;

    bool operator==(const DcStepResult&) const = default;
};

/// One 15-minute evaluation. The optional action is applied to the setpoint
/// before anything else; the resulting setpoint is reported in the result.
DcStepResult dc_physics_step(const DcPhysicsParams& params, const HvacContext& ctx, const DcState& state,
                             const DcLoad& load, const Weather& weather, std::optional<HvacAction> action,
                             bool hru_enabled);

}  // namespace geodc::physics
