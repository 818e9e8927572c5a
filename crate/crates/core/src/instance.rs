//! TOML instance files.
//!
//! Time series are either an explicit list with one entry per period or a
//! `{ repeat = [...] }` pattern whose length divides the horizon (24 hourly
//! values repeated seven times for a week). Trapezoids are 4-element arrays
//! `[mu1, mu2, mu3, mu4]`. See `data/demo_week.toml` for an annotated example.
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::TrapezoidalFuzzy;
use crate::nexus::{
    Battery, DemandProfile, InstanceError, NexusInstance, PenaltySchedule, ThermalUnit, TimeGrid,
    WaterAsset, WaterRole, WindUnit,
};

/// The bundled one-week demo instance.
pub const DEMO_WEEK: &str = include_str!("../data/demo_week.toml");

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    horizon: RawHorizon,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limits: Option<RawLimits>,
    demand: RawDemand,
    penalties: RawPenalties,
    #[serde(default)]
    thermal: Vec<RawThermal>,
    #[serde(default)]
    wind: Vec<RawWind>,
    #[serde(default)]
    battery: Vec<RawBattery>,
    #[serde(default)]
    water: Vec<RawWater>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHorizon {
    periods: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    thermal_withdrawal_cap: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawSeries<T> {
    List(Vec<T>),
    Repeat(RawRepeat<T>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRepeat<T> {
    repeat: Vec<T>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDemand {
    electricity: RawSeries<f64>,
    water: RawSeries<f64>,
    wastewater_return: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPenalties {
    unmet_electricity: f64,
    unmet_water: f64,
    untreated_wastewater: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    #[serde(default)]
    name: Option<String>,
    capacity: f64,
    min_output: f64,
    cost: f64,
    #[serde(default)]
    water_intensity: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWind {
    #[serde(default)]
    name: Option<String>,
    availability: RawSeries<Vec<f64>>,
    efficiency: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBattery {
    #[serde(default)]
    name: Option<String>,
    energy_capacity: f64,
    max_charge: f64,
    max_discharge: f64,
    round_trip_efficiency: f64,
    #[serde(default)]
    initial_energy: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWater {
    #[serde(default)]
    name: Option<String>,
    role: String,
    capacity: f64,
    specific_energy: f64,
    cost: f64,
}

fn expand<T: Clone>(
    series: RawSeries<T>,
    periods: usize,
    path: &str,
) -> Result<Vec<T>, InstanceError> {
    match series {
        RawSeries::List(values) => {
            if values.len() != periods {
                return Err(InstanceError::new(
                    path,
                    format!(
                        "list must have one entry per period ({periods}), got {}",
                        values.len()
                    ),
                ));
            }
            Ok(values)
        }
        RawSeries::Repeat(RawRepeat { repeat }) => {
            if repeat.is_empty() || !periods.is_multiple_of(repeat.len()) {
                return Err(InstanceError::new(
                    path,
                    format!(
                        "repeat pattern length {} must be nonzero and divide the horizon ({periods})",
                        repeat.len()
                    ),
                ));
            }
            Ok(repeat.iter().cycle().take(periods).cloned().collect())
        }
    }
}

fn trapezoid(values: &[f64], path: &str) -> Result<TrapezoidalFuzzy, InstanceError> {
    let arr: [f64; 4] = values.try_into().map_err(|_| {
        InstanceError::new(
            path,
            format!(
                "trapezoid needs exactly 4 components [mu1, mu2, mu3, mu4], got {}",
                values.len()
            ),
        )
    })?;
    TrapezoidalFuzzy::from_array(arr).map_err(|e| match e {
        crate::fuzzy::FuzzyError::Unordered(_) => {
            InstanceError::new(path, "trapezoid must satisfy mu1 ≤ mu2 ≤ mu3 ≤ mu4")
        }
        other => InstanceError::new(path, other.to_string()),
    })
}

fn parse_role(role: &str, path: &str) -> Result<WaterRole, InstanceError> {
    match role {
        "source" => Ok(WaterRole::Source),
        "link" => Ok(WaterRole::TransmissionLink),
        "treatment" => Ok(WaterRole::TreatmentPlant),
        other => Err(InstanceError::new(
            path,
            format!("unknown water role `{other}` (expected source, link or treatment)"),
        )),
    }
}

/// Parse and validate an instance from TOML text.
pub fn parse_instance(text: &str) -> Result<NexusInstance, ParseError> {
    let raw: InstanceFile = toml::from_str(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    let periods = raw.horizon.periods;
    if periods == 0 {
        return Err(InstanceError::new("horizon.periods", "must be ≥ 1").into());
    }

    let thermal = raw
        .thermal
        .into_iter()
        .enumerate()
        .map(|(i, g)| ThermalUnit {
            name: g.name.unwrap_or_else(|| format!("thermal{i}")),
            capacity: g.capacity,
            min_output: g.min_output,
            cost: g.cost,
            water_intensity: g.water_intensity,
        })
        .collect();

    let mut wind = Vec::new();
    for (i, w) in raw.wind.into_iter().enumerate() {
        let path = format!("wind[{i}].availability");
        let availability = expand(w.availability, periods, &path)?
            .iter()
            .enumerate()
            .map(|(k, a)| trapezoid(a, &format!("{path}[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let efficiency = trapezoid(&w.efficiency, &format!("wind[{i}].efficiency"))?;
        wind.push(WindUnit {
            name: w.name.unwrap_or_else(|| format!("wind{i}")),
            availability,
            efficiency,
        });
    }

    let batteries = raw
        .battery
        .into_iter()
        .enumerate()
        .map(|(i, b)| Battery {
            name: b.name.unwrap_or_else(|| format!("battery{i}")),
            energy_capacity: b.energy_capacity,
            max_charge: b.max_charge,
            max_discharge: b.max_discharge,
            round_trip_efficiency: b.round_trip_efficiency,
            initial_energy: b.initial_energy,
        })
        .collect();

    let mut water = Vec::new();
    for (i, w) in raw.water.into_iter().enumerate() {
        let role = parse_role(&w.role, &format!("water[{i}].role"))?;
        water.push(WaterAsset {
            name: w.name.unwrap_or_else(|| format!("{}{i}", role.name())),
            role,
            capacity: w.capacity,
            specific_energy: w.specific_energy,
            cost: w.cost,
        });
    }

    let instance = NexusInstance {
        grid: TimeGrid { periods },
        thermal,
        wind,
        batteries,
        water,
        demand: DemandProfile {
            electricity: expand(raw.demand.electricity, periods, "demand.electricity")?,
            water: expand(raw.demand.water, periods, "demand.water")?,
            wastewater_return: raw.demand.wastewater_return,
        },
        penalties: PenaltySchedule {
            unmet_electricity: raw.penalties.unmet_electricity,
            unmet_water: raw.penalties.unmet_water,
            untreated_wastewater: raw.penalties.untreated_wastewater,
        },
        thermal_withdrawal_cap: raw.limits.and_then(|l| l.thermal_withdrawal_cap),
    };
    instance.validate()?;
    Ok(instance)
}

/// Write `instance` as TOML with every series spelled out in full.
pub fn write_instance(instance: &NexusInstance) -> String {
    let raw = InstanceFile {
        horizon: RawHorizon {
            periods: instance.grid.periods,
        },
        limits: instance.thermal_withdrawal_cap.map(|cap| RawLimits {
            thermal_withdrawal_cap: Some(cap),
        }),
        demand: RawDemand {
            electricity: RawSeries::List(instance.demand.electricity.clone()),
            water: RawSeries::List(instance.demand.water.clone()),
            wastewater_return: instance.demand.wastewater_return,
        },
        penalties: RawPenalties {
            unmet_electricity: instance.penalties.unmet_electricity,
            unmet_water: instance.penalties.unmet_water,
            untreated_wastewater: instance.penalties.untreated_wastewater,
        },
        thermal: instance
            .thermal
            .iter()
            .map(|g| RawThermal {
                name: Some(g.name.clone()),
                capacity: g.capacity,
                min_output: g.min_output,
                cost: g.cost,
                water_intensity: g.water_intensity,
            })
            .collect(),
        wind: instance
            .wind
            .iter()
            .map(|w| RawWind {
                name: Some(w.name.clone()),
                availability: RawSeries::List(
                    w.availability
                        .iter()
                        .map(|a| a.to_array().to_vec())
                        .collect(),
                ),
                efficiency: w.efficiency.to_array().to_vec(),
            })
            .collect(),
        battery: instance
            .batteries
            .iter()
            .map(|b| RawBattery {
                name: Some(b.name.clone()),
                energy_capacity: b.energy_capacity,
                max_charge: b.max_charge,
                max_discharge: b.max_discharge,
                round_trip_efficiency: b.round_trip_efficiency,
                initial_energy: b.initial_energy,
            })
            .collect(),
        water: instance
            .water
            .iter()
            .map(|w| RawWater {
                name: Some(w.name.clone()),
                role: w.role.name().to_string(),
                capacity: w.capacity,
                specific_energy: w.specific_energy,
                cost: w.cost,
            })
            .collect(),
    };
    toml::to_string(&raw).expect("instance serializes to TOML")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[horizon]
periods = 1

[demand]
electricity = [0.0]
water = [0.0]
wastewater_return = 0.0

[penalties]
unmet_electricity = 1000.0
unmet_water = 10.0
untreated_wastewater = 5.0
"#;

    #[test]
    fn minimal_file_is_empty_system() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert_eq!(inst.periods(), 1);
        assert!(inst.thermal.is_empty() && inst.wind.is_empty());
        assert!(inst.batteries.is_empty() && inst.water.is_empty());
        assert_eq!(inst.demand.electricity, vec![0.0]);
    }

    fn with_wind(availability: &str, efficiency: &str) -> String {
        format!(
            "{MINIMAL}\n[[wind]]\nname = \"farm\"\navailability = {availability}\nefficiency = {efficiency}\n"
        )
    }

    #[test]
    fn reversed_trapezoid_reports_ordering_rule() {
        let err = parse_instance(&with_wind("[[4.0, 3.0, 2.0, 1.0]]", "[1, 1, 1, 1]")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wind[0].availability[0]"), "{msg}");
        assert!(msg.contains("mu1 ≤ mu2 ≤ mu3 ≤ mu4"), "{msg}");
    }

    #[test]
    fn wrong_arity_is_reported() {
        let err = parse_instance(&with_wind("[[1.0, 2.0, 3.0]]", "[1, 1, 1, 1]")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("exactly 4 components"), "{msg}");
        assert!(msg.contains("wind[0].availability[0]"), "{msg}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_instance("[horizon\nperiods = 1").unwrap_err();
        assert!(matches!(err, ParseError::Syntax(_)));
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn repeat_pattern_expands() {
        let text = MINIMAL
            .replace("periods = 1", "periods = 6")
            .replace(
                "electricity = [0.0]",
                "electricity = { repeat = [1.0, 2.0, 3.0] }",
            )
            .replace("water = [0.0]", "water = { repeat = [5.0] }");
        let inst = parse_instance(&text).unwrap();
        assert_eq!(inst.demand.electricity, vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert_eq!(inst.demand.water, vec![5.0; 6]);

        let bad = text.replace("[1.0, 2.0, 3.0]", "[1.0, 2.0, 3.0, 4.0]");
        let err = parse_instance(&bad).unwrap_err();
        assert!(err.to_string().starts_with("demand.electricity:"), "{err}");
    }

    #[test]
    fn unknown_role_and_fields_are_rejected() {
        let text = format!(
            "{MINIMAL}\n[[water]]\nrole = \"reservoir\"\ncapacity = 1.0\nspecific_energy = 0.0\ncost = 0.0\n"
        );
        assert!(parse_instance(&text)
            .unwrap_err()
            .to_string()
            .contains("water[0].role"));
        let text = format!("{MINIMAL}\n[[battery]]\nenergy_capacity = 1.0\nmax_charge = 1.0\nmax_discharge = 1.0\nround_trip_efficiency = 0.9\nvolts = 3\n");
        assert!(matches!(parse_instance(&text), Err(ParseError::Syntax(_))));
    }

    #[test]
    fn written_instance_reparses_identically() {
        let text = with_wind(
            "{ repeat = [[0.0, 1.5, 2.0, 2.25]] }",
            "[0.8, 0.85, 0.9, 1.0]",
        )
        .replace("wastewater_return = 0.0", "wastewater_return = 0.7")
            + "\n[limits]\nthermal_withdrawal_cap = 12.5\n";
        let inst = parse_instance(&text).unwrap();
        let again = parse_instance(&write_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }
}
