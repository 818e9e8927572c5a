//! Energy-water nexus instances and their deterministic-equivalent MILP.
//!
//! The power side has thermal units with on/off commitment, wind farms whose
//! hourly availability and conversion efficiency are trapezoidal fuzzy
//! numbers, and batteries. The water side is a chain of extraction sources,
//! transmission links and wastewater treatment plants whose pumping and
//! treatment energy is drawn from the power balance. Unmet electricity, unmet
//! water and untreated wastewater are penalized slacks, so every compiled
//! problem is feasible.
use thiserror::Error;

use crate::fuzzy::{crisp_bound, Confidence, Direction, FuzzyError, MeasureKind, TrapezoidalFuzzy};

mod compile;

pub use compile::{compile, total_cost_breakdown, CompiledNexus, CostBreakdown, PeriodVars};

/// Problem-specific validation failure, reported with the offending field path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {rule}")]
pub struct InstanceError {
    pub path: String,
    pub rule: String,
}

impl InstanceError {
    pub fn new(path: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            rule: rule.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    /// Number of one-hour periods.
    pub periods: usize,
}

impl TimeGrid {
    /// One week of hours.
    pub const WEEK: TimeGrid = TimeGrid { periods: 168 };

    pub const PERIOD_HOURS: f64 = 1.0;
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::WEEK
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalUnit {
    pub name: String,
    /// MW
    pub capacity: f64,
    /// MW while committed
    pub min_output: f64,
    /// $/MWh
    pub cost: f64,
    /// m³/MWh withdrawn for cooling
    pub water_intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindUnit {
    pub name: String,
    /// MW, one trapezoid per period.
    pub availability: Vec<TrapezoidalFuzzy>,
    /// Dimensionless conversion efficiency, support within [0, 1].
    pub efficiency: TrapezoidalFuzzy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Battery {
    pub name: String,
    /// MWh
    pub energy_capacity: f64,
    /// MW
    pub max_charge: f64,
    /// MW
    pub max_discharge: f64,
    /// Applied on charging, in (0, 1].
    pub round_trip_efficiency: f64,
    /// MWh stored before the first period.
    pub initial_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaterRole {
    Source,
    TransmissionLink,
    TreatmentPlant,
}

impl WaterRole {
    pub fn name(self) -> &'static str {
        match self {
            WaterRole::Source => "source",
            WaterRole::TransmissionLink => "link",
            WaterRole::TreatmentPlant => "treatment",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterAsset {
    pub name: String,
    pub role: WaterRole,
    /// m³/h
    pub capacity: f64,
    /// kWh/m³
    pub specific_energy: f64,
    /// $/m³
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    /// MW per period
    pub electricity: Vec<f64>,
    /// m³/h per period
    pub water: Vec<f64>,
    /// Share of delivered water returning as wastewater.
    pub wastewater_return: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySchedule {
    /// $/MWh
    pub unmet_electricity: f64,
    /// $/m³
    pub unmet_water: f64,
    /// $/m³
    pub untreated_wastewater: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NexusInstance {
    pub grid: TimeGrid,
    pub thermal: Vec<ThermalUnit>,
    pub wind: Vec<WindUnit>,
    pub batteries: Vec<Battery>,
    pub water: Vec<WaterAsset>,
    pub demand: DemandProfile,
    pub penalties: PenaltySchedule,
    /// Optional cap on total thermal cooling withdrawal per period (m³/h).
    /// Unconstrained when absent.
    pub thermal_withdrawal_cap: Option<f64>,
}

/// The defuzzification policy applied to every fuzzy parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyPlan {
    pub kind: MeasureKind,
    pub alpha: Confidence,
}

impl UncertaintyPlan {
    pub fn new(kind: MeasureKind, alpha: f64) -> Result<Self, FuzzyError> {
        Ok(Self {
            kind,
            alpha: Confidence::new(alpha)?,
        })
    }
}

fn check(cond: bool, path: impl FnOnce() -> String, rule: &str) -> Result<(), InstanceError> {
    if cond {
        Ok(())
    } else {
        Err(InstanceError::new(path(), rule))
    }
}

fn nonneg(value: f64, path: impl FnOnce() -> String) -> Result<(), InstanceError> {
    check(
        value.is_finite() && value >= 0.0,
        path,
        "must be finite and ≥ 0",
    )
}

impl NexusInstance {
    pub fn periods(&self) -> usize {
        self.grid.periods
    }

    pub fn assets(&self, role: WaterRole) -> impl Iterator<Item = &WaterAsset> {
        self.water.iter().filter(move |w| w.role == role)
    }

    /// Check every invariant of every component.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let t = self.grid.periods;
        check(t >= 1, || "horizon.periods".into(), "must be ≥ 1")?;

        for (i, g) in self.thermal.iter().enumerate() {
            let p = |f: &str| format!("thermal[{i}].{f}");
            nonneg(g.capacity, || p("capacity"))?;
            nonneg(g.min_output, || p("min_output"))?;
            check(
                g.min_output <= g.capacity,
                || p("min_output"),
                "must satisfy 0 ≤ min_output ≤ capacity",
            )?;
            nonneg(g.cost, || p("cost"))?;
            nonneg(g.water_intensity, || p("water_intensity"))?;
        }

        for (i, w) in self.wind.iter().enumerate() {
            let p = |f: &str| format!("wind[{i}].{f}");
            check(
                w.availability.len() == t,
                || p("availability"),
                &format!(
                    "must have one trapezoid per period ({t}), got {}",
                    w.availability.len()
                ),
            )?;
            for (k, a) in w.availability.iter().enumerate() {
                check(
                    a.mu1() >= 0.0,
                    || format!("wind[{i}].availability[{k}]"),
                    "components must be ≥ 0",
                )?;
            }
            check(
                w.efficiency.mu1() >= 0.0,
                || p("efficiency"),
                "components must be ≥ 0",
            )?;
            check(
                w.efficiency.mu4() <= 1.0,
                || p("efficiency"),
                "components must be ≤ 1",
            )?;
        }

        for (i, b) in self.batteries.iter().enumerate() {
            let p = |f: &str| format!("battery[{i}].{f}");
            nonneg(b.energy_capacity, || p("energy_capacity"))?;
            nonneg(b.max_charge, || p("max_charge"))?;
            nonneg(b.max_discharge, || p("max_discharge"))?;
            check(
                b.round_trip_efficiency > 0.0 && b.round_trip_efficiency <= 1.0,
                || p("round_trip_efficiency"),
                "must lie in (0, 1]",
            )?;
            nonneg(b.initial_energy, || p("initial_energy"))?;
            check(
                b.initial_energy <= b.energy_capacity,
                || p("initial_energy"),
                "must satisfy 0 ≤ initial_energy ≤ energy_capacity",
            )?;
        }

        for (i, w) in self.water.iter().enumerate() {
            let p = |f: &str| format!("water[{i}].{f}");
            nonneg(w.capacity, || p("capacity"))?;
            nonneg(w.specific_energy, || p("specific_energy"))?;
            nonneg(w.cost, || p("cost"))?;
        }

        let d = &self.demand;
        for (name, series) in [("electricity", &d.electricity), ("water", &d.water)] {
            check(
                series.len() == t,
                || format!("demand.{name}"),
                &format!("must have one value per period ({t}), got {}", series.len()),
            )?;
            for (k, &v) in series.iter().enumerate() {
                nonneg(v, || format!("demand.{name}[{k}]"))?;
            }
        }
        check(
            (0.0..=1.0).contains(&d.wastewater_return),
            || "demand.wastewater_return".into(),
            "must lie in [0, 1]",
        )?;

        let pen = &self.penalties;
        nonneg(pen.unmet_electricity, || {
            "penalties.unmet_electricity".into()
        })?;
        nonneg(pen.unmet_water, || "penalties.unmet_water".into())?;
        nonneg(pen.untreated_wastewater, || {
            "penalties.untreated_wastewater".into()
        })?;

        if let Some(cap) = self.thermal_withdrawal_cap {
            nonneg(cap, || "limits.thermal_withdrawal_cap".into())?;
        }
        Ok(())
    }

    /// Copy of the instance with every fuzzy parameter replaced by a crisp
    /// value chosen by `pick`.
    pub fn crisped(&self, pick: impl Fn(&TrapezoidalFuzzy) -> f64) -> Self {
        let crisp = |f: &TrapezoidalFuzzy| {
            TrapezoidalFuzzy::crisp(pick(f)).expect("crisp value of a valid trapezoid is finite")
        };
        let mut out = self.clone();
        for w in &mut out.wind {
            w.availability = w.availability.iter().map(crisp).collect();
            w.efficiency = crisp(&w.efficiency);
        }
        out
    }
}

/// Largest wind dispatch (MW) for which the chance constraint
/// `measure{availability·efficiency ≥ p} ≥ α` holds at period `t`.
pub fn effective_wind_cap(
    unit: &WindUnit,
    t: usize,
    plan: &UncertaintyPlan,
) -> Result<f64, FuzzyError> {
    let output = unit.availability[t].product_nonneg(&unit.efficiency)?;
    Ok(crisp_bound(
        &output,
        plan.kind,
        Direction::GreaterOrEqual,
        plan.alpha,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tz(a: f64, b: f64, c: f64, d: f64) -> TrapezoidalFuzzy {
        TrapezoidalFuzzy::new(a, b, c, d).unwrap()
    }

    fn wind(avail: TrapezoidalFuzzy, eff: TrapezoidalFuzzy) -> WindUnit {
        WindUnit {
            name: "w".into(),
            availability: vec![avail],
            efficiency: eff,
        }
    }

    fn plan(kind: MeasureKind, alpha: f64) -> UncertaintyPlan {
        UncertaintyPlan::new(kind, alpha).unwrap()
    }

    #[test]
    fn wind_cap_examples() {
        let one = TrapezoidalFuzzy::crisp(1.0).unwrap();
        let w = wind(tz(12.0, 14.0, 16.0, 18.0), one);
        assert_eq!(
            effective_wind_cap(&w, 0, &plan(MeasureKind::Necessity, 1.0)).unwrap(),
            12.0
        );
        assert_eq!(
            effective_wind_cap(&w, 0, &plan(MeasureKind::Possibility, 0.0)).unwrap(),
            18.0
        );

        let w = wind(
            tz(4.0, 6.0, 8.0, 10.0),
            TrapezoidalFuzzy::crisp(0.5).unwrap(),
        );
        // Hand evaluation: product is (2, 3, 4, 5); lower credibility branch
        // at α = 0.25 gives 2·0.25·4 + 0.5·5.
        let cap = effective_wind_cap(&w, 0, &plan(MeasureKind::Credibility, 0.25)).unwrap();
        assert!((cap - 4.5).abs() < 1e-12);
    }

    fn empty(periods: usize) -> NexusInstance {
        NexusInstance {
            grid: TimeGrid { periods },
            thermal: vec![],
            wind: vec![],
            batteries: vec![],
            water: vec![],
            demand: DemandProfile {
                electricity: vec![0.0; periods],
                water: vec![0.0; periods],
                wastewater_return: 0.0,
            },
            penalties: PenaltySchedule {
                unmet_electricity: 1000.0,
                unmet_water: 10.0,
                untreated_wastewater: 5.0,
            },
            thermal_withdrawal_cap: None,
        }
    }

    #[test]
    fn validation_paths() {
        assert!(empty(1).validate().is_ok());

        let err = empty(0).validate().unwrap_err();
        assert_eq!(err.path, "horizon.periods");

        let mut inst = empty(2);
        inst.demand.water = vec![1.0];
        assert_eq!(inst.validate().unwrap_err().path, "demand.water");

        let mut inst = empty(1);
        inst.thermal.push(ThermalUnit {
            name: "g".into(),
            capacity: 10.0,
            min_output: 20.0,
            cost: 1.0,
            water_intensity: 0.0,
        });
        assert_eq!(inst.validate().unwrap_err().path, "thermal[0].min_output");

        let mut inst = empty(1);
        inst.wind
            .push(wind(tz(1.0, 2.0, 3.0, 4.0), tz(0.5, 0.6, 0.7, 1.2)));
        let err = inst.validate().unwrap_err();
        assert_eq!(err.path, "wind[0].efficiency");
        assert!(err.to_string().contains("≤ 1"));

        let mut inst = empty(1);
        inst.batteries.push(Battery {
            name: "b".into(),
            energy_capacity: 10.0,
            max_charge: 1.0,
            max_discharge: 1.0,
            round_trip_efficiency: 0.0,
            initial_energy: 0.0,
        });
        assert_eq!(
            inst.validate().unwrap_err().path,
            "battery[0].round_trip_efficiency"
        );

        let mut inst = empty(1);
        inst.demand.wastewater_return = 1.5;
        assert_eq!(
            inst.validate().unwrap_err().path,
            "demand.wastewater_return"
        );
    }

    #[test]
    fn crisped_instance_has_no_fuzziness() {
        let mut inst = empty(1);
        inst.wind
            .push(wind(tz(1.0, 2.0, 3.0, 4.0), tz(0.5, 0.6, 0.7, 0.8)));
        let crisp = inst.crisped(|f| f.mu2());
        assert!(crisp.wind[0].availability[0].is_crisp());
        assert_eq!(crisp.wind[0].efficiency.mu1(), 0.6);
    }
}
