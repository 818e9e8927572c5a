use crate::solver::{LinearProgram, Relation, Solution, SolveStatus, VarId};

use super::{effective_wind_cap, InstanceError, NexusInstance, UncertaintyPlan, WaterRole};

const KWH_PER_MWH: f64 = 1000.0;

/// Column handles for one period of the compiled model.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodVars {
    pub thermal_output: Vec<VarId>,
    pub commitment: Vec<VarId>,
    pub wind: Vec<VarId>,
    /// Crisp upper bound placed on each wind dispatch column.
    pub wind_cap: Vec<f64>,
    pub charge: Vec<VarId>,
    pub discharge: Vec<VarId>,
    pub state: Vec<VarId>,
    pub extraction: Vec<VarId>,
    pub transmission: Vec<VarId>,
    pub treatment: Vec<VarId>,
    pub unmet_electricity: VarId,
    pub unmet_water: VarId,
    pub untreated_wastewater: VarId,
}

/// A compiled deterministic-equivalent problem plus the map back to the
/// instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledNexus {
    pub lp: LinearProgram,
    pub plan: UncertaintyPlan,
    pub periods: Vec<PeriodVars>,
}

/// Replace each fuzzy wind chance constraint by its crisp equivalent under
/// `plan` and emit the resulting MILP.
pub fn compile(
    instance: &NexusInstance,
    plan: &UncertaintyPlan,
) -> Result<CompiledNexus, InstanceError> {
    instance.validate()?;
    let mut lp = LinearProgram::new();
    let sources: Vec<_> = instance.assets(WaterRole::Source).collect();
    let links: Vec<_> = instance.assets(WaterRole::TransmissionLink).collect();
    let plants: Vec<_> = instance.assets(WaterRole::TreatmentPlant).collect();
    let pen = &instance.penalties;
    let mut periods: Vec<PeriodVars> = Vec::with_capacity(instance.periods());

    for t in 0..instance.periods() {
        let mut thermal_output = Vec::new();
        let mut commitment = Vec::new();
        for g in &instance.thermal {
            thermal_output.push(lp.add_continuous(
                format!("p_{}_{t}", g.name),
                0.0,
                g.capacity,
                g.cost,
            ));
            commitment.push(lp.add_binary(format!("u_{}_{t}", g.name), 0.0));
        }

        let mut wind = Vec::new();
        let mut wind_cap = Vec::new();
        for (i, w) in instance.wind.iter().enumerate() {
            let cap = effective_wind_cap(w, t, plan)
                .map_err(|e| InstanceError::new(format!("wind[{i}]"), e.to_string()))?;
            wind.push(lp.add_continuous(format!("w_{}_{t}", w.name), 0.0, cap, 0.0));
            wind_cap.push(cap);
        }

        let mut charge = Vec::new();
        let mut discharge = Vec::new();
        let mut state = Vec::new();
        for b in &instance.batteries {
            charge.push(lp.add_continuous(format!("c_{}_{t}", b.name), 0.0, b.max_charge, 0.0));
            discharge.push(lp.add_continuous(
                format!("d_{}_{t}", b.name),
                0.0,
                b.max_discharge,
                0.0,
            ));
            state.push(lp.add_continuous(format!("s_{}_{t}", b.name), 0.0, b.energy_capacity, 0.0));
        }

        let mut flows = |assets: &[&super::WaterAsset], prefix: &str| -> Vec<VarId> {
            assets
                .iter()
                .map(|a| {
                    lp.add_continuous(format!("{prefix}_{}_{t}", a.name), 0.0, a.capacity, a.cost)
                })
                .collect()
        };
        let extraction = flows(&sources, "x");
        let transmission = flows(&links, "y");
        let treatment = flows(&plants, "z");

        let unmet_electricity = lp.add_continuous(
            format!("unmet_elec_{t}"),
            0.0,
            f64::INFINITY,
            pen.unmet_electricity,
        );
        let unmet_water = lp.add_continuous(
            format!("unmet_water_{t}"),
            0.0,
            f64::INFINITY,
            pen.unmet_water,
        );
        let untreated_wastewater = lp.add_continuous(
            format!("untreated_{t}"),
            0.0,
            f64::INFINITY,
            pen.untreated_wastewater,
        );

        // Power balance, with the water chain's pumping and treatment load on
        // the demand side.
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        terms.extend(thermal_output.iter().map(|&v| (v, 1.0)));
        terms.extend(wind.iter().map(|&v| (v, 1.0)));
        terms.extend(discharge.iter().map(|&v| (v, 1.0)));
        terms.extend(charge.iter().map(|&v| (v, -1.0)));
        terms.push((unmet_electricity, 1.0));
        for (vars, assets) in [
            (&extraction, &sources),
            (&transmission, &links),
            (&treatment, &plants),
        ] {
            terms.extend(
                vars.iter()
                    .zip(assets.iter())
                    .map(|(&v, a)| (v, -a.specific_energy / KWH_PER_MWH)),
            );
        }
        lp.add_row(
            format!("balance_{t}"),
            terms,
            Relation::Equal,
            instance.demand.electricity[t],
        );

        for (k, g) in instance.thermal.iter().enumerate() {
            let (p, u) = (thermal_output[k], commitment[k]);
            lp.add_row(
                format!("min_{}_{t}", g.name),
                vec![(p, 1.0), (u, -g.min_output)],
                Relation::GreaterEq,
                0.0,
            );
            lp.add_row(
                format!("max_{}_{t}", g.name),
                vec![(p, 1.0), (u, -g.capacity)],
                Relation::LessEq,
                0.0,
            );
        }

        for (k, b) in instance.batteries.iter().enumerate() {
            let mut terms = vec![
                (state[k], 1.0),
                (charge[k], -b.round_trip_efficiency),
                (discharge[k], 1.0),
            ];
            let rhs = match periods.last() {
                Some(prev) => {
                    terms.push((prev.state[k], -1.0));
                    0.0
                }
                None => b.initial_energy,
            };
            lp.add_row(format!("soc_{}_{t}", b.name), terms, Relation::Equal, rhs);
        }

        let mut terms: Vec<(VarId, f64)> = extraction.iter().map(|&v| (v, 1.0)).collect();
        terms.extend(transmission.iter().map(|&v| (v, -1.0)));
        lp.add_row(format!("water_flow_{t}"), terms, Relation::Equal, 0.0);

        let mut terms: Vec<(VarId, f64)> = transmission.iter().map(|&v| (v, 1.0)).collect();
        terms.push((unmet_water, 1.0));
        lp.add_row(
            format!("water_demand_{t}"),
            terms,
            Relation::Equal,
            instance.demand.water[t],
        );

        let r = instance.demand.wastewater_return;
        let mut terms: Vec<(VarId, f64)> = transmission.iter().map(|&v| (v, r)).collect();
        terms.extend(treatment.iter().map(|&v| (v, -1.0)));
        terms.push((untreated_wastewater, -1.0));
        lp.add_row(format!("wastewater_{t}"), terms, Relation::Equal, 0.0);

        if let Some(cap) = instance.thermal_withdrawal_cap {
            let terms = thermal_output
                .iter()
                .zip(&instance.thermal)
                .map(|(&p, g)| (p, g.water_intensity))
                .collect();
            lp.add_row(format!("withdrawal_{t}"), terms, Relation::LessEq, cap);
        }

        periods.push(PeriodVars {
            thermal_output,
            commitment,
            wind,
            wind_cap,
            charge,
            discharge,
            state,
            extraction,
            transmission,
            treatment,
            unmet_electricity,
            unmet_water,
            untreated_wastewater,
        });
    }

    Ok(CompiledNexus {
        lp,
        plan: *plan,
        periods,
    })
}

/// Objective split by cause, in dollars, plus thermal cooling withdrawal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub fuel: f64,
    pub water_operations: f64,
    pub unmet_electricity: f64,
    pub unmet_water: f64,
    pub untreated_wastewater: f64,
    /// m³ over the horizon; reported only, not priced.
    pub thermal_withdrawal: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.fuel
            + self.water_operations
            + self.unmet_electricity
            + self.unmet_water
            + self.untreated_wastewater
    }
}

pub fn total_cost_breakdown(
    instance: &NexusInstance,
    compiled: &CompiledNexus,
    solution: &Solution,
) -> Result<CostBreakdown, InstanceError> {
    if solution.status != SolveStatus::Optimal {
        return Err(InstanceError::new(
            "solution",
            format!(
                "cost breakdown needs an optimal solution, got {}",
                solution.status
            ),
        ));
    }
    if solution.values.len() != compiled.lp.num_vars() {
        return Err(InstanceError::new(
            "solution",
            "does not belong to this compiled problem",
        ));
    }
    let value = |v: VarId| solution.value(v);
    let sources: Vec<_> = instance.assets(WaterRole::Source).collect();
    let links: Vec<_> = instance.assets(WaterRole::TransmissionLink).collect();
    let plants: Vec<_> = instance.assets(WaterRole::TreatmentPlant).collect();
    let pen = &instance.penalties;

    let mut out = CostBreakdown::default();
    for pv in &compiled.periods {
        for (&p, g) in pv.thermal_output.iter().zip(&instance.thermal) {
            out.fuel += g.cost * value(p);
            out.thermal_withdrawal += g.water_intensity * value(p);
        }
        for (vars, assets) in [
            (&pv.extraction, &sources),
            (&pv.transmission, &links),
            (&pv.treatment, &plants),
        ] {
            for (&v, a) in vars.iter().zip(assets.iter()) {
                out.water_operations += a.cost * value(v);
            }
        }
        out.unmet_electricity += pen.unmet_electricity * value(pv.unmet_electricity);
        out.unmet_water += pen.unmet_water * value(pv.unmet_water);
        out.untreated_wastewater += pen.untreated_wastewater * value(pv.untreated_wastewater);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{MeasureKind, TrapezoidalFuzzy};
    use crate::nexus::{
        Battery, DemandProfile, PenaltySchedule, ThermalUnit, TimeGrid, WaterAsset, WindUnit,
    };
    use crate::solver::{solve_milp, SolverConfig};

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
                unmet_electricity: 10_000.0,
                unmet_water: 100.0,
                untreated_wastewater: 50.0,
            },
            thermal_withdrawal_cap: None,
        }
    }

    fn wind(a: [f64; 4]) -> WindUnit {
        WindUnit {
            name: "wind".into(),
            availability: vec![TrapezoidalFuzzy::from_array(a).unwrap()],
            efficiency: TrapezoidalFuzzy::crisp(1.0).unwrap(),
        }
    }

    fn solve(inst: &NexusInstance, kind: MeasureKind, alpha: f64) -> (CompiledNexus, Solution) {
        let compiled = compile(inst, &UncertaintyPlan::new(kind, alpha).unwrap()).unwrap();
        let s = solve_milp(&compiled.lp, &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        (compiled, s)
    }

    #[test]
    fn empty_system_costs_nothing() {
        let inst = empty(1);
        let (compiled, s) = solve(&inst, MeasureKind::Possibility, 0.5);
        assert_eq!(s.objective, 0.0);
        let b = total_cost_breakdown(&inst, &compiled, &s).unwrap();
        assert_eq!(b, CostBreakdown::default());
    }

    #[test]
    fn wind_covers_demand_for_free() {
        let mut inst = empty(1);
        inst.demand.electricity = vec![10.0];
        inst.wind.push(wind([12.0, 14.0, 16.0, 18.0]));
        let (compiled, s) = solve(&inst, MeasureKind::Necessity, 1.0);
        assert!(s.objective.abs() < 1e-9);
        assert!((s.value(compiled.periods[0].wind[0]) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_fills_wind_shortfall() {
        let mut inst = empty(1);
        inst.demand.electricity = vec![10.0];
        inst.wind.push(wind([4.0, 6.0, 8.0, 10.0]));
        inst.thermal.push(ThermalUnit {
            name: "gas".into(),
            capacity: 20.0,
            min_output: 0.0,
            cost: 30.0,
            water_intensity: 0.0,
        });
        let (compiled, s) = solve(&inst, MeasureKind::Necessity, 1.0);
        let pv = &compiled.periods[0];
        assert!((s.value(pv.wind[0]) - 4.0).abs() < 1e-9);
        assert!((s.value(pv.thermal_output[0]) - 6.0).abs() < 1e-9);
        assert!((s.objective - 180.0).abs() < 1e-9);
        let b = total_cost_breakdown(&inst, &compiled, &s).unwrap();
        assert!((b.fuel - 180.0).abs() < 1e-9);
        assert_eq!(
            b.water_operations + b.unmet_electricity + b.unmet_water + b.untreated_wastewater,
            0.0
        );
    }

    fn full(periods: usize) -> NexusInstance {
        let mut inst = empty(periods);
        inst.thermal = vec![
            ThermalUnit {
                name: "base".into(),
                capacity: 50.0,
                min_output: 10.0,
                cost: 40.0,
                water_intensity: 1.5,
            },
            ThermalUnit {
                name: "peak".into(),
                capacity: 30.0,
                min_output: 5.0,
                cost: 90.0,
                water_intensity: 0.3,
            },
        ];
        inst.wind = vec![WindUnit {
            name: "farm".into(),
            availability: (0..periods)
                .map(|t| {
                    let c = 10.0 + 5.0 * (t % 3) as f64;
                    TrapezoidalFuzzy::new(c - 6.0, c - 2.0, c + 2.0, c + 6.0).unwrap()
                })
                .collect(),
            efficiency: TrapezoidalFuzzy::new(0.8, 0.9, 0.95, 1.0).unwrap(),
        }];
        inst.batteries = vec![Battery {
            name: "bat".into(),
            energy_capacity: 20.0,
            max_charge: 5.0,
            max_discharge: 5.0,
            round_trip_efficiency: 0.9,
            initial_energy: 10.0,
        }];
        inst.water = vec![
            WaterAsset {
                name: "well".into(),
                role: WaterRole::Source,
                capacity: 500.0,
                specific_energy: 0.5,
                cost: 0.05,
            },
            WaterAsset {
                name: "main".into(),
                role: WaterRole::TransmissionLink,
                capacity: 450.0,
                specific_energy: 0.3,
                cost: 0.02,
            },
            WaterAsset {
                name: "plant".into(),
                role: WaterRole::TreatmentPlant,
                capacity: 300.0,
                specific_energy: 0.6,
                cost: 0.1,
            },
        ];
        inst.demand = DemandProfile {
            electricity: (0..periods).map(|t| 40.0 + 10.0 * (t % 4) as f64).collect(),
            water: (0..periods)
                .map(|t| 350.0 + 50.0 * (t % 3) as f64)
                .collect(),
            wastewater_return: 0.8,
        };
        inst
    }

    #[test]
    fn problem_size_matches_closed_form() {
        let t = 5;
        let mut inst = full(t);
        let count = |inst: &NexusInstance| {
            let (g, w, b, nw) = (
                inst.thermal.len(),
                inst.wind.len(),
                inst.batteries.len(),
                inst.water.len(),
            );
            let vars = t * (2 * g + w + 3 * b + nw + 3);
            let extra = usize::from(inst.thermal_withdrawal_cap.is_some());
            let rows = t * (1 + 2 * g + b + 3 + extra);
            (vars, rows, t * g)
        };
        let plan = UncertaintyPlan::new(MeasureKind::Credibility, 0.5).unwrap();
        let c = compile(&inst, &plan).unwrap();
        assert_eq!(
            (c.lp.num_vars(), c.lp.num_rows(), c.lp.num_binaries()),
            count(&inst)
        );
        // 5 periods × (4 + 1 + 3 + 3 + 3) variables, 5 × (1 + 4 + 1 + 3) rows
        assert_eq!(count(&inst), (70, 45, 10));

        inst.thermal_withdrawal_cap = Some(40.0);
        let c = compile(&inst, &plan).unwrap();
        assert_eq!(
            (c.lp.num_vars(), c.lp.num_rows(), c.lp.num_binaries()),
            count(&inst)
        );
    }

    #[test]
    fn breakdown_sums_to_objective_and_battery_conserves() {
        let inst = full(8);
        for kind in MeasureKind::ALL {
            let (compiled, s) = solve(&inst, kind, 0.75);
            assert!(compiled.lp.max_violation(&s.values) < 1e-6);
            let b = total_cost_breakdown(&inst, &compiled, &s).unwrap();
            assert!(
                (b.total() - s.objective).abs() < 1e-6,
                "{} vs {}",
                b.total(),
                s.objective
            );

            let bat = &inst.batteries[0];
            let mut net = 0.0;
            for pv in &compiled.periods {
                net += bat.round_trip_efficiency * s.value(pv.charge[0]) - s.value(pv.discharge[0]);
                assert!(s.value(pv.wind[0]) <= pv.wind_cap[0] + 1e-7);
            }
            let last = s.value(compiled.periods.last().unwrap().state[0]);
            assert!((last - bat.initial_energy - net).abs() < 1e-6);
        }
    }

    #[test]
    fn breakdown_rejects_non_optimal() {
        let inst = empty(1);
        let compiled = compile(
            &inst,
            &UncertaintyPlan::new(MeasureKind::Possibility, 0.0).unwrap(),
        )
        .unwrap();
        let s = Solution::without_point(SolveStatus::NodeLimit);
        assert!(total_cost_breakdown(&inst, &compiled, &s).is_err());
    }

    #[test]
    fn compile_rejects_invalid_instance() {
        let mut inst = empty(1);
        inst.demand.electricity = vec![-1.0];
        let plan = UncertaintyPlan::new(MeasureKind::Possibility, 0.0).unwrap();
        assert_eq!(
            compile(&inst, &plan).unwrap_err().path,
            "demand.electricity[0]"
        );
    }
}
