use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use semitoeplitz::closability::{self, DecayPolicy, MembershipPolicy};
use semitoeplitz::closure::{self, MuckenhouptPolicy};
use semitoeplitz::hankel::{self, LineMeasure};
use semitoeplitz::measures::{self, adequate_grid, CircleMeasure, Symbol};
use semitoeplitz::toeplitz::{self, FiniteVector};
use semitoeplitz::{Error, PsdPolicy};

use crate::args::{Cli, Command, MeasureArg};
use crate::input::{load_text, parse_vector};
use crate::output::{Report, Table};
use crate::CliError;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn circle_measure(arg: &MeasureArg) -> Result<CircleMeasure, CliError> {
    Ok(CircleMeasure::from_json(&load_text(&arg.measure)?)?)
}

fn line_measure(arg: &MeasureArg) -> Result<LineMeasure, CliError> {
    Ok(LineMeasure::from_json(&load_text(&arg.measure)?)?)
}

fn symbol_of(m: &CircleMeasure) -> Result<&Symbol, CliError> {
    if !m.is_absolutely_continuous() {
        return Err(Error::NotApplicable("this command needs an absolutely continuous measure".into()).into());
    }
    m.symbol()
        .ok_or_else(|| Error::NotApplicable("measure has no density".into()).into())
}

fn complex_rows(values: &[num_complex::Complex64], first: i64) -> Table {
    Table::new(
        &["n", "re", "im"],
        values
            .iter()
            .enumerate()
            .map(|(i, c)| vec![(first + i as i64).to_string(), c.re.to_string(), c.im.to_string()])
            .collect(),
    )
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let grid = cli.grid;
    if !grid.is_power_of_two() {
        return Err(CliError::Input(format!("--grid must be a power of two, got {grid}")));
    }
    let echo: Option<Value>;
    let (params, result, table) = match &cli.command {
        Command::Coeffs { measure, n_max } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let t = measures::coefficient_table(&m, *n_max, grid)?;
            let table = complex_rows(t.one_sided(), 0);
            (
                json!({ "grid": grid, "n_max": n_max }),
                to_value(&t.one_sided()),
                Some(table),
            )
        }
        Command::Form { measure, g } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let g = FiniteVector::new(parse_vector(g)?);
            let cutoff = g.len().saturating_sub(1);
            let grid = adequate_grid(cutoff, grid);
            let t = measures::coefficient_table(&m, cutoff, grid)?;
            let value = toeplitz::quadratic_form_direct(&t, &g)?;
            (
                json!({ "grid": grid, "g": g, "imag_tolerance": toeplitz::FORM_IMAG_TOLERANCE }),
                json!({ "value": value, "norm_sq": g.norm_sqr() }),
                None,
            )
        }
        Command::Apply { measure, g, out_len } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let g = FiniteVector::new(parse_vector(g)?);
            let cutoff = g.len().max(*out_len).saturating_sub(1);
            let grid = adequate_grid(cutoff, grid);
            let t = measures::coefficient_table(&m, cutoff, grid)?;
            let tg = toeplitz::toeplitz_apply(&t, &g, *out_len)?;
            let table = complex_rows(tg.as_slice(), 0);
            (
                json!({ "grid": grid, "g": g, "out_len": out_len }),
                to_value(&tg),
                Some(table),
            )
        }
        Command::Spectrum { measure, orders, n_max } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let orders: Vec<usize> = if orders.is_empty() {
                std::iter::successors(Some(1usize), |n| Some(n * 2))
                    .take_while(|n| n <= n_max)
                    .collect()
            } else {
                orders.clone()
            };
            let top = orders.iter().copied().max().unwrap_or(1);
            let grid = adequate_grid(top, grid);
            let t = measures::coefficient_table(&m, top, grid)?;
            let lams = orders
                .par_iter()
                .map(|&n| toeplitz::section_min_eig(&t, n))
                .collect::<Result<Vec<f64>, _>>()?;
            let floor = measures::gamma_floor(&m, grid)?;
            let table = Table::new(
                &["order", "min_eigenvalue"],
                orders
                    .iter()
                    .zip(&lams)
                    .map(|(n, l)| vec![n.to_string(), l.to_string()])
                    .collect(),
            );
            let sweep: Vec<Value> = orders
                .iter()
                .zip(&lams)
                .map(|(n, l)| json!({ "order": n, "min_eigenvalue": l }))
                .collect();
            (
                json!({ "grid": grid, "orders": orders }),
                json!({ "gamma_floor": floor, "sweep": sweep }),
                Some(table),
            )
        }
        Command::Psd {
            measure,
            order,
            rel_tol,
        } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let grid = adequate_grid(*order, grid);
            let t = measures::coefficient_table(&m, *order, grid)?;
            let policy = PsdPolicy { rel_tol: *rel_tol };
            let rep = toeplitz::psd_check_with(&t, *order, policy)?;
            (
                json!({ "grid": grid, "order": order, "policy": policy }),
                to_value(&rep),
                None,
            )
        }
        Command::Classify { measure } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let v = closability::classify_measure(&m, grid)?;
            (json!({ "grid": grid }), to_value(&v), None)
        }
        Command::Decay {
            measure,
            n_max,
            tail_start,
            nondecay_fraction,
            l2_tail_share,
            noise_floor,
        } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let grid = adequate_grid(*n_max, grid);
            let t = measures::coefficient_table(&m, *n_max, grid)?;
            let s = tail_start.unwrap_or((n_max / 8).max(1));
            let policy = DecayPolicy {
                nondecay_fraction: *nondecay_fraction,
                l2_tail_share: *l2_tail_share,
                noise_floor: *noise_floor,
            };
            let v = closability::decay_diagnostics_with(&t, s, policy)?;
            (
                json!({ "grid": grid, "n_max": n_max, "tail_start": s, "policy": policy }),
                to_value(&v),
                None,
            )
        }
        Command::Witness { measure, k, l } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let w = closability::nonclosability_witness(&m, *k, *l, grid)?;
            let grid = adequate_grid(k.max(l) - 1, grid);
            let mut result = to_value(&w);
            result["rayleigh_k"] = json!(w.rayleigh_k());
            (json!({ "grid": grid, "k": k, "l": l }), result, None)
        }
        Command::Adjoint {
            measure,
            u,
            n_max,
            tail_ratio,
        } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let u = parse_vector(u)?;
            let policy = MembershipPolicy {
                tail_ratio: *tail_ratio,
            };
            let rep = closability::adjoint_coefficients_with(&u, &m, *n_max, grid, policy)?;
            let table = complex_rows(&rep.coefficients, 0);
            (
                json!({ "grid": grid, "n_max": n_max, "u_samples": u.len(), "policy": policy }),
                to_value(&rep),
                Some(table),
            )
        }
        Command::Closure { measure, g, rungs } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let sym = symbol_of(&m)?;
            let g = FiniteVector::new(parse_vector(g)?);
            let ladder = closure::closed_form_ladder(sym, &g, *rungs, grid)?;
            let table = Table::new(
                &["radius", "value"],
                ladder
                    .radii
                    .iter()
                    .zip(&ladder.values)
                    .map(|(r, v)| vec![r.to_string(), v.to_string()])
                    .collect(),
            );
            let value = *ladder.values.last().expect("ladder ends at r = 1");
            (
                json!({ "grid": grid, "g": g, "rungs": rungs }),
                json!({ "value": value, "ladder": ladder }),
                Some(table),
            )
        }
        Command::Laurent { measure, g, offset } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let sym = symbol_of(&m)?;
            let g = closure::BilateralVector::new(*offset, parse_vector(g)?);
            let value = closure::laurent_form_eval(sym, &g, grid)?;
            (
                json!({ "grid": grid, "g": g }),
                json!({ "value": value, "norm_sq": g.norm_sqr() }),
                None,
            )
        }
        Command::Muckenhoupt {
            measure,
            levels,
            bounded_rel_change,
            diverging_ratio,
            diverging_run,
        } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let sym = symbol_of(&m)?;
            let policy = MuckenhouptPolicy {
                bounded_rel_change: *bounded_rel_change,
                diverging_ratio: *diverging_ratio,
                diverging_run: *diverging_run,
            };
            let rep = closure::muckenhoupt_estimate_with(sym, *levels, grid, policy)?;
            let table = Table::new(
                &["level", "arc_cells", "arc_measure", "estimate", "ratio"],
                rep.levels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| {
                        vec![
                            l.level.to_string(),
                            l.arc_cells.to_string(),
                            l.arc_measure.to_string(),
                            l.estimate.to_string(),
                            if i == 0 {
                                String::new()
                            } else {
                                rep.ratios[i - 1].to_string()
                            },
                        ]
                    })
                    .collect(),
            );
            (
                json!({ "grid": rep.grid, "levels": levels, "policy": policy }),
                to_value(&rep),
                Some(table),
            )
        }
        Command::Project { measure, probes, seed } => {
            let m = circle_measure(measure)?;
            echo = Some(to_value(&m));
            let sym = symbol_of(&m)?;
            let grid = sym.effective_grid(grid)?;
            let weights = sym.node_samples(grid)?;
            let family = closure::probe_family(grid, *probes, *seed);
            let weighted = closure::projection_norm_lower_bound(&family, &weights)?;
            let flat = closure::projection_norm_lower_bound(&family, &vec![1.0; grid])?;
            let table = Table::new(
                &["probe", "weighted_ratio"],
                weighted
                    .ratios
                    .iter()
                    .enumerate()
                    .map(|(i, r)| vec![i.to_string(), r.to_string()])
                    .collect(),
            );
            (
                json!({ "grid": grid, "random_probes": probes, "seed": seed, "total_probes": family.len() }),
                json!({ "weighted": weighted, "unweighted": flat }),
                Some(table),
            )
        }
        Command::HankelMoments {
            measure,
            n_max,
            psd_order,
        } => {
            let m = line_measure(measure)?;
            echo = Some(to_value(&m));
            let q = hankel::power_moments(&m, *n_max)?;
            let table = Table::new(
                &["n", "q"],
                q.moments
                    .iter()
                    .enumerate()
                    .map(|(n, v)| vec![n.to_string(), v.to_string()])
                    .collect(),
            );
            let psd = psd_order.map(|order| hankel::hankel_psd_check(&q, order)).transpose()?;
            (
                json!({ "n_max": n_max, "psd_order": psd_order, "policy": PsdPolicy::default() }),
                json!({ "moments": q.moments, "psd": psd }),
                Some(table),
            )
        }
        Command::HankelForm { measure, g } => {
            let m = line_measure(measure)?;
            echo = Some(to_value(&m));
            let g = FiniteVector::new(parse_vector(g)?);
            let q = hankel::power_moments(&m, 2 * g.len().saturating_sub(1))?;
            let value = hankel::hankel_form(&q, &g)?;
            (
                json!({ "g": g }),
                json!({ "value": value, "norm_sq": g.norm_sqr() }),
                None,
            )
        }
        Command::HankelClassify { measure, n_max } => {
            let m = line_measure(measure)?;
            echo = Some(to_value(&m));
            let v = hankel::hankel_classify_with(&m, *n_max)?;
            (
                json!({ "n_max": n_max, "endpoint_tolerance": hankel::ENDPOINT_TOLERANCE }),
                to_value(&v),
                None,
            )
        }
    };
    Ok(Report {
        command: cli.command.name().to_string(),
        params,
        measure: if cli.echo_measure { echo } else { None },
        result,
        table,
    })
}
