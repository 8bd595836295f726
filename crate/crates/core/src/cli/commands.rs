//! Subcommand bodies. Each returns the rendered output; writing it out is the
//! caller's job.

use serde_json::{json, Value};

use super::config::{CliError, OutputFormat, RunOptions, TempGrid};
use super::output::{format_float, format_opt, json_float, json_opt, Csv};
use crate::ent::{
    energy_witness, ppt_check, ree_lower_bound, ree_upper_bound, FrankWolfeConfig, PartitionCut, ProductSearch,
};
use crate::gas::{
    critical_temperature_estimate, default_fit_window, fit_entropy_scaling, mb_witness_check, omega_tilde_g, GasState,
    ScalingFit,
};
use crate::models::{build_spin_hamiltonian, ground_state, ModeSpectrum, SpinModelSpec, DEFAULT_DEGENERACY_TOL};
use crate::thermo::thermal_ensemble;
use crate::witness::{sweep, SweepSettings};

/// Log-spaced samples used for the scaling fit, independent of the scan grid.
pub const FIT_SAMPLES: usize = 40;

pub const SPIN_SWEEP_COLUMNS: [&str; 8] = ["T", "S", "p", "neg_ln_p", "E_lower", "E_upper", "eq2_fires", "eq4_fires"];
pub const GAS_SCAN_COLUMNS: [&str; 5] = ["T", "mu", "S", "F", "N_actual"];
pub const FIT_COLUMNS: [&str; 4] = ["p_fit", "omega_tilde", "r_squared", "T_star"];
pub const MB_COLUMNS: [&str; 4] = ["T", "S_mb", "E_assumed", "fires"];

fn search_of(opts: &RunOptions) -> ProductSearch {
    let mut s = ProductSearch { seed: opts.seed, ..ProductSearch::default() };
    if let Some(r) = opts.restarts {
        s.restarts = r;
    }
    s
}

fn frank_wolfe_of(opts: &RunOptions) -> FrankWolfeConfig {
    let mut fw = FrankWolfeConfig::default();
    fw.search.seed = opts.seed;
    if let Some(r) = opts.restarts {
        fw.search.restarts = r;
    }
    if let Some(t) = opts.tol {
        fw.tol = t;
    }
    fw
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

/// Witness verdicts per temperature plus the two critical temperatures.
pub fn run_spin_sweep(
    model: &SpinModelSpec,
    grid: &TempGrid,
    opts: &RunOptions,
    upper: bool,
) -> Result<String, CliError> {
    let h = build_spin_hamiltonian(model)?;
    let mut settings =
        SweepSettings { compute_upper: upper, frank_wolfe: frank_wolfe_of(opts), ..SweepSettings::default() };
    if let Some(t) = opts.tol {
        settings.tol = t;
    }
    let res = sweep(&h, &grid.values(), &settings)?;

    Ok(match opts.format {
        OutputFormat::Csv => {
            let mut csv = Csv::default();
            csv.row(SPIN_SWEEP_COLUMNS);
            for r in &res.reports {
                csv.row([
                    format_float(r.temperature),
                    format_float(r.entropy),
                    format_float(r.p),
                    format_float(r.neg_ln_p),
                    format_float(r.e_lower),
                    format_opt(r.e_upper),
                    r.eq2_fires.to_string(),
                    r.eq4_fires.to_string(),
                ]);
            }
            csv.row(["T_star_eq2".to_string(), format_opt(res.t_star_eq2)]);
            csv.row(["T_star_eq4".to_string(), format_opt(res.t_star_eq4)]);
            csv.finish()
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = res
                .reports
                .iter()
                .map(|r| {
                    json!({
                        "T": json_float(r.temperature),
                        "S": json_float(r.entropy),
                        "p": json_float(r.p),
                        "neg_ln_p": json_float(r.neg_ln_p),
                        "E_lower": json_float(r.e_lower),
                        "E_upper": json_opt(r.e_upper),
                        "eq2_fires": r.eq2_fires,
                        "eq4_fires": r.eq4_fires,
                    })
                })
                .collect();
            pretty(&json!({
                "rows": rows,
                "ground_energy": json_float(res.ground_energy),
                "ground_degeneracy": res.reports[0].ground_degeneracy,
                "T_star_eq2": json_opt(res.t_star_eq2),
                "T_star_eq4": json_opt(res.t_star_eq4),
            }))
        }
    })
}

/// Scaling fit over [`FIT_SAMPLES`] log-spaced temperatures inside `window`.
pub fn scan_fit(spectrum: &ModeSpectrum, window: Option<(f64, f64)>) -> crate::Result<ScalingFit> {
    let (lo, hi) = window.unwrap_or_else(|| default_fit_window(spectrum));
    if !(lo > 0.0 && lo < hi) {
        return Err(crate::Error::InvalidParameter(format!("fit window [{lo}, {hi}] is empty")));
    }
    let ts = TempGrid { lo, hi, count: FIT_SAMPLES, log: true }.values();
    fit_entropy_scaling(spectrum, &ts, Some((lo, hi)))
}

/// Gas observables per temperature, a scaling-fit block, and the classical
/// check wherever the grid reaches `T ≥ ω̃_g`.
pub fn run_gas_scan(
    spectrum: &ModeSpectrum,
    grid: &TempGrid,
    opts: &RunOptions,
    window: Option<(f64, f64)>,
) -> Result<String, CliError> {
    let temps = grid.values();
    let states = temps.iter().map(|&t| GasState::resolve(spectrum, t)).collect::<crate::Result<Vec<_>>>()?;
    // A fit that cannot be formed (e.g. entropy flat in the window) leaves the block empty.
    let fit = scan_fit(spectrum, window).ok();

    let mb = match spectrum.particle_target() {
        Some(n) => {
            let w_g = omega_tilde_g(spectrum, n);
            let rows = temps
                .iter()
                .filter(|&&t| t >= w_g)
                .map(|&t| mb_witness_check(spectrum, n, t).map(|c| (t, c)))
                .collect::<crate::Result<Vec<_>>>()?;
            Some((w_g, rows))
        }
        None => None,
    };

    Ok(match opts.format {
        OutputFormat::Csv => {
            let mut csv = Csv::default();
            csv.row(GAS_SCAN_COLUMNS);
            for s in &states {
                csv.row([s.temperature, s.mu, s.entropy, s.free_energy, s.n_actual].map(format_float));
            }
            csv.blank();
            csv.row(FIT_COLUMNS);
            match &fit {
                Some(f) => csv
                    .row([f.exponent, f.omega_tilde, f.r_squared, critical_temperature_estimate(f)].map(format_float)),
                None => csv.row(["", "", "", ""]),
            }
            if let Some((_, rows)) = &mb {
                if !rows.is_empty() {
                    csv.blank();
                    csv.row(MB_COLUMNS);
                    for (t, c) in rows {
                        csv.row([
                            format_float(*t),
                            format_float(c.s_mb),
                            format_float(c.e_assumed),
                            c.fires.to_string(),
                        ]);
                    }
                }
            }
            csv.finish()
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = states
                .iter()
                .map(|s| {
                    json!({
                        "T": json_float(s.temperature),
                        "mu": json_float(s.mu),
                        "S": json_float(s.entropy),
                        "F": json_float(s.free_energy),
                        "N_actual": json_float(s.n_actual),
                    })
                })
                .collect();
            let fit = match &fit {
                Some(f) => json!({
                    "p_fit": json_float(f.exponent),
                    "omega_tilde": json_float(f.omega_tilde),
                    "r_squared": json_float(f.r_squared),
                    "T_star": json_float(critical_temperature_estimate(f)),
                    "window": [json_float(f.t_window.0), json_float(f.t_window.1)],
                    "n_ref": json_float(f.n_ref),
                }),
                None => Value::Null,
            };
            let mb = match &mb {
                Some((w_g, rows)) if !rows.is_empty() => json!({
                    "omega_tilde_g": json_float(*w_g),
                    "rows": rows
                        .iter()
                        .map(|(t, c)| json!({
                            "T": json_float(*t),
                            "S_mb": json_float(c.s_mb),
                            "E_assumed": json_float(c.e_assumed),
                            "fires": c.fires,
                        }))
                        .collect::<Vec<_>>(),
                }),
                _ => Value::Null,
            };
            pretty(&json!({ "rows": rows, "fit": fit, "mb": mb }))
        }
    })
}

fn key_value(opts: &RunOptions, pairs: Vec<(&str, Value)>) -> String {
    match opts.format {
        OutputFormat::Csv => {
            let mut csv = Csv::default();
            csv.row(["quantity", "value"]);
            for (k, v) in &pairs {
                let cell = match v {
                    Value::Null => String::new(),
                    Value::Number(n) => n.as_f64().map(format_float).unwrap_or_else(|| n.to_string()),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                csv.row([k.to_string(), cell]);
            }
            csv.finish()
        }
        OutputFormat::Json => {
            let map: serde_json::Map<String, Value> = pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            pretty(&Value::Object(map))
        }
    }
}

/// Relative-entropy-of-entanglement bounds for the ground state, or for the
/// thermal state when `temperature` is given.
pub fn run_ree(model: &SpinModelSpec, temperature: Option<f64>, opts: &RunOptions) -> Result<String, CliError> {
    let h = build_spin_hamiltonian(model)?;
    let fw = frank_wolfe_of(opts);
    let cut = PartitionCut::new(&[0], model.n_sites)?;
    let (state, lower, rho) = match temperature {
        None => {
            let gs = ground_state(&h, DEFAULT_DEGENERACY_TOL)?;
            let lower = ree_lower_bound(&gs.state)?.lower;
            ("ground", lower, gs.state.projector())
        }
        Some(t) => {
            let ens = thermal_ensemble(&h, t)?;
            ("thermal", 0.0, ens.rho().clone())
        }
    };
    let upper = ree_upper_bound(&rho, &fw)?;
    let ppt = ppt_check(&rho, &cut)?;
    Ok(key_value(
        opts,
        vec![
            ("state", json!(state)),
            ("temperature", json_opt(temperature)),
            ("lower", json_float(lower)),
            ("upper", json_opt(upper.upper)),
            ("iterations", json!(upper.iterations)),
            ("converged", json!(upper.converged)),
            ("ppt_min_eig", json_float(ppt.min_eig)),
            ("npt", json!(ppt.npt)),
        ],
    ))
}

/// Compares the ground energy (or thermal energy at `temperature`) with the
/// minimum energy over product states.
pub fn run_energy_witness(
    model: &SpinModelSpec,
    temperature: Option<f64>,
    opts: &RunOptions,
) -> Result<String, CliError> {
    let h = build_spin_hamiltonian(model)?;
    let energy = match temperature {
        None => ground_state(&h, DEFAULT_DEGENERACY_TOL)?.energy,
        Some(t) => thermal_ensemble(&h, t)?.internal_energy(),
    };
    let w = energy_witness(&h, energy, &search_of(opts));
    Ok(key_value(
        opts,
        vec![
            ("temperature", json_opt(temperature)),
            ("energy", json_float(energy)),
            ("sep_min", json_float(w.sep_min)),
            ("entangled", json!(w.entangled)),
        ],
    ))
}
