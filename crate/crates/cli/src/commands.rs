//! The four subcommands, operating on a resolved configuration.

use anyhow::{anyhow, Context, Result};

use paulimix_core::divisibility::{
    classify, linspace, rate_trajectory, rate_trajectory_on, DEFAULT_GRID_POINTS,
    DEFAULT_RATE_TOL,
};
use paulimix_core::estimation::{estimate_series, experimental_rates, fit_c};
use paulimix_core::qmath::{fidelity, partial_trace_ancilla, DensityMatrix};
use paulimix_core::simulator::{
    add_noise, evolve_dilation, pauli_expectations, synthetic_experiment, tomo_reconstruct,
};
use paulimix_core::{DilationCircuit, MarkovClass};

use crate::config::{OutputFormat, Resolved};
use crate::report::{
    estimate_rows, matrix_entries, rate_rows, sibling, write_estimate_csv, write_json,
    write_rate_csv, FitInfo, MixtureInfo, NoiseInfo, PipelineReport, PipelineSummary,
    RatesReport, TomoDemoReport, VerdictRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NON_MARKOVIAN: i32 = 10;

fn require_out(resolved: &Resolved) -> Result<std::path::PathBuf> {
    resolved
        .out
        .clone()
        .ok_or_else(|| anyhow!("config field 'output.path': required for this command"))
}

fn print_classification(prefix: &str, class: &MarkovClass) {
    match class {
        MarkovClass::Markovian => println!("{prefix}Markovian"),
        MarkovClass::NonMarkovian { witness } => println!(
            "{prefix}NonMarkovian witness: t = {}, axis = {}",
            witness.t,
            witness.axis.index()
        ),
    }
}

/// Theoretical decay rates over the grid plus a verdict record.
pub fn cmd_rates(resolved: &Resolved) -> Result<i32> {
    let out = require_out(resolved)?;
    let grid = resolved.grid;
    let traj = rate_trajectory(&resolved.mixture, grid.t_start, grid.t_end, grid.n)?;
    let rows = rate_rows(&traj)?;
    let classification = classify(&traj, DEFAULT_RATE_TOL)?;
    let mixture = MixtureInfo::from(&resolved.mixture);

    match resolved.format {
        OutputFormat::Csv => {
            write_rate_csv(&out, &rows)?;
            write_json(
                &sibling(&out, "verdict", "json"),
                &VerdictRecord {
                    mixture,
                    classification,
                },
            )?;
        }
        OutputFormat::Json => {
            write_json(
                &out,
                &RatesReport {
                    mixture,
                    grid,
                    rows,
                    classification,
                },
            )?;
        }
    }
    print_classification("", &classification);
    Ok(EXIT_OK)
}

/// Full synthetic pipeline: simulate, reconstruct, estimate, fit, classify.
pub fn cmd_pipeline(resolved: &Resolved) -> Result<i32> {
    let out = require_out(resolved)?;
    let m = resolved.mixture;
    let grid = resolved.grid;

    let sample_grid = linspace(grid.t_start, grid.t_end, grid.n)?;
    let rho0 = DensityMatrix::basis_state(2, 0)?;
    let points = synthetic_experiment(&m, &sample_grid, &resolved.noise, &rho0)
        .context("running the synthetic experiment")?;
    let estimates = estimate_series(&points, m.weights())?;
    let fit = fit_c(&estimates).context("fitting the rate constant")?;

    let rate_grid = linspace(0.0, grid.t_end, DEFAULT_GRID_POINTS)?;
    let fitted = experimental_rates(&fit, m.weights(), &rate_grid)?;
    let theory = rate_trajectory_on(&m, &rate_grid)?;
    let classification_fitted = classify(&fitted, DEFAULT_RATE_TOL)?;
    let classification_theory = classify(&theory, DEFAULT_RATE_TOL)?;

    let fidelities: Vec<f64> = points.iter().map(|p| p.full_state_fidelity).collect();
    let estimates_out = estimate_rows(&estimates, &fidelities);
    let fit_info = FitInfo {
        c_hat: fit.c_hat,
        rss: fit.rss,
        n_points: fit.n_points,
    };
    let mixture = MixtureInfo::from(&m);
    let noise = NoiseInfo {
        sigma: resolved.noise.sigma(),
        seed: resolved.noise.seed(),
    };

    match resolved.format {
        OutputFormat::Csv => {
            write_estimate_csv(&out, &estimates_out)?;
            write_rate_csv(&sibling(&out, "rates_fit", "csv"), &rate_rows(&fitted)?)?;
            write_rate_csv(&sibling(&out, "rates_theory", "csv"), &rate_rows(&theory)?)?;
            write_json(
                &sibling(&out, "summary", "json"),
                &PipelineSummary {
                    mixture,
                    noise,
                    fit: fit_info,
                    classification_fitted,
                    classification_theory,
                },
            )?;
        }
        OutputFormat::Json => {
            write_json(
                &out,
                &PipelineReport {
                    mixture,
                    grid,
                    noise,
                    estimates: estimates_out,
                    fit: fit_info,
                    rates_fitted: rate_rows(&fitted)?,
                    rates_theory: rate_rows(&theory)?,
                    classification_fitted,
                    classification_theory,
                },
            )?;
        }
    }

    println!("c_hat = {}", fit.c_hat);
    print_classification("fitted: ", &classification_fitted);
    print_classification("theory: ", &classification_theory);
    Ok(EXIT_OK)
}

/// Prints the verdict; exit code 0 for Markovian, 10 for non-Markovian.
pub fn cmd_classify(resolved: &Resolved) -> Result<i32> {
    let grid = resolved.grid;
    let traj = rate_trajectory(&resolved.mixture, grid.t_start, grid.t_end, grid.n)?;
    let classification = classify(&traj, DEFAULT_RATE_TOL)?;
    print_classification("", &classification);
    Ok(match classification {
        MarkovClass::Markovian => EXIT_OK,
        MarkovClass::NonMarkovian { .. } => EXIT_NON_MARKOVIAN,
    })
}

/// Reconstructs a single time point and compares against theory.
pub fn cmd_tomo_demo(resolved: &Resolved) -> Result<i32> {
    let m = resolved.mixture;
    let t = resolved.grid.t_start;
    let p = m.decoherence().p(t)?;

    let circ = DilationCircuit::for_mixture(&m, p)?;
    let rho0 = DensityMatrix::basis_state(2, 0)?;
    let exact = evolve_dilation(&circ, &rho0)?;
    let noisy = add_noise(&pauli_expectations(&exact), &resolved.noise.derive_point(0));
    let tomo = tomo_reconstruct(&noisy, Some(&exact))?;
    let reconstructed = partial_trace_ancilla(&tomo.state)?;
    let theory = m.apply(&rho0, t)?;
    let fidelity_full = tomo.fidelity_to_target.expect("target supplied");
    let fidelity_system = fidelity(reconstructed.matrix(), theory.matrix())?;

    println!("t = {t}, p = {p}, sigma = {}", resolved.noise.sigma());
    println!("three-qubit reconstruction fidelity: {fidelity_full}");
    println!("system-state fidelity vs theory:     {fidelity_system}");
    println!("theoretical system state:");
    print_matrix(theory.matrix());
    println!("reconstructed system state:");
    print_matrix(reconstructed.matrix());

    if let Some(out) = &resolved.out {
        write_json(
            out,
            &TomoDemoReport {
                t,
                p,
                noise: NoiseInfo {
                    sigma: resolved.noise.sigma(),
                    seed: resolved.noise.seed(),
                },
                fidelity_full,
                fidelity_system,
                system_theory: matrix_entries(theory.matrix()),
                system_reconstructed: matrix_entries(reconstructed.matrix()),
            },
        )?;
    }
    Ok(EXIT_OK)
}

fn print_matrix(m: &paulimix_core::ComplexMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let e = m.get(i, j);
                format!("{:+.6}{:+.6}i", e.re, e.im)
            })
            .collect();
        println!("  [{}]", row.join(", "));
    }
}
