//! The four experiments.

use std::path::PathBuf;

use nalgebra::DMatrix;

use fade_core::{
    add_noise, assemble_forward_map, invert, l_curve_select, observation_vector,
    perturbation_response, relative_error, solve_forward, svd_spectrum, AnalyticSolver,
    ForwardMap, Grid, StateVector,
};

use crate::config::RunConfig;
use crate::output::{write_csv, Cell};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Final state of the direct problem, optionally against the analytic solution.
    Forward,
    /// Source reconstruction from (noisy) final-time data.
    Invert,
    /// The λ sweep behind the L-curve selection.
    Lcurve,
    /// Singular values of K and its response to sine perturbations.
    Diagnose,
}

/// Runs `command` and returns the files written.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Forward => forward(cfg),
        Command::Invert => inverse(cfg),
        Command::Lcurve => lcurve(cfg),
        Command::Diagnose => diagnose(cfg),
    }
}

fn column(values: &[f64]) -> impl Iterator<Item = Cell> + '_ {
    values.iter().map(|&v| Cell::Float(v))
}

fn final_state(cfg: &RunConfig, grid: &Grid) -> Result<Vec<f64>, CliError> {
    let initial = grid.sample(|x| cfg.initial.eval(x));
    let source = grid.sample(|x| cfg.source.eval(x));
    let trajectory = solve_forward(&cfg.params, grid, &initial, &source)?;
    Ok(trajectory.last().expect("trajectory holds c^0").values().to_vec())
}

fn analytic_profile(cfg: &RunConfig, xs: &[f64]) -> Result<Vec<f64>, CliError> {
    let spectral = cfg.spectral_config(&cfg.params)?;
    let src = |x| cfg.source.eval(x);
    let ic = |x| cfg.initial.eval(x);
    let source: Option<&dyn Fn(f64) -> f64> = (!cfg.source.is_zero()).then_some(&src);
    let initial: Option<&dyn Fn(f64) -> f64> = (!cfg.initial.is_zero()).then_some(&ic);
    let solver = AnalyticSolver::new(
        &cfg.params,
        cfg.params.final_time,
        &spectral,
        source,
        initial,
    )?;
    Ok(solver.profile(xs))
}

/// Relative ℓ² distance, or `None` against an all-zero reference.
fn discrepancy(values: &[f64], reference: &[f64]) -> Result<Option<f64>, CliError> {
    let v = nalgebra::DVector::from_column_slice(values);
    let r = nalgebra::DVector::from_column_slice(reference);
    if r.norm() == 0.0 {
        return Ok(None);
    }
    Ok(Some(relative_error(&v, &r)? / 100.0))
}

fn forward(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let grid = &cfg.grid;
    let xs = grid.nodes();
    let c_fd = final_state(cfg, grid)?;
    let c_an = cfg.analytic.then(|| analytic_profile(cfg, &xs)).transpose()?;

    let mut header = vec!["x", "c_fd"];
    let mut rows: Vec<Vec<Cell>> = xs
        .iter()
        .zip(&c_fd)
        .map(|(&x, &c)| vec![x.into(), c.into()])
        .collect();
    if let Some(c_an) = &c_an {
        header.push("c_analytic");
        rows.iter_mut().zip(column(c_an)).for_each(|(row, c)| row.push(c));
    }
    let mut written = vec![write_csv(&cfg.out_dir, "forward.csv", &header, &rows)?];

    if cfg.refine {
        let fine = Grid::new(&cfg.params, 2 * grid.n_space(), 2 * grid.n_time())?;
        let c_fine = final_state(cfg, &fine)?;
        // fine node 2i+1 coincides with coarse node i
        let fine_on_coarse: Vec<f64> = c_fine.iter().skip(1).step_by(2).copied().collect();
        let refined = discrepancy(&c_fd, &fine_on_coarse)?;
        log::info!("discrepancy to the refined grid: {refined:?}");
        let mut header = vec!["n_space", "n_time", "refined_n_space", "refined_n_time", "refined_discrepancy"];
        let mut row: Vec<Cell> = vec![
            grid.n_space().into(),
            grid.n_time().into(),
            fine.n_space().into(),
            fine.n_time().into(),
            refined.into(),
        ];
        if let Some(c_an) = &c_an {
            let fine_an = analytic_profile(cfg, &fine.nodes())?;
            header.extend(["analytic_discrepancy", "refined_analytic_discrepancy"]);
            row.push(discrepancy(&c_fd, c_an)?.into());
            row.push(discrepancy(&c_fine, &fine_an)?.into());
        }
        written.push(write_csv(&cfg.out_dir, "forward_meta.csv", &header, &[row])?);
    }
    Ok(written)
}

/// Assembles K and the observation Y built from the noisy final state.
fn experiment(cfg: &RunConfig) -> Result<(ForwardMap, StateVector, StateVector), CliError> {
    let map = assemble_forward_map(&cfg.params, &cfg.grid)?;
    let truth = cfg.grid.sample(|x| cfg.source.eval(x));
    let initial = cfg.grid.sample(|x| cfg.initial.eval(x));
    let clean = map.apply(&truth)?.into_vector() + &map.propagator_power * initial.as_vector();
    let measured = StateVector::from(add_noise(&clean, &cfg.noise));
    let y = observation_vector(&measured, &map.propagator_power, &initial)?;
    Ok((map, truth, y))
}

fn inverse(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (map, truth, y) = experiment(cfg)?;
    let reg = cfg.regularization(&map)?;
    let nonzero = truth.values().iter().any(|&v| v != 0.0);
    let (result, _) = invert(&map, &y, &reg, nonzero.then_some(&truth))?;
    log::info!(
        "λ = {:e}, relative error {:?}%",
        result.lambda_used,
        result.relative_error_pct
    );

    let rows: Vec<Vec<Cell>> = cfg
        .grid
        .nodes()
        .iter()
        .zip(truth.values())
        .zip(result.r_est.values())
        .map(|((&x, &t), &e)| vec![x.into(), t.into(), e.into()])
        .collect();
    let meta = vec![
        result.lambda_used.into(),
        result.residual_norm.into(),
        result.solution_seminorm.into(),
        result.relative_error_pct.into(),
        cfg.noise.seed.into(),
        cfg.noise.level.into(),
    ];
    Ok(vec![
        write_csv(&cfg.out_dir, "invert.csv", &["x", "r_true", "r_est"], &rows)?,
        write_csv(
            &cfg.out_dir,
            "invert_meta.csv",
            &["lambda_used", "residual", "seminorm", "relative_error_pct", "seed", "noise_level"],
            &[meta],
        )?,
    ])
}

fn lcurve(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (map, _, y) = experiment(cfg)?;
    let reg = cfg.regularization(&map)?;
    let curve = l_curve_select(&map.operator, y.as_vector(), &reg, cfg.grid.dx())?;
    if curve.degenerate {
        log::warn!("flat L-curve, fell back to the median λ");
    }
    if curve.points.len() > 1 && (curve.selected == 0 || curve.selected + 1 == curve.points.len()) {
        log::warn!("selected λ sits at the end of the grid; widen the range");
    }
    let rows: Vec<Vec<Cell>> = curve
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            vec![
                p.lambda.into(),
                p.residual_norm.into(),
                p.seminorm.into(),
                p.curvature.into(),
                (i == curve.selected).into(),
            ]
        })
        .collect();
    Ok(vec![write_csv(
        &cfg.out_dir,
        "lcurve.csv",
        &["lambda", "residual_norm", "seminorm", "curvature", "selected"],
        &rows,
    )?])
}

fn diagnose(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut map = assemble_forward_map(&cfg.params, &cfg.grid)?;
    if cfg.identity_operator {
        let n = map.operator.ncols();
        map.operator = DMatrix::identity(n, n);
    }
    let sigma = svd_spectrum(&map.operator)?;
    if let (Some(first), Some(last)) = (sigma.first(), sigma.last()) {
        log::info!("singular values span {:.2} decades", (first / last).log10());
    }
    let svd_rows: Vec<Vec<Cell>> = sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| vec![i.into(), s.into()])
        .collect();
    let response = perturbation_response(&map, cfg.perturb_amplitude, &cfg.perturb_modes)?;
    let perturb_rows: Vec<Vec<Cell>> = response
        .iter()
        .map(|r| vec![r.mode.into(), r.input_norm.into(), r.output_norm.into()])
        .collect();
    Ok(vec![
        write_csv(&cfg.out_dir, "svd.csv", &["index", "sigma"], &svd_rows)?,
        write_csv(&cfg.out_dir, "perturb.csv", &["n", "input_norm", "output_norm"], &perturb_rows)?,
    ])
}
