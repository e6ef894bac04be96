use std::fmt::Write as _;
use std::path::Path;

use holv_core::io::{read_json, to_json_pretty};
use holv_core::model::{
    self, find_equilibria, global_stability_conditions, random_scenario, random_two_faction, wta_check,
    ContinuationOptions, EquilibriumOptions, FactionScales, GlobalOptions, LvModel, Scenario,
};
use holv_core::pcp::{self, brute_force_solve, norm_bounds, EnumerationOptions, QcpProblem};
use holv_core::poly::{solve_m_tensor, solve_s_tensor, PolySystem, SolveOptions};
use holv_core::sim::{
    detect_limit, random_initial_conditions, simulate_batch, write_csv, Manifest, RunRecord, SimError, SimOptions,
    Terminal,
};
use holv_core::tensor::{classify as classify_tensor, ClassifyOptions};
use holv_core::CubicalTensor;
use serde::Serialize;

use crate::error::CliError;
use crate::{Common, Format, Kind, Method};

fn emit(c: &Common, text: &str) -> Result<(), CliError> {
    match &c.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(c: &Common, value: &T) -> Result<(), CliError> {
    if c.format == Format::Csv {
        return Err(CliError::Input("this command only writes JSON".into()));
    }
    emit(c, &(to_json_pretty(value) + "\n"))
}

fn solve_options(c: &Common) -> SolveOptions {
    let d = SolveOptions::default();
    SolveOptions { tol: c.tol.unwrap_or(d.tol), max_iter: c.max_iter.unwrap_or(d.max_iter), ..d }
}

pub fn classify(c: &Common, file: &Path, hint: Option<Vec<f64>>) -> Result<(), CliError> {
    let tensor: CubicalTensor = read_json(file)?;
    let mut opts = ClassifyOptions { certificate_hint: hint, ..Default::default() };
    if let Some(tol) = c.tol {
        opts.spectral.tol = tol;
    }
    if let Some(n) = c.max_iter {
        opts.spectral.max_iter = n;
        opts.certificate_max_iter = n;
    }
    emit_json(c, &classify_tensor(&tensor, &opts))
}

pub fn solve(c: &Common, file: &Path, cert: Option<Vec<f64>>, method: Method) -> Result<(), CliError> {
    let system: PolySystem = read_json(file)?;
    let opts = solve_options(c);
    let result = match method {
        Method::S => solve_s_tensor(&system, cert.as_deref(), opts)?,
        Method::M => solve_m_tensor(&system, opts)?,
    };
    emit_json(c, &result)
}

#[derive(Serialize)]
struct PcpReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<pcp::NormBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumeration: Option<pcp::Enumeration>,
}

pub fn pcp(c: &Common, file: &Path, bounds: bool, solve: bool) -> Result<(), CliError> {
    let problem: QcpProblem = read_json(file)?;
    let (bounds, solve) = if bounds || solve { (bounds, solve) } else { (true, true) };
    let mut opts = EnumerationOptions::default();
    if let Some(tol) = c.tol {
        opts.tol = tol;
    }
    if let Some(seed) = c.seed {
        opts.seed = seed;
    }
    if let Some(n) = c.max_iter {
        opts.max_newton_iter = n;
    }
    let report = PcpReport {
        bounds: if bounds { Some(norm_bounds(&problem)?) } else { None },
        enumeration: solve.then(|| brute_force_solve(&problem, &opts)),
    };
    emit_json(c, &report)
}

fn equilibrium_options(c: &Common) -> EquilibriumOptions {
    let mut opts = EquilibriumOptions::default();
    if let Some(tol) = c.tol {
        opts.tol = tol;
    }
    if let Some(seed) = c.seed {
        opts.enumeration.seed = seed;
    }
    opts
}

pub fn equilibria(c: &Common, file: &Path) -> Result<(), CliError> {
    let model: LvModel = read_json(file)?;
    emit_json(c, &find_equilibria(&model, &equilibrium_options(c)))
}

#[derive(Serialize)]
struct StabilityReport {
    verdicts: model::Verdicts,
    #[serde(skip_serializing_if = "Option::is_none")]
    winner_take_all: Option<model::WtaReport>,
}

pub fn stability(c: &Common, file: &Path, r_hat: f64, eps: f64, weights: Option<Vec<f64>>) -> Result<(), CliError> {
    let model: LvModel = read_json(file)?;
    let opts = GlobalOptions { d: weights, solve: solve_options(c), ..GlobalOptions::new(r_hat, eps) };
    let verdicts = global_stability_conditions(&model, &opts)?;
    let winner_take_all = match model.scenario() {
        Scenario::Competitive => Some(wta_check(&model)?),
        _ => None,
    };
    emit_json(c, &StabilityReport { verdicts, winner_take_all })
}

pub fn simulate(
    c: &Common,
    file: &Path,
    x0: Option<Vec<f64>>,
    runs: usize,
    t_end: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
) -> Result<(), CliError> {
    let model: LvModel = read_json(file)?;
    let d = SimOptions::default();
    let opts = SimOptions {
        rel_tol: rel_tol.unwrap_or(d.rel_tol),
        abs_tol: abs_tol.unwrap_or(d.abs_tol),
        conv_tol: c.tol.unwrap_or(d.conv_tol),
        max_steps: c.max_iter.unwrap_or(d.max_steps),
        ..d
    };
    let (starts, seed) = match x0 {
        Some(x) => (vec![x], None),
        None => {
            let seed = c.seed.ok_or_else(|| CliError::Input("random initial states need --seed".into()))?;
            (random_initial_conditions(model.dim(), runs, 10.0, seed), Some(seed))
        }
    };
    if c.format == Format::Csv && c.out.is_none() && starts.len() != 1 {
        return Err(CliError::Input("CSV output for several runs needs --out".into()));
    }
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
    }

    let results = simulate_batch(&model, &starts, t_end, &opts);
    let mut records = Vec::with_capacity(results.len());
    let mut failure = None;
    for (id, (x0, result)) in starts.iter().zip(results).enumerate() {
        let mut record = RunRecord {
            id,
            seed,
            x0: x0.clone(),
            terminal: String::new(),
            t_final: 0.0,
            limit: None,
            limit_hurwitz: None,
            csv: None,
            error: None,
        };
        let trajectory = match result {
            Ok(tr) => tr,
            Err(SimError::NonFinite { last_good }) => {
                record.error = Some("state became non-finite".into());
                failure = Some(CliError::Numerical(format!("run {id}: state became non-finite")));
                *last_good
            }
            Err(e) => return Err(e.into()),
        };
        record.terminal = trajectory.terminal.label().into();
        record.t_final = trajectory.times.last().copied().unwrap_or(0.0);
        if matches!(trajectory.terminal, Terminal::Converged { .. }) {
            let limit = detect_limit(&trajectory, &model)?;
            record.limit_hurwitz = Some(limit.hurwitz);
            record.limit = Some(limit.x_star);
        }
        let mut csv = Vec::new();
        write_csv(&trajectory, &mut csv)?;
        match &c.out {
            Some(dir) => {
                let name = format!("run_{id:04}.csv");
                std::fs::write(dir.join(&name), &csv)?;
                record.csv = Some(name);
            }
            None if c.format == Format::Csv => print!("{}", String::from_utf8_lossy(&csv)),
            None => {}
        }
        records.push(record);
    }
    let manifest = to_json_pretty(&Manifest { runs: records }) + "\n";
    match &c.out {
        Some(dir) => std::fs::write(dir.join("manifest.json"), &manifest)?,
        None if c.format == Format::Json => print!("{manifest}"),
        None => {}
    }
    failure.map_or(Ok(()), Err)
}

pub fn scenario(c: &Common, kind: Kind, dims: &[usize]) -> Result<(), CliError> {
    let seed = c.seed.ok_or_else(|| CliError::Input("scenario needs --seed".into()))?;
    let model = match (kind, dims) {
        (Kind::TwoFaction, &[m, n]) => random_two_faction(m, n, seed, &FactionScales::default())?,
        (Kind::TwoFaction, _) => return Err(CliError::Input("two-faction dims are `m,n`".into())),
        (_, &[n]) if n > 0 => {
            let scenario = match kind {
                Kind::General => Scenario::General,
                Kind::Cooperative => Scenario::Cooperative,
                _ => Scenario::Competitive,
            };
            random_scenario(scenario, n, seed)?
        }
        _ => return Err(CliError::Input("dims must be a single positive dimension".into())),
    };
    emit_json(c, &model)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("grid must be start:step:end, got {spec:?}"));
    let parts: Vec<f64> = spec.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let &[start, step, end] = parts.as_slice() else {
        return Err(bad());
    };
    if !(step > 0.0) || !(end >= start) {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

pub fn continuation(c: &Common, file: &Path, grid: &str) -> Result<(), CliError> {
    let model: LvModel = read_json(file)?;
    let grid = parse_grid(grid)?;
    let d = ContinuationOptions::default();
    let opts = ContinuationOptions {
        tol: c.tol.unwrap_or(d.tol),
        max_newton_iter: c.max_iter.unwrap_or(d.max_newton_iter),
        ..d
    };
    let path = model::continuation(&model, &grid, &opts)?;
    match c.format {
        Format::Json => emit_json(c, &path),
        Format::Csv => {
            let n = model.dim();
            let mut text = String::from("epsilon");
            (1..=n).for_each(|i| write!(text, ",x{i}").unwrap());
            text.push_str(",max_real_part,hurwitz\n");
            for p in &path.points {
                write!(text, "{}", p.epsilon).unwrap();
                p.x.iter().for_each(|v| write!(text, ",{v}").unwrap());
                writeln!(text, ",{},{}", p.max_real_part, p.hurwitz).unwrap();
            }
            writeln!(text, "# end: {}", serde_json::to_string(&path.end).unwrap()).unwrap();
            emit(c, &text)
        }
    }
}
