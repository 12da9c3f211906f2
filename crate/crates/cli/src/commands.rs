use std::path::Path;

use serde::{Deserialize, Serialize};

use discspec_core::analysis::{hot_spot, nodal_report};
use discspec_core::heat::{evolve_cn, evolve_spectral, generic_datum, HeatProblem, HeatWarning};
use discspec_core::sl_solver::{eigenfunction_in_r, solve_lowest, MIN_INTERVALS};
use discspec_core::spectrum::{
    assemble_spectrum_with, crossing_delta_with, separation_threshold, verify_bounds_with, BoundKind, ModeSolver,
    SpectrumEntry,
};
use discspec_core::{BoundaryCondition, EigenPair, MetricSpec, ModeProblem};

use crate::args::{
    Bc, CrossingArgs, Format, HeatArgs, Method, MetricArg, Output, PairArgs, Problem, SpectrumArgs, VerifyArgs,
};
use crate::error::{config, CliError};
use crate::output::{emit, fmt_f64, to_csv, to_json};

type Res<T> = Result<T, CliError>;

const PROFILE_SAMPLES: usize = 2049;

pub struct Metric {
    pub spec: MetricSpec,
    pub label: String,
}

#[derive(Deserialize)]
struct DensityRow {
    r: f64,
    p: f64,
}

fn read_density(path: &Path) -> Res<(Vec<f64>, Vec<f64>)> {
    let input = |reason: String| CliError::Input { path: path.to_path_buf(), reason };
    let mut reader =
        csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| input(e.to_string()))?;
    let (mut r, mut p) = (Vec::new(), Vec::new());
    for row in reader.deserialize::<DensityRow>() {
        let row = row.map_err(|e| input(e.to_string()))?;
        r.push(row.r);
        p.push(row.p);
    }
    Ok((r, p))
}

pub fn load_metric(arg: &MetricArg) -> Res<Metric> {
    let bad = |e: discspec_core::Error| config(format!("invalid metric: {e}"));
    Ok(match arg {
        MetricArg::Peaked(delta) => {
            Metric { spec: MetricSpec::peaked(*delta).map_err(bad)?, label: format!("freitas:{delta:e}") }
        }
        MetricArg::Flat => Metric { spec: MetricSpec::flat_disc(), label: "flat".into() },
        MetricArg::Custom(path) => {
            let (r, p) = read_density(path)?;
            Metric { spec: MetricSpec::custom_table(r, p).map_err(bad)?, label: format!("custom:{}", path.display()) }
        }
    })
}

fn check_grid(n: usize) -> Res<()> {
    if n < MIN_INTERVALS {
        return Err(config(format!("--n must be at least {MIN_INTERVALS}, got {n}")));
    }
    Ok(())
}

fn check_count(flag: &str, count: usize, n: usize) -> Res<()> {
    if count == 0 {
        return Err(config(format!("{flag} must be at least 1")));
    }
    if count > n / 4 {
        return Err(config(format!("{flag}={count} exceeds n/4 = {} for --n {n}", n / 4)));
    }
    Ok(())
}

fn format_or(out: &Output, default: Format) -> Format {
    out.format.unwrap_or(default)
}

fn write(out: &Output, bytes: Vec<u8>) -> Res<()> {
    emit(out.output.as_deref(), &bytes)
}

fn b(x: bool) -> String {
    x.to_string()
}

#[derive(Serialize)]
struct EntryJson {
    value: f64,
    k: u32,
    j: usize,
    multiplicity: u8,
    invariant: bool,
}

impl From<&SpectrumEntry> for EntryJson {
    fn from(e: &SpectrumEntry) -> Self {
        EntryJson { value: e.value, k: e.k, j: e.j, multiplicity: e.multiplicity, invariant: e.invariant }
    }
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    metric: &'a str,
    bc: &'a str,
    entries: Vec<EntryJson>,
    mode_cutoff: u32,
    grid: usize,
}

/// Every entry of modes `0..=modes` with `per_mode` eigenvalues each, `k ≥ 1`
/// listed twice, sorted like an assembled table.
fn mode_listing(
    spec: &MetricSpec,
    bc: BoundaryCondition,
    modes: u32,
    per_mode: usize,
    n: usize,
    solver: &dyn ModeSolver,
) -> Res<Vec<EntryJson>> {
    let jobs: Vec<_> = (0..=modes).map(|k| (ModeProblem::new(spec.clone(), k, bc, n), per_mode)).collect();
    let mut entries = Vec::new();
    for pair in solver.solve(&jobs)?.iter().flatten() {
        let copies = if pair.k == 0 { 1 } else { 2 };
        for _ in 0..copies {
            entries.push(EntryJson {
                value: pair.lambda,
                k: pair.k,
                j: pair.j,
                multiplicity: copies,
                invariant: pair.k == 0,
            });
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.k.cmp(&b.k)).then(a.j.cmp(&b.j)));
    Ok(entries)
}

pub fn spectrum(args: &SpectrumArgs, solver: &dyn ModeSolver) -> Res<()> {
    let Problem { metric, bc, n } = &args.problem;
    check_grid(*n)?;
    match args.m {
        Some(m) => check_count("--m", m, *n)?,
        None => check_count("--per-mode", args.per_mode, *n)?,
    }
    let metric = load_metric(metric)?;
    let bc: BoundaryCondition = (*bc).into();
    let (entries, mode_cutoff) = match args.m {
        Some(m) => {
            let table = assemble_spectrum_with(&metric.spec, bc, m, *n, solver)?;
            (table.entries.iter().map(EntryJson::from).collect(), table.mode_cutoff)
        }
        None => (mode_listing(&metric.spec, bc, args.modes, args.per_mode, *n, solver)?, args.modes),
    };
    let bytes = match format_or(&args.output, Format::Json) {
        Format::Json => to_json(&SpectrumJson { metric: &metric.label, bc: bc.name(), entries, mode_cutoff, grid: *n }),
        Format::Csv => to_csv(
            &["value", "k", "j", "multiplicity", "invariant"],
            entries.iter().map(|e| {
                vec![fmt_f64(e.value), e.k.to_string(), e.j.to_string(), e.multiplicity.to_string(), b(e.invariant)]
            }),
        ),
    };
    write(&args.output, bytes)
}

fn solve_pair(args: &PairArgs) -> Res<(Metric, EigenPair)> {
    let Problem { metric, bc, n } = &args.problem;
    check_grid(*n)?;
    check_count("--j", args.j, *n)?;
    let metric = load_metric(metric)?;
    let problem = ModeProblem::new(metric.spec.clone(), args.k, (*bc).into(), *n);
    let pair = solve_lowest(&problem, args.j)?.pop().expect("solver returns the requested count");
    Ok((metric, pair))
}

#[derive(Serialize)]
struct EigenfunctionJson<'a> {
    metric: &'a str,
    bc: &'a str,
    k: u32,
    j: usize,
    lambda: f64,
    r: &'a [f64],
    z: &'a [f64],
    phi: &'a [f64],
}

pub fn eigenfunction(args: &PairArgs) -> Res<()> {
    if args.samples < 2 {
        return Err(config("--samples must be at least 2"));
    }
    let (metric, pair) = solve_pair(args)?;
    let samples = eigenfunction_in_r(&pair, &metric.spec, args.samples)?;
    let z = samples.r.iter().map(|&r| metric.spec.z_of_r(r)).collect::<Result<Vec<_>, _>>()?;
    let bytes = match format_or(&args.output, Format::Csv) {
        Format::Csv => to_csv(
            &["r", "z", "phi"],
            samples
                .r
                .iter()
                .zip(&z)
                .zip(&samples.phi)
                .map(|((&r, &z), &phi)| vec![fmt_f64(r), fmt_f64(z), fmt_f64(phi)]),
        ),
        Format::Json => to_json(&EigenfunctionJson {
            metric: &metric.label,
            bc: pair.bc.name(),
            k: pair.k,
            j: pair.j,
            lambda: pair.lambda,
            r: &samples.r,
            z: &z,
            phi: &samples.phi,
        }),
    };
    write(&args.output, bytes)
}

#[derive(Serialize)]
struct NodalJson {
    radii: Vec<f64>,
    domain_count: usize,
    touches_boundary: bool,
}

pub fn nodal(args: &PairArgs) -> Res<()> {
    let (metric, pair) = solve_pair(args)?;
    let report = nodal_report(&pair, &metric.spec)?;
    let bytes = match format_or(&args.output, Format::Json) {
        Format::Json => to_json(&NodalJson {
            radii: report.radii,
            domain_count: report.domain_count,
            touches_boundary: report.touches_boundary,
        }),
        Format::Csv => to_csv(&["radius"], report.radii.iter().map(|&r| vec![fmt_f64(r)])),
    };
    write(&args.output, bytes)
}

#[derive(Serialize)]
struct HotSpotJson {
    argmax_r: f64,
    max_value: f64,
    argmin_r: f64,
    min_value: f64,
    interior_max: bool,
    degenerate: bool,
}

pub fn hotspot(args: &PairArgs) -> Res<()> {
    let (metric, pair) = solve_pair(args)?;
    let h = hot_spot(&pair, &metric.spec)?;
    let bytes = match format_or(&args.output, Format::Json) {
        Format::Json => to_json(&HotSpotJson {
            argmax_r: h.argmax_r,
            max_value: h.max_value,
            argmin_r: h.argmin_r,
            min_value: h.min_value,
            interior_max: h.interior_max,
            degenerate: h.degenerate,
        }),
        Format::Csv => to_csv(
            &["argmax_r", "max_value", "argmin_r", "min_value", "interior_max", "degenerate"],
            [vec![
                fmt_f64(h.argmax_r),
                fmt_f64(h.max_value),
                fmt_f64(h.argmin_r),
                fmt_f64(h.min_value),
                b(h.interior_max),
                b(h.degenerate),
            ]],
        ),
    };
    write(&args.output, bytes)
}

#[derive(Serialize)]
struct CrossingJson<'a> {
    m: usize,
    bc: &'a str,
    delta: f64,
    threshold: f64,
    ratio: f64,
    bracketed: bool,
    iterations: usize,
    gap: f64,
}

pub fn crossing(args: &CrossingArgs, solver: &dyn ModeSolver) -> Res<()> {
    check_grid(args.n)?;
    check_count("--m", args.m, args.n)?;
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(config(format!("--tol must be positive, got {}", args.tol)));
    }
    let m = u32::try_from(args.m).map_err(|_| config("--m is too large"))?;
    let bc: BoundaryCondition = args.bc.into();
    let report = crossing_delta_with(args.m, bc, args.range, args.n, args.tol, solver)?;
    let threshold = separation_threshold(m);
    let out = CrossingJson {
        m: args.m,
        bc: bc.name(),
        delta: report.delta,
        threshold,
        ratio: report.delta / threshold,
        bracketed: report.bracketed,
        iterations: report.iterations,
        gap: report.gap,
    };
    let bytes = match format_or(&args.output, Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => to_csv(
            &["m", "bc", "delta", "threshold", "ratio", "bracketed", "iterations", "gap"],
            [vec![
                out.m.to_string(),
                out.bc.into(),
                fmt_f64(out.delta),
                fmt_f64(out.threshold),
                fmt_f64(out.ratio),
                b(out.bracketed),
                out.iterations.to_string(),
                fmt_f64(out.gap),
            ]],
        ),
    };
    write(&args.output, bytes)
}

#[derive(Serialize)]
struct HeatRowJson {
    t: f64,
    r: f64,
    theta: f64,
    max_value: f64,
    heat_content: f64,
}

#[derive(Serialize)]
struct HeatJson<'a> {
    metric: &'a str,
    bc: &'a str,
    method: &'a str,
    step_estimate: Option<f64>,
    states: Vec<HeatRowJson>,
}

fn report_warning(w: &HeatWarning) {
    match w {
        HeatWarning::LowCapturedEnergy { term, k, captured } => {
            eprintln!("warning: expansion of initial term {term} (k={k}) captures only {captured:.6} of its energy")
        }
        HeatWarning::StepRefinement { estimate } => {
            eprintln!("warning: time step refinement estimate {estimate:.3e} exceeds 1e-4")
        }
    }
}

pub fn heat(args: &HeatArgs) -> Res<()> {
    check_grid(args.n)?;
    if !(args.t_end >= 0.0 && args.t_end.is_finite()) {
        return Err(config(format!("--t-end must be nonnegative, got {}", args.t_end)));
    }
    if args.outputs == 0 {
        return Err(config("--outputs must be at least 1"));
    }
    if args.grid_r < 2 || args.grid_theta == 0 {
        return Err(config("--grid-r must be at least 2 and --grid-theta at least 1"));
    }
    match args.method {
        Method::Cn if !(args.dt > 0.0 && args.dt.is_finite()) => {
            return Err(config(format!("--dt must be positive, got {}", args.dt)))
        }
        Method::Spectral => check_count("--per-mode", args.per_mode, args.n)?,
        _ => {}
    }
    if args.t_end == 0.0 && args.outputs > 1 {
        return Err(config("--outputs must be 1 when --t-end is 0"));
    }
    let metric = load_metric(&args.metric)?;
    let output_times: Vec<f64> = if args.outputs == 1 {
        vec![args.t_end]
    } else {
        let last = (args.outputs - 1) as f64;
        (0..args.outputs)
            .map(|i| if i + 1 == args.outputs { args.t_end } else { args.t_end * i as f64 / last })
            .collect()
    };
    let problem = HeatProblem {
        spec: metric.spec.clone(),
        terms: generic_datum(PROFILE_SAMPLES)?,
        bc: args.bc.into(),
        n: args.n,
        t_end: args.t_end,
        output_times,
        grid: (args.grid_r, args.grid_theta),
    };
    let (run, method) = match args.method {
        Method::Spectral => (evolve_spectral(&problem, (args.modes, args.per_mode))?, "spectral"),
        Method::Cn => (evolve_cn(&problem, args.dt)?, "cn"),
    };
    run.warnings.iter().for_each(report_warning);
    let rows: Vec<HeatRowJson> = run
        .states
        .iter()
        .map(|s| HeatRowJson {
            t: s.t,
            r: s.hotspot.r,
            theta: s.hotspot.theta,
            max_value: s.hotspot.value,
            heat_content: s.heat_content,
        })
        .collect();
    let bytes = match format_or(&args.output, Format::Csv) {
        Format::Csv => to_csv(
            &["t", "r", "theta", "max_value"],
            rows.iter().map(|s| vec![fmt_f64(s.t), fmt_f64(s.r), fmt_f64(s.theta), fmt_f64(s.max_value)]),
        ),
        Format::Json => to_json(&HeatJson {
            metric: &metric.label,
            bc: problem.bc.name(),
            method,
            step_estimate: run.step_estimate,
            states: rows,
        }),
    };
    write(&args.output, bytes)
}

#[derive(Serialize)]
struct RecordJson {
    bc: &'static str,
    kind: &'static str,
    k: u32,
    j: usize,
    lhs: f64,
    rhs: f64,
    margin: f64,
    satisfied: bool,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    metric: &'a str,
    bc: &'a str,
    all_satisfied: bool,
    records: Vec<RecordJson>,
}

pub fn verify(args: &VerifyArgs, solver: &dyn ModeSolver) -> Res<()> {
    check_grid(args.n)?;
    check_count("--jmax", args.jmax, args.n)?;
    if !matches!(args.metric, MetricArg::Peaked(_)) {
        return Err(config("verify needs --metric freitas:<delta>"));
    }
    let metric = load_metric(&args.metric)?;
    let bcs: &[Bc] = match &args.bc {
        Some(bc) => std::slice::from_ref(bc),
        None => &[Bc::Dirichlet, Bc::Neumann],
    };
    let mut records = Vec::new();
    for (i, &bc) in bcs.iter().enumerate() {
        let bc: BoundaryCondition = bc.into();
        let report = verify_bounds_with(&metric.spec, bc, args.jmax, args.kmax, args.n, solver)?;
        // the comparison of the two spectra does not depend on `bc`
        let keep = |kind: BoundKind| i == 0 || kind != BoundKind::NeumannBelowDirichlet;
        records.extend(report.records.iter().filter(|r| keep(r.kind)).map(|r| RecordJson {
            bc: if r.kind == BoundKind::NeumannBelowDirichlet { "both" } else { bc.name() },
            kind: r.kind.name(),
            k: r.k,
            j: r.j,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            satisfied: r.satisfied,
        }));
    }
    let violated = records.iter().filter(|r| !r.satisfied).count();
    let bc_label = args.bc.map_or("both", |bc| BoundaryCondition::from(bc).name());
    let bytes = match format_or(&args.output, Format::Json) {
        Format::Json => {
            to_json(&VerifyJson { metric: &metric.label, bc: bc_label, all_satisfied: violated == 0, records })
        }
        Format::Csv => to_csv(
            &["bc", "kind", "k", "j", "lhs", "rhs", "margin", "satisfied"],
            records.iter().map(|r| {
                vec![
                    r.bc.into(),
                    r.kind.into(),
                    r.k.to_string(),
                    r.j.to_string(),
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs),
                    fmt_f64(r.margin),
                    b(r.satisfied),
                ]
            }),
        ),
    };
    write(&args.output, bytes)?;
    if violated > 0 {
        return Err(CliError::Violated(violated));
    }
    Ok(())
}
