//! Command execution for the experiment CLI.
//!
//! Reports are deterministic: identical config and seed produce byte-identical
//! report bodies and CSV files (no timestamps, fixed float formatting). Every
//! claim in a report echoes the certificate or tolerance it was based on.
//!
//! Exit codes: 0 success, 1 undecided where a decision was requested (or a
//! convergence/residual check that did not meet its target), 2 malformed
//! config or validation failure.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use config::ExperimentConfig;
use qsmarkov::classify::{
    classify_pair, representation_verdict, stationary_equivalent, Certificate,
    StationaryEquivalence, Status,
};
use qsmarkov::cuntzrep::{
    check_cuntz_relations_with_eps, compressed_isometry_with_eps, monic_cyclicity_check,
    pvm_algebra_report,
};
use qsmarkov::density::{DensityEngine, PairEngine};
use qsmarkov::matseq::{product_limit_check, ProductLimitOutcome};
use qsmarkov::measure::{MarkovMeasureSpec, QSStatus, MASS_REL_TOL};
use qsmarkov::symbolic::{enumerate_words, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Validate,
    Qs,
    Limit,
    Classify,
    Stationary,
    Mixing,
    RnCheck,
    RepCheck,
    Sample,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Validate => "validate",
            CommandKind::Qs => "qs",
            CommandKind::Limit => "limit",
            CommandKind::Classify => "classify",
            CommandKind::Stationary => "stationary",
            CommandKind::Mixing => "mixing",
            CommandKind::RnCheck => "rn-check",
            CommandKind::RepCheck => "rep-check",
            CommandKind::Sample => "sample",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub config_path: PathBuf,
    pub command: CommandKind,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub depth: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: String,
    pub files: Vec<PathBuf>,
}

/// Effective parameters after merging config defaults and CLI overrides.
struct Resolved {
    seed: u64,
    depth: usize,
    tol: Option<f64>,
    samples: usize,
    level: usize,
    eps_f: f64,
    k_max: usize,
    path_len: usize,
    word_i: String,
    word_j: String,
    out: PathBuf,
}

impl Resolved {
    fn new(config: &ExperimentConfig, opts: &Options) -> Self {
        let p = &config.params;
        Resolved {
            seed: opts.seed.or(p.seed).unwrap_or(0),
            depth: opts.depth.or(p.depth).unwrap_or(6),
            tol: opts.tol.or(p.tol),
            samples: opts.samples.or(p.samples).unwrap_or(100_000),
            level: p.level.unwrap_or(4),
            eps_f: p.eps_f.unwrap_or(1e-10),
            k_max: p.k_max.unwrap_or(100),
            path_len: p.path_len.unwrap_or(20),
            word_i: p.word_i.clone().unwrap_or_else(|| "0".to_string()),
            word_j: p.word_j.clone().unwrap_or_else(|| "1".to_string()),
            out: opts
                .out
                .clone()
                .or_else(|| p.out.clone())
                .unwrap_or_else(|| PathBuf::from("reports")),
        }
    }
}

pub fn execute(opts: &Options) -> RunOutcome {
    match run(opts) {
        Ok(outcome) => outcome,
        Err(err) => RunOutcome {
            exit_code: 2,
            report: format!("command: {}\nerror: {err:#}\n", opts.command.name()),
            files: Vec::new(),
        },
    }
}

fn run(opts: &Options) -> Result<RunOutcome> {
    let text = fs::read_to_string(&opts.config_path)
        .with_context(|| format!("cannot read config {}", opts.config_path.display()))?;
    let config = ExperimentConfig::from_toml(&text)?;
    let resolved = Resolved::new(&config, opts);
    let mut report = String::new();
    writeln!(report, "command: {}", opts.command.name())?;
    writeln!(report, "schema: {}", config.schema)?;
    writeln!(report, "seed: {}", resolved.seed)?;

    let mut files = Vec::new();
    let exit_code = match opts.command {
        CommandKind::Validate => cmd_validate(&config, &resolved, &mut report, &mut files)?,
        CommandKind::Qs => cmd_qs(&config, &mut report)?,
        CommandKind::Limit => cmd_limit(&config, &resolved, &mut report)?,
        CommandKind::Classify => cmd_classify(&config, &mut report)?,
        CommandKind::Stationary => cmd_stationary(&config, &mut report)?,
        CommandKind::Mixing => cmd_mixing(&config, &resolved, &mut report, &mut files)?,
        CommandKind::RnCheck => cmd_rn_check(&config, &resolved, &mut report, &mut files)?,
        CommandKind::RepCheck => cmd_rep_check(&config, &resolved, &mut report, &mut files)?,
        CommandKind::Sample => cmd_sample(&config, &resolved, &mut report, &mut files)?,
    };
    Ok(RunOutcome {
        exit_code,
        report,
        files,
    })
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn header_for(cols: usize) -> String {
    (0..cols)
        .map(|c| format!("c{c}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[String],
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    let mut body = String::with_capacity(rows.len() * 32 + header.len() + 1);
    writeln!(body, "{header}")?;
    for row in rows {
        writeln!(body, "{row}")?;
    }
    fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    files.push(path);
    Ok(())
}

fn second_spec(config: &ExperimentConfig) -> Result<MarkovMeasureSpec> {
    let Some(second) = &config.second else {
        bail!("this command requires a [second] measure in the config");
    };
    second.build()
}

fn cmd_validate(
    config: &ExperimentConfig,
    resolved: &Resolved,
    report: &mut String,
    files: &mut Vec<PathBuf>,
) -> Result<i32> {
    let tol = resolved.tol.unwrap_or(MASS_REL_TOL);
    let mut ok = true;
    let mut specs = vec![("measure", config.measure.build()?)];
    if let Some(second) = &config.second {
        specs.push(("second", second.build()?));
    }
    for (label, spec) in &specs {
        let check = spec.consistency_check(resolved.depth)?;
        writeln!(report, "[{label}]")?;
        writeln!(report, "symbols: {}", spec.n_symbols())?;
        writeln!(
            report,
            "lambda: [{}]",
            spec.lambda()
                .iter()
                .map(|v| num(*v))
                .collect::<Vec<_>>()
                .join(", ")
        )?;
        writeln!(report, "consistency depth: {}", check.depth)?;
        writeln!(report, "words checked: {}", check.words_checked)?;
        writeln!(
            report,
            "max abs deviation: {}",
            num(check.max_abs_deviation)
        )?;
        writeln!(
            report,
            "max rel deviation: {}",
            num(check.max_rel_deviation)
        )?;
        writeln!(report, "tolerance (rel): {}", num(tol))?;
        ok &= check.max_rel_deviation <= tol;

        let table_depth = resolved.depth.min(6);
        let mut rows = Vec::new();
        for word in enumerate_words(spec.alphabet(), table_depth)? {
            rows.push(format!("{word},{:.17e}", spec.cylinder_mass(&word)?));
        }
        let name = format!("masses_{label}.csv");
        write_csv(&resolved.out, &name, "word,mass", &rows, files)?;
        writeln!(report, "mass table: {name} (depth {table_depth})")?;
    }
    Ok(if ok { 0 } else { 2 })
}

fn cmd_qs(config: &ExperimentConfig, report: &mut String) -> Result<i32> {
    let spec = config.measure.build()?;
    let verdict = spec.is_quasi_stationary();
    writeln!(report, "status: {:?}", verdict.status)?;
    writeln!(report, "criterion: {}", verdict.criterion)?;
    let ev = &verdict.evidence;
    writeln!(
        report,
        "tail bound B(1): {}",
        ev.tail_bound_total
            .map(num)
            .unwrap_or_else(|| "unknown".into())
    )?;
    writeln!(
        report,
        "entry floor: {}",
        ev.entry_floor.map(num).unwrap_or_else(|| "unknown".into())
    )?;
    writeln!(report, "probe depth: {}", ev.probe_depth)?;
    writeln!(
        report,
        "difference partial sum: {}",
        num(ev.diff_partial_sum)
    )?;
    let max_ratio = ev.ratio_partial_sums.iter().cloned().fold(0.0f64, f64::max);
    writeln!(report, "max ratio partial sum: {}", num(max_ratio))?;
    Ok(match verdict.status {
        QSStatus::Undecided => 1,
        _ => 0,
    })
}

fn cmd_limit(config: &ExperimentConfig, resolved: &Resolved, report: &mut String) -> Result<i32> {
    let spec = config.measure.build()?;
    let tol = resolved.tol.unwrap_or(1e-7);
    let max_n = resolved.k_max.max(2);
    let limit = spec.seq().limit_matrix()?;
    writeln!(report, "declared limit matrix:")?;
    for i in 0..limit.dim() {
        writeln!(
            report,
            "  [{}]",
            limit
                .row(i)
                .iter()
                .map(|v| num(*v))
                .collect::<Vec<_>>()
                .join(", ")
        )?;
    }
    match product_limit_check(spec.seq(), 1, tol, max_n)? {
        ProductLimitOutcome::Converged { limit, achieved_n } => {
            writeln!(report, "product limit rows (Perron vector):")?;
            writeln!(
                report,
                "  [{}]",
                limit
                    .row(0)
                    .iter()
                    .map(|v| num(*v))
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
            writeln!(report, "achieved n: {achieved_n}")?;
            writeln!(report, "tolerance: {}", num(tol))?;
            Ok(0)
        }
        ProductLimitOutcome::NotConverged { best_error } => {
            writeln!(report, "not converged by n = {max_n}")?;
            writeln!(report, "best error: {}", num(best_error))?;
            Ok(1)
        }
    }
}

fn render_certificate(certificate: &Certificate, report: &mut String) -> Result<()> {
    match certificate {
        Certificate::SummableDifference { bound } => {
            writeln!(report, "certificate: summable difference")?;
            writeln!(report, "difference sum bound: {}", num(*bound))?;
        }
        Certificate::PerTermHellingerFloor {
            limit_gap,
            certified_floor,
            from_n,
        } => {
            writeln!(report, "certificate: per-term Hellinger floor")?;
            writeln!(report, "limit row gap: {}", num(*limit_gap))?;
            writeln!(report, "certified floor: {}", num(*certified_floor))?;
            writeln!(report, "from step: {from_n}")?;
        }
        Certificate::StationaryReduction {
            weighted_bound,
            difference_bound,
        } => {
            writeln!(report, "certificate: stationary reduction")?;
            writeln!(report, "weighted step bound: {}", num(*weighted_bound))?;
            writeln!(report, "difference sum bound: {}", num(*difference_bound))?;
        }
        Certificate::SampledKakutani(diag) => {
            writeln!(
                report,
                "certificate: sampled Kakutani diagnostics (advisory)"
            )?;
            writeln!(report, "paths per measure: {}", diag.paths_per_measure)?;
            writeln!(report, "path length: {}", diag.path_len)?;
            writeln!(
                report,
                "partial sums under first: min {} mean {} max {}",
                num(diag.under_first.min),
                num(diag.under_first.mean),
                num(diag.under_first.max)
            )?;
            writeln!(
                report,
                "partial sums under second: min {} mean {} max {}",
                num(diag.under_second.min),
                num(diag.under_second.mean),
                num(diag.under_second.max)
            )?;
        }
    }
    Ok(())
}

fn cmd_classify(config: &ExperimentConfig, report: &mut String) -> Result<i32> {
    let first = config.measure.build()?;
    let second = second_spec(config)?;
    let verdict = classify_pair(&first, &second)?;
    writeln!(report, "status: {:?}", verdict.status)?;
    writeln!(
        report,
        "representations: {}",
        representation_verdict(&verdict)
    )?;
    render_certificate(&verdict.certificate, report)?;
    Ok(match verdict.status {
        Status::Undecided => 1,
        _ => 0,
    })
}

fn cmd_stationary(config: &ExperimentConfig, report: &mut String) -> Result<i32> {
    let spec = config.measure.build()?;
    match stationary_equivalent(&spec)? {
        StationaryEquivalence::Equivalent {
            verdict,
            stationary,
        } => {
            writeln!(report, "status: Equivalent to the stationary limit measure")?;
            writeln!(
                report,
                "stationary lambda: [{}]",
                stationary
                    .lambda()
                    .iter()
                    .map(|v| num(*v))
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
            render_certificate(&verdict.certificate, report)?;
            Ok(0)
        }
        StationaryEquivalence::NotApplicable { reason } => {
            writeln!(report, "status: NotApplicable")?;
            writeln!(report, "reason: {reason}")?;
            Ok(1)
        }
    }
}

fn cmd_mixing(
    config: &ExperimentConfig,
    resolved: &Resolved,
    report: &mut String,
    files: &mut Vec<PathBuf>,
) -> Result<i32> {
    let spec = config.measure.build()?;
    let alphabet = spec.alphabet();
    let word_i = Word::parse(alphabet, &resolved.word_i)?;
    let word_j = Word::parse(alphabet, &resolved.word_j)?;
    let stationary = spec.stationary_limit_measure()?;
    let target = stationary.cylinder_mass(&word_i)? * spec.cylinder_mass(&word_j)?;
    let mut rows = Vec::new();
    let mut last_error = f64::NAN;
    for k in 1..=resolved.k_max {
        let value = spec.mixing_correlation(&word_i, &word_j, k)?;
        last_error = (value - target).abs();
        rows.push(format!("{k},{value:.17e},{target:.17e},{last_error:.17e}"));
    }
    write_csv(
        &resolved.out,
        "mixing.csv",
        "k,correlation,limit_product,abs_error",
        &rows,
        files,
    )?;
    writeln!(report, "I: {word_i}")?;
    writeln!(report, "J: {word_j}")?;
    writeln!(report, "limit product: {}", num(target))?;
    writeln!(report, "k max: {}", resolved.k_max)?;
    writeln!(report, "abs error at k max: {}", num(last_error))?;
    writeln!(report, "csv: mixing.csv")?;
    Ok(0)
}

fn cmd_rn_check(
    config: &ExperimentConfig,
    resolved: &Resolved,
    report: &mut String,
    files: &mut Vec<PathBuf>,
) -> Result<i32> {
    let spec = config.measure.build()?;
    let engine = DensityEngine::with_eps(&spec, resolved.eps_f)?;
    writeln!(report, "eps log F: {}", num(resolved.eps_f))?;
    writeln!(report, "realized depth: {}", engine.realized_depth())?;
    let mut ok = true;
    let mut rows = Vec::new();

    // branch sum formula against the shift density
    let identity_tol = resolved.tol.unwrap_or(1e-10);
    let len = engine.realized_depth() + 3;
    let mut worst_identity = 0.0f64;
    let mut density_rows = Vec::new();
    for (index, path) in spec
        .sample_paths(len, 1000, resolved.seed)
        .iter()
        .enumerate()
    {
        let x = &path.prefix;
        let mut sum = 0.0;
        for j in spec.alphabet().symbols() {
            let f = engine.branch_density(j, &x.inverse_branch(j)?)?;
            sum += 1.0 / (f * f);
        }
        let target = engine.shift_density(x)?;
        worst_identity = worst_identity.max((sum - target).abs() / target.max(1.0));
        if index < 100 {
            let eval = engine.ratio_product(x)?;
            density_rows.push(format!(
                "{x},{:.17e},{:.17e}",
                eval.value, eval.log_error_bound
            ));
        }
    }
    write_csv(
        &resolved.out,
        "densities.csv",
        "prefix,value,error_bound",
        &density_rows,
        files,
    )?;
    writeln!(
        report,
        "branch sum identity residual: {}",
        num(worst_identity)
    )?;
    writeln!(report, "identity tolerance: {}", num(identity_tol))?;
    rows.push(format!(
        "branch_sum_identity,{worst_identity:.17e},{identity_tol:.17e}"
    ));
    ok &= worst_identity <= identity_tol;

    // Monte Carlo change of variables for depth-3 cylinder indicators
    let mc = change_of_variables_mc(&spec, &engine, resolved.samples, resolved.seed ^ 0xC0C0)?;
    writeln!(report, "change-of-variables samples: {}", resolved.samples)?;
    writeln!(
        report,
        "max |z| over depth-3 cylinders: {}",
        num(mc.worst_z)
    )?;
    rows.push(format!("change_of_variables_worst_z,{:.17e},3", mc.worst_z));
    ok &= mc.worst_z <= 3.0;

    // pair martingale, when a second measure is configured
    if let Some(second) = &config.second {
        let second = second.build()?;
        let pair = PairEngine::new(spec.clone(), second)?;
        let mut worst = 0.0f64;
        let depth = resolved.depth.min(8);
        for n in 1..=depth {
            for word in enumerate_words(spec.alphabet(), n)? {
                let z_n = pair.likelihood_ratio(&word, n)?;
                let t_n = spec.seq().matrix(n);
                let last = word.symbols()[n - 1] as usize;
                let mut expectation = 0.0;
                for s in spec.alphabet().symbols() {
                    let child = word.concat(&Word::new(spec.alphabet(), vec![s])?)?;
                    expectation +=
                        pair.likelihood_ratio(&child, n + 1)? * t_n.get(last, s as usize);
                }
                worst = worst.max((expectation - z_n).abs() / z_n.max(1.0));
            }
        }
        writeln!(report, "martingale residual (n <= {depth}): {}", num(worst))?;
        rows.push(format!("pair_martingale,{worst:.17e},1e-12"));
        ok &= worst <= 1e-12;
    }

    write_csv(
        &resolved.out,
        "rn_checks.csv",
        "check,value,bound",
        &rows,
        files,
    )?;
    writeln!(report, "csv: rn_checks.csv")?;
    Ok(if ok { 0 } else { 1 })
}

struct McSummary {
    worst_z: f64,
}

/// Monte Carlo check that `∫ g d(μ∘σ_j^{-1}) = ∫ g f_j² dμ` for indicators
/// `g` of depth-3 cylinders (with `j` the first symbol of the cylinder).
fn change_of_variables_mc(
    spec: &MarkovMeasureSpec,
    engine: &DensityEngine,
    samples: usize,
    seed: u64,
) -> Result<McSummary> {
    let alphabet = spec.alphabet();
    let cells = alphabet.n_symbols().pow(3);
    let mut sums = vec![0.0f64; cells];
    let mut squares = vec![0.0f64; cells];
    let len = engine.realized_depth().max(2) + 3;
    let paths = spec.sample_paths(len, samples, seed);
    for path in &paths {
        let x = &path.prefix;
        let f = engine.branch_density(x.symbols()[0], x)?;
        let weight = f * f;
        let cell = x.truncate(3)?.lex_index();
        sums[cell] += weight;
        squares[cell] += weight * weight;
    }
    let m = samples as f64;
    let mut worst_z = 0.0f64;
    for (cell, word) in enumerate_words(alphabet, 3)?.iter().enumerate() {
        // exact pushforward mass of the cylinder under the branch of its
        // own first symbol: the mass of the shifted word
        let shifted = word.shift()?;
        let exact = spec.cylinder_mass(&shifted)?;
        let mean = sums[cell] / m;
        let variance = (squares[cell] / m - mean * mean).max(0.0);
        let se = (variance / m).sqrt();
        if se == 0.0 {
            continue;
        }
        let z = (mean - exact).abs() / se;
        worst_z = worst_z.max(z);
    }
    Ok(McSummary { worst_z })
}

fn cmd_rep_check(
    config: &ExperimentConfig,
    resolved: &Resolved,
    report: &mut String,
    files: &mut Vec<PathBuf>,
) -> Result<i32> {
    let spec = config.measure.build()?;
    let level = resolved.level.max(1);
    let cuntz = check_cuntz_relations_with_eps(&spec, level, resolved.eps_f)?;
    let cyclicity = monic_cyclicity_check(&spec, level.min(6), resolved.eps_f)?;
    let pvm = pvm_algebra_report(&spec, level.min(6), 40, resolved.seed)?;

    writeln!(report, "level: {level}")?;
    writeln!(report, "eps log F: {}", num(resolved.eps_f))?;
    writeln!(
        report,
        "isometry residual: {}",
        num(cuntz.isometry_residual)
    )?;
    writeln!(
        report,
        "completeness residual: {}",
        num(cuntz.completeness_residual)
    )?;
    writeln!(report, "error budget: {}", num(cuntz.error_budget))?;
    writeln!(
        report,
        "cyclic span dimension: {} of {}",
        cyclicity.dimension, cyclicity.expected_dimension
    )?;
    writeln!(
        report,
        "pvm multiplicativity residual: {}",
        num(pvm.multiplicativity_residual)
    )?;
    writeln!(
        report,
        "pvm resolution residual: {}",
        num(pvm.resolution_residual)
    )?;
    writeln!(
        report,
        "pvm norm identity residual: {}",
        num(pvm.norm_identity_residual)
    )?;

    let rows = vec![
        format!(
            "isometry,{:.17e},{:.17e}",
            cuntz.isometry_residual, cuntz.error_budget
        ),
        format!(
            "completeness,{:.17e},{:.17e}",
            cuntz.completeness_residual, cuntz.error_budget
        ),
        format!(
            "pvm_multiplicativity,{:.17e},1e-12",
            pvm.multiplicativity_residual
        ),
        format!("pvm_resolution,{:.17e},1e-12", pvm.resolution_residual),
        format!(
            "pvm_norm_identity,{:.17e},1e-12",
            pvm.norm_identity_residual
        ),
    ];
    write_csv(
        &resolved.out,
        "rep_checks.csv",
        "check,residual,budget",
        &rows,
        files,
    )?;
    writeln!(report, "csv: rep_checks.csv")?;

    // dense operator exports
    for i in spec.alphabet().symbols() {
        let op = compressed_isometry_with_eps(&spec, i, level, resolved.eps_f)?;
        let mut op_rows = Vec::with_capacity(op.mat.rows);
        for r in 0..op.mat.rows {
            let row: Vec<String> = (0..op.mat.cols)
                .map(|c| format!("{:.17e}", op.mat.get(r, c)))
                .collect();
            op_rows.push(row.join(","));
        }
        let name = format!("isometry_s{i}.csv");
        write_csv(
            &resolved.out,
            &name,
            &header_for(op.mat.cols),
            &op_rows,
            files,
        )?;
        writeln!(
            report,
            "operator S_{i}: {name} ({}x{}, entry error bound {})",
            op.mat.rows,
            op.mat.cols,
            num(op.error_bound)
        )?;
    }

    let ok = cuntz.isometry_residual <= cuntz.error_budget
        && cuntz.completeness_residual <= cuntz.error_budget
        && cyclicity.is_cyclic()
        && pvm.multiplicativity_residual <= 1e-12
        && pvm.resolution_residual <= 1e-12
        && pvm.norm_identity_residual <= 1e-12;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_sample(
    config: &ExperimentConfig,
    resolved: &Resolved,
    report: &mut String,
    files: &mut Vec<PathBuf>,
) -> Result<i32> {
    let spec = config.measure.build()?;
    let count = resolved.samples.min(1_000_000);
    let paths = spec.sample_paths(resolved.path_len, count, resolved.seed);
    let mut rows = Vec::with_capacity(paths.len());
    let mut first_counts = vec![0usize; spec.n_symbols()];
    for path in &paths {
        first_counts[path.prefix.symbols()[0] as usize] += 1;
        rows.push(format!(
            "{},{:.17e},{:.17e},{}",
            path.prefix,
            path.log_mass,
            path.log_mass.exp(),
            path.seed
        ));
    }
    write_csv(
        &resolved.out,
        "samples.csv",
        "word,log_mass,mass,seed",
        &rows,
        files,
    )?;
    writeln!(report, "paths: {count}")?;
    writeln!(report, "length: {}", resolved.path_len)?;
    for (symbol, &count_s) in first_counts.iter().enumerate() {
        writeln!(
            report,
            "first symbol {symbol}: frequency {}",
            num(count_s as f64 / count as f64)
        )?;
    }
    writeln!(report, "csv: samples.csv")?;
    Ok(0)
}
