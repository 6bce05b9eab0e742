use std::path::Path;

use ets_core::approx::{
    discretize_extended_measure, elementary_exponent, gaussian_seed_sequence, stable_seed_sequence,
    stable_target, to_elementary_sum, ElementaryComponent,
};
use ets_core::charfn::{char_exponent_on, cf_sup_distance, sup_gap};
use ets_core::limits::{check_limit_conditions, ConvergenceReport, DEFAULT_DELTA, DEFAULT_EPSILONS};
use ets_core::measures::{
    extended_to_rosinski, matrix_from_rows, matrix_to_rows, rosinski_to_extended, tempering_to_rosinski,
    validate_rosinski, ValidationReport,
};
use ets_core::simulate::{empirical_cf, format_real, sample_ets, samples_to_csv, SamplerConfig};
use ets_core::{AtomicMeasure, CfGrid, EtsSpec, QuadratureConfig, TemperingSpec};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use crate::error::CliError;
use crate::{DemoArgs, Diag, Outcome, Representation, Target};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let msg = format!("{}: {e}", path.display());
        match e.classify() {
            Category::Data => CliError::Validation(msg),
            _ => CliError::Input(msg),
        }
    })
}

/// Formats a real for CSV output, writing `-0` as `0`.
fn real(v: f64) -> String {
    format_real(v + 0.0)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// The Rosiński representation: finite atoms plus the stable part on the sphere.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RosinskiPair {
    rosinski: AtomicMeasure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stable: Option<AtomicMeasure>,
}

#[derive(Serialize)]
struct SpecReport {
    valid: bool,
    dimension: usize,
    alpha: f64,
    p: f64,
    stable_mass: f64,
    rosinski: Option<ValidationReport>,
    errors: Vec<String>,
}

pub fn validate(path: &Path) -> Result<Outcome, CliError> {
    let spec: EtsSpec = match read_json(path) {
        Ok(s) => s,
        Err(CliError::Validation(msg)) => {
            let report = serde_json::json!({ "valid": false, "errors": [msg] });
            return Ok(Outcome { payload: to_json(&report), invalid: true });
        }
        Err(e) => return Err(e),
    };
    let (r, stable) = extended_to_rosinski(&spec.nu, spec.alpha)?;
    let rep = validate_rosinski(&r, spec.alpha)?;
    let mut errors = Vec::new();
    if !rep.valid {
        errors.push("the Rosiński mass functional is not finite".to_string());
    }
    let report = SpecReport {
        valid: rep.valid,
        dimension: spec.dimension(),
        alpha: spec.alpha,
        p: spec.p,
        stable_mass: stable.total_mass() + 0.0,
        rosinski: Some(rep),
        errors,
    };
    Ok(Outcome { payload: to_json(&report), invalid: !report.valid })
}

fn z_header(d: usize) -> Vec<String> {
    if d == 1 {
        vec!["z".to_string()]
    } else {
        (1..=d).map(|i| format!("z{i}")).collect()
    }
}

fn check_grid(spec: &EtsSpec, grid: &CfGrid) -> Result<(), CliError> {
    if grid.dimension() != spec.dimension() {
        return Err(CliError::Validation(format!(
            "grid dimension {} does not match spec dimension {}",
            grid.dimension(),
            spec.dimension()
        )));
    }
    Ok(())
}

pub fn cf(spec_path: &Path, grid_path: &Path) -> Result<String, CliError> {
    let spec: EtsSpec = read_json(spec_path)?;
    let grid: CfGrid = read_json(grid_path)?;
    check_grid(&spec, &grid)?;
    let values = char_exponent_on(&spec, &grid, &cfg())?;
    let mut header = z_header(grid.dimension());
    header.extend(["re_c", "im_c", "abs_cf"].map(String::from));
    let mut out = header.join(",") + "\n";
    for (z, c) in grid.points().iter().zip(&values) {
        let mut cells: Vec<String> = z.iter().map(|v| real(*v)).collect();
        cells.extend([c.re, c.im, c.re.exp()].map(real));
        out += &cells.join(",");
        out.push('\n');
    }
    Ok(out)
}

pub fn transform(
    from: Representation,
    to: Target,
    alpha: f64,
    p: Option<f64>,
    input: &Path,
) -> Result<String, CliError> {
    let (r, stable) = match from {
        Representation::Tempering => {
            let p = p.ok_or_else(|| CliError::Input("--p is required with --from tempering".into()))?;
            let spec: TemperingSpec = read_json(input)?;
            tempering_to_rosinski(&spec, alpha, p)?
        }
        Representation::Rosinski => {
            let pair: RosinskiPair = read_json(input)?;
            let d = pair.rosinski.dimension();
            let stable = pair.stable.unwrap_or_else(|| AtomicMeasure::empty(d));
            // round through the extended form so that both outputs are validated alike
            let nu = rosinski_to_extended(&pair.rosinski, &stable, alpha)?;
            extended_to_rosinski(&nu, alpha)?
        }
        Representation::Extended => {
            let nu: AtomicMeasure = read_json(input)?;
            extended_to_rosinski(&nu, alpha)?
        }
    };
    Ok(match to {
        Target::Rosinski => to_json(&RosinskiPair {
            rosinski: r,
            stable: Some(stable),
        }),
        Target::Extended => to_json(&rosinski_to_extended(&r, &stable, alpha)?),
    })
}

#[derive(Serialize)]
struct Approximation {
    n: u32,
    alpha: f64,
    p: f64,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    components: Vec<ElementaryComponent>,
    grid_points: usize,
    cf_gap: f64,
}

pub fn approximate(path: &Path, n: u32, diag: &Diag) -> Result<String, CliError> {
    let spec: EtsSpec = read_json(path)?;
    let (alpha, p) = (spec.alpha, spec.p);
    let nu = discretize_extended_measure(&spec.nu, n, alpha, p)?;
    let components = to_elementary_sum(&nu, alpha, p, &cfg())?;
    let grid = CfGrid::default_for(spec.dimension());
    let exact: Vec<Complex64> = char_exponent_on(&spec, &grid, &cfg())?.iter().map(|c| c.exp()).collect();
    let approx = grid
        .points()
        .iter()
        .map(|z| {
            let quad: f64 = (0..z.len())
                .flat_map(|i| (0..z.len()).map(move |j| (i, j)))
                .map(|(i, j)| z[i] * spec.a[(i, j)] * z[j])
                .sum();
            let e = elementary_exponent(&components, &spec.b, alpha, p, z, &cfg())?;
            Ok((e - 0.5 * quad).exp())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let cf_gap = sup_gap(&approx, &exact);
    diag.note(format!(
        "{} elementary components; sup CF gap {cf_gap:.3e} over {} grid points",
        components.len(),
        grid.len()
    ));
    Ok(to_json(&Approximation {
        n,
        alpha,
        p,
        a: matrix_to_rows(&spec.a),
        b: spec.b.clone(),
        components,
        grid_points: grid.len(),
        cf_gap,
    }))
}

pub fn simulate(
    path: &Path,
    paths: usize,
    seed: u64,
    tau: f64,
    gaps: Option<&Path>,
    diag: &Diag,
) -> Result<String, CliError> {
    let spec: EtsSpec = read_json(path)?;
    let cfg_s = SamplerConfig {
        seed,
        truncation_tau: tau,
        n_paths: paths,
        ..SamplerConfig::default()
    };
    cfg_s.validate().map_err(|e| CliError::Input(e.to_string()))?;
    let samples = sample_ets(&spec, &cfg_s)?;
    let grid = CfGrid::default_for(spec.dimension());
    let emp = empirical_cf(&samples, &grid)?;
    let exact = char_exponent_on(&spec, &grid, &cfg())?;
    let mut table = z_header(spec.dimension()).join(",") + ",gap\n";
    let mut sup: f64 = 0.0;
    for ((z, e), c) in grid.points().iter().zip(&emp).zip(&exact) {
        let gap = (e - c.exp()).norm();
        sup = sup.max(gap);
        let mut cells: Vec<String> = z.iter().map(|v| real(*v)).collect();
        cells.push(real(gap));
        table += &cells.join(",");
        table.push('\n');
    }
    if let Some(p) = gaps {
        std::fs::write(p, &table).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    diag.note(format!(
        "{paths} paths; sup empirical CF gap {sup:.4} (envelope 4/sqrt(n) = {:.4})",
        4.0 / (paths as f64).sqrt()
    ));
    Ok(samples_to_csv(&samples, spec.dimension()))
}

fn print_report(rep: &ConvergenceReport, diag: &Diag) {
    let mut head = format!("{:>5} {:>12} {:>12}", "n", "vague", "shift");
    for e in &rep.epsilons {
        head += &format!(" {:>12}", format!("H eps={e}"));
    }
    diag.note(head);
    for (i, (v, s)) in rep.vague_distances.iter().zip(&rep.shift_gaps).enumerate() {
        let mut row = format!("{i:>5} {v:>12.4e} {s:>12.4e}");
        for k in 0..rep.epsilons.len() {
            row += &format!(" {:>12.4e}", rep.gaussian_gap(i, k));
        }
        diag.note(row);
    }
    for note in &rep.verdict_notes {
        diag.note(note);
    }
}

pub fn check_limit(
    dir: &Path,
    target: &Path,
    epsilons: Option<Vec<f64>>,
    delta: Option<f64>,
    diag: &Diag,
) -> Result<String, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Input(format!("no .json files in {}", dir.display())));
    }
    let seq = files.iter().map(|f| read_json(f)).collect::<Result<Vec<EtsSpec>, _>>()?;
    let target: EtsSpec = read_json(target)?;
    let epsilons = epsilons.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    let rep = check_limit_conditions(&seq, &target, &epsilons, delta.unwrap_or(DEFAULT_DELTA))?;
    print_report(&rep, diag);
    Ok(to_json(&rep))
}

fn demo_grid(d: usize) -> CfGrid {
    if d == 1 {
        CfGrid::uniform_1d(61, -3.0, 3.0).expect("valid grid")
    } else {
        CfGrid::default_for(d)
    }
}

fn gap_table<F>(args: &DemoArgs, target: &EtsSpec, diag: &Diag, seed: F) -> Result<String, CliError>
where
    F: Fn(u32) -> ets_core::Result<EtsSpec>,
{
    if args.n_list.is_empty() || args.n_list.contains(&0) {
        return Err(CliError::Input("--n-list needs positive integers".into()));
    }
    let grid = demo_grid(target.dimension());
    let mut out = String::from("n,sup_cf_gap\n");
    for &n in &args.n_list {
        let gap = cf_sup_distance(&seed(n)?, target, &grid, &cfg())?;
        diag.note(format!("n = {n}: gap {gap:.4e}"));
        out += &format!("{n},{}\n", real(gap));
    }
    Ok(out)
}

pub fn gaussian_demo(args: &DemoArgs, a_path: &Path, diag: &Diag) -> Result<String, CliError> {
    let rows: Vec<Vec<f64>> = read_json(a_path)?;
    let a = matrix_from_rows(&rows)?;
    let target = EtsSpec::gaussian(args.alpha, args.p, a.clone(), vec![0.0; a.nrows()])?;
    gap_table(args, &target, diag, |n| {
        gaussian_seed_sequence(&a, n, args.alpha, args.p, args.m_nodes)
    })
}

pub fn stable_demo(args: &DemoArgs, sigma_path: &Path, diag: &Diag) -> Result<String, CliError> {
    let sigma: AtomicMeasure = read_json(sigma_path)?;
    let target = stable_target(&sigma, args.alpha, args.p)?;
    gap_table(args, &target, diag, |n| {
        stable_seed_sequence(&sigma, args.alpha, n, args.p, args.m_nodes)
    })
}
