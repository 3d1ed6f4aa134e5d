use std::f64::consts::TAU;
use std::path::Path;

use kacmat::ensembles::{EnsembleKind, EnsembleSpec};
use kacmat::error::{Error, Result};
use kacmat::montecarlo::{
    compare, estimate_hole_probability, estimate_radial_density, estimate_rho2_at, free_points,
    radial_oracle_curve, sample_root_sets, sample_spectra, uniform_edges, window_average,
    BatchReport, BinFilter, Criterion, Execution, KacSpec,
};
use kacmat::mu::Mu;
use kacmat::oracles::*;
use kacmat::rng::RngStream;
use kacmat::series::AberthOptions;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::io::{fmt_f64, points_table, read_points, Table};

/// What a command produces: a JSON document, a CSV table, and a verdict.
pub struct Product {
    pub json: Value,
    pub csv: Table,
    pub pass: bool,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn execution(exec: &ExecArgs) -> Result<Execution> {
    Execution::from_workers(exec.workers)
}

/// The resolved arguments plus the command name.
fn config<T: Serialize>(command: &str, args: &T) -> Result<Value> {
    let mut v = serde_json::to_value(args)?;
    if let Value::Object(map) = &mut v {
        map.insert("command".into(), Value::String(command.into()));
    }
    Ok(v)
}

fn log_batch(what: &str, r: &BatchReport) {
    eprintln!(
        "{what}: {} samples in {:.2}s ({:.1}/s, {} worker{})",
        r.samples,
        r.elapsed_secs,
        r.samples_per_sec,
        r.workers,
        if r.workers == 1 { "" } else { "s" }
    );
}

fn num(x: f64) -> String {
    fmt_f64(x)
}

fn real(r: f64) -> Complex64 {
    Complex64::new(r, 0.0)
}

fn ua_a_from_mu(mu: Mu, n: usize) -> Complex64 {
    match mu {
        Mu::Infinite => Complex64::new(0.0, 0.0),
        Mu::Finite(m) => (m * (n as f64).sqrt()).inv(),
    }
}

pub fn sample(mut args: SampleArgs) -> Result<Product> {
    let mut spec = EnsembleSpec::new(args.ensemble, args.n, args.seed);
    spec.a = args.a;
    spec.mu = args.mu;
    if spec.kind == EnsembleKind::Ua {
        let a = spec.resolved_a()?;
        spec.a = Some(a);
        args.a = Some(a);
    }
    spec.validate()?;
    let batch = sample_spectra(&spec, args.samples, execution(&args.exec)?)?;
    log_batch("sample", &batch.report);
    let csv = points_table(
        batch
            .items
            .iter()
            .map(|s| (s.sample_index, s.values.as_slice())),
    );
    let spectra: Vec<Value> = batch
        .items
        .iter()
        .map(|s| json!({"sample": s.sample_index, "values": s.values}))
        .collect();
    Ok(Product {
        json: json!({"config": config("sample", &args)?, "spectra": spectra}),
        csv,
        pass: true,
    })
}

pub fn kac_roots(args: KacRootsArgs) -> Result<Product> {
    let spec = KacSpec {
        degree: args.degree,
        mu: args.mu,
        seed: args.seed,
    };
    let opts = AberthOptions {
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let batch = sample_root_sets(&spec, args.samples, opts, execution(&args.exec)?)?;
    log_batch("kac-roots", &batch.report);
    let sets: Vec<Vec<Complex64>> = if args.keep_origin {
        batch.items.iter().map(|s| s.roots.clone()).collect()
    } else {
        free_points(&batch.items)
    };
    let csv = points_table(
        sets.iter()
            .enumerate()
            .map(|(i, s)| (i as u64, s.as_slice())),
    );
    let roots: Vec<Value> = sets
        .iter()
        .zip(&batch.items)
        .enumerate()
        .map(|(i, (s, r))| json!({"sample": i, "roots": s, "residual_bound": r.residual_bound}))
        .collect();
    Ok(Product {
        json: json!({"config": config("kac-roots", &args)?, "root_sets": roots}),
        csv,
        pass: true,
    })
}

/// Fills in defaults and derived parameters so the config is complete.
fn resolve_source(s: &mut SourceArgs) -> Result<()> {
    match s.source {
        SourceKind::Ua => {
            if s.degree.is_some() {
                return Err(invalid("degree", "only applies to --source kac"));
            }
            let n = *s.n.get_or_insert(200);
            if n < 2 {
                return Err(invalid("n", "must be at least 2"));
            }
            let a = match (s.a, s.mu) {
                (Some(a), _) => a,
                (None, Some(mu)) => ua_a_from_mu(mu, n),
                (None, None) => return Err(invalid("mu", "--source ua needs --mu or --a")),
            };
            if !(a.norm() < 1.0) {
                return Err(invalid("a", "need |a| < 1"));
            }
            s.a = Some(a);
            // the limit parameter that this `a` corresponds to
            s.mu = Some(if a.norm() == 0.0 {
                Mu::Infinite
            } else {
                Mu::Finite((a * (n as f64).sqrt()).inv())
            });
        }
        SourceKind::Kac => {
            if s.n.is_some() || s.a.is_some() {
                return Err(invalid("n", "--n and --a only apply to --source ua"));
            }
            s.degree.get_or_insert(400);
            if s.mu.is_none() {
                return Err(invalid("mu", "--source kac needs --mu"));
            }
        }
    }
    Ok(())
}

fn source_mu(s: &SourceArgs) -> Mu {
    s.mu.expect("resolved")
}

fn load_points(s: &SourceArgs, exec: &ExecArgs) -> Result<Vec<Vec<Complex64>>> {
    if let Some(path) = &s.input {
        return read_points(path);
    }
    let exec = execution(exec)?;
    match s.source {
        SourceKind::Ua => {
            let (n, a) = (s.n.expect("resolved"), s.a.expect("resolved"));
            // with a = 0 one eigenvalue sits at the origin; drop it by
            // sampling the remaining block directly
            let spec = if a.norm() == 0.0 {
                EnsembleSpec::new(EnsembleKind::TruncatedUnitary, n, s.seed)
            } else {
                EnsembleSpec::ua_with_a(n, a, s.seed)
            };
            let batch = sample_spectra(&spec, s.samples, exec)?;
            log_batch("ua", &batch.report);
            Ok(batch.items.into_iter().map(|sp| sp.values).collect())
        }
        SourceKind::Kac => {
            let spec = KacSpec {
                degree: s.degree.expect("resolved"),
                mu: source_mu(s),
                seed: s.seed,
            };
            let batch = sample_root_sets(&spec, s.samples, AberthOptions::default(), exec)?;
            log_batch("kac", &batch.report);
            Ok(free_points(&batch.items))
        }
    }
}

pub fn density(mut args: DensityArgs) -> Result<Product> {
    resolve_source(&mut args.source)?;
    if args.bins == 0 {
        return Err(invalid("bins", "must be at least 1"));
    }
    let mu = source_mu(&args.source);
    let r_min = *args
        .r_min
        .get_or_insert(if mu.is_infinite() { 0.0 } else { 0.05 });
    let points = load_points(&args.source, &args.exec)?;
    let edges = uniform_edges(0.0, 1.0, args.bins);
    let hist = estimate_radial_density(&points, &edges)?;
    let (name, oracle) = match args.source.source {
        SourceKind::Ua => {
            let (n, a) = (args.source.n.unwrap(), args.source.a.unwrap());
            let curve = radial_oracle_curve(&edges, a.norm(), |r| {
                Ok(density_finite_n(real(r), a, n)?.value)
            })?;
            ("density_finite_n", curve)
        }
        SourceKind::Kac => {
            let ctx = OracleContext::new(mu)?;
            let curve =
                radial_oracle_curve(&edges, 0.0, |r| Ok(density_limit(real(r), &ctx)?.value))?;
            ("density_limit", curve)
        }
    };
    let filter = BinFilter {
        r_min,
        r_max: args.r_max,
        min_expected: args.min_expected,
    };
    let selected = filter.select(&hist, &oracle);
    if selected.is_empty() {
        return Err(invalid(
            "r_min",
            "no bin passes the range and expected-count filter",
        ));
    }
    let criterion = Criterion {
        z_limit: args.criterion.z_limit,
        alpha: args.criterion.alpha,
    };
    let report = compare(
        &hist.curve().select(&selected),
        &oracle.select(&selected),
        name,
        criterion,
    )?;
    let mut csv = Table::new(&["r", "value", "stderr"]);
    for ((r, v), se) in hist.midpoints().iter().zip(&hist.density).zip(&hist.stderr) {
        csv.push(vec![num(*r), num(*v), num(*se)]);
    }
    let pass = report.pass;
    Ok(Product {
        json: json!({
            "config": config("density", &args)?,
            "oracle": {"name": name, "r": oracle.x, "value": oracle.value},
            "statistics": {"histogram": hist, "comparison": report},
            "pass": pass,
        }),
        csv,
        pass,
    })
}

pub fn rho2(mut args: Rho2Args) -> Result<Product> {
    resolve_source(&mut args.source)?;
    let ctx = OracleContext::new(source_mu(&args.source))?;
    // check the windows before sampling
    let oracle = window_average(args.z, args.w, args.eps, |p, q| rho2_limit(p, q, &ctx))?;
    let points = load_points(&args.source, &args.exec)?;
    let est = estimate_rho2_at(&points, args.z, args.w, args.eps, args.rotations)?;
    let d = est.estimate - oracle;
    let z = if d == 0.0 { 0.0 } else { d / est.stderr };
    let pass = z.abs() <= args.z_limit;
    let mut csv = Table::new(&["re1", "im1", "re2", "im2", "value", "stderr", "oracle"]);
    csv.push(vec![
        num(args.z.re),
        num(args.z.im),
        num(args.w.re),
        num(args.w.im),
        num(est.estimate),
        num(est.stderr),
        num(oracle),
    ]);
    Ok(Product {
        json: json!({
            "config": config("rho2", &args)?,
            "oracle": {"name": "rho2_limit window average", "value": oracle},
            "statistics": {"estimate": est, "z": z},
            "pass": pass,
        }),
        csv,
        pass,
    })
}

fn default_regime(mu: Mu) -> HoleRegime {
    if mu.is_infinite() {
        HoleRegime::ExactInfiniteMu
    } else {
        HoleRegime::SmallR
    }
}

pub fn hole(mut args: HoleArgs) -> Result<Product> {
    resolve_source(&mut args.source)?;
    let mu = source_mu(&args.source);
    let regime = *args.regime.get_or_insert(default_regime(mu));
    let ctx = OracleContext::new(mu)?;
    let oracle: Vec<f64> = args
        .r
        .iter()
        .map(|&r| hole_probability(r, &ctx, regime))
        .collect::<Result<_>>()?;
    let points = load_points(&args.source, &args.exec)?;
    let est = estimate_hole_probability(&points, &args.r, args.confidence)?;
    let mut csv = Table::new(&["r", "fraction", "lo", "hi"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for (e, o) in est.iter().zip(&oracle) {
        let inside = e.lo <= *o && *o <= e.hi;
        pass &= inside;
        csv.push(vec![num(e.r), num(e.fraction), num(e.lo), num(e.hi)]);
        rows.push(json!({"estimate": e, "oracle": o, "inside": inside}));
    }
    Ok(Product {
        json: json!({
            "config": config("hole", &args)?,
            "oracle": {"name": "hole_probability", "regime": regime, "value": oracle},
            "statistics": rows,
            "pass": pass,
        }),
        csv,
        pass,
    })
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || invalid("r_grid", format!("`{s}` is not start:stop:count"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    })
}

pub fn oracle(mut args: OracleArgs) -> Result<Product> {
    use OracleForm::*;
    let ctx = OracleContext::new(args.mu)?;
    if let Some(g) = &args.r_grid {
        let extra = parse_grid(g)?;
        args.r.extend(extra);
        args.r_grid = None;
    }
    let pair = |args: &OracleArgs| -> Result<(Complex64, Complex64)> {
        match (args.z, args.w) {
            (Some(z), Some(w)) => Ok((z, w)),
            _ => Err(invalid("z", "this form needs --z and --w")),
        }
    };
    let radial = |f: &dyn Fn(f64) -> Result<f64>| -> Result<(Table, Vec<f64>)> {
        if args.r.is_empty() {
            return Err(invalid("r", "this form needs --r or --r-grid"));
        }
        let mut t = Table::new(&["r", "value"]);
        let mut vals = Vec::new();
        for &r in &args.r {
            let v = f(r)?;
            t.push(vec![num(r), num(v)]);
            vals.push(v);
        }
        Ok((t, vals))
    };
    let (csv, values) = match args.form {
        DensityLimit => radial(&|r| Ok(density_limit(real(r), &ctx)?.value))?,
        DensityFiniteN => {
            let n = args
                .n
                .ok_or_else(|| invalid("n", "density-finite-n needs --n"))?;
            let a = args.a.unwrap_or_else(|| ua_a_from_mu(args.mu, n));
            args.a = Some(a);
            radial(&|r| Ok(density_finite_n(real(r), a, n)?.value))?
        }
        Rho1Kacrice => radial(&|r| rho1_kacrice(real(r), &ctx))?,
        Hole => {
            let regime = *args.regime.get_or_insert(default_regime(args.mu));
            radial(&|r| hole_probability(r, &ctx, regime))?
        }
        Rho2 | Rho2Direct | Rho2Kacrice => {
            let (z, w) = pair(&args)?;
            let v = match args.form {
                Rho2 => rho2_limit(z, w, &ctx)?,
                Rho2Direct => rho2_direct(z, w, &ctx)?,
                _ => rho2_kacrice(z, w, &ctx)?,
            };
            let mut t = Table::new(&["re1", "im1", "re2", "im2", "value"]);
            t.push(vec![num(z.re), num(z.im), num(w.re), num(w.im), num(v)]);
            (t, vec![v])
        }
        Rhok | Determinantal | Truncated => {
            if args.points.is_empty() {
                return Err(invalid("points", "this form needs --points"));
            }
            let v = match args.form {
                Rhok => rhok_limit(&args.points, &ctx)?,
                Determinantal => rhok_determinantal(&args.points)?,
                _ => truncated_correlation(&args.points, &ctx)?,
            };
            let mut t = Table::new(&["k", "value"]);
            t.push(vec![args.points.len().to_string(), num(v)]);
            (t, vec![v])
        }
    };
    let form = serde_json::to_value(args.form)?;
    Ok(Product {
        json: json!({"config": config("oracle", &args)?, "oracle": form, "values": values}),
        csv,
        pass: true,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn validate(args: ValidateArgs) -> Result<Product> {
    if args.samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }
    let mut rng = RngStream::new(args.seed, 0);
    let identities = identity_suite(args.samples, &mut rng)?;
    // cross-formula checks on their own stream
    let mut rng = RngStream::new(args.seed, 1);
    let inf = OracleContext::infinite();
    let mut worst = [0.0f64; 5];
    for _ in 0..args.samples {
        let m = (0.3f64.ln() + rng.uniform() * (5.0f64 / 0.3).ln()).exp();
        let ctx = OracleContext::new(Mu::Finite(Complex64::from_polar(m, TAU * rng.uniform())))?;
        let z = rng.uniform_in_disk(0.95);
        let w = rng.uniform_in_disk(0.95);
        let v = rng.uniform_in_disk(0.95);
        let d = density_limit(z, &ctx)?.value;
        let l2 = rho2_limit(z, w, &ctx)?;
        let checks = [
            rel(d, rho1_kacrice(z, &ctx)?),
            rel(l2, rho2_direct(z, w, &ctx)?),
            rel(d, rhok_limit(&[z], &ctx)?),
            rel(l2, rhok_limit(&[z, w], &ctx)?),
            rel(
                rhok_limit(&[z, w, v], &inf)?,
                rhok_determinantal(&[z, w, v])?,
            ),
        ];
        for (acc, c) in worst.iter_mut().zip(checks) {
            *acc = acc.max(c);
        }
    }
    let names = [
        "rho1_kacrice",
        "rho2_direct",
        "rhok_1",
        "rhok_2",
        "determinantal_3",
    ];
    let ident = [
        ("borchardt", identities.borchardt),
        ("y0", identities.y0),
        ("y1", identities.y1),
        ("y2", identities.y2),
    ];
    let max_residual = worst
        .iter()
        .copied()
        .fold(identities.max_residual(), f64::max);
    let pass = max_residual < args.tolerance;
    let mut csv = Table::new(&["check", "max_residual"]);
    for (name, v) in ident
        .iter()
        .copied()
        .chain(names.iter().copied().zip(worst))
    {
        csv.push(vec![name.to_string(), num(v)]);
    }
    let cross: serde_json::Map<String, Value> = names
        .iter()
        .zip(worst)
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    Ok(Product {
        json: json!({
            "config": config("validate", &args)?,
            "oracle": "identity_suite",
            "statistics": {"identities": identities, "cross_checks": cross, "max_residual": max_residual},
            "pass": pass,
        }),
        csv,
        pass,
    })
}

pub fn sumrule(args: SumruleArgs) -> Result<Product> {
    let ctx = OracleContext::new(args.mu)?;
    let quad = QuadratureSpec {
        delta: args.delta,
        radial_nodes: args.radial_nodes,
        angular_nodes: args.angular_nodes,
    };
    let report = sum_rule_defect(&args.points, &ctx, quad)?;
    // the rule is only expected to hold in the determinantal case
    let asserted = ctx.is_determinantal();
    let pass = !asserted || report.defect.abs() < args.tolerance;
    let mut csv = Table::new(&[
        "k",
        "integral",
        "k_rho_t",
        "defect",
        "refined_defect",
        "converged",
    ]);
    csv.push(vec![
        report.k.to_string(),
        num(report.integral),
        num(report.k_rho_t),
        num(report.defect),
        num(report.refined_defect),
        report.converged.to_string(),
    ]);
    Ok(Product {
        json: json!({
            "config": config("sumrule", &args)?,
            "oracle": "sum_rule_defect",
            "statistics": report,
            "asserted": asserted,
            "pass": pass,
        }),
        csv,
        pass,
    })
}

/// Recomputes a saved report from a points file. Passes when the recomputed
/// statistics equal the saved ones exactly and the comparison itself passed.
pub fn compare_saved(args: CompareArgs) -> Result<Product> {
    let text = std::fs::read_to_string(&args.report)?;
    let saved: Value = serde_json::from_str(&text)?;
    let cfg = saved
        .get("config")
        .cloned()
        .ok_or_else(|| invalid("report", "no `config` in report"))?;
    let command = cfg
        .get("command")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let input = Some(args.input.clone());
    let product = match command.as_str() {
        "density" => {
            let mut a: DensityArgs = serde_json::from_value(cfg)?;
            a.source.input = input;
            a.exec = args.exec.clone();
            density(a)?
        }
        "rho2" => {
            let mut a: Rho2Args = serde_json::from_value(cfg)?;
            a.source.input = input;
            a.exec = args.exec.clone();
            rho2(a)?
        }
        "hole" => {
            let mut a: HoleArgs = serde_json::from_value(cfg)?;
            a.source.input = input;
            a.exec = args.exec.clone();
            hole(a)?
        }
        other => {
            return Err(invalid(
                "report",
                format!("`{other}` reports cannot be recomputed; need density, rho2 or hole"),
            ))
        }
    };
    let reproduced = product.json["statistics"] == saved["statistics"]
        && product.json["oracle"] == saved["oracle"]
        && product.json["pass"] == saved["pass"];
    let pass = reproduced && product.pass;
    let cfg = json!({
        "command": "compare",
        "report": path_str(&args.report),
        "input": path_str(&args.input),
        "recomputed": command,
    });
    Ok(Product {
        json: json!({
            "config": cfg,
            "oracle": product.json["oracle"],
            "statistics": product.json["statistics"],
            "reproduced": reproduced,
            "pass": pass,
        }),
        csv: product.csv,
        pass,
    })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}
