//! Subcommand reports.
//!
//! CSV tables always start with a fixed header line:
//!
//! | command        | header |
//! |----------------|--------|
//! | `classify`     | `verdict,clause,value,pass,sliding_lower,sliding_upper` |
//! | `halfmap`      | `y0,y_left,y_right,dy_left,dy_right` |
//! | `displacement` | `kind,y0,delta,f_sign` |
//! | `portrait`     | `orbit,y0,t,x,y,zone` |
//! | `sweep`        | `index,TL,DL,aL,TR,DR,aR,b,verdict,<one column per clause>,failing` |
//!
//! Missing values (outside a domain, no sliding set) are empty cells in CSV
//! and `null` in JSON.

use crate::{CliError, Format, RunConfig, SystemInput};
use pwl_annulus::classifier::check_h;
use pwl_annulus::oracle::{sample_orbit, ZoneSide};
use pwl_annulus::{
    classify as classify_params, CanonicalSystem, Classification, Clause, DisplacementContext, Error, HalfMapDomain,
    OrbitKind, ScanConfig, SystemParams, TrajectorySample, UpperBound,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

const ALL_CLAUSES: [Clause; 9] = [
    Clause::CrossingDirection,
    Clause::LeftHalfMap,
    Clause::RightHalfMap,
    Clause::TraceSign,
    Clause::Xi0,
    Clause::XiInf,
    Clause::Beta,
    Clause::CenterLeft,
    Clause::CenterRight,
];

fn write_csv<R: Serialize>(out: &mut dyn Write, header: &[&str], rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Canonical form, or a precondition failure naming the crossing clause.
fn canonical(system: &SystemInput) -> Result<CanonicalSystem, CliError> {
    match system {
        SystemInput::Canonical(c) => Ok(*c),
        SystemInput::Raw(p) => p.to_canonical().map_err(|e| match e {
            Error::Canonicalization { product } => CliError::Precondition(format!(
                "{} fails: a12_L * a12_R = {product} is not positive",
                Clause::CrossingDirection
            )),
            other => CliError::Input(other.to_string()),
        }),
    }
}

/// Canonical form of a system satisfying hypothesis (H).
fn require_h(system: &SystemInput) -> Result<CanonicalSystem, CliError> {
    let (ok, records) = check_h(&system.params()?.derive_invariants());
    if !ok {
        let failing: Vec<String> =
            records.iter().filter(|r| !r.pass).map(|r| format!("{} (value {})", r.name, r.value)).collect();
        return Err(CliError::Precondition(format!("hypothesis (H) fails: {}", failing.join(", "))));
    }
    canonical(system)
}

fn table_end(lambda: f64, mu: UpperBound, span: f64) -> f64 {
    match mu {
        UpperBound::Finite(m) => m,
        UpperBound::Infinite => lambda + span * lambda.max(1.0),
    }
}

fn midpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

#[derive(Serialize)]
struct ClauseRow {
    verdict: String,
    clause: &'static str,
    value: f64,
    pass: bool,
    sliding_lower: Option<f64>,
    sliding_upper: Option<f64>,
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    #[serde(flatten)]
    classification: &'a Classification,
    failing: Vec<&'static str>,
    invariants: pwl_annulus::DerivedQuantities,
}

pub fn classify(system: &SystemInput, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = system.params()?;
    let c = classify_params(&p, cfg.tolerances.classify);
    match cfg.format {
        Format::Json => write_json(
            out,
            &ClassifyReport {
                classification: &c,
                failing: c.failing().into_iter().map(Clause::name).collect(),
                invariants: p.derive_invariants(),
            },
        ),
        Format::Csv => {
            let rows: Vec<ClauseRow> = c
                .reasons
                .iter()
                .map(|r| ClauseRow {
                    verdict: c.verdict.to_string(),
                    clause: r.name.name(),
                    value: r.value,
                    pass: r.pass,
                    sliding_lower: c.sliding.map(|s| s.lower),
                    sliding_upper: c.sliding.map(|s| s.upper),
                })
                .collect();
            write_csv(out, &["verdict", "clause", "value", "pass", "sliding_lower", "sliding_upper"], &rows)
        }
    }
}

#[derive(Serialize)]
struct HalfMapRow {
    y0: f64,
    y_left: Option<f64>,
    y_right: Option<f64>,
    dy_left: Option<f64>,
    dy_right: Option<f64>,
}

#[derive(Serialize)]
struct HalfMapReport {
    left_domain: HalfMapDomain,
    right_domain: HalfMapDomain,
    rows: Vec<HalfMapRow>,
}

pub fn halfmap(system: &SystemInput, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let c = require_h(system)?;
    let core = |e: Error| CliError::Precondition(e.to_string());
    let dl = c.left.domain().map_err(core)?;
    let dr = c.right.domain().map_err(core)?;
    let points = if cfg.y0.is_empty() {
        let lo = dl.lambda.min(dr.lambda);
        let hi = table_end(dl.lambda, dl.mu, cfg.span).max(table_end(dr.lambda, dr.mu, cfg.span));
        midpoints(lo, hi, cfg.grid)
    } else {
        cfg.y0.clone()
    };
    let rows: Vec<HalfMapRow> = points
        .into_iter()
        .map(|y0| {
            let (l, r) = (dl.contains(y0), dr.contains(y0));
            HalfMapRow {
                y0,
                y_left: l.then(|| c.left.eval(y0).ok()).flatten(),
                y_right: r.then(|| c.right.eval(y0).ok()).flatten(),
                dy_left: l.then(|| c.left.derivative(y0).ok()).flatten(),
                dy_right: r.then(|| c.right.derivative(y0).ok()).flatten(),
            }
        })
        .collect();
    match cfg.format {
        Format::Json => write_json(out, &HalfMapReport { left_domain: dl, right_domain: dr, rows }),
        Format::Csv => write_csv(out, &["y0", "y_left", "y_right", "dy_left", "dy_right"], &rows),
    }
}

#[derive(Serialize)]
struct DisplacementRow {
    /// `sample`, `isolated` or `annulus_candidate`.
    kind: &'static str,
    y0: f64,
    delta: Option<f64>,
    /// Sign of `F` at a zero, which is the sign of `δ'` there; needs `b = 0`.
    f_sign: Option<i8>,
}

#[derive(Serialize)]
struct DisplacementReport {
    lambda_b: f64,
    mu_b: UpperBound,
    empty: bool,
    c0: f64,
    c1: f64,
    c2: f64,
    rows: Vec<DisplacementRow>,
}

fn displacement_context(c: &CanonicalSystem, cfg: &RunConfig) -> Result<(DisplacementContext, ScanConfig), CliError> {
    let mut ctx =
        DisplacementContext::new(c.left, c.right, c.b).map_err(|e| CliError::Precondition(e.to_string()))?;
    ctx.contract_tol = cfg.tolerances.contract;
    let scan = ScanConfig {
        grid_n: cfg.grid,
        span_factor: cfg.span,
        annulus_tol: cfg.tolerances.annulus,
        refine_tol: cfg.tolerances.refine,
    };
    Ok((ctx, scan))
}

pub fn displacement(system: &SystemInput, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let c = require_h(system)?;
    let (ctx, scan) = displacement_context(&c, cfg)?;
    let f_sign = |y0: f64| {
        let y1 = ctx.left.eval(y0).ok()?;
        ctx.sign_delta_prime_at_zero(y0, y1).ok().map(|s| s.as_i8())
    };

    let mut rows: Vec<DisplacementRow> = Vec::new();
    if !ctx.empty {
        let orbits = ctx.find_crossing_orbits(&scan);
        let annulus = orbits.iter().any(|o| o.kind == OrbitKind::AnnulusCandidate);
        let points = if cfg.y0.is_empty() {
            ctx.sample(&scan).into_iter().map(|(y, _)| y).collect()
        } else {
            cfg.y0.clone()
        };
        for y0 in points {
            let delta = ctx.delta(y0).ok();
            if annulus && delta.is_some() {
                rows.push(DisplacementRow { kind: "annulus_candidate", y0, delta, f_sign: f_sign(y0) });
            } else {
                rows.push(DisplacementRow { kind: "sample", y0, delta, f_sign: None });
            }
        }
        for o in orbits.iter().filter(|o| o.kind == OrbitKind::Isolated) {
            rows.push(DisplacementRow { kind: "isolated", y0: o.y0, delta: ctx.delta(o.y0).ok(), f_sign: f_sign(o.y0) });
        }
        rows.sort_by(|a, b| a.y0.total_cmp(&b.y0));
    }
    match cfg.format {
        Format::Json => write_json(
            out,
            &DisplacementReport {
                lambda_b: ctx.lambda_b,
                mu_b: ctx.mu_b,
                empty: ctx.empty,
                c0: ctx.c0,
                c1: ctx.c1,
                c2: ctx.c2,
                rows,
            },
        ),
        Format::Csv => write_csv(out, &["kind", "y0", "delta", "f_sign"], &rows),
    }
}

#[derive(Serialize)]
struct PortraitRow {
    orbit: usize,
    y0: f64,
    t: f64,
    x: f64,
    y: f64,
    zone: ZoneSide,
}

#[derive(Serialize)]
struct Orbit {
    y0: f64,
    samples: Vec<TrajectorySample>,
}

pub fn portrait(system: &SystemInput, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let c = require_h(system)?;
    let starts = if cfg.y0.is_empty() {
        let (ctx, scan) = displacement_context(&c, cfg)?;
        if ctx.empty {
            return Err(CliError::Precondition("the half-maps have no common domain; pass --y0".into()));
        }
        let end = ctx.scan_end(&scan);
        [0.25, 0.5, 0.75].iter().map(|f| ctx.lambda_b + f * (end - ctx.lambda_b)).collect()
    } else {
        cfg.y0.clone()
    };
    let mut orbits = Vec::with_capacity(starts.len());
    for y0 in starts {
        let samples = sample_orbit(&c, y0, cfg.points)
            .map_err(|e| CliError::Precondition(format!("orbit from y0 = {y0}: {e}")))?;
        orbits.push(Orbit { y0, samples });
    }
    match cfg.format {
        Format::Json => write_json(out, &orbits),
        Format::Csv => {
            let rows: Vec<PortraitRow> = orbits
                .iter()
                .enumerate()
                .flat_map(|(i, o)| {
                    o.samples.iter().map(move |s| PortraitRow { orbit: i, y0: o.y0, t: s.t, x: s.x, y: s.y, zone: s.zone })
                })
                .collect();
            write_csv(out, &["orbit", "y0", "t", "x", "y", "zone"], &rows)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Canonical {
    #[serde(rename = "TL")]
    t_left: f64,
    #[serde(rename = "DL")]
    d_left: f64,
    #[serde(rename = "aL")]
    a_left: f64,
    #[serde(rename = "TR")]
    t_right: f64,
    #[serde(rename = "DR")]
    d_right: f64,
    #[serde(rename = "aR")]
    a_right: f64,
    b: f64,
}

impl Canonical {
    fn of(c: &CanonicalSystem) -> Self {
        Self {
            t_left: c.left.trace,
            d_left: c.left.det,
            a_left: c.left.a,
            t_right: c.right.trace,
            d_right: c.right.det,
            a_right: c.right.a,
            b: c.b,
        }
    }

    fn perturbed(&self, r: &mut impl Rng, spread: f64) -> Self {
        let mut jitter = |v: f64| v + spread * r.gen_range(-1.0..=1.0);
        Self {
            t_left: jitter(self.t_left),
            d_left: jitter(self.d_left),
            a_left: jitter(self.a_left),
            t_right: jitter(self.t_right),
            d_right: jitter(self.d_right),
            a_right: jitter(self.a_right),
            b: jitter(self.b),
        }
    }

    fn params(&self) -> Result<SystemParams, CliError> {
        SystemParams::from_canonical(
            (self.a_left, self.t_left, self.d_left),
            (self.a_right, self.t_right, self.d_right),
            self.b,
        )
        .map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Serialize)]
struct SweepRecord {
    index: usize,
    params: Canonical,
    #[serde(flatten)]
    classification: Classification,
}

pub fn sweep(system: &SystemInput, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let base = Canonical::of(&canonical(system)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // draws are taken serially so the perturbations depend only on the seed
    let draws: Vec<Canonical> = (0..cfg.samples).map(|_| base.perturbed(&mut rng, cfg.spread)).collect();
    let tol = cfg.tolerances.classify;
    let records = draws
        .into_par_iter()
        .enumerate()
        .map(|(index, params)| {
            Ok(SweepRecord { index, params, classification: classify_params(&params.params()?, tol) })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    match cfg.format {
        Format::Json => write_json(out, &records),
        Format::Csv => {
            let mut header = vec!["index", "TL", "DL", "aL", "TR", "DR", "aR", "b", "verdict"];
            header.extend(ALL_CLAUSES.iter().map(|c| c.name()));
            header.push("failing");
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
            w.write_record(&header)?;
            for r in &records {
                let p = r.params;
                let mut row: Vec<String> = vec![r.index.to_string()];
                row.extend([p.t_left, p.d_left, p.a_left, p.t_right, p.d_right, p.a_right, p.b].map(|v| v.to_string()));
                row.push(r.classification.verdict.to_string());
                for clause in ALL_CLAUSES {
                    row.push(r.classification.record(clause).map(|x| x.value.to_string()).unwrap_or_default());
                }
                let failing: Vec<&str> = r.classification.failing().into_iter().map(Clause::name).collect();
                row.push(failing.join(";"));
                w.write_record(&row)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
