use gaborlab::framebounds::{
    bounds_symplectic, certify_even_critical, certify_odd_critical, certify_odd_density2, finite_section_bounds,
    janssen_bounds, lattice_bounds, separable_bounds, zak_bounds, BoundsConfig, FrameBounds,
};
use gaborlab::lattice::Lattice;
use gaborlab::metaplectic::apply_symplectic;
use gaborlab::sampling::{random_symplectic, rng};
use gaborlab::specs::{load_window, parse_lattice_spec, parse_matrix_spec, parse_number};
use gaborlab::symplectic::{chain_product, decompose, SymplecticMatrix};
use gaborlab::windows::{parity_defect, SampledWindow, TimeGrid};
use gaborlab::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{csv, emit, float, json};
use crate::{Certificate, Common, Method};

/// Parity tolerance for choosing certificates automatically.
const PARITY_TOL: f64 = 1e-6;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::Io(_)
        | Error::Dimension(_)
        | Error::GridMismatch
        | Error::ZeroWindow => 1,
        Error::Hypothesis(_)
        | Error::Parity(_)
        | Error::NotSymplectic { .. }
        | Error::Singular { .. }
        | Error::NotSymmetric { .. }
        | Error::NotFree { .. }
        | Error::Unsupported(_) => 2,
        Error::Truncation { .. } | Error::Numerical(_) | Error::DecompositionFailed { .. } => 3,
    }
}

fn grid(c: &Common) -> Result<TimeGrid> {
    TimeGrid::new(c.n, parse_number(&c.h)?)
}

fn config(c: &Common, radius: f64, n_test: usize) -> BoundsConfig {
    BoundsConfig { k: c.k, grid_n: c.grid_n, fs_radius: radius, fs_n_test: n_test, ..Default::default() }
}

fn write(c: &Common, text: &str) -> Result<()> {
    emit(c.out.as_deref(), text)
}

/// The window and separable parameters a sharp method runs on: the lattice
/// itself when separable, otherwise the square lattice after reduction.
fn sharp_problem(g: &SampledWindow, lat: &Lattice) -> Result<(SampledWindow, f64, f64, &'static str)> {
    if let Some((a, b)) = lat.as_separable() {
        return Ok((g.clone(), a, b, ""));
    }
    let side = lat.delta.powf(-0.5);
    Ok((apply_symplectic(g, &lat.generator.inverse())?, side, side, "symplectic_reduction+"))
}

#[derive(Serialize)]
struct BoundsReport<'a> {
    window: &'a str,
    lattice: &'a str,
    delta: f64,
    #[serde(flatten)]
    bounds: &'a FrameBounds,
    not_frame: bool,
}

pub fn bounds(c: &Common, window: &str, lattice: &str, method: Method, radius: f64, n_test: usize) -> Result<u8> {
    let spec = parse_lattice_spec(lattice)?;
    let g = load_window(window, grid(c)?)?;
    let lat = spec.lattice()?;
    let cfg = config(c, radius, n_test);
    let fb = match method {
        Method::Auto => lattice_bounds(&g, &lat, &cfg)?,
        Method::FiniteSection => finite_section_bounds(&g, &lat, radius, n_test)?,
        Method::Janssen | Method::Zak => {
            let (w, a, b, prefix) = sharp_problem(&g, &lat)?;
            let mut fb = if method == Method::Janssen {
                janssen_bounds(&w, a, b, c.k, c.grid_n)?
            } else {
                zak_bounds(&w, a, b, c.grid_n)?
            };
            fb.method = format!("{prefix}{}", fb.method);
            fb
        }
    };
    let report = BoundsReport { window, lattice, delta: lat.delta, bounds: &fb, not_frame: fb.not_frame() };
    write(c, &json(&report)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct CertifyReport<'a> {
    window: &'a str,
    #[serde(rename = "K")]
    k: usize,
    tolerance: f64,
    certificates: Vec<CertificateResult>,
    pass: bool,
}

#[derive(Serialize)]
struct CertificateResult {
    name: &'static str,
    residual: f64,
    pass: bool,
}

pub fn certify(c: &Common, window: &str, which: Certificate, tol: f64) -> Result<u8> {
    let g = load_window(window, grid(c)?)?;
    let kinds: Vec<Certificate> = match which {
        Certificate::Auto => {
            let (even, odd) = parity_defect(&g)?;
            if even < PARITY_TOL {
                vec![Certificate::Even]
            } else if odd < PARITY_TOL {
                vec![Certificate::Odd, Certificate::OddDensity2]
            } else {
                return Err(Error::Parity(format!("window is neither even nor odd (defects {even:.3e}, {odd:.3e})")));
            }
        }
        other => vec![other],
    };
    let certificates = kinds
        .iter()
        .map(|kind| {
            let (name, residual) = match kind {
                Certificate::Even => ("even_critical", certify_even_critical(&g, c.k)?),
                Certificate::Odd => ("odd_critical", certify_odd_critical(&g, c.k)?),
                _ => ("odd_density2", certify_odd_density2(&g, c.k)?),
            };
            Ok(CertificateResult { name, residual, pass: residual < tol })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = certificates.iter().all(|r| r.pass);
    write(c, &json(&CertifyReport { window, k: c.k, tolerance: tol, certificates, pass })?)?;
    Ok(if pass { 0 } else { 3 })
}

const LYUNES_WINDOWS: [(&str, &str); 4] =
    [("hermite:n=1,gamma=1", "odd"), ("hermite:n=3,gamma=1", "odd"), ("oddbump", "odd"), ("gauss:gamma=1", "control")];

#[derive(Serialize)]
struct LyunesRow {
    n: usize,
    delta: f64,
    window: &'static str,
    role: &'static str,
    s: Vec<f64>,
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    ratio: Option<f64>,
    method: Option<String>,
    not_frame: Option<bool>,
    error: Option<String>,
}

impl LyunesRow {
    /// Odd windows must fail to be frames, the control must be one.
    fn holds(&self) -> bool {
        match self.not_frame {
            Some(nf) => nf == (self.role == "odd"),
            None => false,
        }
    }
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn lyunes(c: &Common, n_max: usize, trials: usize) -> Result<u8> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n-max must be at least 1".into()));
    }
    let grid = grid(c)?;
    let windows: Vec<SampledWindow> =
        LYUNES_WINDOWS.iter().map(|(spec, _)| load_window(spec, grid)).collect::<Result<_>>()?;
    let cfg = config(c, 12.0, 24);
    let mut r = rng(c.seed);
    let mut jobs = Vec::new();
    for n in 1..=n_max {
        for _ in 0..trials {
            let s = random_symplectic(&mut r);
            for w in 0..LYUNES_WINDOWS.len() {
                jobs.push((n, s.clone(), w));
            }
        }
    }
    let rows: Vec<LyunesRow> = jobs
        .par_iter()
        .map(|(n, s, w)| {
            let delta = (*n as f64 + 1.0) / *n as f64;
            let (window, role) = LYUNES_WINDOWS[*w];
            let mut row = LyunesRow {
                n: *n,
                delta,
                window,
                role,
                s: s.entries(),
                a: None,
                b: None,
                ratio: None,
                method: None,
                not_frame: None,
                error: None,
            };
            match bounds_symplectic(&windows[*w], s, delta, &cfg) {
                Ok(fb) => {
                    row.a = Some(fb.a);
                    row.b = Some(fb.b);
                    row.ratio = Some(fb.a / fb.b);
                    row.not_frame = Some(fb.not_frame());
                    row.method = Some(fb.method);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    let text = if c.json {
        json(&rows)?
    } else {
        let header = [
            "n",
            "delta",
            "window",
            "role",
            "s11",
            "s12",
            "s21",
            "s22",
            "A",
            "B",
            "ratio",
            "method",
            "not_frame",
            "error",
        ];
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![r.n.to_string(), float(r.delta), r.window.into(), r.role.into()];
                v.extend(r.s.iter().map(|x| float(*x)));
                v.extend([opt_float(r.a), opt_float(r.b), opt_float(r.ratio)]);
                v.push(r.method.clone().unwrap_or_default());
                v.push(r.not_frame.map(|b| b.to_string()).unwrap_or_default());
                v.push(r.error.clone().unwrap_or_default());
                v
            })
            .collect();
        csv(&header, &body)?
    };
    write(c, &text)?;
    Ok(if rows.iter().all(LyunesRow::holds) { 0 } else { 3 })
}

fn parse_range(text: &str, what: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| Error::Parse(format!("{what} range must be `lo:hi`")))?;
    let (lo, hi) = (parse_number(lo)?, parse_number(hi)?);
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidParameter(format!("{what} range must satisfy 0 < lo ≤ hi")));
    }
    Ok((lo, hi))
}

/// `steps` evenly spaced values on `[lo, hi]`; a degenerate range gives one.
fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 || lo == hi {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

#[derive(Serialize)]
struct ScanRow {
    alpha: f64,
    beta: f64,
    delta: f64,
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    ratio: Option<f64>,
    not_frame: Option<bool>,
    method: Option<String>,
    error: Option<String>,
}

pub fn scan(c: &Common, window: &str, alpha: &str, beta: &str, steps: usize, radius: f64, n_test: usize) -> Result<u8> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    let (a0, a1) = parse_range(alpha, "alpha")?;
    let (b0, b1) = parse_range(beta, "beta")?;
    let g = load_window(window, grid(c)?)?;
    let cfg = config(c, radius, n_test);
    let cells: Vec<(f64, f64)> = linspace(a0, a1, steps)
        .into_iter()
        .flat_map(|a| linspace(b0, b1, steps).into_iter().map(move |b| (a, b)))
        .collect();
    let rows: Vec<ScanRow> = cells
        .par_iter()
        .map(|&(alpha, beta)| {
            let mut row = ScanRow {
                alpha,
                beta,
                delta: 1.0 / (alpha * beta),
                a: None,
                b: None,
                ratio: None,
                not_frame: None,
                method: None,
                error: None,
            };
            match Lattice::separable(alpha, beta).and_then(|lat| lattice_bounds(&g, &lat, &cfg)) {
                Ok(fb) => {
                    row.a = Some(fb.a);
                    row.b = Some(fb.b);
                    row.ratio = Some(fb.a / fb.b);
                    row.not_frame = Some(fb.not_frame());
                    row.method = Some(fb.method);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    let text = if c.json {
        json(&rows)?
    } else {
        let header = ["alpha", "beta", "delta", "A", "B", "ratio", "not_frame", "method", "error"];
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    float(r.alpha),
                    float(r.beta),
                    float(r.delta),
                    opt_float(r.a),
                    opt_float(r.b),
                    opt_float(r.ratio),
                    r.not_frame.map(|b| b.to_string()).unwrap_or_default(),
                    r.method.clone().unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        csv(&header, &body)?
    };
    write(c, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct DeformReport<'a> {
    window: &'a str,
    lattice: &'a str,
    #[serde(rename = "S")]
    s: Vec<f64>,
    delta: f64,
    reduction: FrameBounds,
    direct: FrameBounds,
    gap_a: f64,
    gap_b: f64,
    gap: f64,
}

/// Relative disagreement of two bound pairs. Lower bounds that both
/// certify "not a frame" count as agreeing.
pub fn relative_gap(x: &FrameBounds, y: &FrameBounds) -> (f64, f64) {
    let rel = |u: f64, v: f64| {
        let m = u.abs().max(v.abs());
        if m == 0.0 {
            0.0
        } else {
            (u - v).abs() / m
        }
    };
    let gap_a = if x.not_frame() && y.not_frame() { 0.0 } else { rel(x.a, y.a) };
    (gap_a, rel(x.b, y.b))
}

pub fn deform(c: &Common, window: &str, lattice: &str, s: &str, radius: f64, n_test: usize) -> Result<u8> {
    let s: SymplecticMatrix = parse_matrix_spec(s)?;
    let spec = parse_lattice_spec(lattice)?;
    let g = load_window(window, grid(c)?)?;
    let base = spec.lattice()?;
    let deformed = base.deformed(&s)?;
    let cfg = config(c, radius, n_test);
    let reduction = bounds_symplectic(&g, &deformed.generator, deformed.delta, &cfg)?;
    let direct = match deformed.as_separable() {
        Some((a, b)) => separable_bounds(&g, a, b, &cfg)?,
        None => finite_section_bounds(&g, &deformed, radius, n_test)?,
    };
    let (gap_a, gap_b) = relative_gap(&reduction, &direct);
    let report = DeformReport {
        window,
        lattice,
        s: s.entries(),
        delta: deformed.delta,
        gap: gap_a.max(gap_b),
        gap_a,
        gap_b,
        reduction,
        direct,
    };
    write(c, &json(&report)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct FactorReport {
    #[serde(rename = "S")]
    s: Vec<f64>,
    free: bool,
    chain: Vec<String>,
    product: Vec<f64>,
    residual: f64,
}

/// Tolerance on `‖chain_product − S‖_max`.
const FACTOR_TOL: f64 = 1e-10;

pub fn factor(c: &Common, s: &str) -> Result<u8> {
    let s = parse_matrix_spec(s)?;
    let chain = decompose(&s)?;
    let product = chain_product(&chain);
    let residual = (product.matrix() - s.matrix()).amax();
    let text = if c.json {
        let report = FactorReport {
            s: s.entries(),
            free: s.is_free(),
            chain: chain.steps.iter().map(|st| st.to_string()).collect(),
            product: product.entries(),
            residual,
        };
        json(&report)?
    } else {
        format!("{chain}\nresidual {}\n", float(residual))
    };
    write(c, &text)?;
    Ok(if residual <= FACTOR_TOL { 0 } else { 3 })
}
