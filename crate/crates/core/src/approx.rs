//! Polynomial and rational approximation of scalar frequency responses.
//!
//! Fits are carried in a Chebyshev basis on the target domain mapped to
//! `[-1, 1]` and converted to monomials on request.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::fmt_sig;
use crate::normalize::NormKind;
use crate::poly;
use crate::zoo::{make_rational, OperatorSpec, RationalKind};

pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_EXCLUSION: f64 = 0.05;
pub const MAX_ITERATIONS: usize = 50;
pub const CONVERGENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum TargetKind {
    /// `sign(x)`, jump at 0
    SignStep,
    /// `|x − 0.5|`
    AbsKink,
    /// `√|x − 0.5|`
    SqrtKink,
    /// `x / (10|x − 0.5| + 1)`
    RationalBump,
    /// `max(0.5, sin(x + x²)) − x/20`
    ClippedSine,
    /// Piecewise-linear through `(xs[i], ys[i])`, `xs` strictly increasing.
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
    Custom { name: String, f: fn(f64) -> f64 },
}

impl TargetKind {
    pub fn name(&self) -> &str {
        match self {
            TargetKind::SignStep => "sign",
            TargetKind::AbsKink => "abs",
            TargetKind::SqrtKink => "sqrt",
            TargetKind::RationalBump => "bump",
            TargetKind::ClippedSine => "clip",
            TargetKind::Tabulated { .. } => "tabulated",
            TargetKind::Custom { name, .. } => name,
        }
    }
}

impl FromStr for TargetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sign" | "sign-step" => TargetKind::SignStep,
            "abs" | "abs-kink" => TargetKind::AbsKink,
            "sqrt" | "sqrt-kink" => TargetKind::SqrtKink,
            "bump" | "rational-bump" => TargetKind::RationalBump,
            "clip" | "clipped-sine" => TargetKind::ClippedSine,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown target {other:?} (sign, abs, sqrt, bump, clip)"
                )))
            }
        })
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct TargetResponse {
    pub kind: TargetKind,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    /// Half-width of the window around the sign-step jump left out of the
    /// fit and of `max_error`. Zero for continuous targets.
    pub exclusion: f64,
}

impl TargetResponse {
    pub fn new(kind: TargetKind, lo: f64, hi: f64, samples: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("domain [{lo}, {hi}] is empty")));
        }
        if samples < 2 {
            return Err(Error::InvalidParameter(format!("grid needs ≥ 2 samples, got {samples}")));
        }
        if let TargetKind::Tabulated { xs, ys } = &kind {
            if xs.len() != ys.len() || xs.len() < 2 {
                return Err(Error::InvalidParameter("table needs ≥ 2 matching (x, y) pairs".into()));
            }
            if xs.iter().chain(ys).any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("table values must be finite".into()));
            }
            if xs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("table abscissae must increase".into()));
            }
            if lo < xs[0] || hi > xs[xs.len() - 1] {
                return Err(Error::InvalidParameter("domain extends past the table".into()));
            }
        }
        let exclusion = if matches!(kind, TargetKind::SignStep) { DEFAULT_EXCLUSION } else { 0.0 };
        Ok(Self { kind, lo, hi, samples, exclusion })
    }

    /// Named target on `[-1, 1]` with the default grid.
    pub fn standard(kind: TargetKind) -> Result<Self> {
        Self::new(kind, -1.0, 1.0, DEFAULT_SAMPLES)
    }

    pub fn with_exclusion(mut self, delta: f64) -> Self {
        self.exclusion = delta.max(0.0);
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            TargetKind::SignStep => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            TargetKind::AbsKink => (x - 0.5).abs(),
            TargetKind::SqrtKink => (x - 0.5).abs().sqrt(),
            TargetKind::RationalBump => x / (10.0 * (x - 0.5).abs() + 1.0),
            TargetKind::ClippedSine => (x + x * x).sin().max(0.5) - x / 20.0,
            TargetKind::Tabulated { xs, ys } => {
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                ys[i - 1] + t * (ys[i] - ys[i - 1])
            }
            TargetKind::Custom { f, .. } => f(x),
        }
    }

    fn is_tabulated(&self) -> bool {
        matches!(self.kind, TargetKind::Tabulated { .. })
    }

    /// Uniform grid of `samples` points (or `samples·refine` points).
    pub fn grid_with(&self, refine: usize) -> Vec<f64> {
        let m = self.samples * refine.max(1);
        let h = (self.hi - self.lo) / (m - 1) as f64;
        (0..m).map(|i| if i + 1 == m { self.hi } else { self.lo + h * i as f64 }).collect()
    }

    pub fn grid(&self) -> Vec<f64> {
        self.grid_with(1)
    }

    /// Whether `x` counts toward fitting and `max_error`.
    pub fn in_fit(&self, x: f64) -> bool {
        !(matches!(self.kind, TargetKind::SignStep) && x.abs() <= self.exclusion)
    }

    fn to_unit(&self, x: f64) -> f64 {
        ((2.0 * x - self.lo - self.hi) / (self.hi - self.lo)).clamp(-1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fitter {
    LeastSquares,
    Chebyshev,
    Rational,
}

impl Fitter {
    pub fn name(self) -> &'static str {
        match self {
            Fitter::LeastSquares => "poly",
            Fitter::Chebyshev => "chebyshev",
            Fitter::Rational => "rational",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub fitter: Fitter,
    pub lo: f64,
    pub hi: f64,
    /// Numerator in Chebyshev polynomials of the mapped variable.
    pub p_cheb: Vec<f64>,
    /// Denominator likewise; the `T₀` coefficient is 1.
    pub q_cheb: Vec<f64>,
    /// Sup error on the fit grid (excluding any jump window).
    pub max_error: f64,
    /// Sup error on the full grid.
    pub full_error: f64,
    pub iterations: usize,
}

impl FitResult {
    fn unit(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.unit(x);
        poly::clenshaw(&self.p_cheb, t) / poly::clenshaw(&self.q_cheb, t)
    }

    pub fn num_degree(&self) -> usize {
        self.p_cheb.len() - 1
    }

    pub fn den_degree(&self) -> usize {
        self.q_cheb.len() - 1
    }

    fn monomial(&self, cheb: &[f64]) -> Vec<f64> {
        let c1 = 2.0 / (self.hi - self.lo);
        let c0 = -(self.lo + self.hi) / (self.hi - self.lo);
        poly::compose_affine(&poly::chebyshev_to_monomial(cheb), c0, c1)
    }

    /// Numerator coefficients in powers of `x`.
    pub fn numerator(&self) -> Vec<f64> {
        self.monomial(&self.p_cheb)
    }

    /// Denominator coefficients in powers of `x`.
    pub fn denominator(&self) -> Vec<f64> {
        self.monomial(&self.q_cheb)
    }

    /// Reads the fit variable as the Laplacian eigenvalue `λ` and builds the
    /// matching `rationalnet` operator in `Ãₙ = I − L̃`.
    pub fn to_operator(&self, name: &str, kind: NormKind) -> Result<OperatorSpec> {
        let p = poly::compose_affine(&self.numerator(), 1.0, -1.0);
        let q = poly::compose_affine(&self.denominator(), 1.0, -1.0);
        make_rational(RationalKind::RationalNet { p, q })?
            .with_name(name)
            .with_norm(kind)
    }

    /// Sup error against `target` on a grid refined `refine` times.
    pub fn error_on(&self, target: &TargetResponse, refine: usize) -> f64 {
        target
            .grid_with(refine)
            .into_iter()
            .filter(|&x| target.in_fit(x))
            .map(|x| (self.eval(x) - target.eval(x)).abs())
            .fold(0.0, f64::max)
    }
}

fn cheb_matrix(ts: &[f64], k: usize) -> DMatrix<f64> {
    let mut v = DMatrix::zeros(ts.len(), k + 1);
    for (i, &t) in ts.iter().enumerate() {
        v[(i, 0)] = 1.0;
        if k >= 1 {
            v[(i, 1)] = t;
        }
        for j in 2..=k {
            v[(i, j)] = 2.0 * t * v[(i, j - 1)] - v[(i, j - 2)];
        }
    }
    v
}

fn lstsq(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let svd = a.svd(true, true);
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::FitFailure(format!("least-squares solve failed: {e}")))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("least-squares solve produced non-finite coefficients".into()));
    }
    Ok(sol)
}

struct Grid {
    xs: Vec<f64>,
    ts: Vec<f64>,
    fs: Vec<f64>,
    fit: Vec<bool>,
}

impl Grid {
    fn new(target: &TargetResponse) -> Self {
        let xs = target.grid();
        let ts = xs.iter().map(|&x| target.to_unit(x)).collect();
        let fs = xs.iter().map(|&x| target.eval(x)).collect();
        let fit = xs.iter().map(|&x| target.in_fit(x)).collect();
        Self { xs, ts, fs, fit }
    }

    fn fit_count(&self) -> usize {
        self.fit.iter().filter(|&&b| b).count()
    }

    fn errors(&self, p: &[f64], q: &[f64]) -> (f64, f64) {
        let (mut fit, mut full) = (0.0f64, 0.0f64);
        for i in 0..self.xs.len() {
            let e = (poly::clenshaw(p, self.ts[i]) / poly::clenshaw(q, self.ts[i]) - self.fs[i]).abs();
            full = full.max(e);
            if self.fit[i] {
                fit = fit.max(e);
            }
        }
        (fit, full)
    }
}

fn check_degree(grid: &Grid, unknowns: usize) -> Result<()> {
    let m = grid.fit_count();
    if unknowns > m {
        return Err(Error::IllPosed(format!(
            "{unknowns} coefficients from {m} grid points"
        )));
    }
    Ok(())
}

fn finish(fitter: Fitter, target: &TargetResponse, grid: &Grid, p: Vec<f64>, q: Vec<f64>, iterations: usize) -> FitResult {
    let (max_error, full_error) = grid.errors(&p, &q);
    FitResult {
        fitter,
        lo: target.lo,
        hi: target.hi,
        p_cheb: p,
        q_cheb: q,
        max_error,
        full_error,
        iterations,
    }
}

fn ls_poly(grid: &Grid, degree: usize) -> Result<Vec<f64>> {
    let rows: Vec<usize> = (0..grid.xs.len()).filter(|&i| grid.fit[i]).collect();
    let ts: Vec<f64> = rows.iter().map(|&i| grid.ts[i]).collect();
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| grid.fs[i]));
    Ok(lstsq(cheb_matrix(&ts, degree), b)?.iter().copied().collect())
}

/// Least-squares polynomial of degree `degree` on the fit grid.
pub fn poly_fit(target: &TargetResponse, degree: usize) -> Result<FitResult> {
    let grid = Grid::new(target);
    if degree >= target.samples {
        return Err(Error::IllPosed(format!("degree {degree} ≥ grid size {}", target.samples)));
    }
    check_degree(&grid, degree + 1)?;
    let p = ls_poly(&grid, degree)?;
    Ok(finish(Fitter::LeastSquares, target, &grid, p, vec![1.0], 0))
}

/// Chebyshev interpolant at the `degree + 1` first-kind nodes; tabulated
/// targets are projected by least squares on the grid instead.
pub fn chebyshev_fit(target: &TargetResponse, degree: usize) -> Result<FitResult> {
    if degree >= target.samples {
        return Err(Error::IllPosed(format!("degree {degree} ≥ grid size {}", target.samples)));
    }
    let grid = Grid::new(target);
    if target.is_tabulated() {
        check_degree(&grid, degree + 1)?;
        let p = ls_poly(&grid, degree)?;
        return Ok(finish(Fitter::Chebyshev, target, &grid, p, vec![1.0], 0));
    }
    let n = degree + 1;
    let nodes: Vec<f64> = (0..n)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
        .collect();
    let values: Vec<f64> = nodes
        .iter()
        .map(|&t| target.eval(0.5 * (target.lo + target.hi) + 0.5 * (target.hi - target.lo) * t))
        .collect();
    let p: Vec<f64> = (0..n)
        .map(|j| {
            let s: f64 = nodes
                .iter()
                .zip(&values)
                .map(|(&t, &f)| f * (j as f64 * t.acos()).cos())
                .sum();
            s * if j == 0 { 1.0 } else { 2.0 } / n as f64
        })
        .collect();
    Ok(finish(Fitter::Chebyshev, target, &grid, p, vec![1.0], 0))
}

/// Weighted linearized least squares for `P − f·Q ≈ 0` with the `T₀`
/// coefficient of `Q` pinned to 1.
fn linearized_step(grid: &Grid, vp: &DMatrix<f64>, vq: &DMatrix<f64>, w: &[f64], qw: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (m1, n1) = (vp.ncols(), vq.ncols());
    let rows: Vec<usize> = (0..grid.xs.len()).filter(|&i| grid.fit[i]).collect();
    let mut a = DMatrix::zeros(rows.len(), m1 + n1 - 1);
    let mut b = DVector::zeros(rows.len());
    for (r, &i) in rows.iter().enumerate() {
        let s = (w[i] / (qw[i] * qw[i])).sqrt();
        for j in 0..m1 {
            a[(r, j)] = s * vp[(i, j)];
        }
        for j in 1..n1 {
            a[(r, m1 + j - 1)] = -s * grid.fs[i] * vq[(i, j)];
        }
        b[r] = s * grid.fs[i];
    }
    let c = lstsq(a, b)?;
    let p = c.rows(0, m1).iter().copied().collect();
    let mut q = vec![1.0];
    q.extend(c.rows(m1, n1 - 1).iter());
    Ok((p, q))
}

/// Denominator bounded away from zero (and of one sign) on a grid ten times
/// finer than the fit grid.
fn pole_free(target: &TargetResponse, q: &[f64]) -> bool {
    let vals: Vec<f64> = target
        .grid_with(10)
        .into_iter()
        .map(|x| poly::clenshaw(q, target.to_unit(x)))
        .collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sign = vals[0].signum();
    scale > 0.0 && vals.iter().all(|v| v * sign > 1e-10 * scale)
}

fn pad(mut c: Vec<f64>, len: usize) -> Vec<f64> {
    c.resize(len.max(c.len()), 0.0);
    c
}

/// Linearized minimax rational fit of type `(m, n)`.
///
/// Starting from the least-squares polynomial, each round solves a weighted
/// linear least-squares problem for `P − f·Q` with weights `w/|Q|²`, where
/// `w` is a Lawson weight sharpened by the previous error and `Q` is damped
/// toward the previous denominator. Candidates whose denominator nears zero
/// on the domain are rejected and the weight step halved. The best iterate
/// is returned.
pub fn rational_fit(target: &TargetResponse, m: usize, n: usize) -> Result<FitResult> {
    rational_fit_inner(target, m, n, None)
}

/// As [`rational_fit`], also trying `init` (padded to type `(m, n)`) as the
/// starting point and keeping the better of the two runs.
pub fn rational_fit_from(target: &TargetResponse, m: usize, n: usize, init: &FitResult) -> Result<FitResult> {
    let cold = rational_fit_inner(target, m, n, None);
    if init.num_degree() > m || init.den_degree() > n {
        return cold;
    }
    let warm = rational_fit_inner(target, m, n, Some(init));
    match (cold, warm) {
        (Ok(c), Ok(w)) => Ok(if w.max_error < c.max_error { w } else { c }),
        (Ok(c), Err(_)) => Ok(c),
        (Err(_), Ok(w)) => Ok(w),
        (Err(e), Err(_)) => Err(e),
    }
}

fn rational_fit_inner(target: &TargetResponse, m: usize, n: usize, init: Option<&FitResult>) -> Result<FitResult> {
    let grid = Grid::new(target);
    check_degree(&grid, m + n + 1)?;
    let vp = cheb_matrix(&grid.ts, m);
    let vq = cheb_matrix(&grid.ts, n);
    let total = grid.xs.len();

    let (mut p, mut q) = match init {
        Some(f) => (pad(f.p_cheb.clone(), m + 1), pad(f.q_cheb.clone(), n + 1)),
        None => (ls_poly(&grid, m)?, pad(vec![1.0], n + 1)),
    };
    if !pole_free(target, &q) {
        return Err(Error::FitFailure("starting denominator vanishes on the domain".into()));
    }
    let eval = |p: &[f64], q: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let qv: Vec<f64> = grid.ts.iter().map(|&t| poly::clenshaw(q, t)).collect();
        let e = (0..total)
            .map(|i| (poly::clenshaw(p, grid.ts[i]) / qv[i] - grid.fs[i]).abs())
            .collect();
        (qv, e)
    };
    let fit_max = |e: &[f64]| (0..total).filter(|&i| grid.fit[i]).map(|i| e[i]).fold(0.0, f64::max);

    let (mut q_vals, mut err) = eval(&p, &q);
    let mut q_damped = q_vals.clone();
    let mut best = (fit_max(&err), p.clone(), q.clone());
    let scale = grid.fs.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let count = grid.fit_count() as f64;
    let mut w: Vec<f64> = grid.fit.iter().map(|&b| if b { 1.0 / count } else { 0.0 }).collect();
    let mut step = 1.0;
    let mut prev = best.0;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS && best.0 > 1e-15 * scale && step > 1e-6 {
        iterations += 1;
        let mut wn: Vec<f64> = (0..total).map(|i| w[i] * err[i].powf(step)).collect();
        let sum: f64 = (0..total).filter(|&i| grid.fit[i]).map(|i| wn[i]).sum();
        if !(sum > 0.0) {
            break;
        }
        for v in &mut wn {
            *v = (*v / sum).max(1e-300);
        }
        let (pn, qn) = linearized_step(&grid, &vp, &vq, &wn, &q_damped)?;
        if !pole_free(target, &qn) {
            step *= 0.5;
            continue;
        }
        let (qn_vals, en) = eval(&pn, &qn);
        let e_max = fit_max(&en);
        q_damped = q_vals.iter().zip(&qn_vals).map(|(a, b)| (a * b).abs().sqrt()).collect();
        w = wn;
        err = en;
        q_vals = qn_vals;
        p = pn;
        q = qn;
        if e_max < best.0 {
            best = (e_max, p.clone(), q.clone());
        }
        if (prev - e_max).abs() < CONVERGENCE_TOL {
            break;
        }
        prev = e_max;
    }
    let (_, p, q) = best;
    Ok(finish(Fitter::Rational, target, &grid, p, q, iterations))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub budget: usize,
    pub poly_error: Option<f64>,
    pub rational_error: Option<f64>,
    /// Fit failure messages for this budget, if any.
    pub note: Option<String>,
}

/// Sup errors per total budget `K`: polynomial degree `K` against rational
/// type `(⌈K/2⌉, ⌈K/2⌉)`. Each column reports the best fit found within the
/// budget (a larger budget can always reproduce a smaller one).
pub fn convergence_curve(target: &TargetResponse, budgets: &[usize]) -> Result<Vec<CurveRow>> {
    if budgets.is_empty() {
        return Err(Error::InvalidParameter("no budgets given".into()));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("budgets must be strictly ascending".into()));
    }
    let poly: Vec<Result<FitResult>> = budgets.par_iter().map(|&k| poly_fit(target, k)).collect();

    let mut rows = Vec::with_capacity(budgets.len());
    let mut warm: Option<FitResult> = None;
    let (mut best_poly, mut best_rat) = (f64::INFINITY, f64::INFINITY);
    for (&k, pf) in budgets.iter().zip(poly) {
        let half = k.div_ceil(2);
        let rf = match &warm {
            Some(prev) => rational_fit_from(target, half, half, prev),
            None => rational_fit(target, half, half),
        };
        let mut notes = Vec::new();
        let poly_error = match pf {
            Ok(f) => {
                best_poly = best_poly.min(f.max_error);
                Some(best_poly)
            }
            Err(e) => {
                notes.push(format!("poly: {e}"));
                best_poly.is_finite().then_some(best_poly)
            }
        };
        let rational_error = match rf {
            Ok(f) => {
                if f.max_error <= best_rat {
                    best_rat = f.max_error;
                    warm = Some(f);
                }
                Some(best_rat)
            }
            Err(e) => {
                notes.push(format!("rational: {e}"));
                best_rat.is_finite().then_some(best_rat)
            }
        };
        rows.push(CurveRow {
            budget: k,
            poly_error,
            rational_error,
            note: (!notes.is_empty()).then(|| notes.join("; ")),
        });
    }
    Ok(rows)
}

/// `K,poly_error,rational_error` with empty cells for failed fits.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let cell = |v: Option<f64>| v.map(|e| fmt_sig(e, 12)).unwrap_or_default();
    let mut out = String::from("K,poly_error,rational_error\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.budget, cell(r.poly_error), cell(r.rational_error)));
    }
    out
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fitted decay rates: `log(poly_error)` against `log K` and
/// `log(rational_error)` against `√K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySlopes {
    pub poly_vs_log_k: f64,
    pub rational_vs_sqrt_k: f64,
}

pub fn decay_slopes(rows: &[CurveRow]) -> Option<DecaySlopes> {
    let usable: Vec<&CurveRow> = rows
        .iter()
        .filter(|r| r.budget > 0 && r.poly_error.is_some_and(|e| e > 0.0) && r.rational_error.is_some_and(|e| e > 0.0))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let k: Vec<f64> = usable.iter().map(|r| r.budget as f64).collect();
    let log_k: Vec<f64> = k.iter().map(|v| v.ln()).collect();
    let sqrt_k: Vec<f64> = k.iter().map(|v| v.sqrt()).collect();
    let lp: Vec<f64> = usable.iter().map(|r| r.poly_error.unwrap().ln()).collect();
    let lr: Vec<f64> = usable.iter().map(|r| r.rational_error.unwrap().ln()).collect();
    Some(DecaySlopes {
        poly_vs_log_k: slope(&log_k, &lp),
        rational_vs_sqrt_k: slope(&sqrt_k, &lr),
    })
}
