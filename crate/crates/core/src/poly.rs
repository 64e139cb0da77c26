//! Dense univariate polynomials as coefficient slices, lowest power first.

use nalgebra::DMatrix;

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|c| c * s).collect()
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn pow(a: &[f64], k: usize) -> Vec<f64> {
    (0..k).fold(vec![1.0], |acc, _| mul(&acc, a))
}

/// Coefficients of `y ↦ p(c0 + c1·y)`.
pub fn compose_affine(p: &[f64], c0: f64, c1: f64) -> Vec<f64> {
    let lin = [c0, c1];
    p.iter()
        .rev()
        .fold(Vec::new(), |acc, &c| add(&mul(&acc, &lin), &[c]))
}

/// Drops trailing coefficients with magnitude at most `tol` (keeps at least one).
pub fn trim(mut p: Vec<f64>, tol: f64) -> Vec<f64> {
    while p.len() > 1 && p.last().is_some_and(|c| c.abs() <= tol) {
        p.pop();
    }
    if p.is_empty() {
        p.push(0.0);
    }
    p
}

pub fn degree(p: &[f64]) -> usize {
    p.iter().rposition(|&c| c != 0.0).unwrap_or(0)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monomial coefficients of the Chebyshev polynomial `T_k`.
pub fn chebyshev_t(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..k {
        let next = add(&mul(&[0.0, 2.0], &cur), &scale(&prev, -1.0));
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Monomial form of `Σ θ_k T_k(x)`.
pub fn chebyshev_to_monomial(theta: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .enumerate()
        .fold(vec![0.0], |acc, (k, &t)| add(&acc, &scale(&chebyshev_t(k), t)))
}

/// Clenshaw evaluation of `Σ c_k T_k(t)`.
pub fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + t * b1 - b2
}

/// Real roots of `p` lying in `[lo, hi]`, found from the companion matrix
/// eigenvalues and then confirmed by a sign scan on a fine grid.
pub fn real_roots_in(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let p = trim(p.to_vec(), 0.0);
    let deg = degree(&p);
    if deg == 0 {
        return if p[0] == 0.0 { vec![lo] } else { Vec::new() };
    }
    let lead = p[deg];
    let mut companion = DMatrix::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -p[i] / lead;
    }
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .filter(|&r| r >= lo - 1e-12 && r <= hi + 1e-12)
        .collect();

    // Catch anything the eigenvalue route misclassified (clustered roots).
    let steps = 4096;
    let h = (hi - lo) / steps as f64;
    let mut prev = eval(&p, lo);
    for s in 1..=steps {
        let x = lo + h * s as f64;
        let cur = eval(&p, x);
        let crossed = prev == 0.0 || prev.signum() != cur.signum();
        if crossed && !roots.iter().any(|&r| (r - x).abs() <= 2.0 * h) {
            roots.push(x - 0.5 * h);
        }
        prev = cur;
    }
    roots.sort_by(f64::total_cmp);
    roots
}
