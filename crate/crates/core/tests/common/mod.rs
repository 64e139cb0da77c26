#![allow(dead_code)]

use nalgebra::DMatrix;

/// Cyclic Jacobi rotations; eigenvalues ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `Mᵏx` by repeated dense products.
pub fn dense_power(m: &DMatrix<f64>, k: usize, x: &DMatrix<f64>) -> DMatrix<f64> {
    (0..k).fold(x.clone(), |z, _| m * z)
}

/// Stationary distribution of a row-stochastic matrix by power iteration.
pub fn stationary(p: &DMatrix<f64>) -> Vec<f64> {
    let n = p.nrows();
    let lazy = (p + DMatrix::identity(n, n)) * 0.5;
    let mut pi = DMatrix::from_element(1, n, 1.0 / n as f64);
    for _ in 0..20_000 {
        pi = &pi * &lazy;
    }
    pi.iter().copied().collect()
}
