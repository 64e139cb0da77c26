//! Linear solvers for shifted graph operators: dense LU below the cap,
//! conjugate gradients or BiCGSTAB above it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const ITERATIVE_TOL: f64 = 1e-10;

/// Solves `A Z = B` by partial-pivot LU. A pivot ratio below `1e-13` is
/// reported as singular together with the pivot-ratio condition estimate.
pub fn dense_solve(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let lu = a.lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(min > 1e-13 * max) {
        return Err(Error::SingularOperator(format!(
            "LU pivot ratio condition estimate {cond:.3e}"
        )));
    }
    lu.solve(b).ok_or_else(|| {
        Error::SingularOperator(format!("LU solve failed, condition estimate {cond:.3e}"))
    })
}

/// Column-by-column iterative solve with `apply(v) = A v`.
///
/// `symmetric` selects conjugate gradients (the operator must be SPD);
/// otherwise BiCGSTAB is used. Stops when `‖r‖₂ ≤ tol·max(1, ‖b‖₂)`.
pub fn iterative_solve(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    b: &DMatrix<f64>,
    symmetric: bool,
    tol: f64,
    max_iter: usize,
) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(b.nrows(), b.ncols());
    for j in 0..b.ncols() {
        let rhs = b.column(j).into_owned();
        let x = if symmetric {
            conjugate_gradient(&apply, &rhs, tol, max_iter)?
        } else {
            bicgstab(&apply, &rhs, tol, max_iter)?
        };
        out.set_column(j, &x);
    }
    Ok(out)
}

fn conjugate_gradient(
    apply: &impl Fn(&DVector<f64>) -> DVector<f64>,
    b: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let target = tol * b.norm().max(1.0);
    let mut x = DVector::zeros(b.len());
    let mut r = b.clone();
    if r.norm() <= target {
        return Ok(x);
    }
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for _ in 0..max_iter {
        let ap = apply(&p);
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::SingularOperator(format!(
                "operator is not positive definite (pᵀAp = {pap:.3e})"
            )));
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_new = r.dot(&r);
        if rr_new.sqrt() <= target {
            return Ok(x);
        }
        p = &r + (rr_new / rr) * &p;
        rr = rr_new;
    }
    Err(Error::Solver {
        iterations: max_iter,
        residual: rr.sqrt(),
    })
}

fn bicgstab(
    apply: &impl Fn(&DVector<f64>) -> DVector<f64>,
    b: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let target = tol * b.norm().max(1.0);
    let mut x = DVector::zeros(b.len());
    let mut r = b.clone();
    if r.norm() <= target {
        return Ok(x);
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = DVector::zeros(b.len());
    let mut p = DVector::zeros(b.len());
    for _ in 0..max_iter {
        let rho_new = r_hat.dot(&r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        p = &r + beta * (&p - omega * &v);
        v = apply(&p);
        alpha = rho_new / r_hat.dot(&v);
        let s = &r - alpha * &v;
        if s.norm() <= target {
            x.axpy(alpha, &p, 1.0);
            return Ok(x);
        }
        let t = apply(&s);
        let tt = t.dot(&t);
        omega = if tt > 0.0 { t.dot(&s) / tt } else { 0.0 };
        x.axpy(alpha, &p, 1.0);
        x.axpy(omega, &s, 1.0);
        r = &s - omega * &t;
        if r.norm() <= target {
            return Ok(x);
        }
        if omega == 0.0 {
            break;
        }
        rho = rho_new;
    }
    Err(Error::Solver {
        iterations: max_iter,
        residual: r.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0])
    }

    #[test]
    fn solvers_agree() {
        let a = spd();
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 1.0, 3.0, -1.0]);
        let direct = dense_solve(a.clone(), &b).unwrap();
        let cg = iterative_solve(|v| &a * v, &b, true, 1e-12, 30).unwrap();
        let bi = iterative_solve(|v| &a * v, &b, false, 1e-12, 30).unwrap();
        assert!((&direct - cg).abs().max() < 1e-10);
        assert!((&direct - bi).abs().max() < 1e-10);
    }

    #[test]
    fn nonsymmetric_bicgstab() {
        let a = DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 0.0, 0.2, 2.0, 0.7, 0.0, 0.1, 1.5]);
        let b = DMatrix::from_row_slice(3, 1, &[1.0, -1.0, 2.0]);
        let z = iterative_solve(|v| &a * v, &b, false, 1e-12, 50).unwrap();
        assert!((&a * z - b).abs().max() < 1e-10);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        match dense_solve(a, &DMatrix::from_element(2, 1, 1.0)) {
            Err(Error::SingularOperator(msg)) => assert!(msg.contains("condition")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
