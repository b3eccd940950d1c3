//! Eigenvalues of dense symmetric matrices: Householder reduction to
//! tridiagonal form followed by implicit QL with Wilkinson-style shifts.
//! Generic over [`Real`] so the same code runs in f64 and double-double.

use super::real::Real;
use crate::error::{Error, Result};

/// Reduce the symmetric matrix held in the lower triangle of `a` (row-major,
/// `n*n`) to tridiagonal form. Returns (diagonal, subdiagonal) where
/// `sub[i]` couples rows `i` and `i+1`. `a` is overwritten.
fn tridiagonalize<R: Real>(a: &mut [R], n: usize) -> (Vec<R>, Vec<R>) {
    let zero = R::zero();
    let mut d = vec![zero; n];
    let mut e = vec![zero; n];
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = zero;
        if l > 0 {
            let mut scale = zero;
            for k in 0..i {
                scale += a[idx(i, k)].abs();
            }
            if scale == zero {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..i {
                    let v = a[idx(i, k)] / scale;
                    a[idx(i, k)] = v;
                    h += v * v;
                }
                let f = a[idx(i, l)];
                let g = if f >= zero { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = zero;
                for j in 0..i {
                    let mut g = zero;
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in (j + 1)..i {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..i {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let upd = f * e[k] + g * a[idx(i, k)];
                        a[idx(j, k)] -= upd;
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    // shift so that sub[i] couples i and i+1
    let mut sub = vec![zero; n];
    if n > 1 {
        sub[..n - 1].copy_from_slice(&e[1..n]);
    }
    (d, sub)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues overwrite `d`.
fn tridiagonal_ql<R: Real>(d: &mut [R], e: &mut [R]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let zero = R::zero();
    let one = R::one();
    let two = R::from_f64(2.0);
    let eps = R::from_f64(2.0 * R::UNIT_ROUNDOFF);
    e[n - 1] = zero;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(format!(
                    "tridiagonal QL exceeded 60 sweeps at index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(one);
            let signed_r = if g >= zero { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let mut s = one;
            let mut c = one;
            let mut p = zero;
            let mut deflated_early = false;
            let mut i = m as isize - 1;
            while i >= l as isize {
                let iu = i as usize;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == zero {
                    d[iu + 1] -= p;
                    e[m] = zero;
                    deflated_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + two * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                i -= 1;
            }
            if deflated_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
        }
    }
    Ok(())
}

/// All eigenvalues of the symmetric matrix whose lower triangle is stored in
/// `dense` (row-major, `n*n`), in ascending order.
pub fn symmetric_eigenvalues<R: Real>(mut dense: Vec<R>, n: usize) -> Result<Vec<R>> {
    assert_eq!(dense.len(), n * n, "dense storage must hold n*n entries");
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(&mut dense, n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}
