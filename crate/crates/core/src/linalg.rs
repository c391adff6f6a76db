//! Small dense linear algebra: Hermitian eigenvalues and nested row
//! orthonormalization.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// sorted descending.
///
/// `a` is row-major `dim × dim` and is overwritten. Only the Hermitian part is
/// used: the strictly lower triangle is ignored and rebuilt from the upper one.
pub fn hermitian_eigenvalues<T: Real>(a: &mut [Complex<T>], dim: usize) -> Result<Vec<T>> {
    if a.len() != dim * dim {
        return Err(Error::Numeric(format!(
            "matrix buffer of length {} is not {dim}×{dim}",
            a.len()
        )));
    }
    for i in 0..dim {
        a[i * dim + i] = Complex::new(a[i * dim + i].re, T::zero());
        for j in (i + 1)..dim {
            a[j * dim + i] = a[i * dim + j].conj();
        }
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }

    let scale: T = a.iter().map(|z| z.norm_sqr()).sum::<T>();
    let threshold = scale * T::epsilon() * T::epsilon();
    let mut converged = dim < 2;
    for _sweep in 0..100 {
        let off: T = (0..dim)
            .flat_map(|i| ((i + 1)..dim).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j].norm_sqr())
            .sum();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate(a, dim, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(
            "Jacobi eigenvalue iteration did not converge".into(),
        ));
    }
    let mut values: Vec<T> = (0..dim).map(|i| a[i * dim + i].re).collect();
    values.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// One Jacobi rotation annihilating `a[p][q]`.
fn rotate<T: Real>(a: &mut [Complex<T>], dim: usize, p: usize, q: usize) {
    let apq = a[p * dim + q];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    let one = T::one();
    // Phase that makes the (p, q) entry real, then the real symmetric rotation.
    let phase = apq / r;
    let theta = (aqq - app) / (r + r);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let t = one / (theta.abs() + (theta * theta + one).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let c = one / (t * t + one).sqrt();
    let s = t * c;
    // U = [[c, s], [−s·conj(phase), c·conj(phase)]] acting on columns p, q.
    let u_pp = Complex::new(c, T::zero());
    let u_pq = Complex::new(s, T::zero());
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;
    for k in 0..dim {
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        a[k * dim + p] = akp * u_pp + akq * u_qp;
        a[k * dim + q] = akp * u_pq + akq * u_qq;
    }
    for k in 0..dim {
        let apk = a[p * dim + k];
        let aqk = a[q * dim + k];
        a[p * dim + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[q * dim + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[p * dim + q] = Complex::new(T::zero(), T::zero());
    a[q * dim + p] = Complex::new(T::zero(), T::zero());
    a[p * dim + p].im = T::zero();
    a[q * dim + q].im = T::zero();
}

/// Eigenvalues of a real symmetric matrix, descending.
pub fn symmetric_eigenvalues<T: Real>(a: &[T], dim: usize) -> Result<Vec<T>> {
    let mut buf: Vec<Complex<T>> = a.iter().map(|&x| Complex::new(x, T::zero())).collect();
    hermitian_eigenvalues(&mut buf, dim)
}

/// Orthonormalizes rows in order (modified Gram–Schmidt with one
/// reorthogonalization pass), so the first `k` output rows span the same space
/// as the first `k` input rows for every `k`.
pub fn orthonormalize_rows<T: Real>(rows: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(rows.len());
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        let norm0 = dot(&v, &v).sqrt();
        for _pass in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > T::lit(1e3) * T::epsilon() * norm0) || !norm.is_finite() {
            return Err(Error::Numeric(format!(
                "row {idx} is linearly dependent on earlier rows"
            )));
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        basis.push(v);
    }
    Ok(basis)
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Condition number λ_max / λ_min of the Gram matrix R Rᵀ of the given rows.
pub fn gram_condition<T: Real>(rows: &[Vec<T>]) -> Result<T> {
    let m = rows.len();
    if m == 0 {
        return Ok(T::one());
    }
    let mut gram = vec![T::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let g = dot(&rows[i], &rows[j]);
            gram[i * m + j] = g;
            gram[j * m + i] = g;
        }
    }
    let ev = symmetric_eigenvalues(&gram, m)?;
    let max = ev[0];
    let min = ev[m - 1];
    if min <= T::zero() {
        return Ok(T::infinity());
    }
    Ok(max / min)
}
