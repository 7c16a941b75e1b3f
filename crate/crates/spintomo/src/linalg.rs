//! Internal dense linear-algebra helpers: real matrix exponential
//! (scaling-and-squaring with Padé core) and Hermitian functional calculus.

use nalgebra::linalg::{SymmetricEigen, LU};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMat, RMat};

/// Padé(13) coefficients for the matrix exponential (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &RMat) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|x| x.abs()).sum();
        best = best.max(s);
    }
    best
}

/// `exp(A)` for a real square matrix by scaling-and-squaring with a
/// Padé(13) core.
pub fn expm(a: &RMat) -> Result<RMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidArgument("expm needs a square matrix".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite entries in expm input".into()));
    }
    let theta13 = 5.371_920_351_148_152;
    let norm = one_norm(a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a1 = a.scale(0.5_f64.powi(s as i32));
    let id = RMat::identity(n, n);
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &PADE13;
    let u_inner = &a6.scale(b[13]) + &a4.scale(b[11]) + &a2.scale(b[9]);
    let u = &a1
        * (&a6 * u_inner + &a6.scale(b[7]) + &a4.scale(b[5]) + &a2.scale(b[3]) + &id.scale(b[1]));
    let v_inner = &a6.scale(b[12]) + &a4.scale(b[10]) + &a2.scale(b[8]);
    let v = &a6 * v_inner + &a6.scale(b[6]) + &a4.scale(b[4]) + &a2.scale(b[2]) + &id.scale(b[0]);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let lu = LU::new(lhs);
    let mut r = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Padé denominator in expm".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite entries in expm result".into()));
    }
    Ok(r)
}

/// Integer matrix power by repeated squaring.
pub fn matrix_power(a: &RMat, mut k: usize) -> RMat {
    let n = a.nrows();
    let mut result = RMat::identity(n, n);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Eigendecomposition of a Hermitian matrix (ascending eigenvalues).
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let se = SymmetricEigen::new(h.clone());
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let n = h.nrows();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Apply a scalar function to a Hermitian matrix through its spectrum.
pub fn herm_func(h: &CMat, f: impl Fn(f64) -> Complex64) -> CMat {
    let (vals, vecs) = eigh(h);
    let n = h.nrows();
    let mut d = CMat::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = f(vals[k]);
    }
    &vecs * d * vecs.adjoint()
}

/// `exp(factor * H)` for Hermitian `H`.
pub fn herm_exp(h: &CMat, factor: Complex64) -> CMat {
    herm_func(h, |x| (factor.scale(x)).exp())
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eig(h: &CMat) -> f64 {
    eigh(h).0[0]
}
