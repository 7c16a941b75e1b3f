//! Angular-momentum primitives: spin spaces, operator containers, coupling
//! coefficients, and the orthonormal Hermitian operator basis.
//!
//! Conventions: kets within a manifold are ordered `m = F, F-1, ..., -F`;
//! in a combined space the lower-`F` block comes first. Coupling
//! coefficients follow Condon-Shortley phases.

use nalgebra::DVector;
use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::{CMat, RVec};

/// Tolerance for treating a floating-point value as a half-integer.
const HALF_INT_TOL: f64 = 1e-9;

/// Convert a half-integer `x` to its doubled integer form, if it is one.
fn doubled(x: f64) -> Option<i64> {
    let d = (2.0 * x).round();
    if (2.0 * x - d).abs() < HALF_INT_TOL {
        Some(d as i64)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// SpinSpace
// ---------------------------------------------------------------------------

/// A direct sum of hyperfine spin manifolds, each appearing once.
///
/// Owns the basis labeling: the list of `(F, m)` kets in a fixed,
/// serialization-stable order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSpace {
    manifolds: Vec<f64>,
    labels: Vec<(f64, f64)>,
}

impl SpinSpace {
    /// Space of a single manifold `F`.
    pub fn single(f: f64) -> Result<Self> {
        Self::combined(&[f])
    }

    /// Direct sum of the given manifolds, ordered by increasing `F`.
    pub fn combined(fs: &[f64]) -> Result<Self> {
        if fs.is_empty() {
            return Err(Error::InvalidArgument("empty manifold set".into()));
        }
        let mut manifolds = Vec::with_capacity(fs.len());
        for &f in fs {
            let d = doubled(f)
                .ok_or_else(|| Error::InvalidArgument(format!("F = {f} is not a half-integer")))?;
            if d < 0 {
                return Err(Error::InvalidArgument(format!("F = {f} is negative")));
            }
            manifolds.push(d);
        }
        manifolds.sort_unstable();
        manifolds.dedup();
        if manifolds.len() != fs.len() {
            return Err(Error::InvalidArgument("duplicate manifolds".into()));
        }
        let mut labels = Vec::new();
        for &df in &manifolds {
            let mut dm = df;
            while dm >= -df {
                labels.push((df as f64 / 2.0, dm as f64 / 2.0));
                dm -= 2;
            }
        }
        Ok(SpinSpace {
            manifolds: manifolds.iter().map(|&d| d as f64 / 2.0).collect(),
            labels,
        })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn manifolds(&self) -> &[f64] {
        &self.manifolds
    }

    /// Ordered `(F, m)` labels of the basis kets.
    pub fn labels(&self) -> &[(f64, f64)] {
        &self.labels
    }

    pub fn contains_manifold(&self, f: f64) -> bool {
        self.manifolds.iter().any(|&g| (g - f).abs() < HALF_INT_TOL)
    }

    /// Basis index of `|F, m>`, if present.
    pub fn index_of(&self, f: f64, m: f64) -> Option<usize> {
        self.labels
            .iter()
            .position(|&(g, n)| (g - f).abs() < HALF_INT_TOL && (n - m).abs() < HALF_INT_TOL)
    }

    /// Unit ket `|F, m>` as a complex vector.
    pub fn ket(&self, f: f64, m: f64) -> Result<DVector<Complex64>> {
        let i = self
            .index_of(f, m)
            .ok_or_else(|| Error::InvalidArgument(format!("no ket |{f},{m}> in space")))?;
        let mut v = DVector::zeros(self.dimension());
        v[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// MatrixOperator
// ---------------------------------------------------------------------------

/// A dense operator on a [`SpinSpace`], tagged with a Hermiticity flag.
#[derive(Clone, Debug)]
pub struct MatrixOperator {
    values: CMat,
    space: SpinSpace,
    hermitian: bool,
}

impl MatrixOperator {
    /// Wrap a matrix, detecting Hermiticity to `1e-12` relative.
    pub fn new(values: CMat, space: SpinSpace) -> Result<Self> {
        let d = space.dimension();
        if values.nrows() != d || values.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "operator is {}x{} but space has dimension {d}",
                values.nrows(),
                values.ncols()
            )));
        }
        let hermitian = is_hermitian(&values, 1e-12);
        Ok(MatrixOperator {
            values,
            space,
            hermitian,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.values
    }

    pub fn into_matrix(self) -> CMat {
        self.values
    }

    pub fn space(&self) -> &SpinSpace {
        &self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn trace(&self) -> Complex64 {
        self.values.diagonal().sum()
    }
}

/// Max-norm Hermiticity test, relative to the largest element.
pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    let scale = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1e-300);
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst <= tol * scale
}

// ---------------------------------------------------------------------------
// Angular momentum operators
// ---------------------------------------------------------------------------

/// The Cartesian angular-momentum operators of one manifold.
pub struct SpinOperators {
    pub fx: MatrixOperator,
    pub fy: MatrixOperator,
    pub fz: MatrixOperator,
}

/// Build `F_x, F_y, F_z` for spin `F` in the `m = F..-F` basis.
pub fn angular_momentum(f: f64) -> Result<SpinOperators> {
    let df = doubled(f)
        .filter(|&d| d >= 0)
        .ok_or_else(|| Error::InvalidArgument(format!("F = {f} is not a non-negative half-integer")))?;
    let space = SpinSpace::single(f)?;
    let d = space.dimension();
    let mut fp = CMat::zeros(d, d);
    // row k labels m = F - k; F+ |F,m> = sqrt(F(F+1) - m(m+1)) |F,m+1>
    for k in 1..d {
        let m = (df as f64 - 2.0 * k as f64) / 2.0;
        fp[(k - 1, k)] = Complex64::new((f * (f + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let fm = fp.adjoint();
    let fx = (&fp + &fm).scale(0.5);
    let fy = (&fp - &fm) * Complex64::new(0.0, -0.5);
    let mut fz = CMat::zeros(d, d);
    for k in 0..d {
        fz[(k, k)] = Complex64::new((df as f64 - 2.0 * k as f64) / 2.0, 0.0);
    }
    Ok(SpinOperators {
        fx: MatrixOperator::new(fx, space.clone())?,
        fy: MatrixOperator::new(fy, space.clone())?,
        fz: MatrixOperator::new(fz, space)?,
    })
}

// ---------------------------------------------------------------------------
// Coupling coefficients
// ---------------------------------------------------------------------------

const LN_FACT_LEN: usize = 128;

fn ln_fact(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; LN_FACT_LEN];
        for k in 2..LN_FACT_LEN {
            v[k] = v[k - 1] + (k as f64).ln();
        }
        v
    });
    t[n as usize]
}

fn triangle_ok(da: i64, db: i64, dc: i64) -> bool {
    dc >= (da - db).abs() && dc <= da + db && (da + db + dc) % 2 == 0
}

/// ln of the triangle coefficient Delta(a,b,c); call only when `triangle_ok`.
fn ln_triangle(da: i64, db: i64, dc: i64) -> f64 {
    ln_fact((da + db - dc) / 2) + ln_fact((da - db + dc) / 2) + ln_fact((-da + db + dc) / 2)
        - ln_fact((da + db + dc) / 2 + 1)
}

/// Clebsch-Gordan coefficient `<J M | j1 m1; j2 m2>` (Condon-Shortley).
///
/// Returns 0 when selection rules fail or any argument is not a valid
/// half-integer combination.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> f64 {
    let args: Option<Vec<i64>> = [j1, m1, j2, m2, j, m].iter().map(|&x| doubled(x)).collect();
    let Some(a) = args else { return 0.0 };
    let (dj1, dm1, dj2, dm2, dj, dm) = (a[0], a[1], a[2], a[3], a[4], a[5]);
    if dj1 < 0 || dj2 < 0 || dj < 0 {
        return 0.0;
    }
    if dm != dm1 + dm2
        || dm1.abs() > dj1
        || dm2.abs() > dj2
        || dm.abs() > dj
        || (dj1 - dm1) % 2 != 0
        || (dj2 - dm2) % 2 != 0
        || (dj - dm) % 2 != 0
        || !triangle_ok(dj1, dj2, dj)
    {
        return 0.0;
    }
    // prefactor (2J+1) * Delta(j1 j2 J) * prod of (j +- m)!
    let ln_pref = ((dj + 1) as f64).ln()
        + ln_triangle(dj1, dj2, dj)
        + ln_fact((dj + dm) / 2)
        + ln_fact((dj - dm) / 2)
        + ln_fact((dj1 + dm1) / 2)
        + ln_fact((dj1 - dm1) / 2)
        + ln_fact((dj2 + dm2) / 2)
        + ln_fact((dj2 - dm2) / 2);
    // sum over t of (-1)^t / [t! (j1+j2-J-t)! (j1-m1-t)! (j2+m2-t)! (J-j2+m1+t)! (J-j1-m2+t)!]
    let t_min = 0.max((dj2 - dj - dm1) / 2).max((dj1 + dm2 - dj) / 2);
    let t_max = ((dj1 + dj2 - dj) / 2)
        .min((dj1 - dm1) / 2)
        .min((dj2 + dm2) / 2);
    let mut sum = 0.0_f64;
    let mut t = t_min;
    while t <= t_max {
        let ln_den = ln_fact(t)
            + ln_fact((dj1 + dj2 - dj) / 2 - t)
            + ln_fact((dj1 - dm1) / 2 - t)
            + ln_fact((dj2 + dm2) / 2 - t)
            + ln_fact((dj - dj2 + dm1) / 2 + t)
            + ln_fact((dj - dj1 - dm2) / 2 + t);
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (0.5 * ln_pref - ln_den).exp();
        t += 1;
    }
    sum
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}` by the Racah sum.
///
/// Returns 0 on any triangle violation.
pub fn wigner6j(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> f64 {
    let args: Option<Vec<i64>> = [j1, j2, j3, j4, j5, j6].iter().map(|&x| doubled(x)).collect();
    let Some(a) = args else { return 0.0 };
    let (da, db, dc, dd, de, df) = (a[0], a[1], a[2], a[3], a[4], a[5]);
    if a.iter().any(|&x| x < 0) {
        return 0.0;
    }
    if !(triangle_ok(da, db, dc)
        && triangle_ok(da, de, df)
        && triangle_ok(dd, db, df)
        && triangle_ok(dd, de, dc))
    {
        return 0.0;
    }
    let ln_delta = ln_triangle(da, db, dc)
        + ln_triangle(da, de, df)
        + ln_triangle(dd, db, df)
        + ln_triangle(dd, de, dc);
    // sum over t of (-1)^t (t+1)! / [ (t-T_i)! ... (Q_j - t)! ]
    let t1 = (da + db + dc) / 2;
    let t2 = (da + de + df) / 2;
    let t3 = (dd + db + df) / 2;
    let t4 = (dd + de + dc) / 2;
    let q1 = (da + db + dd + de) / 2;
    let q2 = (db + dc + de + df) / 2;
    let q3 = (da + dc + dd + df) / 2;
    let t_min = t1.max(t2).max(t3).max(t4);
    let t_max = q1.min(q2).min(q3);
    let mut sum = 0.0_f64;
    let mut t = t_min;
    while t <= t_max {
        let ln_term = ln_fact(t + 1)
            - ln_fact(t - t1)
            - ln_fact(t - t2)
            - ln_fact(t - t3)
            - ln_fact(t - t4)
            - ln_fact(q1 - t)
            - ln_fact(q2 - t)
            - ln_fact(q3 - t);
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (0.5 * ln_delta + ln_term).exp();
        t += 1;
    }
    sum
}

// ---------------------------------------------------------------------------
// Hermitian operator basis
// ---------------------------------------------------------------------------

/// Orthonormal Hermitian basis `{E_alpha, I/sqrt(d)}` (generalized Gell-Mann).
///
/// The first `d^2 - 1` elements are traceless; the last is the normalized
/// identity. Ordering: symmetric pair elements (row-major over `a < b`),
/// then antisymmetric, then the diagonal family, then the identity.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    elements: Vec<CMat>,
    space: SpinSpace,
}

impl HermitianBasis {
    pub fn new(space: SpinSpace) -> Result<Self> {
        let d = space.dimension();
        if d < 2 {
            return Err(Error::InvalidArgument("basis needs dimension >= 2".into()));
        }
        let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut elements = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in (a + 1)..d {
                let mut m = CMat::zeros(d, d);
                m[(a, b)] = inv_sqrt2;
                m[(b, a)] = inv_sqrt2;
                elements.push(m);
            }
        }
        for a in 0..d {
            for b in (a + 1)..d {
                let mut m = CMat::zeros(d, d);
                m[(a, b)] = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
                m[(b, a)] = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
                elements.push(m);
            }
        }
        for l in 1..d {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut m = CMat::zeros(d, d);
            for k in 0..l {
                m[(k, k)] = Complex64::new(norm, 0.0);
            }
            m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            elements.push(m);
        }
        let mut id = CMat::zeros(d, d);
        for k in 0..d {
            id[(k, k)] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        elements.push(id);
        Ok(HermitianBasis { elements, space })
    }

    pub fn space(&self) -> &SpinSpace {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    /// Number of basis elements, `d^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of traceless elements, `d^2 - 1`.
    pub fn traceless_len(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn element(&self, k: usize) -> &CMat {
        &self.elements[k]
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    /// Coefficients `Tr(E_k A)` of a Hermitian operator, as a real vector.
    pub fn project(&self, a: &CMat) -> RVec {
        let n = self.elements.len();
        let mut v = RVec::zeros(n);
        for (k, e) in self.elements.iter().enumerate() {
            v[k] = trace_product_re(e, a);
        }
        v
    }

    /// Reassemble an operator from its coefficient vector.
    pub fn assemble(&self, coeffs: &RVec) -> CMat {
        let d = self.dimension();
        let mut m = CMat::zeros(d, d);
        for (k, e) in self.elements.iter().enumerate() {
            if coeffs[k] != 0.0 {
                m += e.scale(coeffs[k]);
            }
        }
        m
    }
}

/// `Re Tr(A B)` without forming the product.
pub fn trace_product_re(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)] * b[(j, i)];
            s += x.re;
        }
    }
    s
}

/// Hermitian-basis construction for a space (spec operation name).
pub fn hermitian_basis(space: &SpinSpace) -> Result<HermitianBasis> {
    HermitianBasis::new(space.clone())
}

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

/// Place `op` into the larger space `into` on matching `(F, m)` labels,
/// zero elsewhere.
pub fn embed(op: &MatrixOperator, into: &SpinSpace) -> Result<MatrixOperator> {
    let from = op.space();
    for f in from.manifolds() {
        if !into.contains_manifold(*f) {
            return Err(Error::InvalidArgument(format!(
                "manifold F={f} of source space missing from target"
            )));
        }
    }
    let map: Vec<usize> = from
        .labels()
        .iter()
        .map(|&(f, m)| into.index_of(f, m).expect("label present"))
        .collect();
    let mut out = CMat::zeros(into.dimension(), into.dimension());
    for (i, &ii) in map.iter().enumerate() {
        for (j, &jj) in map.iter().enumerate() {
            out[(ii, jj)] = op.matrix()[(i, j)];
        }
    }
    MatrixOperator::new(out, into.clone())
}

/// Extract the block of `op` living on `sub` (the reverse of [`embed`]).
pub fn project_block(op: &MatrixOperator, sub: &SpinSpace) -> Result<MatrixOperator> {
    let from = op.space();
    for f in sub.manifolds() {
        if !from.contains_manifold(*f) {
            return Err(Error::InvalidArgument(format!(
                "manifold F={f} of target space missing from source"
            )));
        }
    }
    let map: Vec<usize> = sub
        .labels()
        .iter()
        .map(|&(f, m)| from.index_of(f, m).expect("label present"))
        .collect();
    let mut out = CMat::zeros(sub.dimension(), sub.dimension());
    for (i, &ii) in map.iter().enumerate() {
        for (j, &jj) in map.iter().enumerate() {
            out[(i, j)] = op.matrix()[(ii, jj)];
        }
    }
    MatrixOperator::new(out, sub.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::cmat_max_abs;

    fn comm(a: &CMat, b: &CMat) -> CMat {
        a * b - b * a
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(SpinSpace::single(3.0).unwrap().dimension(), 7);
        assert_eq!(SpinSpace::single(4.0).unwrap().dimension(), 9);
        assert_eq!(SpinSpace::combined(&[3.0, 4.0]).unwrap().dimension(), 16);
        assert!(SpinSpace::single(-1.0).is_err());
        assert!(SpinSpace::single(0.3).is_err());
    }

    #[test]
    fn label_order_is_f3_block_first_m_descending() {
        let s = SpinSpace::combined(&[4.0, 3.0]).unwrap();
        assert_eq!(s.labels()[0], (3.0, 3.0));
        assert_eq!(s.labels()[6], (3.0, -3.0));
        assert_eq!(s.labels()[7], (4.0, 4.0));
        assert_eq!(s.labels()[15], (4.0, -4.0));
    }

    #[test]
    fn spin_half_fz() {
        let ops = angular_momentum(0.5).unwrap();
        let fz = ops.fz.matrix();
        assert_eq!(fz[(0, 0)].re, 0.5);
        assert_eq!(fz[(1, 1)].re, -0.5);
    }

    #[test]
    fn su2_commutation_and_casimir() {
        for &f in &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let ops = angular_momentum(f).unwrap();
            let (fx, fy, fz) = (ops.fx.matrix(), ops.fy.matrix(), ops.fz.matrix());
            let c = comm(fx, fy) - fz * Complex64::new(0.0, 1.0);
            assert!(cmat_max_abs(&c) < 1e-12, "commutator failed for F={f}");
            let d = fx.nrows();
            let casimir = fx * fx + fy * fy + fz * fz;
            let expect = CMat::identity(d, d).scale(f * (f + 1.0));
            assert!(cmat_max_abs(&(casimir - expect)) < 1e-12);
        }
    }

    #[test]
    fn ladder_matrix_elements() {
        for &f in &[0.5, 1.0, 2.5, 3.0, 4.0] {
            let ops = angular_momentum(f).unwrap();
            let fplus = ops.fx.matrix() + ops.fy.matrix() * Complex64::new(0.0, 1.0);
            let d = fplus.nrows();
            for k in 1..d {
                let m = f - k as f64;
                let expect = (f * (f + 1.0) - m * (m + 1.0)).sqrt();
                assert!((fplus[(k - 1, k)].re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_or_invalid_f_rejected() {
        assert!(angular_momentum(-0.5).is_err());
        assert!(angular_momentum(0.7).is_err());
    }

    #[test]
    fn cg_stretched_state() {
        assert!((clebsch_gordan(3.0, 3.0, 1.0, 1.0, 4.0, 4.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cg_selection_rules() {
        assert_eq!(clebsch_gordan(3.0, 1.0, 1.0, 1.0, 4.0, 1.0), 0.0);
        assert_eq!(clebsch_gordan(3.0, 0.0, 1.0, 0.0, 5.0, 0.0), 0.0);
        assert_eq!(clebsch_gordan(3.0, 4.0, 1.0, 0.0, 4.0, 4.0), 0.0);
    }

    use crate::testutil::rational::{cg_oracle, sixj_oracle};

    #[test]
    fn cg_matches_rational_oracle() {
        // <4,1 | 3,0; 1,1> plus a spread of half-integer cases
        let cases = [
            (6, 0, 2, 2, 8, 2),
            (6, 2, 2, -2, 6, 0),
            (7, 1, 1, 1, 8, 2),
            (5, -3, 4, 2, 7, -1),
            (8, 0, 2, 0, 8, 0),
            (4, 2, 3, -1, 5, 1),
        ];
        for &(dj1, dm1, dj2, dm2, dj, dm) in &cases {
            let got = clebsch_gordan(
                dj1 as f64 / 2.0,
                dm1 as f64 / 2.0,
                dj2 as f64 / 2.0,
                dm2 as f64 / 2.0,
                dj as f64 / 2.0,
                dm as f64 / 2.0,
            );
            let want = cg_oracle(dj1, dm1, dj2, dm2, dj, dm);
            assert!(
                (got - want).abs() < 1e-12,
                "CG mismatch for {:?}: got {got}, oracle {want}",
                (dj1, dm1, dj2, dm2, dj, dm)
            );
        }
    }

    #[test]
    fn cg_orthogonality() {
        // sum over m1,m2 of <J M|..><J' M'|..> = delta_JJ' delta_MM'
        for &(j1, j2) in &[(1.5_f64, 1.0_f64), (2.0, 2.0), (3.0, 1.0)] {
            let jmin = (j1 - j2).abs();
            let jmax = j1 + j2;
            let mut j = jmin;
            while j <= jmax + 1e-9 {
                let mut jp = jmin;
                while jp <= jmax + 1e-9 {
                    for m in [-1.0, 0.0, 1.0] {
                        let mut s = 0.0;
                        let mut m1 = -j1;
                        while m1 <= j1 + 1e-9 {
                            let m2 = m - m1;
                            s += clebsch_gordan(j1, m1, j2, m2, j, m)
                                * clebsch_gordan(j1, m1, j2, m2, jp, m);
                            m1 += 1.0;
                        }
                        let m_valid = m.abs() <= j + 1e-9 && ((j - m) - (j - m).round()).abs() < 1e-9;
                        let want = if (j - jp).abs() < 1e-9 && m_valid { 1.0 } else { 0.0 };
                        assert!((s - want).abs() < 1e-12, "orthogonality {j1} {j2} {j} {jp} {m}");
                    }
                    jp += 1.0;
                }
                j += 1.0;
            }
        }
    }

    #[test]
    fn sixj_triangle_violation_is_zero() {
        assert_eq!(wigner6j(1.0, 1.0, 3.0, 1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn sixj_matches_rational_oracle() {
        let cases = [
            (2, 2, 2, 2, 2, 2),          // {1 1 1; 1 1 1} = 1/6
            (6, 7, 1, 1, 6, 7),
            (8, 7, 1, 1, 8, 7),
            (6, 2, 6, 6, 2, 6),
            (8, 2, 8, 6, 2, 6),
            (5, 4, 3, 2, 3, 4),
        ];
        for &(a, b, c, d, e, f) in &cases {
            let got = wigner6j(
                a as f64 / 2.0,
                b as f64 / 2.0,
                c as f64 / 2.0,
                d as f64 / 2.0,
                e as f64 / 2.0,
                f as f64 / 2.0,
            );
            let want = sixj_oracle(a, b, c, d, e, f);
            assert!(
                (got - want).abs() < 1e-12,
                "6j mismatch {:?}: got {got}, oracle {want}",
                (a, b, c, d, e, f)
            );
        }
        assert!((wigner6j(1.0, 1.0, 1.0, 1.0, 1.0, 1.0) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn sixj_column_permutation_symmetry() {
        let v = wigner6j(1.0, 2.0, 3.0, 2.0, 1.0, 2.0);
        assert!((v - wigner6j(2.0, 1.0, 3.0, 1.0, 2.0, 2.0)).abs() < 1e-12);
        assert!((v - wigner6j(3.0, 2.0, 1.0, 2.0, 1.0, 2.0)).abs() < 1e-12);
        // swap upper/lower in two columns
        assert!((v - wigner6j(2.0, 1.0, 3.0, 1.0, 2.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn gell_mann_d2_is_pauli_scaled() {
        let space = SpinSpace::single(0.5).unwrap();
        let b = HermitianBasis::new(space).unwrap();
        assert_eq!(b.len(), 4);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.element(0)[(0, 1)].re - s).abs() < 1e-15); // sigma_x / sqrt(2)
        assert!((b.element(1)[(0, 1)].im + s).abs() < 1e-15); // sigma_y / sqrt(2)
        assert!((b.element(2)[(0, 0)].re - s).abs() < 1e-15); // sigma_z / sqrt(2)
    }

    #[test]
    fn basis_orthonormal_and_traceless_d7() {
        let space = SpinSpace::single(3.0).unwrap();
        let b = HermitianBasis::new(space).unwrap();
        assert_eq!(b.traceless_len(), 48);
        for i in 0..b.len() {
            assert!(
                b.element(i).diagonal().sum().norm()
                    < if i < 48 { 1e-12 } else { 3.0 }
            );
            for j in 0..=i {
                let g = trace_product_re(b.element(i), b.element(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "gram({i},{j}) = {g}");
            }
        }
    }

    #[test]
    fn basis_round_trip_random_hermitian() {
        let space = SpinSpace::combined(&[3.0, 4.0]).unwrap();
        let b = HermitianBasis::new(space).unwrap();
        let d = 16;
        let mut rng = crate::testutil::rng(42);
        let m = crate::testutil::random_hermitian(d, &mut rng);
        let coeffs = b.project(&m);
        let back = b.assemble(&coeffs);
        assert!(cmat_max_abs(&(back - m)) < 1e-12);
    }

    #[test]
    fn embed_identity_gives_projector() {
        let f3 = SpinSpace::single(3.0).unwrap();
        let f34 = SpinSpace::combined(&[3.0, 4.0]).unwrap();
        let i7 = MatrixOperator::new(CMat::identity(7, 7), f3.clone()).unwrap();
        let p3 = embed(&i7, &f34).unwrap();
        assert!((p3.trace().re - 7.0).abs() < 1e-12);
        for k in 0..7 {
            assert_eq!(p3.matrix()[(k, k)].re, 1.0);
        }
        for k in 7..16 {
            assert_eq!(p3.matrix()[(k, k)].re, 0.0);
        }
    }

    #[test]
    fn embed_project_round_trip() {
        let f4 = SpinSpace::single(4.0).unwrap();
        let f34 = SpinSpace::combined(&[3.0, 4.0]).unwrap();
        let ops = angular_momentum(4.0).unwrap();
        let big = embed(&ops.fz, &f34).unwrap();
        let back = project_block(&big, &f4).unwrap();
        assert!(cmat_max_abs(&(back.matrix() - ops.fz.matrix())) < 1e-15);
        // spectrum of the embedded operator
        let evs: Vec<f64> = (0..16).map(|k| big.matrix()[(k, k)].re).collect();
        assert_eq!(evs[..7], [0.0; 7]);
        assert_eq!(evs[7], 4.0);
        assert_eq!(evs[15], -4.0);
    }

    #[test]
    fn embed_rejects_wrong_target() {
        let f4 = SpinSpace::single(4.0).unwrap();
        let f3 = SpinSpace::single(3.0).unwrap();
        let ops = angular_momentum(4.0).unwrap();
        assert!(embed(&ops.fz, &f3).is_err());
        let _ = f4;
    }
}
