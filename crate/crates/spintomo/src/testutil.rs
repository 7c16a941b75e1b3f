//! Shared helpers for unit tests: exact rational arithmetic for coupling
//! oracles, seeded RNG, and random-matrix generators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CMat;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cmat_max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_complex_matrix(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&g + g.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations —
/// an eigensolver independent of the main linear-algebra path, for oracle use.
pub fn jacobi_eigvals(h: &CMat, sweeps: usize) -> Vec<f64> {
    let n = h.nrows();
    let mut a = h.clone();
    for _ in 0..sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() < 1e-300 {
                    continue;
                }
                // unitary 2x2 diagonalization of [[app, apq], [apq*, aqq]]
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (c, s) = (theta.cos(), theta.sin());
                let sp = phase.scale(s);
                // rows
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp.scale(c) - akq * sp.conj();
                    a[(k, q)] = akq.scale(c) + akp * sp;
                }
                // columns
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk.scale(c) - aqk * sp;
                    a[(q, k)] = aqk.scale(c) + apk * sp.conj();
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|k| a[(k, k)].re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

pub mod rational {
    //! Minimal exact rational arithmetic over i128, for coupling-coefficient
    //! oracles (j <= 5 keeps every factorial product well inside i128).

    #[derive(Copy, Clone, Debug, PartialEq, Eq)]
    pub struct Frac {
        n: i128,
        d: i128,
    }

    fn gcd(mut a: i128, mut b: i128) -> i128 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.max(1)
    }

    impl Frac {
        pub fn new(n: i128, d: i128) -> Self {
            assert!(d != 0);
            let s = if d < 0 { -1 } else { 1 };
            let g = gcd(n, d);
            Frac {
                n: s * n / g,
                d: s * d / g,
            }
        }

        pub fn int(n: i64) -> Self {
            Frac { n: n as i128, d: 1 }
        }

        pub fn factorial(n: i64) -> Self {
            assert!(n >= 0, "negative factorial in oracle");
            let mut v: i128 = 1;
            for k in 2..=n as i128 {
                v = v.checked_mul(k).expect("factorial overflow");
            }
            Frac { n: v, d: 1 }
        }

        pub fn to_f64(self) -> f64 {
            self.n as f64 / self.d as f64
        }

        pub fn signum(self) -> f64 {
            (self.n.signum() as f64).max(-1.0).min(1.0)
        }
    }

    impl std::ops::Add for Frac {
        type Output = Frac;
        fn add(self, o: Frac) -> Frac {
            let g = gcd(self.d, o.d);
            let (da, db) = (self.d / g, o.d / g);
            let n = self
                .n
                .checked_mul(db)
                .and_then(|x| o.n.checked_mul(da).map(|y| (x, y)))
                .map(|(x, y)| x.checked_add(y).expect("add overflow"))
                .expect("mul overflow");
            Frac::new(n, self.d.checked_mul(db).expect("den overflow"))
        }
    }

    impl std::ops::Mul for Frac {
        type Output = Frac;
        fn mul(self, o: Frac) -> Frac {
            let g1 = gcd(self.n, o.d);
            let g2 = gcd(o.n, self.d);
            Frac::new(
                (self.n / g1).checked_mul(o.n / g2).expect("mul overflow"),
                (self.d / g2).checked_mul(o.d / g1).expect("mul overflow"),
            )
        }
    }

    impl std::ops::Div for Frac {
        type Output = Frac;
        fn div(self, o: Frac) -> Frac {
            assert!(o.n != 0, "division by zero Frac");
            self * Frac::new(o.d, o.n)
        }
    }

    fn triangle_ok(da: i64, db: i64, dc: i64) -> bool {
        dc >= (da - db).abs() && dc <= da + db && (da + db + dc) % 2 == 0
    }

    /// Clebsch-Gordan coefficient from the exact-rational Racah sum
    /// (arguments in doubled-integer form).
    pub fn cg_oracle(dj1: i64, dm1: i64, dj2: i64, dm2: i64, dj: i64, dm: i64) -> f64 {
        if dm != dm1 + dm2 || !triangle_ok(dj1, dj2, dj) {
            return 0.0;
        }
        let f = Frac::factorial;
        let pref = Frac::int(dj + 1)
            * f((dj1 + dj2 - dj) / 2)
            * f((dj1 - dj2 + dj) / 2)
            * f((-dj1 + dj2 + dj) / 2)
            / f((dj1 + dj2 + dj) / 2 + 1)
            * f((dj + dm) / 2)
            * f((dj - dm) / 2)
            * f((dj1 + dm1) / 2)
            * f((dj1 - dm1) / 2)
            * f((dj2 + dm2) / 2)
            * f((dj2 - dm2) / 2);
        let t_min = 0.max((dj2 - dj - dm1) / 2).max((dj1 + dm2 - dj) / 2);
        let t_max = ((dj1 + dj2 - dj) / 2)
            .min((dj1 - dm1) / 2)
            .min((dj2 + dm2) / 2);
        let mut s = Frac::int(0);
        for t in t_min..=t_max {
            let den = f(t)
                * f((dj1 + dj2 - dj) / 2 - t)
                * f((dj1 - dm1) / 2 - t)
                * f((dj2 + dm2) / 2 - t)
                * f((dj - dj2 + dm1) / 2 + t)
                * f((dj - dj1 - dm2) / 2 + t);
            let term = Frac::int(if t % 2 == 0 { 1 } else { -1 }) / den;
            s = s + term;
        }
        let sq = pref * s * s;
        s.signum() * sq.to_f64().sqrt()
    }

    /// Wigner 6j symbol from the exact-rational Racah sum
    /// (arguments in doubled-integer form).
    pub fn sixj_oracle(da: i64, db: i64, dc: i64, dd: i64, de: i64, df: i64) -> f64 {
        if !(triangle_ok(da, db, dc)
            && triangle_ok(da, de, df)
            && triangle_ok(dd, db, df)
            && triangle_ok(dd, de, dc))
        {
            return 0.0;
        }
        let fac = Frac::factorial;
        let tri = |x: i64, y: i64, z: i64| {
            fac((x + y - z) / 2) * fac((x - y + z) / 2) * fac((-x + y + z) / 2)
                / fac((x + y + z) / 2 + 1)
        };
        let delta = tri(da, db, dc) * tri(da, de, df) * tri(dd, db, df) * tri(dd, de, dc);
        let t1 = (da + db + dc) / 2;
        let t2 = (da + de + df) / 2;
        let t3 = (dd + db + df) / 2;
        let t4 = (dd + de + dc) / 2;
        let q1 = (da + db + dd + de) / 2;
        let q2 = (db + dc + de + df) / 2;
        let q3 = (da + dc + dd + df) / 2;
        let mut s = Frac::int(0);
        for t in t1.max(t2).max(t3).max(t4)..=q1.min(q2).min(q3) {
            let term = fac(t + 1)
                / (fac(t - t1)
                    * fac(t - t2)
                    * fac(t - t3)
                    * fac(t - t4)
                    * fac(q1 - t)
                    * fac(q2 - t)
                    * fac(q3 - t));
            s = s + if t % 2 == 0 { term } else { Frac::int(-1) * term };
        }
        let sq = delta * s * s;
        s.signum() * sq.to_f64().sqrt()
    }
}
