//! Atomic structure: Hamiltonians in lab and rotating frames, light-shift
//! coefficients, dipole operators, and optical-pumping jump operators for a
//! cesium-like alkali ground manifold probed on the D1 or D2 line.
//!
//! All frequencies are angular (rad/s). Detunings follow the convention
//! `Delta_{F'F} = omega_laser - omega(F -> F')`, with the probe detuning
//! referenced to the transition from the lower ground manifold to the
//! lowest excited manifold of the chosen line.

use num_complex::Complex64;

use crate::dynamics::Superoperator;
use crate::error::{Error, Result};
use crate::spin::{angular_momentum, clebsch_gordan, embed, wigner6j, HermitianBasis, SpinSpace};
use crate::{CMat, RMat};

const TAU: f64 = std::f64::consts::TAU;

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// Which fine-structure line the probe addresses.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Line {
    D1,
    D2,
}

/// Excited-state data for one line.
#[derive(Copy, Clone, Debug)]
pub struct LineData {
    /// Excited electronic angular momentum J'.
    pub j_excited: f64,
    /// Natural linewidth (angular).
    pub gamma: f64,
    /// Magnetic-dipole hyperfine constant A (angular).
    pub hf_a: f64,
    /// Electric-quadrupole hyperfine constant B (angular); zero for J' = 1/2.
    pub hf_b: f64,
}

/// Ground-state and excited-state constants of the atom.
#[derive(Clone, Debug)]
pub struct AtomConstants {
    /// Nuclear spin I.
    pub nuclear_spin: f64,
    /// Ground hyperfine splitting omega_HF (angular).
    pub hyperfine_splitting: f64,
    pub g_e: f64,
    pub g_i: f64,
    /// Lande g-factor of the lower manifold (F = I - 1/2).
    pub g_lower: f64,
    /// Lande g-factor of the upper manifold (F = I + 1/2).
    pub g_upper: f64,
    pub d1: LineData,
    pub d2: LineData,
}

impl AtomConstants {
    /// Literature values for 133-Cs (2009-era line data).
    pub fn cesium() -> Self {
        AtomConstants {
            nuclear_spin: 3.5,
            hyperfine_splitting: TAU * 9.192_631_770e9,
            g_e: 2.0023,
            g_i: -0.0004,
            g_lower: 0.2499,
            g_upper: -0.2507,
            d1: LineData {
                j_excited: 0.5,
                gamma: TAU * 4.5612e6,
                hf_a: TAU * 291.9201e6,
                hf_b: 0.0,
            },
            d2: LineData {
                j_excited: 1.5,
                gamma: TAU * 5.2227e6,
                hf_a: TAU * 50.288_27e6,
                hf_b: TAU * -0.4934e6,
            },
        }
    }

    /// |g_lower / g_upper|, about 1.0032 for Cs.
    pub fn g_ratio(&self) -> f64 {
        (self.g_lower / self.g_upper).abs()
    }

    pub fn line(&self, line: Line) -> &LineData {
        match line {
            Line::D1 => &self.d1,
            Line::D2 => &self.d2,
        }
    }

    /// Lower and upper ground-manifold F values (3 and 4 for Cs).
    pub fn f_lower(&self) -> f64 {
        self.nuclear_spin - 0.5
    }

    pub fn f_upper(&self) -> f64 {
        self.nuclear_spin + 0.5
    }

    /// Excited manifolds of a line, ascending.
    pub fn excited_manifolds(&self, line: Line) -> Vec<f64> {
        let jp = self.line(line).j_excited;
        let fmin = (jp - self.nuclear_spin).abs();
        let fmax = jp + self.nuclear_spin;
        let n = ((fmax - fmin).round() as usize) + 1;
        (0..n).map(|k| fmin + k as f64).collect()
    }

    /// Hyperfine energy offset of excited manifold F' within a line (angular),
    /// relative to the line's unsplit level.
    pub fn excited_offset(&self, line: Line, f_ex: f64) -> f64 {
        let ld = self.line(line);
        let i = self.nuclear_spin;
        let jp = ld.j_excited;
        let k = f_ex * (f_ex + 1.0) - i * (i + 1.0) - jp * (jp + 1.0);
        let mut e = 0.5 * ld.hf_a * k;
        if jp > 0.5 {
            let num = 1.5 * k * (k + 1.0) - 2.0 * i * (i + 1.0) * jp * (jp + 1.0);
            let den = 2.0 * i * (2.0 * i - 1.0) * 2.0 * jp * (2.0 * jp - 1.0);
            e += ld.hf_b * num / den;
        }
        e
    }

    /// Ground-state energy offset of manifold F relative to the lower manifold.
    pub fn ground_offset(&self, f: f64) -> f64 {
        if (f - self.f_upper()).abs() < 1e-9 {
            self.hyperfine_splitting
        } else {
            0.0
        }
    }
}

// ---------------------------------------------------------------------------
// Probe
// ---------------------------------------------------------------------------

/// Probe-laser settings: line, detuning, polarization, and strength.
#[derive(Clone, Debug)]
pub struct ProbeSettings {
    pub line: Line,
    /// Detuning from (lower ground F) -> (lowest excited F') (angular).
    pub detuning: f64,
    /// Cartesian complex polarization vector, unit norm.
    pub polarization: [Complex64; 3],
    /// Characteristic scattering rate gamma_sc = Omega^2 Gamma / (4 Delta_c^2).
    pub scattering_rate: f64,
}

impl ProbeSettings {
    pub fn new(
        line: Line,
        detuning: f64,
        polarization: [Complex64; 3],
        scattering_rate: f64,
    ) -> Result<Self> {
        let norm: f64 = polarization.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "polarization norm {norm} differs from 1"
            )));
        }
        if detuning == 0.0 {
            return Err(Error::Singularity("zero probe detuning".into()));
        }
        if scattering_rate < 0.0 {
            return Err(Error::InvalidArgument("negative scattering rate".into()));
        }
        Ok(ProbeSettings {
            line,
            detuning,
            polarization,
            scattering_rate,
        })
    }

    /// Linear-x polarized probe.
    pub fn linear_x(line: Line, detuning: f64, scattering_rate: f64) -> Result<Self> {
        Self::new(
            line,
            detuning,
            [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            scattering_rate,
        )
    }

    /// Rabi frequency for a unit oscillator strength, from the consistency
    /// relation gamma_sc = Omega^2 Gamma / (4 Delta_c^2).
    pub fn rabi(&self, atom: &AtomConstants) -> f64 {
        let gamma = atom.line(self.line).gamma;
        (4.0 * self.scattering_rate * self.detuning * self.detuning / gamma).sqrt()
    }

    /// Detuning of the laser from the F -> F' transition.
    pub fn transition_detuning(&self, atom: &AtomConstants, f_ex: f64, f_gr: f64) -> f64 {
        let f_ref = atom.excited_manifolds(self.line)[0];
        self.detuning - (atom.excited_offset(self.line, f_ex) - atom.excited_offset(self.line, f_ref))
            + atom.ground_offset(f_gr)
    }

    /// Spherical components `c_q = e_q^* . eps` for q = -1, 0, +1.
    pub fn polarization_spherical(&self) -> [Complex64; 3] {
        let [ex, ey, ez] = self.polarization;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [
            (ex + Complex64::i() * ey) * s,
            ez,
            -(ex - Complex64::i() * ey) * s,
        ]
    }
}

// ---------------------------------------------------------------------------
// Dipole operators
// ---------------------------------------------------------------------------

/// One spherical component of the dimensionless dipole raising operator,
/// mapping the ground manifold `f_lower` into the excited manifold `f_upper`.
#[derive(Clone, Debug)]
pub struct DipoleBlock {
    pub f_upper: f64,
    pub f_lower: f64,
    /// Spherical photon index q in {-1, 0, +1}.
    pub q: i32,
    /// (2 F' + 1) x (2 F + 1) matrix in descending-m bases.
    pub mat: CMat,
}

/// Reduced coupling strength of the F -> F' transition.
pub fn dipole_kappa(atom: &AtomConstants, line: Line, f_ex: f64, f_gr: f64) -> f64 {
    let jp = atom.line(line).j_excited;
    let i = atom.nuclear_spin;
    let j = 0.5;
    let phase_exp = (f_ex + i + jp + 1.0).round() as i64;
    let sign = if phase_exp % 2 == 0 { 1.0 } else { -1.0 };
    sign * ((2.0 * jp + 1.0) * (2.0 * f_gr + 1.0)).sqrt()
        * wigner6j(f_ex, i, jp, j, 1.0, f_gr)
}

/// The three spherical components of the dipole raising operator for one
/// `F -> F'` transition of a line.
pub fn dipole_raising(
    atom: &AtomConstants,
    line: Line,
    f_upper: f64,
    f_lower: f64,
) -> Result<[DipoleBlock; 3]> {
    if !atom
        .excited_manifolds(line)
        .iter()
        .any(|&f| (f - f_upper).abs() < 1e-9)
    {
        return Err(Error::InvalidArgument(format!(
            "F' = {f_upper} not in the excited manifold set of the line"
        )));
    }
    if (f_lower - atom.f_lower()).abs() > 1e-9 && (f_lower - atom.f_upper()).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "F = {f_lower} is not a ground manifold"
        )));
    }
    let kappa = dipole_kappa(atom, line, f_upper, f_lower);
    let ne = (2.0 * f_upper + 1.0).round() as usize;
    let ng = (2.0 * f_lower + 1.0).round() as usize;
    let out: Vec<DipoleBlock> = [-1_i32, 0, 1]
        .iter()
        .map(|&q| {
            let mut m = CMat::zeros(ne, ng);
            for col in 0..ng {
                let mg = f_lower - col as f64;
                let me = mg + q as f64;
                if me.abs() <= f_upper + 1e-9 {
                    let row = (f_upper - me).round() as usize;
                    let cg = clebsch_gordan(f_lower, mg, 1.0, q as f64, f_upper, me);
                    m[(row, col)] = Complex64::new(kappa * cg, 0.0);
                }
            }
            DipoleBlock {
                f_upper,
                f_lower,
                q,
                mat: m,
            }
        })
        .collect();
    Ok(out.try_into().map_err(|_| Error::Numerical("dipole block count".into()))?)
}

/// `D^dag_{F'F} . eps` as a rectangular matrix (ground F -> excited F').
fn dipole_dot_polarization(
    atom: &AtomConstants,
    probe: &ProbeSettings,
    f_ex: f64,
    f_gr: f64,
) -> Result<CMat> {
    let blocks = dipole_raising(atom, probe.line, f_ex, f_gr)?;
    let c = probe.polarization_spherical();
    let mut m = blocks[0].mat.clone() * c[0];
    m += &blocks[1].mat * c[1];
    m += &blocks[2].mat * c[2];
    Ok(m)
}

// ---------------------------------------------------------------------------
// Light shift and beta coefficients
// ---------------------------------------------------------------------------

/// Effective (non-Hermitian) light-shift Hamiltonian on the given ground
/// space: `(Omega^2/4) sum_{F,F'} (eps*.D)(D^dag.eps) / (Delta_{F'F} + i Gamma/2)`.
pub fn light_shift_hamiltonian(
    probe: &ProbeSettings,
    atom: &AtomConstants,
    space: &SpinSpace,
) -> Result<CMat> {
    let gamma = atom.line(probe.line).gamma;
    let omega_sq = probe.rabi(atom).powi(2);
    let d = space.dimension();
    let mut h = CMat::zeros(d, d);
    for &f in space.manifolds() {
        let sub = SpinSpace::single(f)?;
        let nf = sub.dimension();
        let mut block = CMat::zeros(nf, nf);
        for &fp in &atom.excited_manifolds(probe.line) {
            let det = probe.transition_detuning(atom, fp, f);
            if det == 0.0 {
                return Err(Error::Singularity(format!(
                    "zero detuning on F={f} -> F'={fp}"
                )));
            }
            let deps = dipole_dot_polarization(atom, probe, fp, f)?;
            let x = deps.adjoint() * &deps;
            block += x * (Complex64::new(omega_sq / 4.0, 0.0)
                / Complex64::new(det, gamma / 2.0));
        }
        let op = crate::spin::MatrixOperator::new(block, sub)?;
        h += embed(&op, space)?.matrix();
    }
    Ok(h)
}

/// Scalar and rank-2 tensor light-shift coefficients of one manifold.
#[derive(Clone, Debug)]
pub struct BetaCoefficients {
    /// (F, beta^(0), beta^(2)) per ground manifold.
    pub entries: Vec<(f64, Complex64, Complex64)>,
}

impl BetaCoefficients {
    pub fn get(&self, f: f64) -> Option<(Complex64, Complex64)> {
        self.entries
            .iter()
            .find(|(g, _, _)| (g - f).abs() < 1e-9)
            .map(|&(_, b0, b2)| (b0, b2))
    }
}

/// Decompose the light shift of each ground manifold into the irreducible
/// form `gamma_sc [ (beta0 - beta2 F(F+1)/3) I + beta2 Fx^2 ]`, solving for
/// the complex `beta` coefficients. Requires a linear-x probe for the
/// decomposition to close; a residual above 1e-8 is reported as a
/// model-inconsistency error.
pub fn beta_coefficients(probe: &ProbeSettings, atom: &AtomConstants) -> Result<BetaCoefficients> {
    let mut entries = Vec::new();
    for f in [atom.f_lower(), atom.f_upper()] {
        let sub = SpinSpace::single(f)?;
        let h = light_shift_hamiltonian(probe, atom, &sub)?;
        let nf = sub.dimension();
        let fx = angular_momentum(f)?.fx.into_matrix();
        let fx2 = &fx * &fx;
        let id = CMat::identity(nf, nf);
        // 2x2 Gram solve for H = c0 I + c2 Fx^2
        let g11 = nf as f64;
        let g12 = fx2.diagonal().sum().re;
        let g22 = (&fx2 * &fx2).diagonal().sum().re;
        let r1 = h.diagonal().sum();
        let r2 = (&fx2 * &h).diagonal().sum();
        let det = g11 * g22 - g12 * g12;
        let c0 = (r1 * g22 - r2 * g12) / det;
        let c2 = (r2 * g11 - r1 * g12) / det;
        let recon = &id * c0 + &fx2 * c2;
        let scale = h.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let resid = (&h - &recon)
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if resid > 1e-8 * scale {
            return Err(Error::ModelInconsistency(format!(
                "light shift of F={f} is not of irreducible scalar+rank-2 form \
                 (relative residual {:.2e})",
                resid / scale
            )));
        }
        let gsc = probe.scattering_rate;
        let b2 = c2 / gsc;
        let b0 = c0 / gsc + b2 * (f * (f + 1.0) / 3.0);
        entries.push((f, b0, b2));
    }
    Ok(BetaCoefficients { entries })
}

/// Detuning (within the excited hyperfine interval of `line`) at which the
/// scalar light shift `Re beta^(0)_F` vanishes, located by bisection to
/// 2 pi x 1 kHz.
pub fn find_magic_detuning(atom: &AtomConstants, line: Line, f: f64) -> Result<f64> {
    let manifolds = atom.excited_manifolds(line);
    let span = atom.excited_offset(line, *manifolds.last().unwrap())
        - atom.excited_offset(line, manifolds[0]);
    let re_beta0 = |det: f64| -> Result<f64> {
        let probe = ProbeSettings::linear_x(line, det, 1.0)?;
        let betas = beta_coefficients(&probe, atom)?;
        Ok(betas
            .get(f)
            .ok_or_else(|| Error::InvalidArgument(format!("manifold F={f} unknown")))?
            .0
            .re)
    };
    let margin = 1e-4 * span;
    let (mut lo, mut hi) = (margin, span - margin);
    let mut flo = re_beta0(lo)?;
    let fhi = re_beta0(hi)?;
    if flo * fhi > 0.0 {
        return Err(Error::NotFound(
            "Re beta^(0) has no sign change within the excited hyperfine interval".into(),
        ));
    }
    let tol = TAU * 1e3;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = re_beta0(mid)?;
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Jump operators
// ---------------------------------------------------------------------------

/// One optical-pumping jump operator `W_q^{Fb Fa}` on the full ground space.
#[derive(Clone, Debug)]
pub struct JumpOperator {
    pub q: i32,
    pub f_to: f64,
    pub f_from: f64,
    /// Matrix on the ground space (unscaled by Gamma).
    pub mat: CMat,
}

/// All jump operators `W_q^{Fb Fa}`: absorption of a probe photon from
/// manifold `Fa`, spontaneous emission with polarization `q` into `Fb`.
pub fn jump_operators(
    probe: &ProbeSettings,
    atom: &AtomConstants,
    space: &SpinSpace,
) -> Result<Vec<JumpOperator>> {
    let gamma = atom.line(probe.line).gamma;
    let omega = probe.rabi(atom);
    let d = space.dimension();
    let manifolds: Vec<f64> = space.manifolds().to_vec();
    let mut out = Vec::new();
    for &q in &[-1_i32, 0, 1] {
        for &fb in &manifolds {
            for &fa in &manifolds {
                let nb = (2.0 * fb + 1.0).round() as usize;
                let na = (2.0 * fa + 1.0).round() as usize;
                let mut w = CMat::zeros(nb, na);
                for &fp in &atom.excited_manifolds(probe.line) {
                    let det = probe.transition_detuning(atom, fp, fa);
                    if det == 0.0 {
                        return Err(Error::Singularity(format!(
                            "zero detuning on F={fa} -> F'={fp}"
                        )));
                    }
                    // (e_q^* . D_{Fb F'}) = (e_q . D^dag_{F' Fb})^dag
                    let raise_b = &dipole_raising(atom, probe.line, fp, fb)?[(q + 1) as usize].mat;
                    let deps = dipole_dot_polarization(atom, probe, fp, fa)?;
                    w += (raise_b.adjoint() * &deps)
                        * (Complex64::new(omega / 2.0, 0.0) / Complex64::new(det, gamma / 2.0));
                }
                // place in the full ground space
                let mut full = CMat::zeros(d, d);
                let rb = space.index_of(fb, fb).expect("manifold in space");
                let ra = space.index_of(fa, fa).expect("manifold in space");
                for i in 0..nb {
                    for j in 0..na {
                        full[(rb + i, ra + j)] = w[(i, j)];
                    }
                }
                out.push(JumpOperator {
                    q,
                    f_to: fb,
                    f_from: fa,
                    mat: full,
                });
            }
        }
    }
    Ok(out)
}

/// Group the raw `W_q^{Fb Fa}` into the jump-operator set of the master
/// equation, scaled by `sqrt(Gamma)`: one block-diagonal operator
/// `sum_F W_q^{FF}` per polarization q (these preserve coherences between
/// ground manifolds in spontaneous emission), plus each manifold-changing
/// `W_q^{Fb Fa}`, `Fb != Fa`, on its own.
pub fn master_equation_jumps(jumps: &[JumpOperator], gamma: f64) -> Vec<CMat> {
    let s = gamma.sqrt();
    let mut out = Vec::new();
    for &q in &[-1_i32, 0, 1] {
        let mut diag: Option<CMat> = None;
        for j in jumps.iter().filter(|j| j.q == q) {
            if (j.f_to - j.f_from).abs() < 1e-9 {
                diag = Some(match diag {
                    None => j.mat.clone(),
                    Some(m) => m + &j.mat,
                });
            } else {
                out.push(j.mat.scale(s));
            }
        }
        if let Some(m) = diag {
            out.push(m.scale(s));
        }
    }
    out
}

/// Jump set for dynamics restricted to a single manifold `F`: only the
/// within-manifold recycling terms `W_q^{FF}` survive; pumping into the
/// other manifold is a loss.
pub fn restricted_jumps(
    jumps: &[JumpOperator],
    gamma: f64,
    f: f64,
    full_space: &SpinSpace,
    sub: &SpinSpace,
) -> Result<Vec<CMat>> {
    let s = gamma.sqrt();
    let mut out = Vec::new();
    for j in jumps {
        if (j.f_to - f).abs() < 1e-9 && (j.f_from - f).abs() < 1e-9 {
            let op = crate::spin::MatrixOperator::new(j.mat.clone(), full_space.clone())?;
            let block = crate::spin::project_block(&op, sub)?;
            out.push(block.into_matrix().scale(s));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// RF / microwave drive and RWA Hamiltonians
// ---------------------------------------------------------------------------

/// Phase waveforms of the RF and microwave drives over `[0, T]`,
/// piecewise constant.
#[derive(Clone, Debug)]
pub struct DrivePhases {
    pub rf_segment: f64,
    pub uw_segment: f64,
    pub t_total: f64,
    pub phi_x: Vec<f64>,
    pub phi_y: Vec<f64>,
    pub phi_uw: Vec<f64>,
}

impl DrivePhases {
    pub fn at(&self, t: f64) -> Result<(f64, f64, f64)> {
        if t < 0.0 || t > self.t_total + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "t = {t} outside waveform support [0, {}]",
                self.t_total
            )));
        }
        let irf = ((t / self.rf_segment).floor() as usize).min(self.phi_x.len() - 1);
        let iuw = ((t / self.uw_segment).floor() as usize).min(self.phi_uw.len() - 1);
        Ok((self.phi_x[irf], self.phi_y[irf], self.phi_uw[iuw]))
    }

    /// Boundaries where any phase changes, covering `[0, T]`.
    pub fn segment_boundaries(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        let mut push = |t: f64| {
            if t < self.t_total - 1e-12 {
                b.push(t);
            }
        };
        let n_rf = self.phi_x.len();
        let n_uw = self.phi_uw.len();
        for k in 1..n_rf {
            push(k as f64 * self.rf_segment);
        }
        for k in 1..n_uw {
            push(k as f64 * self.uw_segment);
        }
        b.push(self.t_total);
        b.sort_by(|a, c| a.partial_cmp(c).unwrap());
        b.dedup_by(|a, c| (*a - *c).abs() < 1e-12);
        b
    }
}

/// RF and microwave drive parameters (Larmor conventions of the full-manifold
/// control scheme; stretched-transition convention m4 = 4, m3 = 3).
#[derive(Clone, Debug)]
pub struct RfUwDrive {
    /// Bias Larmor frequency Omega_0.
    pub bias_larmor: f64,
    /// RF modulation frequency omega_RF.
    pub rf_frequency: f64,
    /// Microwave detuning from the stretched two-level resonance.
    pub uw_detuning: f64,
    /// RF Larmor amplitudes Omega_x, Omega_y.
    pub rf_amp_x: f64,
    pub rf_amp_y: f64,
    /// Microwave Rabi amplitude Omega_uw.
    pub uw_amp: f64,
    pub phases: DrivePhases,
}

impl RfUwDrive {
    pub fn rf_detuning(&self) -> f64 {
        self.rf_frequency - self.bias_larmor
    }
}

/// Quadratic-Zeeman scale `alpha = x^2 omega_HF / (2I+1)^2` with
/// `x = (g_e - g_i) mu_B B_0 / omega_HF`.
pub fn quadratic_zeeman_alpha(drive: &RfUwDrive, atom: &AtomConstants) -> f64 {
    let mu_b0 = drive.bias_larmor / atom.g_upper.abs();
    let x = (atom.g_e - atom.g_i) * mu_b0 / atom.hyperfine_splitting;
    let n = 2.0 * atom.nuclear_spin + 1.0;
    x * x * atom.hyperfine_splitting / (n * n)
}

/// Cached single-manifold angular momentum operators embedded in the
/// two-manifold space.
pub struct ManifoldOps {
    pub space: SpinSpace,
    pub fx3: CMat,
    pub fy3: CMat,
    pub fz3: CMat,
    pub fx4: CMat,
    pub fy4: CMat,
    pub fz4: CMat,
    pub p3: CMat,
    pub p4: CMat,
}

impl ManifoldOps {
    pub fn new(atom: &AtomConstants) -> Result<Self> {
        let f3 = atom.f_lower();
        let f4 = atom.f_upper();
        let space = SpinSpace::combined(&[f3, f4])?;
        let lower = angular_momentum(f3)?;
        let upper = angular_momentum(f4)?;
        let sub3 = SpinSpace::single(f3)?;
        let sub4 = SpinSpace::single(f4)?;
        let d3 = sub3.dimension();
        let d4 = sub4.dimension();
        let i3 = crate::spin::MatrixOperator::new(CMat::identity(d3, d3), sub3)?;
        let i4 = crate::spin::MatrixOperator::new(CMat::identity(d4, d4), sub4)?;
        Ok(ManifoldOps {
            fx3: embed(&lower.fx, &space)?.into_matrix(),
            fy3: embed(&lower.fy, &space)?.into_matrix(),
            fz3: embed(&lower.fz, &space)?.into_matrix(),
            fx4: embed(&upper.fx, &space)?.into_matrix(),
            fy4: embed(&upper.fy, &space)?.into_matrix(),
            fz4: embed(&upper.fz, &space)?.into_matrix(),
            p3: embed(&i3, &space)?.into_matrix(),
            p4: embed(&i4, &space)?.into_matrix(),
            space,
        })
    }
}

/// Free Hamiltonian in the rotating frame after the RWA, including detuning
/// terms; reduces to the resonant form at `Delta_RF = Delta_uw = 0`.
pub fn h0_rwa(drive: &RfUwDrive, atom: &AtomConstants, ops: &ManifoldOps) -> CMat {
    let g_r = atom.g_ratio();
    let om0 = drive.bias_larmor;
    let alpha = quadratic_zeeman_alpha(drive, atom);
    let d_rf = drive.rf_detuning();
    let d_uw = drive.uw_detuning;
    let c_proj = 1.5 * om0 * (1.0 - g_r) + 12.5 * alpha + 0.5 * (7.0 * d_rf - d_uw);
    let mut h = (&ops.p4 - &ops.p3).scale(c_proj);
    h += ops.fz4.scale(-d_rf);
    h += ops.fz3.scale(d_rf + om0 * (1.0 - g_r));
    h += (&ops.fz4 * &ops.fz4 - &ops.fz3 * &ops.fz3).scale(-alpha);
    h
}

/// RF Hamiltonian in the rotating frame with second-order (method-of-averages)
/// corrections: Bloch-Siegert-like `F_z` shifts and detuning cross terms.
pub fn h_rf_rwa(drive: &RfUwDrive, atom: &AtomConstants, ops: &ManifoldOps, t: f64) -> Result<CMat> {
    let (phx, phy, _) = drive.phases.at(t)?;
    h_rf_rwa_phases(drive, atom, ops, phx, phy)
}

pub fn h_rf_rwa_phases(
    drive: &RfUwDrive,
    atom: &AtomConstants,
    ops: &ManifoldOps,
    phx: f64,
    phy: f64,
) -> Result<CMat> {
    if drive.rf_frequency == 0.0 {
        return Err(Error::InvalidArgument("omega_RF must be nonzero".into()));
    }
    let g_r = atom.g_ratio();
    let om0 = drive.bias_larmor;
    let w = drive.rf_frequency;
    let d_rf = drive.rf_detuning();
    let (ox, oy) = (drive.rf_amp_x, drive.rf_amp_y);
    let eps = om0 * (1.0 - g_r) / (2.0 * w);
    let dr = d_rf / (2.0 * w);
    let (cx, sx) = (phx.cos(), phx.sin());
    let (cy, sy) = (phy.cos(), phy.sin());

    let mut h = (&ops.fx4 - &ops.fx3.scale(g_r * (1.0 - eps))).scale(0.5 * ox * cx);
    h -= (&ops.fy4 + &ops.fy3.scale(g_r * (1.0 + eps))).scale(0.5 * ox * sx);
    h += (&ops.fx4.scale(sx) - &ops.fx3.scale(g_r * cx)).scale(0.5 * ox * dr);
    h -= (&ops.fy4.scale(cx) + &ops.fy3.scale(g_r * sx)).scale(0.5 * ox * dr);

    h += (&ops.fy4 - &ops.fy3.scale(g_r * (1.0 - eps))).scale(0.5 * oy * cy);
    h += (&ops.fx4 + &ops.fx3.scale(g_r * (1.0 + eps))).scale(0.5 * oy * sy);
    h += (&ops.fx4.scale(cy) + &ops.fx3.scale(g_r * sy)).scale(0.5 * oy * dr);
    h += (&ops.fy4.scale(sy) + &ops.fy3.scale(g_r * cy)).scale(0.5 * oy * dr);

    let quad = |sign: f64| {
        ox * ox * (1.0 - 2.0 * (2.0 * phx).cos())
            + oy * oy * (1.0 - 2.0 * (2.0 * phy).cos())
            + sign * 2.0 * ox * oy * (phx - phy).sin()
    };
    h += ops.fz4.scale(quad(1.0) / (16.0 * w));
    h -= ops.fz3.scale(g_r * g_r * quad(-1.0) / (16.0 * w));
    Ok(h)
}

/// First-order RWA form of the RF Hamiltonian (no 1/omega_RF corrections).
pub fn h_rf_first_order(
    drive: &RfUwDrive,
    atom: &AtomConstants,
    ops: &ManifoldOps,
    phx: f64,
    phy: f64,
) -> CMat {
    let g_r = atom.g_ratio();
    let (ox, oy) = (drive.rf_amp_x, drive.rf_amp_y);
    let mut h = (&ops.fx4 - &ops.fx3.scale(g_r)).scale(0.5 * ox * phx.cos());
    h -= (&ops.fy4 + &ops.fy3.scale(g_r)).scale(0.5 * ox * phx.sin());
    h += (&ops.fy4 - &ops.fy3.scale(g_r)).scale(0.5 * oy * phy.cos());
    h += (&ops.fx4 + &ops.fx3.scale(g_r)).scale(0.5 * oy * phy.sin());
    h
}

/// Two-level operators on the stretched microwave transition |3,m> <-> |4,m+1>.
fn sigma_ops(ops: &ManifoldOps, atom: &AtomConstants, m: f64) -> (CMat, CMat, CMat) {
    let f3 = atom.f_lower();
    let f4 = atom.f_upper();
    let space = &ops.space;
    let d = space.dimension();
    let i3 = space.index_of(f3, m).expect("|3,m>");
    let i4 = space.index_of(f4, m + 1.0).expect("|4,m+1>");
    let mut up = CMat::zeros(d, d);
    up[(i4, i3)] = Complex64::new(1.0, 0.0);
    let sx = &up + &up.adjoint();
    let sy = (&up - &up.adjoint()) * Complex64::new(0.0, -1.0);
    let mut sz = CMat::zeros(d, d);
    sz[(i3, i3)] = Complex64::new(1.0, 0.0);
    sz[(i4, i4)] = Complex64::new(-1.0, 0.0);
    (sx, sy, sz)
}

/// Microwave Hamiltonian in the RWA: resonant sigma_x/sigma_y drive on the
/// stretched transition plus off-resonant AC-Zeeman shifts.
pub fn h_uw_rwa(drive: &RfUwDrive, atom: &AtomConstants, ops: &ManifoldOps, t: f64) -> Result<CMat> {
    let (_, _, phu) = drive.phases.at(t)?;
    Ok(h_uw_rwa_phase(drive, atom, ops, phu))
}

pub fn h_uw_rwa_phase(drive: &RfUwDrive, atom: &AtomConstants, ops: &ManifoldOps, phu: f64) -> CMat {
    let f3 = atom.f_lower();
    let f4 = atom.f_upper();
    let ouw = drive.uw_amp;
    let d = ops.space.dimension();
    let mut h = CMat::zeros(d, d);
    if ouw == 0.0 {
        return h;
    }
    let m_res = f3; // stretched convention: |3,3> <-> |4,4>
    let (sx, sy, _) = sigma_ops(ops, atom, m_res);
    h += sx.scale(0.5 * ouw * phu.cos()) + sy.scale(0.5 * ouw * phu.sin());
    let shift_scale = ouw * ouw / (8.0 * drive.rf_frequency);
    let mut m = -f3;
    while m < f3 - 1e-9 {
        let cg = clebsch_gordan(f3, m, 1.0, 1.0, f4, m + 1.0);
        let (_, _, sz) = sigma_ops(ops, atom, m);
        h += sz.scale(shift_scale * cg * cg / (f3 - m));
        m += 1.0;
    }
    h
}

/// Light-shift Hamiltonian in the rotating frame after the RWA (complex;
/// the imaginary parts of `beta` carry the photon-scattering decay):
/// `gamma_sc [ (beta0 + beta2 F(F+1)/6) I_F - (beta2/2) Fz^2 ]` per manifold.
pub fn light_shift_rwa(
    beta: &BetaCoefficients,
    scattering_rate: f64,
    space: &SpinSpace,
) -> Result<CMat> {
    let d = space.dimension();
    let mut h = CMat::zeros(d, d);
    for &f in space.manifolds() {
        let (b0, b2) = beta
            .get(f)
            .ok_or_else(|| Error::InvalidArgument(format!("beta missing for F={f}")))?;
        let sub = SpinSpace::single(f)?;
        let fz = angular_momentum(f)?.fz.into_matrix();
        let nf = sub.dimension();
        let blk = CMat::identity(nf, nf) * (b0 + b2.scale(f * (f + 1.0) / 6.0))
            - (&fz * &fz) * b2.scale(0.5);
        let op = crate::spin::MatrixOperator::new(blk.scale(scattering_rate), sub)?;
        h += embed(&op, space)?.matrix();
    }
    Ok(h)
}

/// Single-manifold light-shift control Hamiltonian (complex):
/// `Omega_L (cos phi Fx + sin phi Fy) + gamma_sc [ (beta0 - beta2 F(F+1)/3) I + beta2 Fx^2 ]`.
pub fn h_lightshift_control(
    phi: f64,
    larmor: f64,
    beta: (Complex64, Complex64),
    scattering_rate: f64,
    f: f64,
) -> Result<CMat> {
    let ops = angular_momentum(f)?;
    let fx = ops.fx.matrix();
    let fy = ops.fy.matrix();
    let nf = fx.nrows();
    let (b0, b2) = beta;
    let mut h: CMat = fx.scale(larmor * phi.cos()) + fy.scale(larmor * phi.sin());
    h += CMat::identity(nf, nf) * (b0 - b2.scale(f * (f + 1.0) / 3.0)).scale(scattering_rate);
    h += (fx * fx) * b2.scale(scattering_rate);
    Ok(h)
}

// ---------------------------------------------------------------------------
// Rotating-frame dissipator
// ---------------------------------------------------------------------------

/// Dissipator superoperator averaged over one RF period of the rotating-frame
/// transformation `U_RF(t) = exp[-i w_RF t (Fz_upper - Fz_lower)]`.
///
/// `jumps` are master-equation jump operators in the lab frame (already
/// scaled by `sqrt(Gamma)`); the result contains feed and anticommutator
/// parts. A zero `rf_frequency` returns the plain lab-frame dissipator.
pub fn rotating_frame_dissipator(
    jumps: &[CMat],
    rf_frequency: f64,
    atom: &AtomConstants,
    basis: &HermitianBasis,
    n_phases: usize,
) -> Result<Superoperator> {
    let space = basis.space();
    let d = space.dimension();
    if !space.contains_manifold(atom.f_lower()) || !space.contains_manifold(atom.f_upper()) {
        return Err(Error::InvalidArgument(
            "rotating-frame dissipator needs the two-manifold space".into(),
        ));
    }
    let n = if rf_frequency == 0.0 { 1 } else { n_phases.max(1) };
    // generator of U_RF: s(F) m per ket, +1 on the upper manifold
    let gen: Vec<f64> = space
        .labels()
        .iter()
        .map(|&(f, m)| if (f - atom.f_upper()).abs() < 1e-9 { m } else { -m })
        .collect();
    let nb = basis.len();
    let mut acc = RMat::zeros(nb, nb);
    for k in 0..n {
        let theta = TAU * (k as f64) / (n as f64);
        let phases: Vec<Complex64> =
            gen.iter().map(|&g| Complex64::from_polar(1.0, theta * g)).collect();
        // U^dag L U with diagonal U = diag(exp(-i theta g))
        let rotated: Vec<CMat> = jumps
            .iter()
            .map(|l| {
                let mut m = l.clone();
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] *= phases[i] * phases[j].conj();
                    }
                }
                m
            })
            .collect();
        acc += Superoperator::dissipator_matrix(&rotated, basis);
    }
    Ok(Superoperator::from_matrix(acc.scale(1.0 / n as f64), basis.clone()))
}
