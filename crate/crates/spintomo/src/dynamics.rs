//! Lindblad generator assembly, superoperator exponentiation, and
//! piecewise-constant propagation in the Heisenberg (adjoint) and
//! Schrödinger pictures.
//!
//! Superoperators are stored as real matrices acting on operator coefficient
//! vectors in the orthonormal Hermitian basis `{E_alpha, I/sqrt(d)}`; any map
//! sending Hermitian to Hermitian operators is real-valued there.
//!
//! Heisenberg evolution composes segment exponentials in the order
//! `V_{t+dt} = exp(L dt) V_t` and reads observables as `(O_i| = (O_0| V_{t_i}`.
//! The decohering observables do not satisfy a time-local differential
//! equation, so the composition order matters; see the ordering regression
//! test below.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spin::HermitianBasis;
use crate::{CMat, RMat, RVec};

// ---------------------------------------------------------------------------
// Superoperator
// ---------------------------------------------------------------------------

/// A linear map on vectorized operators, in the Hermitian-basis representation.
#[derive(Clone, Debug)]
pub struct Superoperator {
    mat: RMat,
    basis: Arc<HermitianBasis>,
}

impl Superoperator {
    pub fn from_matrix(mat: RMat, basis: HermitianBasis) -> Self {
        Superoperator {
            mat,
            basis: Arc::new(basis),
        }
    }

    pub fn from_matrix_shared(mat: RMat, basis: Arc<HermitianBasis>) -> Self {
        Superoperator { mat, basis }
    }

    pub fn identity(basis: Arc<HermitianBasis>) -> Self {
        let n = basis.len();
        Superoperator {
            mat: RMat::identity(n, n),
            basis,
        }
    }

    pub fn matrix(&self) -> &RMat {
        &self.mat
    }

    pub fn basis(&self) -> &Arc<HermitianBasis> {
        &self.basis
    }

    /// Schrödinger-picture action on a state coefficient vector.
    pub fn apply_state(&self, r: &RVec) -> RVec {
        &self.mat * r
    }

    /// Heisenberg-picture (adjoint) action on an observable coefficient row.
    pub fn apply_observable(&self, o: &RVec) -> RVec {
        self.mat.tr_mul(o)
    }

    /// Generator matrix of the Hamiltonian part `-i (H_eff A - A H_eff^dag)`;
    /// `h_eff` may carry an anti-Hermitian (damping) part.
    pub fn hamiltonian_matrix(h_eff: &CMat, basis: &HermitianBasis) -> RMat {
        let hd = h_eff.adjoint();
        Self::project_map(basis, |b| {
            let m = h_eff * b - b * &hd;
            m * num_complex::Complex64::new(0.0, -1.0)
        })
    }

    /// Generator matrix of the jump feed `sum_mu L_mu A L_mu^dag`.
    pub fn feed_matrix(jumps: &[CMat], basis: &HermitianBasis) -> RMat {
        Self::project_map(basis, |b| {
            let d = b.nrows();
            let mut m = CMat::zeros(d, d);
            for l in jumps {
                m += l * b * l.adjoint();
            }
            m
        })
    }

    /// Full dissipator matrix `sum_mu (L_mu A L_mu^dag - {L_mu^dag L_mu, A}/2)`.
    pub fn dissipator_matrix(jumps: &[CMat], basis: &HermitianBasis) -> RMat {
        let d = basis.dimension();
        let mut anti = CMat::zeros(d, d);
        for l in jumps {
            anti += l.adjoint() * l;
        }
        anti = anti.scale(0.5);
        Self::project_map(basis, |b| {
            let mut m = CMat::zeros(d, d);
            for l in jumps {
                m += l * b * l.adjoint();
            }
            m -= &anti * b + b * &anti;
            m
        })
    }

    /// Project an operator map onto the Hermitian basis:
    /// `M_{jk} = Tr(E_j map(E_k))`.
    fn project_map(basis: &HermitianBasis, map: impl Fn(&CMat) -> CMat) -> RMat {
        let n = basis.len();
        let mut out = RMat::zeros(n, n);
        for k in 0..n {
            let mapped = map(basis.element(k));
            for j in 0..n {
                out[(j, k)] = crate::spin::trace_product_re(basis.element(j), &mapped);
            }
        }
        out
    }
}

/// Lindblad generator for an effective (possibly non-Hermitian) Hamiltonian
/// plus feed jump operators. The anti-Hermitian part of `h_eff` must carry
/// the full `-i/2 sum L^dag L` damping consistent with the feed terms (or
/// exceed it, when optical pumping out of the space is treated as loss).
pub fn lindblad_generator(
    h_eff: &CMat,
    feed_jumps: &[CMat],
    basis: &HermitianBasis,
) -> Result<Superoperator> {
    let d = basis.dimension();
    if h_eff.nrows() != d || h_eff.ncols() != d {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian is {}x{}, basis dimension {d}",
            h_eff.nrows(),
            h_eff.ncols()
        )));
    }
    for l in feed_jumps {
        if l.nrows() != d || l.ncols() != d {
            return Err(Error::InvalidArgument("jump operator dimension mismatch".into()));
        }
    }
    let mut m = Superoperator::hamiltonian_matrix(h_eff, basis);
    if !feed_jumps.is_empty() {
        m += Superoperator::feed_matrix(feed_jumps, basis);
    }
    Ok(Superoperator::from_matrix(m, basis.clone()))
}

/// Plain GKLS generator: Hermitian `h` plus jump operators carrying both
/// feed and anticommutator parts.
pub fn lindblad_generator_gkls(
    h: &CMat,
    jumps: &[CMat],
    basis: &HermitianBasis,
) -> Result<Superoperator> {
    let d = basis.dimension();
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::InvalidArgument("Hamiltonian dimension mismatch".into()));
    }
    let mut m = Superoperator::hamiltonian_matrix(h, basis);
    if !jumps.is_empty() {
        m += Superoperator::dissipator_matrix(jumps, basis);
    }
    Ok(Superoperator::from_matrix(m, basis.clone()))
}

/// `exp(L dt)` of a generator, as a superoperator.
pub fn segment_exponential(gen: &Superoperator, dt: f64) -> Result<Superoperator> {
    if dt <= 0.0 {
        return Err(Error::InvalidArgument("segment duration must be positive".into()));
    }
    let e = linalg::expm(&gen.matrix().scale(dt))?;
    Ok(Superoperator::from_matrix_shared(e, gen.basis().clone()))
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

/// Dissipation model of a plan, constant across segments.
#[derive(Clone)]
pub enum Dissipation {
    /// Closed evolution (possibly with anti-Hermitian damping in `h_eff`).
    None,
    /// Feed jumps of the master equation; damping lives in each segment's
    /// `h_eff` anti-Hermitian part.
    FeedJumps(Vec<CMat>),
    /// Plain GKLS jumps (feed + anticommutator); `h_eff` Hermitian.
    GklsJumps(Vec<CMat>),
    /// Precomputed dissipator superoperator matrix (feed + anticommutator),
    /// e.g. the rotating-frame average; `h_eff` Hermitian.
    AveragedSuperop(RMat),
}

/// One piecewise-constant control segment.
#[derive(Clone)]
pub struct Segment {
    pub h_eff: CMat,
    pub duration: f64,
}

/// A piecewise-constant propagation plan over `[0, T]`.
pub struct PropagationPlan {
    pub segments: Vec<Segment>,
    pub dissipation: Dissipation,
    /// Sub-step used for exponential powering and output sampling.
    pub substep: f64,
    pub basis: Arc<HermitianBasis>,
}

impl PropagationPlan {
    pub fn new(
        segments: Vec<Segment>,
        dissipation: Dissipation,
        substep: f64,
        basis: Arc<HermitianBasis>,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("plan has no segments".into()));
        }
        if substep <= 0.0 {
            return Err(Error::InvalidArgument("substep must be positive".into()));
        }
        for s in &segments {
            if s.duration <= 0.0 {
                return Err(Error::InvalidArgument("segment durations must be positive".into()));
            }
            let steps = s.duration / substep;
            if (steps - steps.round()).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "segment duration {} is not a multiple of the substep {substep}",
                    s.duration
                )));
            }
        }
        Ok(PropagationPlan {
            segments,
            dissipation,
            substep,
            basis,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn n_samples(&self) -> usize {
        (self.total_time() / self.substep).round() as usize
    }

    fn dissipator_matrix(&self) -> Option<RMat> {
        match &self.dissipation {
            Dissipation::None => None,
            Dissipation::FeedJumps(j) => Some(Superoperator::feed_matrix(j, &self.basis)),
            Dissipation::GklsJumps(j) => Some(Superoperator::dissipator_matrix(j, &self.basis)),
            Dissipation::AveragedSuperop(m) => Some(m.clone()),
        }
    }

    /// Per-segment sub-step exponentials, computed in parallel.
    fn segment_exponentials(&self) -> Result<Vec<RMat>> {
        let diss = self.dissipator_matrix();
        self.segments
            .par_iter()
            .map(|seg| {
                let mut g = Superoperator::hamiltonian_matrix(&seg.h_eff, &self.basis);
                if let Some(dm) = &diss {
                    g += dm;
                }
                linalg::expm(&g.scale(self.substep))
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Propagation outputs
// ---------------------------------------------------------------------------

/// A time series of operator coefficient vectors on the sub-step grid
/// `t_i = i dt`, `i = 1..=n`.
pub struct CoefficientSeries {
    pub times: Vec<f64>,
    /// Row `i` holds the coefficients at `times[i]`.
    pub coeffs: RMat,
    pub basis: Arc<HermitianBasis>,
}

impl CoefficientSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn operator(&self, i: usize) -> CMat {
        let row = self.coeffs.row(i).transpose();
        self.basis.assemble(&row)
    }

    /// Expectation values `Tr(A_i rho)` against a fixed state's coefficients.
    pub fn expectations(&self, state_coeffs: &RVec) -> RVec {
        &self.coeffs * state_coeffs
    }

    /// Trace of each operator in the series.
    pub fn traces(&self) -> RVec {
        let d = self.basis.dimension() as f64;
        self.coeffs.column(self.coeffs.ncols() - 1).scale(d.sqrt()).into_owned()
    }
}

/// Heisenberg (adjoint-map) propagation of an observable through the plan.
///
/// Returns the series `(O_i| = (O_0| V_{t_i}` at every sub-step. The map is
/// built by right-composition of segment exponentials, never by integrating
/// a time-local adjoint equation.
pub fn propagate_observables(plan: &PropagationPlan, o0: &CMat) -> Result<CoefficientSeries> {
    let basis = &plan.basis;
    let nb = basis.len();
    let o0c = basis.project(o0);
    let exps = plan.segment_exponentials()?;
    let n = plan.n_samples();
    let mut coeffs = RMat::zeros(n, nb);
    let mut times = Vec::with_capacity(n);
    // V_t accumulates new segment exponentials on the left; within a segment,
    // (O_0| e^{L (t - t_k)} V_{t_k} = (V_{t_k}^T e^{L^T (t - t_k)} o_0)^T.
    let mut v = RMat::identity(nb, nb);
    let mut i = 0usize;
    let mut t_seg_start = 0.0;
    for (seg, e1) in plan.segments.iter().zip(&exps) {
        let n_sub = (seg.duration / plan.substep).round() as usize;
        let e1t = e1.transpose();
        let mut u = o0c.clone();
        for j in 0..n_sub {
            u = &e1t * u;
            coeffs.row_mut(i).copy_from(&v.tr_mul(&u).transpose());
            times.push(t_seg_start + (j + 1) as f64 * plan.substep);
            i += 1;
        }
        if !std::ptr::eq(seg, plan.segments.last().unwrap()) {
            v = linalg::matrix_power(e1, n_sub) * v;
        }
        t_seg_start += seg.duration;
    }
    Ok(CoefficientSeries {
        times,
        coeffs,
        basis: basis.clone(),
    })
}

/// Schrödinger-picture propagation of a density matrix through the plan.
///
/// Errors if the trace grows beyond `1 + 1e-8` anywhere along the series.
pub fn propagate_state(plan: &PropagationPlan, rho0: &CMat) -> Result<CoefficientSeries> {
    let basis = &plan.basis;
    let nb = basis.len();
    let exps = plan.segment_exponentials()?;
    let n = plan.n_samples();
    let mut coeffs = RMat::zeros(n, nb);
    let mut times = Vec::with_capacity(n);
    let mut r = basis.project(rho0);
    let trace0 = r[nb - 1] * (basis.dimension() as f64).sqrt();
    let mut i = 0usize;
    let mut t_seg_start = 0.0;
    for (seg, e1) in plan.segments.iter().zip(&exps) {
        let n_sub = (seg.duration / plan.substep).round() as usize;
        for j in 0..n_sub {
            r = e1 * r;
            let tr = r[nb - 1] * (basis.dimension() as f64).sqrt();
            if tr > trace0 + 1e-8 {
                return Err(Error::Numerical(format!(
                    "trace grew to {tr} at t = {}",
                    t_seg_start + (j + 1) as f64 * plan.substep
                )));
            }
            coeffs.row_mut(i).copy_from(&r.transpose());
            times.push(t_seg_start + (j + 1) as f64 * plan.substep);
            i += 1;
        }
        t_seg_start += seg.duration;
    }
    Ok(CoefficientSeries {
        times,
        coeffs,
        basis: basis.clone(),
    })
}
