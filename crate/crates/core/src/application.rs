//! Dicke-state preparation: the algebraic dark state of the full
//! Hamiltonian, and holonomic preparation along the `W'` path.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fock::{dicke_vector, BasisState, Ladder, Mode, Occupation, SectorBasis, StateVector};
use crate::holonomy::{
    w_prime_unitary, ClosedForm, HolonomyResult, Method, PathProgram, PathSegment, Transporter,
};
use crate::linalg::{c, CVec, Mat2, C64};
use crate::model::{ControlParams, ModelConfig};

/// Paper-reported preparation path `W'(m_a, m_b; theta_1)`.
pub const DICKE_M_A: i64 = -24;
pub const DICKE_M_B: i64 = 1;
pub const DICKE_THETA_1: f64 = 0.669;

/// Initial product state: both A atoms in level 1.
pub const INITIAL_STATE: BasisState = BasisState::new(2, 0, 0, 0, 0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EStateSpec {
    pub config: ModelConfig,
    pub params: ControlParams,
}

type Poly = BTreeMap<Occupation, C64>;

/// Apply `sum_k coeff_k word_k` to a sparse occupation-basis state.
fn apply_sum(terms: &[(C64, &[Ladder])], state: &Poly) -> Poly {
    let mut out = Poly::new();
    for (occ, amp) in state {
        for (coeff, word) in terms {
            if let Some((next, factor)) = crate::fock::apply_word(word, occ) {
                *out.entry(next).or_insert(c(0.0, 0.0)) += *coeff * *amp * factor;
            }
        }
    }
    out.retain(|_, v| *v != c(0.0, 0.0));
    out
}

/// The zero-energy state
/// `[Omega_a a0+ - g c a1+]^p [Omega_b b0+ - g c b1+]^(n-p) (c+)^p |vac>`,
/// unnormalised. It is built in the unconstrained occupation basis and
/// lands in the sector only after the last factor.
pub fn build_e_state(spec: &EStateSpec) -> Result<StateVector> {
    let sector = spec.config.sector;
    let g = c(spec.config.g, 0.0);
    let a = spec.params.omega_a();
    let b = spec.params.omega_b();
    let ua: [Ladder; 1] = [Ladder::raise(Mode::A0)];
    let va: [Ladder; 2] = [Ladder::lower(Mode::C), Ladder::raise(Mode::A1)];
    let ub: [Ladder; 1] = [Ladder::raise(Mode::B0)];
    let vb: [Ladder; 2] = [Ladder::lower(Mode::C), Ladder::raise(Mode::B1)];
    let photon: [Ladder; 1] = [Ladder::raise(Mode::C)];

    let mut state = Poly::new();
    state.insert(Occupation::VACUUM, c(1.0, 0.0));
    for _ in 0..sector.p() {
        state = apply_sum(&[(c(1.0, 0.0), &photon)], &state);
    }
    for _ in 0..sector.size_b() {
        state = apply_sum(&[(b, &ub), (-g, &vb)], &state);
    }
    for _ in 0..sector.p() {
        state = apply_sum(&[(a, &ua), (-g, &va)], &state);
    }

    let basis = SectorBasis::enumerate(sector);
    let mut amplitudes = CVec::zeros(basis.len());
    for (occ, amp) in &state {
        let s = BasisState::from_occupation(occ);
        let i = basis
            .index_of(&s)
            .filter(|_| occ.population_a() == sector.p() && occ.population_b() == sector.size_b())
            .ok_or_else(|| {
                Error::NonConserving(alloc::format!("E-state term {s} outside the sector"))
            })?;
        amplitudes[i] += *amp;
    }
    Ok(StateVector {
        config: sector,
        amplitudes,
    })
}

/// Restriction to the zero-photon states.
pub fn zero_photon_part(basis: &SectorBasis, psi: &StateVector) -> StateVector {
    let mut v = psi.amplitudes.clone();
    for (i, s) in basis.states().iter().enumerate() {
        if s.n_c != 0 {
            v[i] = c(0.0, 0.0);
        }
    }
    StateVector {
        config: psi.config,
        amplitudes: v,
    }
}

/// `|<dicke|psi>|` and its square, for a normalisable `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    pub amplitude: f64,
    pub squared: f64,
}

pub fn dicke_overlap(basis: &SectorBasis, psi: &StateVector) -> Result<Fidelity> {
    basis.check(psi.config)?;
    let psi = psi.normalized()?;
    let target = dicke_vector(basis);
    let amplitude = target.amplitudes.dotc(&psi.amplitudes).norm();
    Ok(Fidelity {
        amplitude,
        squared: amplitude * amplitude,
    })
}

/// Squared overlap with the normalised Dicke state.
pub fn dicke_fidelity(basis: &SectorBasis, psi: &StateVector) -> Result<f64> {
    dicke_overlap(basis, psi).map(|f| f.squared)
}

/// Initial and target states expressed in the dark frames at the ends of a
/// `W'` path (theta = 0 and theta = pi/4).
#[derive(Debug, Clone)]
pub struct DickeTask {
    basis: SectorBasis,
    /// Initial state in the theta = 0 dark frame.
    pub initial: [C64; 2],
    /// Dicke target in the theta = pi/4 dark frame.
    pub target: [C64; 2],
    /// Weight of the initial/target states outside the dark frames.
    pub leakage: f64,
    frame_out: crate::subspace::Frame,
}

impl DickeTask {
    pub fn new(config: ModelConfig) -> Result<Self> {
        let t = Transporter::new(config);
        let frames = t.transport_fixed(&PathProgram::w_prime(0, 0, 0.0)?, 1)?;
        let basis = t.space().model().basis().clone();
        let psi0 = basis.ket(&INITIAL_STATE).ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let target = dicke_vector(&basis);
        let cin = frames.frame_in.columns().adjoint() * &psi0.amplitudes;
        let cout = frames.frame_out.columns().adjoint() * &target.amplitudes;
        let leakage = (1.0 - cin.norm_squared())
            .abs()
            .max((1.0 - cout.norm_squared()).abs());
        Ok(Self {
            basis,
            initial: [cin[0], cin[1]],
            target: [cout[0], cout[1]],
            leakage,
            frame_out: frames.frame_out,
        })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    /// `|<target| U |initial>|^2`.
    pub fn fidelity(&self, u: &Mat2) -> f64 {
        let [i0, i1] = self.initial;
        let [t0, t1] = self.target;
        let out0 = u[(0, 0)] * i0 + u[(0, 1)] * i1;
        let out1 = u[(1, 0)] * i0 + u[(1, 1)] * i1;
        (t0.conj() * out0 + t1.conj() * out1).norm_sqr()
    }

    /// Final state in the sector basis.
    pub fn final_state(&self, u: &Mat2) -> StateVector {
        let [i0, i1] = self.initial;
        let coeffs = CVec::from_column_slice(&[
            u[(0, 0)] * i0 + u[(0, 1)] * i1,
            u[(1, 0)] * i0 + u[(1, 1)] * i1,
        ]);
        StateVector {
            config: self.basis.config(),
            amplitudes: self.frame_out.columns() * coeffs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DickePreparation {
    pub holonomy: HolonomyResult,
    pub state: StateVector,
    pub fidelity: Fidelity,
}

/// Run `W'(m_a, m_b; theta_1)` from `|2000,0>` and compare with the Dicke state.
pub fn prepare_dicke(
    config: ModelConfig,
    method: Method,
    m_a: i64,
    m_b: i64,
    theta_1: f64,
) -> Result<DickePreparation> {
    let task = DickeTask::new(config)?;
    let holonomy = crate::holonomy::compose_w_prime(config, method, m_a, m_b, theta_1)?;
    let state = task.final_state(&holonomy.u);
    let fidelity = dicke_overlap(&task.basis, &state)?;
    Ok(DickePreparation {
        holonomy,
        state,
        fidelity,
    })
}

/// The reported preparation, by transport in the (4,2) sector.
pub fn prepare_dicke_holonomic(config: ModelConfig) -> Result<DickePreparation> {
    prepare_dicke(
        config,
        Method::Transport,
        DICKE_M_A,
        DICKE_M_B,
        DICKE_THETA_1,
    )
}

/// Baseline without the phase loop: the bare ramp `C_theta(pi/4, 0)`.
pub fn prepare_dicke_without_loop(config: ModelConfig, method: Method) -> Result<DickePreparation> {
    let task = DickeTask::new(config)?;
    let path = PathProgram::new(alloc::vec![PathSegment::c_theta(
        core::f64::consts::FRAC_PI_4,
        0.0
    )])?;
    let holonomy = match method {
        Method::ClosedForm => ClosedForm::new(config.sector)?.program(&path)?,
        Method::Transport => Transporter::new(config).transport(&path)?,
    };
    let state = task.final_state(&holonomy.u);
    let fidelity = dicke_overlap(&task.basis, &state)?;
    Ok(DickePreparation {
        holonomy,
        state,
        fidelity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeCandidate {
    pub m_a: i64,
    pub m_b: i64,
    pub theta_1: f64,
    pub fidelity: f64,
}

/// Best first; ties go to smaller total winding, then lexicographic order.
pub fn rank_order(x: &DickeCandidate, y: &DickeCandidate) -> Ordering {
    y.fidelity
        .total_cmp(&x.fidelity)
        .then((x.m_a.abs() + x.m_b.abs()).cmp(&(y.m_a.abs() + y.m_b.abs())))
        .then(x.m_a.cmp(&y.m_a))
        .then(x.m_b.cmp(&y.m_b))
        .then(x.theta_1.total_cmp(&y.theta_1))
}

/// Closed-form `W'` fidelity at one grid point.
pub fn evaluate_candidate(task: &DickeTask, m_a: i64, m_b: i64, theta_1: f64) -> DickeCandidate {
    DickeCandidate {
        m_a,
        m_b,
        theta_1,
        fidelity: task.fidelity(&w_prime_unitary(m_a, m_b, theta_1)),
    }
}

/// Exhaustive closed-form search over windings in `m_range` for both
/// subensembles and the given theta grid, ranked by fidelity.
pub fn search_dicke_path(
    task: &DickeTask,
    m_range: (i64, i64),
    theta_grid: &[f64],
) -> Vec<DickeCandidate> {
    let mut out = Vec::new();
    for m_a in m_range.0..=m_range.1 {
        for m_b in m_range.0..=m_range.1 {
            for &t in theta_grid {
                out.push(evaluate_candidate(task, m_a, m_b, t));
            }
        }
    }
    out.sort_by(rank_order);
    out
}

/// Keep only the best theta for every winding pair (input must be ranked).
pub fn best_per_winding(ranked: &[DickeCandidate]) -> Vec<DickeCandidate> {
    let mut seen = alloc::collections::BTreeSet::new();
    ranked
        .iter()
        .filter(|r| seen.insert((r.m_a, r.m_b)))
        .copied()
        .collect()
}
