//! Time-dependent evolution along scheduled control paths.
//!
//! The Hamiltonian is sampled at the midpoint of every step and applied as an
//! exact exponential, so each step is unitary and the scheme is second order.
//! Evolution runs either in the full sector (`H_g + H_Omega`) or restricted
//! to the Zeno frame (the projected drive alone, i.e. the infinite-`g` limit).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, TAU};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::application::{DickeTask, DICKE_M_A, DICKE_M_B, DICKE_THETA_1, INITIAL_STATE};
use crate::error::{Error, Result};
use crate::fock::{dicke_vector, SectorConfig, StateVector};
use crate::holonomy::{PathProgram, PathSegment, Transporter};
use crate::linalg::{expm_hermitian, CMat, CVec};
use crate::model::{ControlParams, Model, ModelConfig};
use crate::subspace::ZenoSpace;

/// Default time resolution: steps per unit of `1/Omega`.
pub const DEFAULT_STEPS_PER_UNIT_TIME: f64 = 500.0;
/// `T = DEFAULT_TIME_SCALE / g`.
pub const DEFAULT_TIME_SCALE: f64 = 8000.0;
pub const NORM_TOL: f64 = 1e-8;

/// Time dependence of the ramp parameter inside one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampProfile {
    /// `s = x`.
    Linear,
    /// `s = x^3 (10 - 15 x + 6 x^2)`: zero velocity and acceleration at the
    /// segment ends.
    #[default]
    Smootherstep,
}

impl RampProfile {
    pub fn at(self, x: f64) -> f64 {
        match self {
            RampProfile::Linear => x,
            RampProfile::Smootherstep => x * x * x * (10.0 + x * (-15.0 + 6.0 * x)),
        }
    }
}

/// How the total time is split between segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Allocation {
    /// Proportional to the parameter arc of each segment.
    Proportional,
    /// Proportional to the square root of the arc.
    #[default]
    SqrtArc,
    /// Equal time per segment.
    Equal,
}

/// Parameter arc used for time allocation: `|dtheta|` for ramps and
/// `2 pi (|m_a| + |m_b|)` for loops.
pub fn allocation_arc(seg: &PathSegment) -> f64 {
    match *seg {
        PathSegment::ThetaRamp {
            theta_from,
            theta_to,
        } => (theta_to - theta_from).abs(),
        PathSegment::PhiLoop { m_a, m_b, .. } => {
            TAU * (m_a.unsigned_abs() + m_b.unsigned_abs()) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    path: PathProgram,
    durations: Vec<f64>,
    profile: RampProfile,
}

impl Schedule {
    pub fn new(
        path: PathProgram,
        total_time: f64,
        allocation: Allocation,
        profile: RampProfile,
    ) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::InvalidSchedule(alloc::format!(
                "total time {total_time} must be positive"
            )));
        }
        let weights: Vec<f64> = path
            .segments()
            .iter()
            .map(|s| match allocation {
                Allocation::Proportional => allocation_arc(s),
                Allocation::SqrtArc => allocation_arc(s).sqrt(),
                Allocation::Equal => 1.0,
            })
            .collect();
        let sum: f64 = weights.iter().sum();
        let durations = if sum > 0.0 {
            weights.iter().map(|w| total_time * w / sum).collect()
        } else {
            alloc::vec![total_time / weights.len().max(1) as f64; weights.len()]
        };
        Self::with_durations(path, durations, profile)
    }

    pub fn with_durations(
        path: PathProgram,
        durations: Vec<f64>,
        profile: RampProfile,
    ) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::InvalidSchedule("empty path".into()));
        }
        if durations.len() != path.segments().len() {
            return Err(Error::InvalidSchedule(alloc::format!(
                "{} durations for {} segments",
                durations.len(),
                path.segments().len()
            )));
        }
        if durations.iter().any(|d| !(d.is_finite() && *d >= 0.0))
            || durations.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::InvalidSchedule(
                "durations must be non-negative with a positive sum".into(),
            ));
        }
        Ok(Self {
            path,
            durations,
            profile,
        })
    }

    pub fn path(&self) -> &PathProgram {
        &self.path
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn profile(&self) -> RampProfile {
        self.profile
    }

    pub fn total_time(&self) -> f64 {
        self.durations.iter().sum()
    }

    /// Control parameters at time `t` (clamped to `[0, T]`).
    pub fn params_at(&self, t: f64) -> ControlParams {
        let mut start = 0.0;
        let last = self.durations.len() - 1;
        for (i, (&d, seg)) in self.durations.iter().zip(self.path.segments()).enumerate() {
            if t < start + d || i == last {
                let x = if d > 0.0 {
                    ((t - start) / d).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                return seg.params_at(self.profile.at(x));
            }
            start += d;
        }
        unreachable!("schedule has at least one segment")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Full,
    Zeno,
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub final_state: StateVector,
    /// Squared overlap with the target.
    pub fidelity: f64,
    pub norm_drift: f64,
    pub steps: usize,
}

/// Propagator for one sector and one value of `g`.
#[derive(Debug, Clone)]
pub struct Evolver {
    model: Model,
    zeno: ZenoSpace,
    hop_a: CMat,
    hop_b: CMat,
}

impl Evolver {
    pub fn new(config: ModelConfig) -> Self {
        let model = Model::new(config);
        let zeno = ZenoSpace::new(&model);
        let z = zeno.columns();
        let hop_a = z.adjoint() * model.hop_a() * z;
        let hop_b = z.adjoint() * model.hop_b() * z;
        Self {
            model,
            zeno,
            hop_a,
            hop_b,
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn hamiltonian(&self, space: Space, params: &ControlParams) -> CMat {
        match space {
            Space::Full => self.model.hamiltonian(params),
            Space::Zeno => {
                let raise = &self.hop_a * params.omega_a() + &self.hop_b * params.omega_b();
                &raise + raise.adjoint()
            }
        }
    }

    /// Evolve `psi0` over the schedule with `steps` midpoint steps in total,
    /// distributed over segments in proportion to their durations.
    pub fn evolve(
        &self,
        schedule: &Schedule,
        psi0: &StateVector,
        target: &StateVector,
        steps: usize,
        space: Space,
    ) -> Result<EvolutionReport> {
        self.model.basis().check(psi0.config)?;
        self.model.basis().check(target.config)?;
        let psi0 = psi0.normalized()?;
        let z = self.zeno.columns();
        let mut psi: CVec = match space {
            Space::Full => psi0.amplitudes.clone(),
            Space::Zeno => {
                let inside = z.adjoint() * &psi0.amplitudes;
                if (inside.norm() - 1.0).abs() > NORM_TOL {
                    return Err(Error::Evolution(
                        "initial state is not inside the Zeno subspace".into(),
                    ));
                }
                inside
            }
        };
        let total = schedule.total_time();
        let mut start = 0.0;
        let mut used = 0;
        for &d in schedule.durations() {
            let n = ((steps as f64 * d / total).ceil() as usize).max(1);
            let dt = d / n as f64;
            for k in 0..n {
                let t = start + (k as f64 + 0.5) * dt;
                let h = self.hamiltonian(space, &schedule.params_at(t));
                psi = expm_hermitian(&h, dt) * psi;
            }
            used += n;
            start += d;
        }
        let amplitudes = match space {
            Space::Full => psi,
            Space::Zeno => z * psi,
        };
        let norm_drift = (amplitudes.norm() - 1.0).abs();
        if norm_drift.is_nan() || norm_drift > NORM_TOL {
            return Err(Error::Evolution(alloc::format!(
                "norm drifted by {norm_drift:e}"
            )));
        }
        let target = target.normalized()?;
        let fidelity = target.amplitudes.dotc(&amplitudes).norm_sqr();
        let final_state = StateVector {
            config: psi0.config,
            amplitudes,
        };
        Ok(EvolutionReport {
            final_state,
            fidelity,
            norm_drift,
            steps: used,
        })
    }

    /// Double the step count until the fidelity changes by at most `tol`.
    #[allow(clippy::too_many_arguments)]
    pub fn evolve_converged(
        &self,
        schedule: &Schedule,
        psi0: &StateVector,
        target: &StateVector,
        steps: usize,
        space: Space,
        tol: f64,
        max_doublings: usize,
    ) -> Result<(EvolutionReport, f64)> {
        let mut report = self.evolve(schedule, psi0, target, steps, space)?;
        let mut change = f64::INFINITY;
        for i in 0..max_doublings {
            let finer = self.evolve(schedule, psi0, target, steps << (i + 1), space)?;
            change = (finer.fidelity - report.fidelity).abs();
            report = finer;
            if change <= tol {
                return Ok((report, change));
            }
        }
        Err(Error::Evolution(alloc::format!(
            "fidelity still changing by {change:e} after {} steps",
            report.steps
        )))
    }
}

/// Free-function form of [`Evolver::evolve`].
pub fn evolve(
    config: ModelConfig,
    schedule: &Schedule,
    psi0: &StateVector,
    target: &StateVector,
    steps: usize,
    space: Space,
) -> Result<EvolutionReport> {
    Evolver::new(config).evolve(schedule, psi0, target, steps, space)
}

/// Settings for the fidelity-versus-g comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub sector: SectorConfig,
    /// Main path, traversed from `|2000,0>`.
    pub path: PathProgram,
    /// `T = time_scale / g`.
    pub time_scale: f64,
    pub steps_per_unit_time: f64,
    pub allocation: Allocation,
    pub profile: RampProfile,
}

impl SweepSettings {
    pub fn new(sector: SectorConfig) -> Result<Self> {
        Ok(Self {
            sector,
            path: PathProgram::w_prime(DICKE_M_A, DICKE_M_B, DICKE_THETA_1)?,
            time_scale: DEFAULT_TIME_SCALE,
            steps_per_unit_time: DEFAULT_STEPS_PER_UNIT_TIME,
            allocation: Allocation::default(),
            profile: RampProfile::default(),
        })
    }

    pub fn total_time(&self, g: f64) -> f64 {
        self.time_scale / g
    }

    pub fn steps(&self, g: f64) -> usize {
        (self.steps_per_unit_time * self.total_time(g)).ceil() as usize
    }

    /// Bare ramp used as the baseline.
    pub fn baseline_path() -> PathProgram {
        PathProgram::new(alloc::vec![PathSegment::c_theta(FRAC_PI_4, 0.0)]).expect("valid ramp")
    }
}

/// One independent evolution of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepColumn {
    Full,
    Zeno,
    NoPhi,
    /// Full space with equal time per segment.
    FullEqualTime,
}

impl SweepColumn {
    pub const ALL: [SweepColumn; 4] = [
        SweepColumn::Full,
        SweepColumn::Zeno,
        SweepColumn::NoPhi,
        SweepColumn::FullEqualTime,
    ];
}

/// Fidelity of one sweep column at one `g`.
pub fn sweep_cell(settings: &SweepSettings, g: f64, column: SweepColumn) -> Result<f64> {
    let config = ModelConfig::new(settings.sector, g)?;
    let evolver = Evolver::new(config);
    let basis = evolver.model().basis();
    let psi0 = basis.ket(&INITIAL_STATE).ok_or(Error::DimensionMismatch {
        expected: 1,
        found: 0,
    })?;
    let target = dicke_vector(basis);
    let t = settings.total_time(g);
    let (path, allocation, space) = match column {
        SweepColumn::Full => (settings.path.clone(), settings.allocation, Space::Full),
        SweepColumn::Zeno => (settings.path.clone(), settings.allocation, Space::Zeno),
        SweepColumn::NoPhi => (
            SweepSettings::baseline_path(),
            settings.allocation,
            Space::Full,
        ),
        SweepColumn::FullEqualTime => (settings.path.clone(), Allocation::Equal, Space::Full),
    };
    let schedule = Schedule::new(path, t, allocation, settings.profile)?;
    Ok(evolver
        .evolve(&schedule, &psi0, &target, settings.steps(g), space)?
        .fidelity)
}

/// Adiabatic-limit fidelity of the main path, independent of `g`.
pub fn holonomic_fidelity(settings: &SweepSettings) -> Result<f64> {
    let config = ModelConfig::new(settings.sector, 1.0)?;
    let task = DickeTask::new(config)?;
    let u = Transporter::new(config).transport(&settings.path)?.u;
    Ok(task.fidelity(&u))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub g: f64,
    pub fidelity_full: f64,
    pub fidelity_zeno: f64,
    pub fidelity_holonomic: f64,
    pub fidelity_no_phi: f64,
    pub fidelity_full_equal_time: f64,
}

impl SweepRow {
    /// Assemble a row from cells in [`SweepColumn::ALL`] order.
    pub fn from_cells(g: f64, holonomic: f64, cells: [f64; 4]) -> Self {
        SweepRow {
            g,
            fidelity_full: cells[0],
            fidelity_zeno: cells[1],
            fidelity_holonomic: holonomic,
            fidelity_no_phi: cells[2],
            fidelity_full_equal_time: cells[3],
        }
    }
}

/// Sequential sweep; see the CLI for the parallel driver.
pub fn fidelity_sweep(settings: &SweepSettings, g_list: &[f64]) -> Result<Vec<SweepRow>> {
    let holonomic = holonomic_fidelity(settings)?;
    g_list
        .iter()
        .map(|&g| {
            let mut cells = [0.0; 4];
            for (cell, column) in cells.iter_mut().zip(SweepColumn::ALL) {
                *cell = sweep_cell(settings, g, column)?;
            }
            Ok(SweepRow::from_cells(g, holonomic, cells))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SectorBasis;
    use crate::linalg::c;
    use nalgebra::SymmetricEigen;

    fn four_two(g: f64) -> ModelConfig {
        ModelConfig::new(SectorConfig::new(4, 2).unwrap(), g).unwrap()
    }

    #[test]
    fn profiles() {
        for p in [RampProfile::Linear, RampProfile::Smootherstep] {
            assert_eq!(p.at(0.0), 0.0);
            assert_eq!(p.at(1.0), 1.0);
            assert!((p.at(0.5) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn allocations_sum_to_total() {
        let path = PathProgram::w_prime(-24, 1, 0.669).unwrap();
        for a in [
            Allocation::Proportional,
            Allocation::SqrtArc,
            Allocation::Equal,
        ] {
            let s = Schedule::new(path.clone(), 400.0, a, RampProfile::Linear).unwrap();
            assert!((s.total_time() - 400.0).abs() < 1e-9);
        }
        let eq =
            Schedule::new(path.clone(), 300.0, Allocation::Equal, RampProfile::Linear).unwrap();
        assert_eq!(eq.durations(), &[100.0, 100.0, 100.0]);
        assert!(Schedule::new(path.clone(), 0.0, Allocation::Equal, RampProfile::Linear).is_err());
        assert!(Schedule::new(
            PathProgram::empty(),
            1.0,
            Allocation::Equal,
            RampProfile::Linear
        )
        .is_err());
        assert!(Schedule::with_durations(path, alloc::vec![1.0], RampProfile::Linear).is_err());
    }

    #[test]
    fn schedule_endpoints() {
        let path = PathProgram::w_prime(-24, 1, 0.669).unwrap();
        let s = Schedule::new(
            path,
            10.0,
            Allocation::Proportional,
            RampProfile::Smootherstep,
        )
        .unwrap();
        assert_eq!(s.params_at(0.0).theta, 0.0);
        assert!((s.params_at(10.0).theta - FRAC_PI_4).abs() < 1e-15);
        let mid = s.durations()[0] + 0.5 * s.durations()[1];
        let p = s.params_at(mid);
        assert!((p.theta - 0.669).abs() < 1e-15);
        assert!((p.phi_a + 24.0 * core::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn static_eigenvector_only_gains_a_phase() {
        // theta fixed: a ramp from 0.4 to 0.4 is a time-independent H
        let config = four_two(3.0);
        let ev = Evolver::new(config);
        let path = PathProgram::new(alloc::vec![PathSegment::c_theta(0.4, 0.4)]).unwrap();
        let s = Schedule::new(path, 5.0, Allocation::Equal, RampProfile::Linear).unwrap();
        let h = ev.model().hamiltonian(&ControlParams::new(0.4, 0.0, 0.0));
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors.column(3).into_owned();
        let psi = StateVector {
            config: config.sector,
            amplitudes: v.clone(),
        };
        let r = ev.evolve(&s, &psi, &psi, 50, Space::Full).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        let phase = C64exp(-eig.eigenvalues[3] * 5.0);
        assert!((r.final_state.amplitudes - v * phase).norm() < 1e-10);
        assert!(r.norm_drift < 1e-12);
    }

    #[allow(non_snake_case)]
    fn C64exp(x: f64) -> crate::linalg::C64 {
        c(x.cos(), x.sin())
    }

    #[test]
    fn zeno_evolution_rejects_leaky_initial_state() {
        let config = four_two(3.0);
        let basis = SectorBasis::enumerate(config.sector);
        let psi = basis
            .ket(&crate::fock::BasisState::new(0, 1, 0, 0, 1))
            .unwrap();
        let path = SweepSettings::baseline_path();
        let s = Schedule::new(path, 5.0, Allocation::Equal, RampProfile::Linear).unwrap();
        let r = Evolver::new(config).evolve(&s, &psi, &psi, 10, Space::Zeno);
        assert!(matches!(r, Err(Error::Evolution(_))));
    }

    #[test]
    fn slower_zeno_evolution_approaches_holonomy() {
        // g = 20: T = 200 -> 800 -> 3200. The residual oscillates with T, so
        // not every 4x step is an improvement (400 -> 1600 is not).
        let mut settings = SweepSettings::new(SectorConfig::new(4, 2).unwrap()).unwrap();
        settings.steps_per_unit_time = 50.0;
        let hol = holonomic_fidelity(&settings).unwrap();
        let mut gaps = Vec::new();
        for scale in [4000.0, 16000.0, 64000.0] {
            settings.time_scale = scale;
            gaps.push((hol - sweep_cell(&settings, 20.0, SweepColumn::Zeno).unwrap()).abs());
        }
        assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
    }

    #[test]
    fn bare_ramp_tracks_the_dark_state() {
        // slow ramp in the Zeno limit reproduces the transported state
        let mut settings = SweepSettings::new(SectorConfig::new(4, 2).unwrap()).unwrap();
        settings.path = SweepSettings::baseline_path();
        settings.steps_per_unit_time = 20.0;
        let hol = holonomic_fidelity(&settings).unwrap();
        let zeno = sweep_cell(&settings, 20.0, SweepColumn::Zeno).unwrap();
        assert!((hol - zeno).abs() < 1e-3, "{hol} {zeno}");
    }
}
