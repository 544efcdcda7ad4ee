//! Non-Abelian holonomies of the two-dimensional dark space.
//!
//! Holonomies are 2x2 unitaries in the gauge-fixed dark frames at the path
//! endpoints; for n=4, p=2 those frames are the normalised closed-form
//! states (D1, D2). They are physical only up to a global phase, so
//! comparisons use [`projective_distance2`](crate::linalg::projective_distance2).

mod closed;
mod path;
mod transport;

pub use closed::{
    c_y, phi_coeffs, phi_unitary, theta_coeffs, theta_unitary, w_prime_unitary, w_unitary,
    ClosedFormCoeffs,
};
pub use path::{parse_angle, parse_path, ParseError, PathProgram, PathSegment, CONTINUITY_TOL};
pub use transport::{
    transport, TransportOptions, Transporter, DEFAULT_INITIAL_STEPS, DEFAULT_MAX_STEPS,
    DEFAULT_TOLERANCE,
};

use core::f64::consts::FRAC_PI_4;

use crate::error::Result;
use crate::fock::SectorConfig;
use crate::linalg::{from_mat2, unitarity_deviation, Mat2};
use crate::model::{ControlParams, ModelConfig};
use crate::subspace::{DarkSpace, Frame};

#[derive(Debug, Clone)]
pub struct HolonomyResult {
    pub u: Mat2,
    pub frame_in: Frame,
    pub frame_out: Frame,
    pub steps_used: usize,
    pub est_error: f64,
}

impl HolonomyResult {
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&from_mat2(&self.u))
    }
}

/// Closed forms with their endpoint frames.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    space: DarkSpace,
}

impl ClosedForm {
    pub fn new(sector: SectorConfig) -> Result<Self> {
        closed::require_four_two(sector)?;
        let config = ModelConfig::new(sector, 1.0)?;
        Ok(Self {
            space: DarkSpace::new(config),
        })
    }

    fn frame(&self, theta: f64) -> Result<Frame> {
        let g = self
            .space
            .gauge_coefficients(&ControlParams::new(theta, 0.0, 0.0))?;
        Ok(Frame::new(self.space.zeno().columns() * g))
    }

    fn result(&self, u: Mat2, theta_in: f64, theta_out: f64) -> Result<HolonomyResult> {
        Ok(HolonomyResult {
            u,
            frame_in: self.frame(theta_in)?,
            frame_out: self.frame(theta_out)?,
            steps_used: 0,
            est_error: 0.0,
        })
    }

    /// `U(C_theta(theta_1, theta_0))`, a rotation about y.
    pub fn theta(&self, theta_1: f64, theta_0: f64) -> Result<HolonomyResult> {
        self.result(theta_unitary(theta_1, theta_0), theta_0, theta_1)
    }

    /// `U(C_phi(m_a, m_b; theta))`, a rotation about an axis in the xz-plane.
    pub fn phi(&self, m_a: i64, m_b: i64, theta: f64) -> Result<HolonomyResult> {
        self.result(phi_unitary(m_a, m_b, theta), theta, theta)
    }

    pub fn w(&self, m_a: i64, m_b: i64, theta_1: f64) -> Result<HolonomyResult> {
        self.result(w_unitary(m_a, m_b, theta_1), FRAC_PI_4, FRAC_PI_4)
    }

    pub fn w_prime(&self, m_a: i64, m_b: i64, theta_1: f64) -> Result<HolonomyResult> {
        self.result(w_prime_unitary(m_a, m_b, theta_1), 0.0, FRAC_PI_4)
    }

    /// Product of closed forms along a program.
    pub fn program(&self, path: &PathProgram) -> Result<HolonomyResult> {
        let u = path
            .segments()
            .iter()
            .fold(Mat2::identity(), |acc, seg| segment_unitary(seg) * acc);
        let start = path.start_theta().unwrap_or(FRAC_PI_4);
        let end = path.end_theta().unwrap_or(FRAC_PI_4);
        self.result(u, start, end)
    }
}

fn segment_unitary(seg: &PathSegment) -> Mat2 {
    match *seg {
        PathSegment::ThetaRamp {
            theta_from,
            theta_to,
        } => theta_unitary(theta_to, theta_from),
        PathSegment::PhiLoop { m_a, m_b, theta } => phi_unitary(m_a, m_b, theta),
    }
}

pub fn closed_form_theta(
    sector: SectorConfig,
    theta_1: f64,
    theta_0: f64,
) -> Result<HolonomyResult> {
    ClosedForm::new(sector)?.theta(theta_1, theta_0)
}

pub fn closed_form_phi(
    sector: SectorConfig,
    m_a: i64,
    m_b: i64,
    theta: f64,
) -> Result<HolonomyResult> {
    ClosedForm::new(sector)?.phi(m_a, m_b, theta)
}

/// Which evaluation route to use for composite sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Transport,
}

pub fn compose_w(
    config: ModelConfig,
    method: Method,
    m_a: i64,
    m_b: i64,
    theta_1: f64,
) -> Result<HolonomyResult> {
    match method {
        Method::ClosedForm => ClosedForm::new(config.sector)?.w(m_a, m_b, theta_1),
        Method::Transport => {
            Transporter::new(config).transport(&PathProgram::w(m_a, m_b, theta_1)?)
        }
    }
}

pub fn compose_w_prime(
    config: ModelConfig,
    method: Method,
    m_a: i64,
    m_b: i64,
    theta_1: f64,
) -> Result<HolonomyResult> {
    match method {
        Method::ClosedForm => ClosedForm::new(config.sector)?.w_prime(m_a, m_b, theta_1),
        Method::Transport => {
            Transporter::new(config).transport(&PathProgram::w_prime(m_a, m_b, theta_1)?)
        }
    }
}
