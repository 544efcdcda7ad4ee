//! Discrete parallel transport of the dark frame.
//!
//! Each step replaces the carried frame `F` by `V polar(V^dagger F)`, where
//! `V` is any orthonormal basis of the dark space at the next grid point.
//! This is the closest frame in the new dark space to the old one, so the
//! product converges to the path-ordered exponential of the connection at
//! second order in the step. The map is symmetric under reversing the
//! path, so the error is even in the step and Richardson extrapolation
//! over successive halvings lifts it to fourth order.

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::path::{PathProgram, PathSegment};
use super::HolonomyResult;
use crate::error::{Error, Result};
use crate::linalg::{
    from_mat2, polar_unitary, projective_distance2, random_unitary, re, to_mat2, CMat, Mat2,
};
use crate::model::{ControlParams, ModelConfig};
use crate::subspace::{DarkSpace, Frame};

pub const DEFAULT_INITIAL_STEPS: usize = 256;
pub const DEFAULT_MAX_STEPS: usize = 1 << 16;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportOptions {
    /// Steps per segment at the coarsest level.
    pub initial_steps: usize,
    /// Refinement stops with an error beyond this many steps per segment.
    pub max_steps: usize,
    /// Target projective distance between successive refinements.
    pub tolerance: f64,
    /// Combine successive halvings as `(4 U_2N - U_N) / 3`.
    pub extrapolate: bool,
    /// Rotate every intermediate dark basis by a random unitary (for gauge
    /// independence checks).
    pub gauge_seed: Option<u64>,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            initial_steps: DEFAULT_INITIAL_STEPS,
            max_steps: DEFAULT_MAX_STEPS,
            tolerance: DEFAULT_TOLERANCE,
            extrapolate: true,
            gauge_seed: None,
        }
    }
}

/// Dark-space transport for one sector.
#[derive(Debug, Clone)]
pub struct Transporter {
    space: DarkSpace,
    options: TransportOptions,
}

fn on_boundary(theta: f64) -> bool {
    theta.abs() < 1e-12 || (theta - FRAC_PI_2).abs() < 1e-12
}

impl Transporter {
    pub fn new(config: ModelConfig) -> Self {
        Self::with_options(config, TransportOptions::default())
    }

    pub fn with_options(config: ModelConfig, options: TransportOptions) -> Self {
        Self {
            space: DarkSpace::new(config),
            options,
        }
    }

    pub fn space(&self) -> &DarkSpace {
        &self.space
    }

    pub fn options(&self) -> &TransportOptions {
        &self.options
    }

    /// Gauge-fixed dark frame (Zeno coordinates), required to be 2-dimensional.
    fn gauge(&self, params: &ControlParams) -> Result<CMat> {
        let g = self.space.gauge_coefficients(params)?;
        if g.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: g.ncols(),
            });
        }
        Ok(g)
    }

    /// Holonomy of one segment at a fixed number of steps, in the gauge-fixed
    /// endpoint frames.
    pub fn segment_at(&self, seg: &PathSegment, index: usize, steps: usize) -> Result<Mat2> {
        let steps = steps.max(1);
        let start = self.gauge(&seg.params_at(0.0))?;
        let end = self.gauge(&seg.params_at(1.0))?;
        let mut rng = self
            .options
            .gauge_seed
            .map(|s| ChaCha8Rng::seed_from_u64(s ^ (index as u64) << 32));
        let mut frame = start;
        for k in 1..=steps {
            let params = seg.params_at(k as f64 / steps as f64);
            let mut v = self.space.dark_coefficients(&params);
            let found = v.ncols();
            if found < 2 || (found > 2 && !on_boundary(params.theta)) {
                return Err(Error::DarkDimensionChanged {
                    segment: index,
                    step: k,
                    expected: 2,
                    found,
                });
            }
            if let Some(rng) = rng.as_mut() {
                v = &v * random_unitary(rng, found);
            }
            frame = &v * polar_unitary(&(v.adjoint() * &frame));
        }
        Ok(to_mat2(&(end.adjoint() * frame)))
    }

    /// Segment holonomy refined by step doubling. Returns the estimate, the
    /// steps used and the estimated error.
    pub fn segment(&self, seg: &PathSegment, index: usize) -> Result<(Mat2, usize, f64)> {
        let opts = &self.options;
        let mut steps = opts.initial_steps.max(1);
        let mut coarse = self.segment_at(seg, index, steps)?;
        let mut previous: Option<Mat2> = None;
        let mut est = f64::INFINITY;
        while steps * 2 <= opts.max_steps {
            steps *= 2;
            let fine = self.segment_at(seg, index, steps)?;
            let (estimate, reference) = if opts.extrapolate {
                (richardson(&coarse, &fine), previous.unwrap_or(coarse))
            } else {
                (fine, coarse)
            };
            est = projective_distance2(&estimate, &reference);
            if est < opts.tolerance {
                return Ok((estimate, steps, est));
            }
            coarse = fine;
            previous = Some(estimate);
        }
        Err(Error::NotConverged {
            est_error: est,
            steps,
        })
    }

    /// Refined holonomy of a program; segment results compose in the shared
    /// gauge at the junctions.
    pub fn transport(&self, path: &PathProgram) -> Result<HolonomyResult> {
        let mut u = Mat2::identity();
        let mut steps_used = 0;
        let mut est_error = 0.0;
        for (i, seg) in path.segments().iter().enumerate() {
            let (v, steps, est) = self.segment(seg, i)?;
            u = v * u;
            steps_used = steps_used.max(steps);
            est_error += est;
        }
        self.result(path, u, steps_used, est_error)
    }

    /// Unrefined holonomy with a fixed number of steps per segment. The error
    /// estimate compares against half as many steps.
    pub fn transport_fixed(&self, path: &PathProgram, steps: usize) -> Result<HolonomyResult> {
        let mut u = Mat2::identity();
        let mut coarse = Mat2::identity();
        for (i, seg) in path.segments().iter().enumerate() {
            u = self.segment_at(seg, i, steps)? * u;
            coarse = self.segment_at(seg, i, (steps / 2).max(1))? * coarse;
        }
        let est = projective_distance2(&u, &coarse);
        self.result(path, u, steps, est)
    }

    fn result(
        &self,
        path: &PathProgram,
        u: Mat2,
        steps_used: usize,
        est_error: f64,
    ) -> Result<HolonomyResult> {
        let z = self.space.zeno().columns();
        let frame_at = |theta: Option<f64>| -> Result<Frame> {
            let params = ControlParams::new(theta.unwrap_or(FRAC_PI_4), 0.0, 0.0);
            Ok(Frame::new(z * self.gauge(&params)?))
        };
        Ok(HolonomyResult {
            u,
            frame_in: frame_at(path.start_theta())?,
            frame_out: frame_at(path.end_theta())?,
            steps_used,
            est_error,
        })
    }
}

/// Refined transport starting from `steps_per_segment` steps.
pub fn transport(
    path: &PathProgram,
    config: ModelConfig,
    steps_per_segment: usize,
) -> Result<HolonomyResult> {
    let options = TransportOptions {
        initial_steps: steps_per_segment,
        ..TransportOptions::default()
    };
    Transporter::with_options(config, options).transport(path)
}

/// Unitary part of `(4 fine - coarse) / 3`.
fn richardson(coarse: &Mat2, fine: &Mat2) -> Mat2 {
    let m = (fine * re(4.0) - coarse) * re(1.0 / 3.0);
    to_mat2(&polar_unitary(&from_mat2(&m)))
}
