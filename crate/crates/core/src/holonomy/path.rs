//! Control-parameter paths and their text form.
//!
//! Grammar (whitespace is free between tokens):
//!
//! ```text
//! program := "" | segment (";" segment)* [";"]
//! segment := "theta" ":" angle "->" angle
//!          | "phi" ":" "ma" "=" int "," "mb" "=" int "@" "theta" "=" angle
//! angle   := ["-"] factor (("*" | "/") factor)*
//! factor  := number | "pi"
//! ```
//!
//! Segments are listed in the order they are traversed in time, and a
//! theta ramp runs from its first angle to its second.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use core::fmt;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::model::ControlParams;

/// Tolerance for endpoint matching and range checks.
pub const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error(
        "segment {segment} starts at theta={found} but the previous one ends at theta={expected}"
    )]
    Discontinuity {
        segment: usize,
        expected: f64,
        found: f64,
    },

    #[error("segment {segment}: theta={value} outside [0, pi/2]")]
    OutOfRange { segment: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment {
    /// theta moves linearly from `theta_from` to `theta_to` with zero phases.
    ThetaRamp { theta_from: f64, theta_to: f64 },
    /// Both phases wind simultaneously, `phi_mu = 2 pi m_mu s`, at fixed theta.
    PhiLoop { m_a: i64, m_b: i64, theta: f64 },
}

impl PathSegment {
    /// `C_theta(theta_2, theta_1)`: from `theta_1` to `theta_2`.
    pub fn c_theta(theta_2: f64, theta_1: f64) -> Self {
        PathSegment::ThetaRamp {
            theta_from: theta_1,
            theta_to: theta_2,
        }
    }

    pub fn c_phi(m_a: i64, m_b: i64, theta: f64) -> Self {
        PathSegment::PhiLoop { m_a, m_b, theta }
    }

    pub fn start_theta(&self) -> f64 {
        match *self {
            PathSegment::ThetaRamp { theta_from, .. } => theta_from,
            PathSegment::PhiLoop { theta, .. } => theta,
        }
    }

    pub fn end_theta(&self) -> f64 {
        match *self {
            PathSegment::ThetaRamp { theta_to, .. } => theta_to,
            PathSegment::PhiLoop { theta, .. } => theta,
        }
    }

    /// Control parameters at ramp fraction `s` in [0, 1] (Omega = 1).
    pub fn params_at(&self, s: f64) -> ControlParams {
        match *self {
            PathSegment::ThetaRamp {
                theta_from,
                theta_to,
            } => ControlParams::new(theta_from + (theta_to - theta_from) * s, 0.0, 0.0),
            PathSegment::PhiLoop { m_a, m_b, theta } => {
                ControlParams::new(theta, TAU * m_a as f64 * s, TAU * m_b as f64 * s)
            }
        }
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::ThetaRamp {
                theta_from,
                theta_to,
            } => PathSegment::ThetaRamp {
                theta_from: theta_to,
                theta_to: theta_from,
            },
            PathSegment::PhiLoop { m_a, m_b, theta } => PathSegment::PhiLoop {
                m_a: -m_a,
                m_b: -m_b,
                theta,
            },
        }
    }

    /// Length of the curve in (theta, phi_a, phi_b) space.
    pub fn arc_length(&self) -> f64 {
        match *self {
            PathSegment::ThetaRamp {
                theta_from,
                theta_to,
            } => (theta_to - theta_from).abs(),
            PathSegment::PhiLoop { m_a, m_b, .. } => TAU * ((m_a * m_a + m_b * m_b) as f64).sqrt(),
        }
    }

    fn check_range(&self, segment: usize) -> Result<(), ParseError> {
        for value in [self.start_theta(), self.end_theta()] {
            if !(-CONTINUITY_TOL..=FRAC_PI_2 + CONTINUITY_TOL).contains(&value) {
                return Err(ParseError::OutOfRange { segment, value });
            }
        }
        Ok(())
    }
}

/// Shortest text for an angle, preferring simple multiples of pi.
fn fmt_angle(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (value, text) in [
        (0.0, "0"),
        (FRAC_PI_4, "pi/4"),
        (FRAC_PI_2, "pi/2"),
        (PI, "pi"),
    ] {
        if x == value {
            return f.write_str(text);
        }
    }
    write!(f, "{x:?}")
}

impl fmt::Display for PathSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PathSegment::ThetaRamp {
                theta_from,
                theta_to,
            } => {
                f.write_str("theta:")?;
                fmt_angle(theta_from, f)?;
                f.write_str("->")?;
                fmt_angle(theta_to, f)
            }
            PathSegment::PhiLoop { m_a, m_b, theta } => {
                write!(f, "phi:ma={m_a},mb={m_b}@theta=")?;
                fmt_angle(theta, f)
            }
        }
    }
}

/// Continuity-checked sequence of segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathProgram {
    segments: Vec<PathSegment>,
}

impl PathProgram {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self, ParseError> {
        for (i, seg) in segments.iter().enumerate() {
            seg.check_range(i)?;
            if i > 0 {
                let expected = segments[i - 1].end_theta();
                let found = seg.start_theta();
                if (expected - found).abs() > CONTINUITY_TOL {
                    return Err(ParseError::Discontinuity {
                        segment: i,
                        expected,
                        found,
                    });
                }
            }
        }
        Ok(Self { segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start_theta(&self) -> Option<f64> {
        self.segments.first().map(|s| s.start_theta())
    }

    pub fn end_theta(&self) -> Option<f64> {
        self.segments.last().map(|s| s.end_theta())
    }

    /// `C_theta(pi/4, theta_1) . C_phi(m_a, m_b; theta_1) . C_theta(theta_1, pi/4)`
    pub fn w(m_a: i64, m_b: i64, theta_1: f64) -> Result<Self, ParseError> {
        Self::new(alloc::vec![
            PathSegment::c_theta(theta_1, FRAC_PI_4),
            PathSegment::c_phi(m_a, m_b, theta_1),
            PathSegment::c_theta(FRAC_PI_4, theta_1),
        ])
    }

    /// Like [`PathProgram::w`] but starting from theta = 0.
    pub fn w_prime(m_a: i64, m_b: i64, theta_1: f64) -> Result<Self, ParseError> {
        Self::new(alloc::vec![
            PathSegment::c_theta(theta_1, 0.0),
            PathSegment::c_phi(m_a, m_b, theta_1),
            PathSegment::c_theta(FRAC_PI_4, theta_1),
        ])
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PathProgram) -> Result<Self, ParseError> {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&next.segments);
        Self::new(segments)
    }
}

impl fmt::Display for PathProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for PathProgram {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_path(s)
    }
}

pub fn parse_path(text: &str) -> Result<PathProgram, ParseError> {
    let mut p = Parser { text, pos: 0 };
    let mut segments = Vec::new();
    p.skip_ws();
    while !p.at_end() {
        segments.push(p.segment()?);
        p.skip_ws();
        if p.at_end() {
            break;
        }
        p.expect(";")?;
        p.skip_ws();
    }
    PathProgram::new(segments)
}

/// A single angle literal such as `0.669`, `pi/4` or `-3*pi/8`.
pub fn parse_angle(text: &str) -> Result<f64, ParseError> {
    let mut p = Parser { text, pos: 0 };
    let value = p.angle()?;
    p.skip_ws();
    if !p.at_end() {
        return p.error("trailing input after angle");
    }
    Ok(value)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(alloc::format!("expected `{token}`"))
        }
    }

    fn segment(&mut self) -> Result<PathSegment, ParseError> {
        if self.eat("theta") {
            self.expect(":")?;
            let from = self.angle()?;
            self.expect("->")?;
            let to = self.angle()?;
            Ok(PathSegment::ThetaRamp {
                theta_from: from,
                theta_to: to,
            })
        } else if self.eat("phi") {
            self.expect(":")?;
            self.expect("ma")?;
            self.expect("=")?;
            let m_a = self.integer()?;
            self.expect(",")?;
            self.expect("mb")?;
            self.expect("=")?;
            let m_b = self.integer()?;
            self.expect("@")?;
            self.expect("theta")?;
            self.expect("=")?;
            let theta = self.angle()?;
            Ok(PathSegment::PhiLoop { m_a, m_b, theta })
        } else {
            self.error("expected `theta` or `phi`")
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        if matches!(bytes.first(), Some(b'-' | b'+')) {
            len = 1;
        }
        while bytes.get(len).is_some_and(u8::is_ascii_digit) {
            len += 1;
        }
        match self.rest()[..len].parse::<i64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => {
                self.pos = start;
                self.error("expected an integer winding number")
            }
        }
    }

    fn angle(&mut self) -> Result<f64, ParseError> {
        let negative = self.eat("-");
        let mut value = self.factor()?;
        loop {
            if self.eat("*") {
                value *= self.factor()?;
            } else if self.eat("/") {
                let d = self.factor()?;
                if d == 0.0 {
                    return self.error("division by zero");
                }
                value /= d;
            } else {
                break;
            }
        }
        if !value.is_finite() {
            return self.error("angle is not finite");
        }
        Ok(if negative { -value } else { value })
    }

    fn factor(&mut self) -> Result<f64, ParseError> {
        if self.eat("pi") {
            return Ok(PI);
        }
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        let mut seen_exp = false;
        while let Some(&b) = bytes.get(len) {
            let ok = b.is_ascii_digit()
                || b == b'.'
                || (!seen_exp && (b == b'e' || b == b'E') && len > 0)
                || ((b == b'-' || b == b'+') && len > 0 && matches!(bytes[len - 1], b'e' | b'E'));
            if !ok {
                break;
            }
            seen_exp |= b == b'e' || b == b'E';
            len += 1;
        }
        if len == 0 {
            return self.error("expected a number or `pi`");
        }
        match self.rest()[..len].parse::<f64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(e) => self.error(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_program() {
        assert!(parse_path("").unwrap().is_empty());
        assert!(parse_path("   ").unwrap().is_empty());
    }

    #[test]
    fn angle_literals() {
        let p = parse_path("theta:pi/4->0.669; theta: 0.669 -> 2*pi/3/2").unwrap();
        assert_eq!(
            p.segments()[0],
            PathSegment::ThetaRamp {
                theta_from: FRAC_PI_4,
                theta_to: 0.669
            }
        );
        assert!((p.segments()[1].end_theta() - PI / 3.0).abs() < 1e-15);
        let e = parse_path("theta:0->-pi/2").unwrap_err();
        assert!(matches!(e, ParseError::OutOfRange { segment: 0, .. }));
    }

    #[test]
    fn single_loop() {
        let p = parse_path("phi:ma=1,mb=0@theta=pi/4").unwrap();
        assert_eq!(
            p.segments(),
            &[PathSegment::PhiLoop {
                m_a: 1,
                m_b: 0,
                theta: FRAC_PI_4
            }]
        );
    }

    #[test]
    fn printed_w_prime_program_is_its_reverse_traversal() {
        let p =
            parse_path("theta:pi/4->0.669; phi:ma=-24,mb=1@theta=0.669; theta:0.669->0").unwrap();
        assert_eq!(p.segments().len(), 3);
        assert_eq!(p.start_theta(), Some(FRAC_PI_4));
        assert_eq!(p.end_theta(), Some(0.0));
        let forward = PathProgram::w_prime(24, -1, 0.669).unwrap();
        assert_eq!(p.reversed(), forward);
    }

    #[test]
    fn syntax_error_positions() {
        match parse_path("theta:0->0.5; phi:ma=x,mb=0@theta=0.5").unwrap_err() {
            ParseError::Syntax { position, .. } => assert_eq!(position, 21),
            e => panic!("{e}"),
        }
        assert!(matches!(
            parse_path("rho:0->1"),
            Err(ParseError::Syntax { position: 0, .. })
        ));
        assert!(matches!(
            parse_path("theta:0->0.5;;"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn discontinuity_names_segment() {
        let e = parse_path("theta:0->0.5; phi:ma=1,mb=1@theta=0.6").unwrap_err();
        assert_eq!(
            e,
            ParseError::Discontinuity {
                segment: 1,
                expected: 0.5,
                found: 0.6
            }
        );
    }

    #[test]
    fn display_round_trips() {
        let p = PathProgram::w(-3, 5, 0.123456789).unwrap();
        assert_eq!(parse_path(&p.to_string()).unwrap(), p);
        assert_eq!(
            PathProgram::w(1, 0, FRAC_PI_4).unwrap().to_string(),
            "theta:pi/4->pi/4; phi:ma=1,mb=0@theta=pi/4; theta:pi/4->pi/4"
        );
    }

    #[test]
    fn standalone_angles() {
        assert_eq!(parse_angle("pi/4").unwrap(), FRAC_PI_4);
        assert_eq!(parse_angle(" -0.5 ").unwrap(), -0.5);
        assert!(matches!(
            parse_angle("pi/4x"),
            Err(ParseError::Syntax { position: 4, .. })
        ));
    }
}
