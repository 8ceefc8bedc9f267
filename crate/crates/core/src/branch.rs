//! Phase-continuous complex square roots.
//!
//! The closed-form packets carry prefactors such as `1/sqrt(1 - i t/2t0)` and
//! `1/sqrt(L(t))` whose argument winds around the origin as `t` grows. The
//! principal branch jumps by a sign every half turn; here the root is chosen
//! to stay continuous either by chaining along a sequence of arguments or by
//! anchoring to an analytically known reference phase.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A square root of `z`.
///
/// With `previous_root = None` this is the principal root, argument in
/// `(-pi/2, pi/2]` (so `sqrt(-1) = i` regardless of the sign of a zero
/// imaginary part). Otherwise the root nearer to `previous_root` is returned.
pub fn continuous_sqrt(z: Complex64, previous_root: Option<Complex64>) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("square root of zero has no branch".into()));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("square root of non-finite {z}")));
    }
    let principal = if z.im == 0.0 && z.re < 0.0 {
        Complex64::new(0.0, (-z.re).sqrt())
    } else {
        z.sqrt()
    };
    Ok(match previous_root {
        Some(prev) if (principal + prev).norm_sqr() < (principal - prev).norm_sqr() => -principal,
        _ => principal,
    })
}

/// Square root of `z` on the branch whose argument is closest to
/// `reference_angle / 2`.
///
/// Valid whenever the continuous argument of `z` is known to lie within
/// `pi/2` of `reference_angle`, e.g. for `a cos(theta) + i b sin(theta)` with
/// `a, b > 0`, which stays in the same quadrant as `theta`.
pub fn anchored_sqrt(z: Complex64, reference_angle: f64) -> Result<Complex64> {
    let hint = Complex64::from_polar(z.norm().sqrt(), 0.5 * reference_angle);
    continuous_sqrt(z, Some(hint))
}

/// Chains [`continuous_sqrt`] along a sequence of arguments.
///
/// Seeded with the principal branch (or an explicit seed root); each call to
/// [`SqrtTracker::next`] returns the root nearest the previous one.
#[derive(Debug, Clone, Default)]
pub struct SqrtTracker {
    previous: Option<Complex64>,
}

impl SqrtTracker {
    pub fn new() -> Self {
        Self { previous: None }
    }

    pub fn seeded(root: Complex64) -> Self {
        Self {
            previous: Some(root),
        }
    }

    pub fn next(&mut self, z: Complex64) -> Result<Complex64> {
        let r = continuous_sqrt(z, self.previous)?;
        self.previous = Some(r);
        Ok(r)
    }

    pub fn last(&self) -> Option<Complex64> {
        self.previous
    }
}

/// Unwraps a sequence of arguments so consecutive values differ by at most `pi`.
pub fn unwrap_phases(values: impl IntoIterator<Item = Complex64>) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev: Option<f64> = None;
    for z in values {
        let raw = z.arg();
        let phase = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p;
                d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
                p + d
            }
        };
        out.push(phase);
        prev = Some(phase);
    }
    out
}
