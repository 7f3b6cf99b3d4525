//! Test functions `f(a, b)` of the squared projection norms, with growth
//! bounds that quadrature can truncate against.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{ConeError, Result};

/// Declared bound `|f(a, b)| ≤ c · (1 + a + b)^p` on `a, b ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub c: f64,
    pub p: f64,
}

impl Growth {
    pub const BOUNDED: Growth = Growth { c: 1.0, p: 0.0 };

    pub fn bound(&self, a: f64, b: f64) -> f64 {
        self.c * (1.0 + a + b).powf(self.p)
    }
}

pub type CustomFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A nonnegative function of `(‖Π_C g‖², ‖Π_{C°} g‖²)`.
#[derive(Clone)]
pub enum TaggedFn {
    One,
    /// `a`, the squared norm of the projection.
    NormSqCone,
    /// `b`, the squared norm of the Moreau complement.
    NormSqPolar,
    /// `a^m b^n`.
    Moment {
        m: u32,
        n: u32,
    },
    /// Indicator of the angular parallel set at `lambda`: `a > 0` and `b ≤ a tan²λ`.
    SteinerIndicator {
        lambda: f64,
    },
    Custom {
        name: String,
        f: CustomFn,
        growth: Growth,
    },
}

impl fmt::Debug for TaggedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TaggedFn({self})")
    }
}

impl fmt::Display for TaggedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaggedFn::One => write!(f, "one"),
            TaggedFn::NormSqCone => write!(f, "norm_sq_c"),
            TaggedFn::NormSqPolar => write!(f, "norm_sq_polar"),
            TaggedFn::Moment { m, n } => write!(f, "moment:{m},{n}"),
            TaggedFn::SteinerIndicator { lambda } => write!(f, "steiner:{lambda}"),
            TaggedFn::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl PartialEq for TaggedFn {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl TaggedFn {
    pub fn custom(
        name: impl Into<String>,
        growth: Growth,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TaggedFn::Custom {
            name: name.into(),
            f: Arc::new(f),
            growth,
        }
    }

    /// Evaluates without checking the growth bound.
    #[inline]
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        match self {
            TaggedFn::One => 1.0,
            TaggedFn::NormSqCone => a,
            TaggedFn::NormSqPolar => b,
            TaggedFn::Moment { m, n } => a.powi(*m as i32) * b.powi(*n as i32),
            TaggedFn::SteinerIndicator { lambda } => steiner_indicator(*lambda, a, b),
            TaggedFn::Custom { f, .. } => f(a, b),
        }
    }

    /// Evaluates and rejects non-finite, negative, or growth-violating values.
    pub fn eval_checked(&self, a: f64, b: f64) -> Result<f64> {
        let v = self.eval(a, b);
        if !v.is_finite() || v < 0.0 {
            return Err(ConeError::BadFunction(format!(
                "{self} returned {v} at (a, b) = ({a}, {b})"
            )));
        }
        let g = self.growth();
        if v > g.bound(a, b) * (1.0 + 1e-12) {
            return Err(ConeError::BadFunction(format!(
                "{self} exceeds its declared growth bound at (a, b) = ({a}, {b})"
            )));
        }
        Ok(v)
    }

    pub fn growth(&self) -> Growth {
        match self {
            TaggedFn::One | TaggedFn::SteinerIndicator { .. } => Growth::BOUNDED,
            TaggedFn::NormSqCone | TaggedFn::NormSqPolar => Growth { c: 1.0, p: 1.0 },
            TaggedFn::Moment { m, n } => Growth {
                c: 1.0,
                p: f64::from(m + n),
            },
            TaggedFn::Custom { growth, .. } => *growth,
        }
    }

    /// Largest `s` at which the integrand is nonzero for a given `r`, when
    /// the function is an indicator with a known boundary in `(r, s)`.
    pub(crate) fn s_cutoff(&self, r: f64) -> Option<f64> {
        match self {
            TaggedFn::SteinerIndicator { lambda } => Some(r * lambda.tan()),
            _ => None,
        }
    }
}

/// Indicator of `d_a ≤ λ` expressed through the squared Moreau norms.
#[inline]
pub fn steiner_indicator(lambda: f64, a: f64, b: f64) -> f64 {
    let t = lambda.tan();
    if a > 0.0 && b <= a * t * t {
        1.0
    } else {
        0.0
    }
}

impl FromStr for TaggedFn {
    type Err = ConeError;

    /// `one | norm_sq_c | norm_sq_polar | moment:m,n | steiner:λ`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| ConeError::Parse {
            line: 1,
            column: 1,
            message: msg,
        };
        let s = s.trim();
        match s {
            "one" => return Ok(TaggedFn::One),
            "norm_sq_c" => return Ok(TaggedFn::NormSqCone),
            "norm_sq_polar" => return Ok(TaggedFn::NormSqPolar),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("moment:") {
            let (m, n) = rest
                .split_once(',')
                .ok_or_else(|| bad(format!("expected moment:m,n, got '{s}'")))?;
            let m = m
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad exponent '{m}'")))?;
            let n = n
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad exponent '{n}'")))?;
            return Ok(TaggedFn::Moment { m, n });
        }
        if let Some(rest) = s
            .strip_prefix("steiner:")
            .or_else(|| s.strip_prefix("steiner_indicator:"))
        {
            let lambda: f64 = rest
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad angle '{rest}'")))?;
            crate::cone::check_lambda(lambda)?;
            return Ok(TaggedFn::SteinerIndicator { lambda });
        }
        Err(bad(format!("unknown function tag '{s}'")))
    }
}
