//! Method identifiers and per-method metadata.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::multistep::MAX_STEPS;
use crate::onestep::CompositionScheme;

/// Every integrator available to the driver, by its command-line identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rk4,
    Strang,
    Suzuki4,
    Yoshida4,
    Krogstad,
    LawsonRk4,
    ExpAb(usize),
    ExpPece(usize),
    LawsonAb(usize),
    LawsonPece(usize),
}

impl Method {
    pub const ONE_STEP: [Method; 6] =
        [Method::Rk4, Method::Strang, Method::Suzuki4, Method::Yoshida4, Method::Krogstad, Method::LawsonRk4];

    /// Classical order of consistency.
    pub fn nominal_order(self) -> usize {
        match self {
            Method::Strang => 2,
            Method::Rk4 | Method::Suzuki4 | Method::Yoshida4 | Method::Krogstad | Method::LawsonRk4 => 4,
            Method::ExpAb(k) | Method::LawsonAb(k) => k,
            Method::ExpPece(k) | Method::LawsonPece(k) => k + 1,
        }
    }

    /// Evaluations of 𝒝 per step after startup.
    pub fn b_evals_per_step(self) -> u64 {
        match self {
            Method::Rk4 | Method::Krogstad | Method::LawsonRk4 => 4,
            Method::Strang | Method::Suzuki4 | Method::Yoshida4 => {
                4 * self.composition().expect("splitting method").b_stages() as u64
            }
            Method::ExpAb(_) | Method::LawsonAb(_) => 1,
            Method::ExpPece(_) | Method::LawsonPece(_) => 2,
        }
    }

    /// Step number `k` of multistep methods.
    pub fn steps(self) -> Option<usize> {
        match self {
            Method::ExpAb(k) | Method::ExpPece(k) | Method::LawsonAb(k) | Method::LawsonPece(k) => Some(k),
            _ => None,
        }
    }

    pub fn is_multistep(self) -> bool {
        self.steps().is_some()
    }

    pub fn has_error_estimate(self) -> bool {
        matches!(self, Method::ExpPece(_) | Method::LawsonPece(_))
    }

    /// Whether variable step sizes are supported (Adams–Lawson or one-step).
    pub fn supports_variable_steps(self) -> bool {
        !matches!(self, Method::ExpAb(_) | Method::ExpPece(_))
    }

    pub fn composition(self) -> Option<CompositionScheme> {
        match self {
            Method::Strang => Some(CompositionScheme::strang()),
            Method::Suzuki4 => Some(CompositionScheme::suzuki4()),
            Method::Yoshida4 => Some(CompositionScheme::yoshida4()),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Rk4 => write!(f, "rk4"),
            Method::Strang => write!(f, "strang"),
            Method::Suzuki4 => write!(f, "suzuki4"),
            Method::Yoshida4 => write!(f, "yoshida4"),
            Method::Krogstad => write!(f, "etdrk4-krogstad"),
            Method::LawsonRk4 => write!(f, "lawson-rk4"),
            Method::ExpAb(k) => write!(f, "exp-ab:{k}"),
            Method::ExpPece(k) => write!(f, "exp-pece:{k}"),
            Method::LawsonAb(k) => write!(f, "lawson-ab:{k}"),
            Method::LawsonPece(k) => write!(f, "lawson-pece:{k}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || Error::UnknownMethod(s.to_string());
        let simple = match s {
            "rk4" => Some(Method::Rk4),
            "strang" => Some(Method::Strang),
            "suzuki4" => Some(Method::Suzuki4),
            "yoshida4" => Some(Method::Yoshida4),
            "etdrk4-krogstad" => Some(Method::Krogstad),
            "lawson-rk4" => Some(Method::LawsonRk4),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        let (family, k) = s.split_once(':').ok_or_else(unknown)?;
        let k: usize = k.parse().map_err(|_| unknown())?;
        if k == 0 || k > MAX_STEPS {
            return Err(unknown());
        }
        match family {
            "exp-ab" => Ok(Method::ExpAb(k)),
            "exp-pece" => Ok(Method::ExpPece(k)),
            "lawson-ab" => Ok(Method::LawsonAb(k)),
            "lawson-pece" => Ok(Method::LawsonPece(k)),
            _ => Err(unknown()),
        }
    }
}
