//! Profiles `phi(t, s)` of U(n)-invariant metrics `G = r phi(t, s)`.

use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::jet::Jet;

/// `f` in `phi = f(t) + f'(t) s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum KahlerPotential {
    One,
    Exp { c: f64 },
    /// `1 / (1 - t)`, which reproduces the unit ball metric.
    InvOneMinus,
}

impl KahlerPotential {
    /// `[f, f', f'', ...]` at `t`, up to `order`.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        (0..=order)
            .map(|k| match self {
                KahlerPotential::One => {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                KahlerPotential::Exp { c } => c.powi(k as i32) * (c * t).exp(),
                KahlerPotential::InvOneMinus => {
                    let fact: f64 = (1..=k).map(|i| i as f64).product();
                    fact / (1.0 - t).powi(k as i32 + 1)
                }
            })
            .collect()
    }

    fn eval(&self, t: &Jet) -> (Jet, Jet) {
        let c0 = |x: f64| Jet::constant(t.nvars(), t.order(), x);
        match self {
            KahlerPotential::One => (c0(1.0), c0(0.0)),
            KahlerPotential::Exp { c } => {
                let e = (t * *c).exp();
                (e.clone(), e * *c)
            }
            KahlerPotential::InvOneMinus => {
                let r = (-t + 1.0).recip();
                (r.clone(), r.square())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub t: u32,
    pub s: u32,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `phi = f(t) + f'(t) s`.
    Kahler { f: KahlerPotential },
    /// `phi = sum c t^i s^j`.
    Polynomial { terms: Vec<Term> },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Kahler { f: KahlerPotential::Exp { c } } if !c.is_finite() => {
                Err(FinslerError::Config("exp profile constant must be finite".into()))
            }
            Profile::Polynomial { terms } => {
                if terms.is_empty() {
                    return Err(FinslerError::Config("polynomial profile has no terms".into()));
                }
                if terms.iter().any(|t| !t.c.is_finite()) {
                    return Err(FinslerError::Config("non-finite profile coefficient".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: &Jet, s: &Jet) -> Jet {
        match self {
            Profile::Kahler { f } => {
                let (f0, f1) = f.eval(t);
                f0 + f1 * s
            }
            Profile::Polynomial { terms } => {
                let mut acc = Jet::constant(t.nvars(), t.order(), 0.0);
                for term in terms {
                    acc = acc + t.powi(term.t) * s.powi(term.s) * term.c;
                }
                acc
            }
        }
    }

    pub fn value(&self, t: f64, s: f64) -> f64 {
        let c = |x| Jet::constant(1, 0, x);
        self.eval(&c(t), &c(s)).value()
    }

    /// Largest `t` bound imposed by the profile itself.
    pub fn t_bound(&self) -> Option<f64> {
        match self {
            Profile::Kahler {
                f: KahlerPotential::InvOneMinus,
            } => Some(1.0),
            // f + t f' = e^{ct}(1 + ct) must stay positive
            Profile::Kahler {
                f: KahlerPotential::Exp { c },
            } if *c < 0.0 => Some(-1.0 / c),
            _ => None,
        }
    }

    pub fn is_kahler_form(&self) -> bool {
        matches!(self, Profile::Kahler { .. })
    }
}
