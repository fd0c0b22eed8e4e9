use serde::Serialize;

use super::GkpCode;
use crate::error::{Error, Result};
use crate::lattice::{EnumOptions, GeneratorMatrix};

/// Relative slack allowed before an inequality counts as violated.
const BOUND_TOL: f64 = 1e-9;

/// One inequality `lhs ≤ rhs` (or `lhs = rhs` when `equality`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub equality: bool,
    pub holds: bool,
    /// True when the inequality has no content for this code (e.g. `d = 1`).
    pub vacuous: bool,
}

impl BoundCheck {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        let tol = BOUND_TOL * lhs.abs().max(rhs.abs()).max(1.0);
        BoundCheck { name: name.into(), lhs, rhs, equality: false, holds: lhs <= rhs + tol, vacuous: false }
    }

    fn eq(name: &str, lhs: f64, rhs: f64) -> Self {
        let tol = BOUND_TOL * lhs.abs().max(rhs.abs()).max(1.0);
        BoundCheck { name: name.into(), lhs, rhs, equality: true, holds: (lhs - rhs).abs() <= tol, vacuous: false }
    }

    fn vacuous(name: &str) -> Self {
        BoundCheck { name: name.into(), lhs: f64::NAN, rhs: f64::NAN, equality: false, holds: true, vacuous: true }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Code parameters together with every inequality relating them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n_modes: usize,
    pub k: f64,
    /// Longest row of the basis the report was computed for.
    pub c: f64,
    pub lambda1: f64,
    pub lambda_2n: f64,
    pub lambda1_dual: f64,
    pub lambda_2n_dual: f64,
    /// `None` when `d = 1`.
    pub distance: Option<f64>,
    pub squeezing_bound: Option<f64>,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl GkpCode {
    /// Evaluate all parameter bounds; `C` is taken from `basis` (which must
    /// generate the code lattice) or from the code's own generator.
    pub fn bounds_report(&self, basis: Option<&GeneratorMatrix>) -> Result<BoundsReport> {
        let opts = EnumOptions::default();
        let basis = basis.unwrap_or(self.generator());
        if !basis.same_lattice(self.generator())? {
            return Err(Error::InvalidArgument("basis does not generate the code lattice".into()));
        }
        let two_n = 2.0 * self.n_modes() as f64;
        let c = basis.max_row_norm();
        let k = self.k();
        let lat = self.generator().successive_minima(&opts)?;
        let dual = self.dual().successive_minima(&opts)?;
        let (l1, l2n) = (lat[0], *lat.last().expect("dim ≥ 2"));
        let (d1, d2n) = (dual[0], *dual.last().expect("dim ≥ 2"));

        let distance = match self.distance_with(&opts) {
            Ok(d) => Some(d.delta),
            Err(Error::TrivialCode) => None,
            Err(e) => return Err(e),
        };
        let squeezing_bound = match distance {
            Some(_) => Some(self.squeezing_bound()?),
            None => None,
        };

        let mut checks = vec![
            BoundCheck::le("hadamard", k, two_n * c.log2()),
            BoundCheck::le("transference-lower", 1.0, l1 * d2n),
            BoundCheck::le("transference-upper", l1 * d2n, two_n),
            BoundCheck::le("transference-dual-lower", 1.0, d1 * l2n),
            BoundCheck::le("transference-dual-upper", d1 * l2n, two_n),
            BoundCheck::le("dual-min-vs-lattice-max", 1.0 / l2n, d1),
            BoundCheck::le("lattice-max-vs-basis", 1.0 / c, 1.0 / l2n),
            BoundCheck::le("dual-max-vs-lattice-min", d2n, two_n / l1),
        ];
        match distance {
            Some(delta) => {
                checks.push(BoundCheck::le("lemma1", d1, delta));
                checks.push(BoundCheck::le("distance-upper", delta, d2n));
                checks.push(BoundCheck::le("squeezing", delta, squeezing_bound.expect("set with distance")));
            }
            None => {
                for name in ["lemma1", "distance-upper", "squeezing"] {
                    checks.push(BoundCheck::vacuous(name));
                }
            }
        }
        if let (Some(q), Some(delta)) = (self.origin(), distance) {
            match q.distance() {
                Ok(dq) => {
                    let rhs = (dq as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
                    checks.push(if q.is_css() {
                        BoundCheck::eq("concatenation", delta, rhs)
                    } else {
                        BoundCheck::le("concatenation", rhs, delta)
                    });
                }
                Err(Error::TrivialCode) => checks.push(BoundCheck::vacuous("concatenation")),
                Err(e) => return Err(e),
            }
        }
        Ok(BoundsReport {
            n_modes: self.n_modes(),
            k,
            c,
            lambda1: l1,
            lambda_2n: l2n,
            lambda1_dual: d1,
            lambda_2n_dual: d2n,
            distance,
            squeezing_bound,
            checks,
        })
    }
}
