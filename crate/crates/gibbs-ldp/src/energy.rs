//! Extended-real energies. Hard-core interactions produce `+∞`, carried as an
//! explicit marker rather than a floating sentinel, so that
//! `exp(-Infinite) == 0` exactly and sums short-circuit.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite,
}

impl Energy {
    pub const ZERO: Energy = Energy::Finite(0.0);

    pub fn is_finite(&self) -> bool {
        matches!(self, Energy::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Energy::Finite(v) => Some(*v),
            Energy::Infinite => None,
        }
    }

    /// `exp(-H)`; exactly 0 for an infinite energy.
    pub fn boltzmann(&self) -> f64 {
        match self {
            Energy::Finite(v) => (-v).exp(),
            Energy::Infinite => 0.0,
        }
    }
}

impl From<f64> for Energy {
    fn from(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            Energy::Infinite
        } else {
            Energy::Finite(v)
        }
    }
}

impl Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        match (self, rhs) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::Finite(a + b),
            _ => Energy::Infinite,
        }
    }
}

impl AddAssign for Energy {
    fn add_assign(&mut self, rhs: Energy) {
        *self = *self + rhs;
    }
}

impl Sum for Energy {
    fn sum<I: Iterator<Item = Energy>>(iter: I) -> Energy {
        let mut acc = Energy::ZERO;
        for e in iter {
            acc += e;
            if !acc.is_finite() {
                return Energy::Infinite;
            }
        }
        acc
    }
}
