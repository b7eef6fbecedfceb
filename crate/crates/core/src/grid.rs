//! Uniform time grids and slot-union sets.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antisym::AntiTensor;
use crate::error::{Error, Result};
use crate::slots::SlotSet;

/// `d` slots of width `Δ`. Slot `k` covers `[(k-1)Δ, kΔ)` and carries the
/// basis vector `e_k = Δ^{-1/2}·1_{slot k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct TimeGrid {
    slots: usize,
    width: f64,
}

#[derive(Deserialize)]
struct RawGrid {
    slots: usize,
    width: f64,
}

impl TryFrom<RawGrid> for TimeGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        TimeGrid::new(raw.slots, raw.width)
    }
}

impl TimeGrid {
    pub const MAX_SLOTS: usize = SlotSet::MAX_SLOT;

    pub fn new(slots: usize, width: f64) -> Result<Self> {
        if slots == 0 || slots > Self::MAX_SLOTS {
            return Err(Error::InvalidGrid(format!(
                "slot count {slots} outside 1..={}",
                Self::MAX_SLOTS
            )));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidGrid(format!("width {width} must be positive and finite")));
        }
        Ok(TimeGrid { slots, width })
    }

    /// Unit-width grid, `T = d`.
    pub fn unit(slots: usize) -> Result<Self> {
        Self::new(slots, 1.0)
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn horizon(&self) -> f64 {
        self.slots as f64 * self.width
    }

    pub fn full(&self) -> SlotSet {
        SlotSet::prefix(self.slots)
    }

    pub fn check_slot(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.slots {
            return Err(Error::SlotOutOfRange { slot: k, slots: self.slots });
        }
        Ok(())
    }

    pub fn check_set(&self, a: SlotSet) -> Result<()> {
        if a.max_slot() > self.slots {
            return Err(Error::SlotOutOfRange { slot: a.max_slot(), slots: self.slots });
        }
        Ok(())
    }

    pub fn ensure_same(&self, other: &TimeGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch { left: *self, right: *other });
        }
        Ok(())
    }

    /// `μ(A) = Δ·|A|`.
    pub fn measure(&self, a: SlotSet) -> Result<f64> {
        self.check_set(a)?;
        Ok(self.width * a.len() as f64)
    }

    /// `1_A = Δ^{1/2} Σ_{k ∈ A} e_k` as a degree-1 tensor.
    pub fn indicator_vector(&self, a: SlotSet) -> Result<AntiTensor> {
        self.check_set(a)?;
        let c = Complex64::new(self.width.sqrt(), 0.0);
        AntiTensor::from_entries(*self, 1, a.iter().map(|k| (SlotSet::singleton(k), c)))
    }
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} slots of width {}", self.slots, self.width)
    }
}
