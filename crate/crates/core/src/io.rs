//! JSON forms of tensors, elements and processes.
//!
//! Tensor entries carry wedge coefficients: `{"idx": [1, 3], "re": x, "im": y}`
//! stands for `(x + iy)·e_1∧e_3`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antisym::AntiTensor;
use crate::chaos::CliffordElement;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::malliavin::ProcessElement;
use crate::slots::SlotSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub idx: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub degree: usize,
    pub slots: usize,
    pub width: f64,
    pub entries: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelJson {
    pub degree: usize,
    pub tensor: TensorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub grid: TimeGrid,
    pub levels: Vec<LevelJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotJson {
    pub k: usize,
    pub element: ElementJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessJson {
    pub grid: TimeGrid,
    pub slots: Vec<SlotJson>,
}

impl From<&AntiTensor> for TensorJson {
    fn from(t: &AntiTensor) -> Self {
        let g = t.grid();
        TensorJson {
            degree: t.degree(),
            slots: g.slots(),
            width: g.width(),
            entries: t.iter().map(|(s, c)| EntryJson { idx: s.to_vec(), re: c.re, im: c.im }).collect(),
        }
    }
}

impl TryFrom<&TensorJson> for AntiTensor {
    type Error = Error;

    fn try_from(j: &TensorJson) -> Result<Self> {
        let grid = TimeGrid::new(j.slots, j.width)?;
        let mut seen = std::collections::BTreeSet::new();
        let mut entries = Vec::with_capacity(j.entries.len());
        for e in &j.entries {
            if e.idx.len() != j.degree {
                return Err(Error::InvalidInput(format!(
                    "entry {:?} has {} indices, tensor degree is {}",
                    e.idx,
                    e.idx.len(),
                    j.degree
                )));
            }
            if e.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(format!("entry {:?} is not strictly increasing", e.idx)));
            }
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::InvalidInput(format!("entry {:?} has a non-finite value", e.idx)));
            }
            for &k in &e.idx {
                grid.check_slot(k)?;
            }
            let s = SlotSet::from_slots(e.idx.iter().copied())?;
            if !seen.insert(s) {
                return Err(Error::InvalidInput(format!("entry {:?} appears twice", e.idx)));
            }
            entries.push((s, Complex64::new(e.re, e.im)));
        }
        AntiTensor::from_entries(grid, j.degree, entries)
    }
}

impl From<&CliffordElement> for ElementJson {
    fn from(f: &CliffordElement) -> Self {
        ElementJson {
            grid: f.grid(),
            levels: f
                .levels()
                .iter()
                .filter(|t| !t.is_zero())
                .map(|t| LevelJson { degree: t.degree(), tensor: t.into() })
                .collect(),
        }
    }
}

impl TryFrom<&ElementJson> for CliffordElement {
    type Error = Error;

    fn try_from(j: &ElementJson) -> Result<Self> {
        let mut degrees = std::collections::BTreeSet::new();
        let mut tensors = Vec::with_capacity(j.levels.len());
        for level in &j.levels {
            if level.degree != level.tensor.degree {
                return Err(Error::DegreeMismatch { left: level.degree, right: level.tensor.degree });
            }
            if !degrees.insert(level.degree) {
                return Err(Error::InvalidInput(format!("level {} appears twice", level.degree)));
            }
            let t = AntiTensor::try_from(&level.tensor)?;
            j.grid.ensure_same(&t.grid())?;
            tensors.push(t);
        }
        CliffordElement::from_tensors(j.grid, tensors)
    }
}

impl From<&ProcessElement> for ProcessJson {
    fn from(u: &ProcessElement) -> Self {
        ProcessJson {
            grid: u.grid(),
            slots: u
                .components()
                .iter()
                .enumerate()
                .map(|(i, c)| SlotJson { k: i + 1, element: c.into() })
                .collect(),
        }
    }
}

impl TryFrom<&ProcessJson> for ProcessElement {
    type Error = Error;

    /// Slots left out are zero.
    fn try_from(j: &ProcessJson) -> Result<Self> {
        let grid = j.grid;
        let mut components: Vec<Option<CliffordElement>> = vec![None; grid.slots()];
        for s in &j.slots {
            grid.check_slot(s.k)?;
            let c = CliffordElement::try_from(&s.element)?;
            grid.ensure_same(&c.grid())?;
            if components[s.k - 1].replace(c).is_some() {
                return Err(Error::InvalidInput(format!("slot {} appears twice", s.k)));
            }
        }
        ProcessElement::from_components(
            grid,
            components.into_iter().map(|c| c.unwrap_or_else(|| CliffordElement::zero(grid))).collect(),
        )
    }
}

pub fn tensor_from_json(text: &str) -> Result<AntiTensor> {
    AntiTensor::try_from(&serde_json::from_str::<TensorJson>(text)?)
}

pub fn element_from_json(text: &str) -> Result<CliffordElement> {
    CliffordElement::try_from(&serde_json::from_str::<ElementJson>(text)?)
}

pub fn process_from_json(text: &str) -> Result<ProcessElement> {
    ProcessElement::try_from(&serde_json::from_str::<ProcessJson>(text)?)
}

pub fn read_tensor(path: &Path) -> Result<AntiTensor> {
    tensor_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_element(path: &Path) -> Result<CliffordElement> {
    element_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_process(path: &Path) -> Result<ProcessElement> {
    process_from_json(&std::fs::read_to_string(path)?)
}
