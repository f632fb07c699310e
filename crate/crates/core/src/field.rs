//! Discrete control fields carrying their quadrature weights.

use crate::error::{GcgError, Result};
use crate::pde::grid::{Grid, SpaceTimeGrid};

/// Describes how the flat value vector of a [`ControlField`] maps to nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum GridMeta {
    /// Bare vector with no geometric meaning (scalar test problems).
    Plain,
    Space(Grid),
    SpaceTime(SpaceTimeGrid),
}

/// A discrete control: nodal values together with the quadrature weight of
/// each node. All pairings and norms are mass-weighted.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    values: Vec<f64>,
    mass: Vec<f64>,
    meta: GridMeta,
}

impl ControlField {
    pub fn new(values: Vec<f64>, mass: Vec<f64>, meta: GridMeta) -> Result<Self> {
        if values.is_empty() {
            return Err(GcgError::InvalidInput("control field must have at least one node".into()));
        }
        if values.len() != mass.len() {
            return Err(GcgError::DimensionMismatch { expected: values.len(), got: mass.len() });
        }
        if let Some(m) = mass.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(GcgError::InvalidInput(format!("mass weights must be positive and finite, found {m}")));
        }
        Ok(Self { values, mass, meta })
    }

    /// Unweighted field (mass ≡ 1).
    pub fn plain(values: Vec<f64>) -> Result<Self> {
        let mass = vec![1.0; values.len()];
        Self::new(values, mass, GridMeta::Plain)
    }

    pub fn on_grid(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GcgError::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        let mass = vec![grid.cell_measure(); values.len()];
        Self::new(values, mass, GridMeta::Space(*grid))
    }

    pub fn on_space_time(grid: &SpaceTimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GcgError::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        let mass = vec![grid.cell_measure(); values.len()];
        Self::new(values, mass, GridMeta::SpaceTime(*grid))
    }

    /// Field with the same layout and weights but different values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(GcgError::DimensionMismatch { expected: self.values.len(), got: values.len() });
        }
        Ok(Self { values, mass: self.mass.clone(), meta: self.meta.clone() })
    }

    pub fn zeros_like(&self) -> Self {
        Self { values: vec![0.0; self.len()], mass: self.mass.clone(), meta: self.meta.clone() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn check_compatible(&self, other: &ControlField) -> Result<()> {
        if self.len() != other.len() {
            return Err(GcgError::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Mass-weighted pairing `Σ mᵢ aᵢ bᵢ`.
    pub fn dot(&self, other: &ControlField) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .zip(&self.mass)
            .map(|((a, b), m)| m * a * b)
            .sum()
    }

    /// `self + s (other − self)`.
    pub fn lerp(&self, other: &ControlField, s: f64) -> ControlField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + s * (b - a))
            .collect();
        Self { values, mass: self.mass.clone(), meta: self.meta.clone() }
    }

    pub fn sub(&self, other: &ControlField) -> ControlField {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { values, mass: self.mass.clone(), meta: self.meta.clone() }
    }

    pub fn scaled(&self, s: f64) -> ControlField {
        let values = self.values.iter().map(|a| s * a).collect();
        Self { values, mass: self.mass.clone(), meta: self.meta.clone() }
    }
}
