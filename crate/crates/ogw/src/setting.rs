//! The fixed data every computation runs against: scalar ring, cochain model of `L`,
//! and the interior classes.

use thiserror::Error;

use num_traits::{One, Zero};

use crate::cochain::{s3_extended, sphere_minimal, CochainModel, RelativeModel};
use crate::novikov::{ClassGen, Ring};
use crate::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("inconsistent setting: {0}")]
pub struct SettingError(pub String);

#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    pub ring: Ring,
    pub model: CochainModel,
    pub interior: RelativeModel,
}

impl Setting {
    pub fn new(ring: Ring, model: CochainModel, interior: RelativeModel) -> Result<Self, SettingError> {
        if ring.n != model.n {
            return Err(SettingError(format!("ring dimension {} differs from model dimension {}", ring.n, model.n)));
        }
        if ring.interior_degrees != interior.degrees() {
            return Err(SettingError("ring interior degrees differ from the interior classes".into()));
        }
        Ok(Setting { ring, model, interior })
    }

    pub fn n(&self) -> u32 {
        self.model.n
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn unit_index(&self) -> Option<usize> {
        self.interior.unit_index(&self.model)
    }

    pub fn divisor_indices(&self) -> Vec<usize> {
        self.interior.divisor_indices()
    }

    /// Interior indices that are neither the unit nor a divisor.
    pub fn free_indices(&self) -> Vec<usize> {
        let unit = self.unit_index();
        let div = self.divisor_indices();
        (0..self.ring.num_interior()).filter(|j| Some(*j) != unit && !div.contains(j)).collect()
    }
}

impl Setting {
    /// The sphere `S^n` with no disk classes and `γ_0 = 1` as the only interior class.
    pub fn classical(n: u32) -> Setting {
        let model = sphere_minimal(n);
        let interior = RelativeModel::with_unit(&model, &[], false).expect("unit class is valid");
        let ring = Ring::new(n, vec![], interior.degrees()).expect("classical ring is valid");
        Setting::new(ring, model, interior).expect("classical setting is consistent")
    }

    /// `S^3` (minimal or extended model) with one disk class `b` of energy 1 and the
    /// interior classes `1`, a divisor `h` with `∫_b h = pairing`, and `p` of degree 4.
    pub fn three_sphere(extended: bool, maslov: i64, pairing: Q, real: bool) -> Result<Setting, SettingError> {
        let model = if extended { s3_extended() } else { sphere_minimal(3) };
        let interior = RelativeModel::with_unit(&model, &[("h", 2), ("p", 4)], real)
            .map_err(|e| SettingError(e.to_string()))?;
        let class = ClassGen {
            label: "b".into(),
            energy: Q::one(),
            maslov,
            spherical: true,
            pairing: vec![Q::zero(), pairing, Q::zero()],
        };
        let ring = Ring::new(3, vec![class], interior.degrees()).map_err(|e| SettingError(e.to_string()))?;
        Setting::new(ring, model, interior)
    }
}
