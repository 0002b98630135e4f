//! All filtration data of one panel, computed once.

use crate::configmodel::{trace_form, ConfigError, FnVec, Panel};
use crate::exactlin::{BilinearForm, Scalar};
use crate::filtration::{
    compute_filtration, orthogonal_decomposition_with, reduce, reduced_model, Filtration,
    FiltrationError, GradedModel, Reduction,
};

/// A panel with its filtration, reduction, and graded models.
///
/// The ambient model lives on all `d` points with summands `H⁰..H^ℓ`; the
/// reduced model lives on the `d′` classes with summands `H⁰..H^{ℓ-1}`.
#[derive(Clone, Debug)]
pub struct Fibre {
    panel: Panel,
    filtration: Filtration,
    reduction: Reduction,
    ambient: GradedModel,
    reduced: GradedModel,
}

impl Fibre {
    pub fn new(panel: Panel) -> Result<Self, FiltrationError> {
        let q = trace_form(panel.d());
        Fibre::with_form(panel, &q)
    }

    pub fn with_form(panel: Panel, q: &BilinearForm) -> Result<Self, FiltrationError> {
        let filtration = compute_filtration(&panel);
        let reduction = reduce(&panel, &filtration)?;
        let ambient = orthogonal_decomposition_with(&filtration, q)?;
        let reduced = reduced_model(&ambient, &filtration, &reduction)?;
        Ok(Fibre { panel, filtration, reduction, ambient, reduced })
    }

    pub fn panel(&self) -> &Panel {
        &self.panel
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn ambient(&self) -> &GradedModel {
        &self.ambient
    }

    pub fn reduced(&self) -> &GradedModel {
        &self.reduced
    }

    pub fn length(&self) -> usize {
        self.filtration.length()
    }

    pub fn hilbert(&self) -> &[usize] {
        self.filtration.hilbert()
    }

    pub fn d(&self) -> usize {
        self.panel.d()
    }

    pub fn d_prime(&self) -> usize {
        self.reduction.d_prime()
    }

    /// Values of a panel function on the classes of the reduction.
    pub fn to_reduced(&self, t: &FnVec) -> Result<FnVec, ConfigError> {
        if t.len() != self.d() {
            return Err(ConfigError::ConfigMismatch { expected: self.d(), found: t.len() });
        }
        if !self.panel.contains(t) {
            return Err(ConfigError::NotInPanel);
        }
        let vals: Vec<Scalar> = self.reduction.restrict(t.values()).ok_or(ConfigError::NotInPanel)?;
        Ok(FnVec::new(vals))
    }

    /// Adapted panel basis in reduced coordinates.
    pub fn reduced_panel_basis(&self) -> Vec<FnVec> {
        self.panel
            .adapted_basis()
            .iter()
            .map(|b| self.to_reduced(b).expect("panel basis lies in the panel"))
            .collect()
    }

    /// Points `a` whose delta function has zero `H⁰`-component.
    pub fn delta_heads_vanishing(&self) -> Vec<usize> {
        let p0 = self.ambient.projector(0);
        (0..self.d()).filter(|&a| p0.column(a).iter().all(num::Zero::is_zero)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GenSpec};

    #[test]
    fn delta_heads_on_general_points() {
        let f = Fibre::new(generate(&GenSpec::General { d: 7, r: 2 }, 1).unwrap()).unwrap();
        assert!(f.delta_heads_vanishing().is_empty());
    }
}
