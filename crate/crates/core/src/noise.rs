//! Error channels and their assignment to gates.
//!
//! Errors act after the ideal gate. A [`GateNoiseMap`] resolves every group
//! element (and every interleaved step) to exactly one noisy superoperator,
//! which allows the strongly gate-dependent models used when the
//! non-Clifford rotation is implemented differently from the rest of the
//! group.

use crate::dihedral::GroupElement;
use crate::error::{Error, Result};
use crate::liouville::{is_cptp, unitary_to_superop, Superoperator, UnitarySpec};

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    None,
    /// `diag(1, p, p, p)`.
    Depolarizing {
        p: f64,
    },
    /// Coherent rotation error.
    OverRotation(UnitarySpec),
    /// Children applied in order: the first child acts first.
    Composed(Vec<NoiseSpec>),
}

impl NoiseSpec {
    pub fn to_superop(&self) -> Result<Superoperator> {
        let m = match self {
            NoiseSpec::None => Superoperator::identity(),
            NoiseSpec::Depolarizing { p } => depolarizing(*p)?,
            NoiseSpec::OverRotation(u) => unitary_to_superop(u)?,
            NoiseSpec::Composed(children) => children
                .iter()
                .try_fold(Superoperator::identity(), |acc, c| {
                    Ok::<_, Error>(c.to_superop()?.compose(&acc))
                })?,
        };
        if !is_cptp(&m) {
            return Err(Error::unphysical(format!("{self:?} is not CPTP")));
        }
        Ok(m)
    }

    pub fn is_none(&self) -> bool {
        match self {
            NoiseSpec::None => true,
            NoiseSpec::Composed(c) => c.iter().all(NoiseSpec::is_none),
            _ => false,
        }
    }
}

/// `diag(1, p, p, p)` for `p` in `[0, 1]`.
pub fn depolarizing(p: f64) -> Result<Superoperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "depolarizing parameter {p} outside [0, 1]"
        )));
    }
    Ok(Superoperator::diagonal([1.0, p, p, p]))
}

/// Depolarizing parameter with average fidelity `fidelity`: `p = 2F - 1`.
pub fn depolarizing_for_fidelity(fidelity: f64) -> Result<NoiseSpec> {
    if !(0.5..=1.0).contains(&fidelity) {
        return Err(Error::invalid(format!(
            "depolarizing fidelity {fidelity} outside [1/2, 1]"
        )));
    }
    Ok(NoiseSpec::Depolarizing {
        p: 2.0 * fidelity - 1.0,
    })
}

/// Rotation about `axis` by `arccos(3F - 2)`, the angle with average fidelity `F`.
pub fn over_rotation_for_fidelity(axis: [f64; 3], target_fidelity: f64) -> Result<NoiseSpec> {
    let c = 3.0 * target_fidelity - 2.0;
    if !target_fidelity.is_finite() || target_fidelity > 1.0 || !(-1.0..=1.0).contains(&c) {
        return Err(Error::invalid(format!(
            "no rotation has average fidelity {target_fidelity} (need 1/3 <= F <= 1)"
        )));
    }
    Ok(NoiseSpec::OverRotation(UnitarySpec::new(axis, c.acos())?))
}

/// Gate label resolved by a [`GateNoiseMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateTag {
    /// A group element applied on its own. With generator noise, odd
    /// rotations are built as `R_j(1)` times an element of the even subgroup.
    Element(GroupElement),
    /// A group element implemented directly, never split into cosets.
    Native(GroupElement),
    /// Interleaved step `R_{2j}(1) g`: the half-step rotation after `g in D_j`.
    Interleaved(GroupElement),
}

/// Assignment of one error channel to each gate.
///
/// Resolution order for `Element(g)`:
/// 1. an override keyed by `g` replaces everything;
/// 2. with `generator_noise` set, even `j` and odd rotation index, `g` is
///    split as `R_j(1) h` with `h` in the index-two subgroup, giving
///    `N_gen R_j(1) N_default h`;
/// 3. otherwise `N_default g`.
///
/// `Interleaved(g)` resolves to `N_gen R_{2j}(1) [resolved g]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateNoiseMap {
    pub default: NoiseSpec,
    pub overrides: Vec<(GroupElement, NoiseSpec)>,
    pub generator_noise: Option<NoiseSpec>,
}

impl Default for GateNoiseMap {
    fn default() -> Self {
        GateNoiseMap::uniform(NoiseSpec::None)
    }
}

impl GateNoiseMap {
    pub fn uniform(default: NoiseSpec) -> Self {
        GateNoiseMap {
            default,
            overrides: Vec::new(),
            generator_noise: None,
        }
    }

    pub fn with_generator_noise(mut self, noise: NoiseSpec) -> Self {
        self.generator_noise = Some(noise);
        self
    }

    pub fn with_override(mut self, gate: GroupElement, noise: NoiseSpec) -> Self {
        self.overrides.retain(|(g, _)| *g != gate);
        self.overrides.push((gate, noise));
        self
    }

    fn override_for(&self, gate: &GroupElement) -> Option<&NoiseSpec> {
        self.overrides
            .iter()
            .find(|(g, _)| g == gate)
            .map(|(_, n)| n)
    }

    /// Overrides must belong to the group of the experiment.
    pub fn validate(&self, order: u32) -> Result<()> {
        for (g, _) in &self.overrides {
            if g.order() != order {
                return Err(Error::config(format!(
                    "noise override for {g} does not belong to D_{order}"
                )));
            }
        }
        let mut seen: Vec<&GroupElement> = self.overrides.iter().map(|(g, _)| g).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("duplicate noise override"));
        }
        Ok(())
    }

    /// Noisy superoperator (error after ideal gate) for `gate`.
    pub fn resolve(&self, gate: GateTag) -> Result<Superoperator> {
        match gate {
            GateTag::Element(g) => self.resolve_element(&g),
            GateTag::Native(g) => self.resolve_native(&g),
            GateTag::Interleaved(g) => {
                let inner = self.resolve_native(&g)?;
                let half_step = GroupElement::generator(2 * g.order()).to_superop();
                let n_gen = self
                    .generator_noise
                    .as_ref()
                    .map_or(Ok(Superoperator::identity()), NoiseSpec::to_superop)?;
                Ok(n_gen * half_step * inner)
            }
        }
    }

    fn resolve_native(&self, g: &GroupElement) -> Result<Superoperator> {
        match self.override_for(g) {
            Some(n) => Ok(n.to_superop()? * g.to_superop()),
            None => Ok(self.default.to_superop()? * g.to_superop()),
        }
    }

    fn resolve_element(&self, g: &GroupElement) -> Result<Superoperator> {
        if let Some(n) = self.override_for(g) {
            return Ok(n.to_superop()? * g.to_superop());
        }
        let n_default = self.default.to_superop()?;
        match &self.generator_noise {
            Some(n_gen) if g.rotation() % 2 == 1 => {
                if !g.order().is_multiple_of(2) {
                    return Err(Error::config(format!(
                        "cannot split {g} into a generator and an index-two subgroup element: j is odd"
                    )));
                }
                let gen = GroupElement::generator(g.order());
                let base = gen.inverse().multiply(g)?;
                Ok(n_gen.to_superop()? * gen.to_superop() * n_default * base.to_superop())
            }
            _ => Ok(n_default * g.to_superop()),
        }
    }
}
