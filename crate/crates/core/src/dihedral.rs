//! The dihedral group `D_j = <R_j(1), X>` at the Bloch-sphere level.
//!
//! An element `(z, x)` denotes the gate `R_j(z) X^x`: first the optional X
//! flip, then a rotation by `2*pi*z/j` about z. Global phases do not exist at
//! the channel level, so the multiplication law is
//! `(z_a, x_a)(z_b, x_b) = (z_a + (-1)^x_a z_b mod j, x_a xor x_b)`.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::liouville::Superoperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    order: u32,
    rotation: u32,
    flip: bool,
}

impl GroupElement {
    /// `R_j(z) X^x`; `z` is reduced mod `j`.
    pub fn new(order: u32, rotation: i64, flip: bool) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("dihedral order j must be positive"));
        }
        Ok(GroupElement {
            order,
            rotation: rotation.rem_euclid(order as i64) as u32,
            flip,
        })
    }

    pub fn identity(order: u32) -> Self {
        GroupElement {
            order: order.max(1),
            rotation: 0,
            flip: false,
        }
    }

    /// `R_j(1)`, the smallest rotation.
    pub fn generator(order: u32) -> Self {
        GroupElement {
            order: order.max(1),
            rotation: 1 % order.max(1),
            flip: false,
        }
    }

    pub fn x_gate(order: u32) -> Self {
        GroupElement {
            order: order.max(1),
            rotation: 0,
            flip: true,
        }
    }

    /// The Z gate `R_j(j/2)`; only a member for even `j`.
    pub fn z_gate(order: u32) -> Option<Self> {
        (order > 0 && order.is_multiple_of(2)).then_some(GroupElement {
            order,
            rotation: order / 2,
            flip: false,
        })
    }

    /// All `2j` elements, rotations first.
    pub fn elements(order: u32) -> impl Iterator<Item = GroupElement> {
        let order = order.max(1);
        (0..2 * order).map(move |i| GroupElement::from_index(order, i as usize))
    }

    pub fn from_index(order: u32, index: usize) -> Self {
        let index = index % (2 * order as usize);
        GroupElement {
            order,
            rotation: (index % order as usize) as u32,
            flip: index >= order as usize,
        }
    }

    /// Position in [`GroupElement::elements`].
    pub fn index(&self) -> usize {
        self.rotation as usize + if self.flip { self.order as usize } else { 0 }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rotation(&self) -> u32 {
        self.rotation
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    /// `self` after `other`.
    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.order != other.order {
            return Err(Error::invalid(format!(
                "cannot multiply elements of D_{} and D_{}",
                self.order, other.order
            )));
        }
        let j = self.order as i64;
        let zb = other.rotation as i64;
        let z = self.rotation as i64 + if self.flip { -zb } else { zb };
        Ok(GroupElement {
            order: self.order,
            rotation: z.rem_euclid(j) as u32,
            flip: self.flip ^ other.flip,
        })
    }

    pub fn inverse(&self) -> GroupElement {
        if self.flip {
            *self
        } else {
            GroupElement {
                rotation: (self.order - self.rotation) % self.order,
                ..*self
            }
        }
    }

    /// Image under the inclusion `D_j -> D_{kj}`, `(z, x) -> (kz, x)`.
    pub fn embed(&self, factor: u32) -> GroupElement {
        GroupElement {
            order: self.order * factor,
            rotation: self.rotation * factor,
            flip: self.flip,
        }
    }

    /// Preimage under [`GroupElement::embed`], if the rotation is a multiple of `factor`.
    pub fn restrict(&self, factor: u32) -> Option<GroupElement> {
        (factor > 0 && self.order.is_multiple_of(factor) && self.rotation.is_multiple_of(factor))
            .then(|| GroupElement {
                order: self.order / factor,
                rotation: self.rotation / factor,
                flip: self.flip,
            })
    }

    /// Liouville matrix as the direct sum of the trivial, faithful and parity irreps.
    pub fn to_superop(&self) -> Superoperator {
        let (s, c) = (TAU * self.rotation as f64 / self.order as f64).sin_cos();
        let sign = if self.flip { -1.0 } else { 1.0 };
        Superoperator::from_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -sign * s, 0.0],
            [0.0, s, sign * c, 0.0],
            [0.0, 0.0, 0.0, sign],
        ])
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R_{}({}){}",
            self.order,
            self.rotation,
            if self.flip { "X" } else { "" }
        )
    }
}

/// The three inequivalent irreps in the Liouville representation of `D_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Irrep {
    Trivial,
    Faithful,
    Parity,
}

impl Irrep {
    pub const ALL: [Irrep; 3] = [Irrep::Trivial, Irrep::Faithful, Irrep::Parity];

    pub fn dimension(&self) -> usize {
        self.indices().len()
    }

    /// Liouville indices (0 = I, 1 = X, 2 = Y, 3 = Z) the irrep occupies.
    pub fn indices(&self) -> &'static [usize] {
        match self {
            Irrep::Trivial => &[0],
            Irrep::Faithful => &[1, 2],
            Irrep::Parity => &[3],
        }
    }
}

/// Group average `(2j)^-1 sum_g g^-1 e g`.
///
/// For trace-preserving `e` the result is `diag(1, p1, p1, p0)`; the X flips
/// cancel any non-unital shift.
pub fn twirl(e: &Superoperator, order: u32) -> Superoperator {
    let order = order.max(1);
    let mut acc = nalgebra::Matrix4::zeros();
    for g in GroupElement::elements(order) {
        let gm = g.to_superop();
        let gi = g.inverse().to_superop();
        acc += (gi * *e * gm).matrix();
    }
    Superoperator::from_matrix(acc / (2.0 * order as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    /// Parity (Z) block decay.
    pub p0: f64,
    /// Faithful (XY) block decay.
    pub p1: f64,
}

impl DecayParams {
    pub fn avg_fidelity(&self) -> f64 {
        0.5 + (self.p0 + 2.0 * self.p1) / 6.0
    }
}

pub fn decay_params(e: &Superoperator) -> DecayParams {
    DecayParams {
        p0: e.get(3, 3),
        p1: (e.get(1, 1) + e.get(2, 2)) / 2.0,
    }
}
