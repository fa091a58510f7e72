//! Compact Pauli labels on up to 64 qubits (logical registers are small:
//! 12 BB logicals, protocol registers up to ~20 rows).
//!
//! Signs are not tracked; byproduct Paulis are handled where they arise.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A Pauli string as (X-mask, Z-mask) over `n` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliLabel {
    pub x: u64,
    pub z: u64,
    pub n: u8,
}

/// Coarse measurement class used by the scheduler: dual-track pairing is
/// only allowed for pure-X / pure-Z labels, and Y-involving steps serialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisClass {
    PureX,
    PureZ,
    Mixed,
}

impl PauliLabel {
    pub fn identity(n: usize) -> Self {
        debug_assert!(n <= 64);
        Self { x: 0, z: 0, n: n as u8 }
    }

    pub fn z_on(n: usize, qubits: u64) -> Self {
        debug_assert!(n <= 64);
        Self { x: 0, z: qubits, n: n as u8 }
    }

    pub fn x_on(n: usize, qubits: u64) -> Self {
        debug_assert!(n <= 64);
        Self { x: qubits, z: 0, n: n as u8 }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn basis_class(&self) -> BasisClass {
        match (self.x, self.z) {
            (_, 0) => BasisClass::PureX,
            (0, _) => BasisClass::PureZ,
            _ => BasisClass::Mixed,
        }
    }

    /// True iff the two strings commute.
    pub fn commutes_with(&self, other: &PauliLabel) -> bool {
        let anti = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        anti % 2 == 0
    }

    /// Product of the two strings, ignoring phase.
    pub fn mul(&self, other: &PauliLabel) -> PauliLabel {
        debug_assert_eq!(self.n, other.n);
        PauliLabel {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            n: self.n,
        }
    }

    /// Single-qubit component at `q`: (has_x, has_z).
    pub fn component(&self, q: usize) -> (bool, bool) {
        ((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }
}

impl fmt::Debug for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n as usize {
            let c = match self.component(q) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutation_rules() {
        let x0 = PauliLabel::x_on(2, 0b01);
        let z0 = PauliLabel::z_on(2, 0b01);
        let z1 = PauliLabel::z_on(2, 0b10);
        assert!(!x0.commutes_with(&z0));
        assert!(x0.commutes_with(&z1));
        let xx = PauliLabel::x_on(2, 0b11);
        let zz = PauliLabel::z_on(2, 0b11);
        assert!(xx.commutes_with(&zz));
    }

    #[test]
    fn basis_class_and_display() {
        let p = PauliLabel { x: 0b01, z: 0b11, n: 2 };
        assert_eq!(p.basis_class(), BasisClass::Mixed);
        assert_eq!(p.to_string(), "YZ");
        assert_eq!(PauliLabel::z_on(3, 0b101).basis_class(), BasisClass::PureZ);
    }
}
