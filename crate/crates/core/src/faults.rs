//! Deliberately corrupted bundles, each of which loading must reject with a named
//! check and a witness.

use crate::builtins;
use crate::bundle::Bundle;
use crate::error::Error;
use crate::geometry::Geometry;
use crate::linalg::{self, Mat};
use crate::scalar::Scalar;

pub struct Fault {
    pub name: &'static str,
    /// The check that has to fail.
    pub check: &'static str,
    pub bundle: Bundle,
}

impl Fault {
    /// Loads the bundle and returns the witness if the expected check rejected it.
    pub fn detect(&self) -> std::result::Result<String, String> {
        match Geometry::from_bundle(&self.bundle, None) {
            Ok(_) => Err(format!("{}: bundle loaded", self.name)),
            Err(Error::Validation { check, witness }) if check == self.check && !witness.is_empty() => Ok(witness),
            Err(e) => Err(format!("{}: expected [{}], got {e}", self.name, self.check)),
        }
    }
}

/// `d(δ₀)` picks up a constant, which breaks the Leibniz rule.
pub fn broken_leibniz() -> Fault {
    let mut b = builtins::two_point();
    let x = b.d.get(0, 0).clone() + Scalar::ONE;
    b.d.set(0, 0, x);
    Fault { name: "corrupt d", check: "leibniz", bundle: b }
}

pub fn singular_sigma() -> Fault {
    let mut b = builtins::two_point();
    let n = b.right_connection.sigma_inv.rows();
    b.right_connection.sigma_inv = Mat::zeros(n, n);
    Fault { name: "singular σ⁻¹", check: "sigma-invertible", bundle: b }
}

/// `f₀₁(ω₀₁) = δ₀` instead of `δ₁`, so `f₀₁` is no longer right linear.
pub fn non_linear_field() -> Fault {
    let mut b = builtins::two_point();
    let f = &mut b.dual_basis.fields[0];
    f.set(1, 0, Scalar::ZERO);
    f.set(0, 0, Scalar::ONE);
    Fault { name: "corrupt dual basis", check: "ev-bimodule", bundle: b }
}

/// Shifts `δ₀` around a cycle of products on ℤ₃. The unit survives, associativity
/// does not (unital algebras of dimension 2 are always associative).
pub fn non_associative() -> Fault {
    let mut b = builtins::z3();
    let v = linalg::unit(3, 0);
    let mul = &mut b.algebra.mul;
    for (i, j, sign) in [(1, 2, 1), (1, 1, -1), (0, 2, -1), (0, 1, 1)] {
        mul[i][j] = linalg::add(&mul[i][j], &linalg::scale(&Scalar::from_int(sign), &v));
    }
    Fault { name: "corrupt product", check: "associativity", bundle: b }
}

pub fn negative_state() -> Fault {
    let mut b = builtins::two_point();
    b.states[0].functional = vec![Scalar::from_int(2), Scalar::from_int(-1)];
    Fault { name: "negative state", check: "state-positive", bundle: b }
}

pub fn all() -> Vec<Fault> {
    vec![broken_leibniz(), singular_sigma(), non_linear_field(), non_associative(), negative_state()]
}

/// The two-point geometry with `□` doubled after loading. Twice a right connection
/// is not one, but nothing derived from it is cached yet.
pub fn doubled_box() -> Geometry {
    let mut g = Geometry::from_bundle(&builtins::two_point(), None).expect("builtin loads");
    let b = g.box_.scale(&Scalar::from_int(2));
    g.inject_box_unchecked(b);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fault_is_caught() {
        for f in all() {
            let w = f.detect().unwrap();
            assert!(!w.is_empty(), "{}", f.name);
        }
    }
}
