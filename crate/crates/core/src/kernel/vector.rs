//! Labeled coordinate vectors, inequality systems and Farkas answers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{big, format_scalar, int, Scalar};
use crate::error::KernelError;

/// The bilinear form relating a basis to its dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Form {
    /// Identity pairing.
    Euclidean,
    /// diag(1, -1, ..., -1): the Kapranov pairing and the del Pezzo intersection form.
    Lorentzian,
}

/// Which half of a dual pair a vector lives in. Divisors are `Primal`, curves `Dual`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Primal,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisId {
    pub form: Form,
    pub dim: usize,
    pub side: Side,
}

impl BasisId {
    pub fn euclidean(dim: usize) -> Self {
        BasisId {
            form: Form::Euclidean,
            dim,
            side: Side::Primal,
        }
    }

    pub fn dual(self) -> Self {
        let side = match self.side {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        };
        BasisId { side, ..self }
    }

    /// Diagonal entry of the pairing at index `i`.
    pub fn sign(&self, i: usize) -> i32 {
        match self.form {
            Form::Lorentzian if i > 0 => -1,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    pub coords: Vec<Scalar>,
    pub basis: BasisId,
}

impl Vector {
    pub fn new(coords: Vec<Scalar>, basis: BasisId) -> Self {
        debug_assert_eq!(coords.len(), basis.dim);
        Vector { coords, basis }
    }

    pub fn from_ints(v: &[i64], basis: BasisId) -> Self {
        Vector::new(v.iter().map(|&x| int(x)).collect(), basis)
    }

    pub fn from_bigints(v: Vec<BigInt>, basis: BasisId) -> Self {
        Vector::new(v.into_iter().map(big).collect(), basis)
    }

    pub fn zero(basis: BasisId) -> Self {
        Vector::new(vec![Scalar::zero(); basis.dim], basis)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(
            self.basis, other.basis,
            "adding vectors from different bases"
        );
        Vector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
            self.basis,
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(
            self.basis, other.basis,
            "subtracting vectors from different bases"
        );
        Vector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
            self.basis,
        )
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector::new(self.coords.iter().map(|a| a * s).collect(), self.basis)
    }

    pub fn neg(&self) -> Vector {
        Vector::new(self.coords.iter().map(|a| -a).collect(), self.basis)
    }

    /// Integer coordinates, if every coordinate is integral.
    pub fn to_ints(&self) -> Option<Vec<BigInt>> {
        self.coords
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.to_ints()?.iter().map(ToPrimitive::to_i64).collect()
    }

    /// Primitive integer representative of the ray through this vector.
    pub fn primitive(&self) -> Vector {
        Vector::from_bigints(super::scalar::primitive(&self.coords), self.basis)
    }

    /// Coordinates of the functional `x -> pair(self, x)` against the standard dot product.
    pub fn euclidean_functional(&self) -> Vec<Scalar> {
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if self.basis.sign(i) < 0 {
                    -c
                } else {
                    c.clone()
                }
            })
            .collect()
    }

    /// True when `self` is a positive multiple of `other`.
    pub fn same_ray(&self, other: &Vector) -> bool {
        if self.basis != other.basis || self.is_zero() || other.is_zero() {
            return false;
        }
        self.primitive().coords == other.primitive().coords
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_scalar(c))?;
        }
        write!(f, ")")
    }
}

/// Bilinear pairing between a vector and a vector of the dual basis.
pub fn pair(a: &Vector, b: &Vector) -> Result<Scalar, KernelError> {
    if a.basis.dual() != b.basis {
        return Err(KernelError::BasisMismatch {
            left: a.basis,
            right: b.basis,
        });
    }
    let mut acc = Scalar::zero();
    for (i, (x, y)) in a.coords.iter().zip(&b.coords).enumerate() {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        if a.basis.sign(i) < 0 {
            acc -= x * y;
        } else {
            acc += x * y;
        }
    }
    Ok(acc)
}

/// Plain dot product of two coordinate slices.
pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// A polyhedral cone `{ v : f(v) >= 0 for f in inequalities, g(v) = 0 for g in equalities }`.
/// The functionals live in the dual of the basis of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalitySystem {
    pub basis: BasisId,
    pub inequalities: Vec<Vector>,
    pub equalities: Vec<Vector>,
}

impl InequalitySystem {
    pub fn new(basis: BasisId) -> Self {
        InequalitySystem {
            basis,
            inequalities: Vec::new(),
            equalities: Vec::new(),
        }
    }

    /// Basis of the points cut out by the system.
    pub fn point_basis(&self) -> BasisId {
        self.basis.dual()
    }

    pub fn check(&self) -> Result<(), KernelError> {
        for f in self.inequalities.iter().chain(&self.equalities) {
            if f.basis != self.basis {
                return Err(KernelError::BasisMismatch {
                    left: self.basis,
                    right: f.basis,
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: &Vector) -> Result<bool, KernelError> {
        for f in &self.equalities {
            if !pair(f, v)?.is_zero() {
                return Ok(false);
            }
        }
        for f in &self.inequalities {
            if pair(f, v)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Result of a cone membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarkasAnswer {
    /// Nonnegative weights indexed by generator position; zero weights are omitted.
    Combination(BTreeMap<usize, Scalar>),
    /// A functional in the dual basis, negative on the target and nonnegative on every generator.
    Separator(Vector),
}

impl FarkasAnswer {
    pub fn is_member(&self) -> bool {
        matches!(self, FarkasAnswer::Combination(_))
    }

    pub fn combination(&self) -> Option<&BTreeMap<usize, Scalar>> {
        match self {
            FarkasAnswer::Combination(c) => Some(c),
            FarkasAnswer::Separator(_) => None,
        }
    }

    pub fn separator(&self) -> Option<&Vector> {
        match self {
            FarkasAnswer::Separator(s) => Some(s),
            FarkasAnswer::Combination(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lor(side: Side) -> BasisId {
        BasisId {
            form: Form::Lorentzian,
            dim: 3,
            side,
        }
    }

    #[test]
    fn lorentzian_pairing_signs() {
        let d = Vector::from_ints(&[2, 1, 0], lor(Side::Primal));
        let c = Vector::from_ints(&[1, 1, 5], lor(Side::Dual));
        assert_eq!(pair(&d, &c).unwrap(), int(1));
        assert!(pair(&d, &d).is_err());
    }

    #[test]
    fn euclidean_functional_matches_pairing() {
        let d = Vector::from_ints(&[3, -2, 7], lor(Side::Primal));
        let c = Vector::from_ints(&[1, 4, -1], lor(Side::Dual));
        assert_eq!(
            dot(&d.euclidean_functional(), &c.coords),
            pair(&d, &c).unwrap()
        );
    }

    #[test]
    fn rays_compare_up_to_scaling() {
        let b = BasisId::euclidean(2);
        let a = Vector::from_ints(&[2, 4], b);
        assert!(a.same_ray(&Vector::from_ints(&[1, 2], b)));
        assert!(!a.same_ray(&Vector::from_ints(&[-1, -2], b)));
    }
}
