//! Exact commutative unital coefficient rings.
//!
//! A ring is a runtime value (so that `ℤ/n` can carry its modulus) with an
//! associated element type. Three rings ship: arbitrary precision integers,
//! exact rationals and integers modulo `n`.

use std::fmt::{self, Debug};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Behavioural contract for a commutative unital ring with decidable equality.
#[allow(clippy::wrong_self_convention)]
pub trait CoefficientRing: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + Eq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// The image of an integer under the unique ring map `ℤ → R`.
    fn from_integer(&self, n: &BigInt) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
    /// Short selector-style name: `z`, `q` or `zmod:N`.
    fn name(&self) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_integer(&BigInt::from(n))
    }
}

/// The integers, arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl CoefficientRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_integer(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn format(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn name(&self) -> String {
        "z".into()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
}

/// The rationals, exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl CoefficientRing for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_integer(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn name(&self) -> String {
        "q".into()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Rationals {
    pub fn fraction(&self, numer: i64, denom: i64) -> BigRational {
        BigRational::new(numer.into(), denom.into())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("unknown ring selector `{0}` (expected z, q or zmod:N)")]
    UnknownSelector(String),
}

/// Integers modulo `n`, with elements stored reduced in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegersMod {
    modulus: u64,
}

impl IntegersMod {
    pub fn new(modulus: u64) -> Result<Self, RingError> {
        if modulus < 2 {
            return Err(RingError::BadModulus(modulus));
        }
        Ok(Self { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl CoefficientRing for IntegersMod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.modulus as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    fn from_integer(&self, n: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        n.mod_floor(&m).to_u64().expect("residue fits in u64")
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn name(&self) -> String {
        format!("zmod:{}", self.modulus)
    }
}

/// Runtime ring choice, as selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingSelector {
    Integers,
    Rationals,
    IntegersMod(u64),
}

impl RingSelector {
    pub fn parse(text: &str) -> Result<Self, RingError> {
        match text.trim() {
            "z" | "Z" => Ok(Self::Integers),
            "q" | "Q" => Ok(Self::Rationals),
            other => {
                let n = other
                    .strip_prefix("zmod:")
                    .and_then(|n| n.parse::<u64>().ok())
                    .ok_or_else(|| RingError::UnknownSelector(other.to_string()))?;
                IntegersMod::new(n)?;
                Ok(Self::IntegersMod(n))
            }
        }
    }
}

impl fmt::Display for RingSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Integers => write!(f, "z"),
            Self::Rationals => write!(f, "q"),
            Self::IntegersMod(n) => write!(f, "zmod:{n}"),
        }
    }
}

/// A failed ring axiom on a concrete triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub operands: String,
}

/// Self-test: checks the commutative unital ring axioms on every triple drawn
/// from `samples`.
pub fn check_ring_axioms<R: CoefficientRing>(ring: &R, samples: &[R::Elem]) -> Result<(), AxiomViolation> {
    let zero = ring.zero();
    let one = ring.one();
    let fail = |axiom, ops: &[&R::Elem]| AxiomViolation {
        axiom,
        operands: ops.iter().map(|x| ring.format(x)).collect::<Vec<_>>().join(", "),
    };
    for a in samples {
        if ring.add(a, &zero) != *a {
            return Err(fail("additive identity", &[a]));
        }
        if ring.mul(a, &one) != *a {
            return Err(fail("multiplicative identity", &[a]));
        }
        if !ring.is_zero(&ring.add(a, &ring.neg(a))) {
            return Err(fail("additive inverse", &[a]));
        }
        for b in samples {
            if ring.add(a, b) != ring.add(b, a) {
                return Err(fail("additive commutativity", &[a, b]));
            }
            if ring.mul(a, b) != ring.mul(b, a) {
                return Err(fail("multiplicative commutativity", &[a, b]));
            }
            for c in samples {
                if ring.add(&ring.add(a, b), c) != ring.add(a, &ring.add(b, c)) {
                    return Err(fail("additive associativity", &[a, b, c]));
                }
                if ring.mul(&ring.mul(a, b), c) != ring.mul(a, &ring.mul(b, c)) {
                    return Err(fail("multiplicative associativity", &[a, b, c]));
                }
                if ring.mul(a, &ring.add(b, c)) != ring.add(&ring.mul(a, b), &ring.mul(a, c)) {
                    return Err(fail("distributivity", &[a, b, c]));
                }
            }
        }
    }
    Ok(())
}
