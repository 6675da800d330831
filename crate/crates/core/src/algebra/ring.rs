//! Minimal commutative-ring interface for the generic series code.
//!
//! Quotient rings need their modulus to build constants, so constructors
//! take `&self` as a prototype.

use std::fmt::Debug;

use num_traits::{One, Zero};

use super::rational::Q;
use crate::error::{Error, Result};

pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn from_q(&self, c: Q) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn try_inv(&self) -> Result<Self>;

    fn one_like(&self) -> Self {
        self.from_q(Q::one())
    }

    fn scale_q(&self, c: &Q) -> Self {
        self.mul(&self.from_q(c.clone()))
    }
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn from_q(&self, c: Q) -> Self {
        c
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::ZeroDivisor)
        } else {
            Ok(Q::one() / self)
        }
    }
    fn scale_q(&self, c: &Q) -> Self {
        self * c
    }
}
