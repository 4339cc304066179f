//! Base fields: the rationals (arbitrary precision) and prime fields `F_p` with `p < 2^31`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which base field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p")]
pub enum FieldSpec {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "Fp")]
    Prime(u32),
}

impl FieldSpec {
    /// Default working field. Fast, and at desk scale the corpus examples are
    /// characteristic-independent; use `Q` for final certification.
    pub const DEFAULT: FieldSpec = FieldSpec::Prime(32003);

    pub fn prime(p: u64) -> Result<FieldSpec, Error> {
        if p >= (1u64 << 31) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(FieldSpec::Prime(p as u32))
    }

    /// Parses `Q` or `Fp:<p>`.
    pub fn parse(s: &str) -> Result<FieldSpec, Error> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("Fp:")
            .or_else(|| s.strip_prefix("fp:"))
            .ok_or_else(|| Error::InvalidField(format!("expected `Q` or `Fp:<p>`, got `{s}`")))?;
        let p: u64 = p
            .parse()
            .map_err(|_| Error::InvalidField(format!("bad prime `{p}`")))?;
        FieldSpec::prime(p)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact field arithmetic. Elements are kept in canonical form (lowest terms,
/// least nonnegative residue) so that `==` is mathematical equality.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Parses an integer or a fraction `a/b`.
    fn parse(&self, s: &str) -> Result<Self::Elem, Error>;
    fn render(&self, a: &Self::Elem) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `dst -= c * src`, entrywise.
    fn sub_scaled(&self, dst: &mut [Self::Elem], c: &Self::Elem, src: &[Self::Elem]) {
        for (d, s) in dst.iter_mut().zip(src) {
            if !self.is_zero(s) {
                *d = self.sub(d, &self.mul(c, s));
            }
        }
    }

    /// `dst += c * src`, entrywise.
    fn add_scaled(&self, dst: &mut [Self::Elem], c: &Self::Elem, src: &[Self::Elem]) {
        let minus = self.neg(c);
        self.sub_scaled(dst, &minus, src);
    }

    fn scale(&self, v: &mut [Self::Elem], c: &Self::Elem) {
        for x in v.iter_mut() {
            *x = self.mul(x, c);
        }
    }

    fn zeros(&self, n: usize) -> Vec<Self::Elem> {
        vec![self.zero(); n]
    }

    fn unit_vector(&self, n: usize, i: usize) -> Vec<Self::Elem> {
        let mut v = self.zeros(n);
        v[i] = self.one();
        v
    }

    fn is_zero_vec(&self, v: &[Self::Elem]) -> bool {
        v.iter().all(|x| self.is_zero(x))
    }
}

/// The rationals with arbitrary-precision numerators and denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn parse(&self, s: &str) -> Result<BigRational, Error> {
        let (num, den) = split_fraction(s)?;
        if den.is_zero() {
            return Err(Error::Scalar(format!("zero denominator in `{s}`")));
        }
        Ok(BigRational::new(num, den))
    }
    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// `F_p` for a prime `p < 2^31`; elements are least nonnegative residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<PrimeField, Error> {
        FieldSpec::prime(p as u64)?;
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce_big(&self, n: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        let r = ((n % &p) + &p) % &p;
        r.to_string().parse().expect("residue fits in u32")
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + self.p as u64 - *b as u64) % self.p as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero");
        // Fermat: a^(p-2)
        let p = self.p as u64;
        let mut base = *a as u64;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }
    fn parse(&self, s: &str) -> Result<u32, Error> {
        let (num, den) = split_fraction(s)?;
        let den = self.reduce_big(&den);
        if den == 0 {
            return Err(Error::Scalar(format!(
                "denominator of `{s}` vanishes mod {}",
                self.p
            )));
        }
        Ok(self.mul(&self.reduce_big(&num), &self.inv(&den)))
    }
    fn render(&self, a: &u32) -> String {
        a.to_string()
    }

    fn sub_scaled(&self, dst: &mut [u32], c: &u32, src: &[u32]) {
        if *c == 0 {
            return;
        }
        let p = self.p as u64;
        let nc = (p - *c as u64) % p;
        for (d, s) in dst.iter_mut().zip(src) {
            *d = ((*d as u64 + nc * *s as u64) % p) as u32;
        }
    }
}

fn split_fraction(s: &str) -> Result<(BigInt, BigInt), Error> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, Error> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Scalar(format!("not a scalar: `{s}`")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_negative() {
                Ok((-parse_int(n)?, -d))
            } else {
                Ok((parse_int(n)?, d))
            }
        }
        None => Ok((parse_int(s)?, BigInt::one())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(5).unwrap();
        for a in 1..5u32 {
            assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }
        assert_eq!(f.parse("3/2").unwrap(), 4);
        assert_eq!(f.parse("-1").unwrap(), 4);
        assert!(f.parse("1/5").is_err());
    }

    #[test]
    fn rationals_parse_render() {
        let q = Rationals;
        let x = q.parse("6/-4").unwrap();
        assert_eq!(q.render(&x), "-3/2");
        assert_eq!(q.render(&q.parse("7").unwrap()), "7");
    }

    #[test]
    fn field_spec_parse() {
        assert_eq!(FieldSpec::parse("Q").unwrap(), FieldSpec::Rationals);
        assert_eq!(FieldSpec::parse("Fp:7").unwrap(), FieldSpec::Prime(7));
        assert!(FieldSpec::parse("Fp:8").is_err());
        assert!(FieldSpec::parse("Fp:2147483659").is_err());
    }
}
