//! Gaussian rationals `a + b·i` with `a, b ∈ ℚ`, the exact scalar field for
//! the subspace computations. ℚ(i) has characteristic 0, so 2 is invertible.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse Gaussian rational from {0:?}")]
    Parse(String),
}

/// An element of ℚ(i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re² + im²`, the field norm down to ℚ.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm_sq();
        Ok(Self {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    /// Nearest double-precision value, exact on small integers.
    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    #[allow(clippy::suspicious_arithmetic_impl)] // z/w computed as z·w⁻¹
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inverse().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Renders as `a/b`, `c/d i`, or `a/b+c/d i` (with `-` absorbed into the
    /// imaginary numerator), the notation used by the generating-set files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{} i", format_rational(&self.im));
        }
        if self.im.is_negative() {
            write!(
                f,
                "{}-{} i",
                format_rational(&self.re),
                format_rational(&-self.im.clone())
            )
        } else {
            write!(f, "{}+{} i", format_rational(&self.re), format_rational(&self.im))
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|_| err())?;
        Ok(BigRational::from_integer(n))
    }
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    /// Accepts `a`, `a/b`, `c i`, `c/d i`, `a/b+c/d i`, `a/b-c/d i`, and the
    /// bare units `i`, `-i`. Whitespace around tokens is ignored.
    fn from_str(raw: &str) -> Result<Self, ScalarError> {
        let s = raw.trim();
        let err = || ScalarError::Parse(raw.to_string());
        if s.is_empty() {
            return Err(err());
        }
        if let Some(body) = s.strip_suffix('i') {
            let body = body.trim();
            // Pure imaginary or full a+bi form; split at the sign that
            // separates the real part from the imaginary coefficient.
            // The real part may itself start with '-'.
            let split_at = body
                .char_indices()
                .skip(1)
                .find(|&(idx, ch)| {
                    (ch == '+' || ch == '-') && !body[..idx].trim_end().ends_with('/')
                })
                .map(|(idx, _)| idx);
            match split_at {
                Some(idx) => {
                    let re = parse_rational(&body[..idx])?;
                    let sign_im = &body[idx..];
                    let im = match sign_im.chars().next() {
                        Some('+') => {
                            let rest = sign_im[1..].trim();
                            if rest.is_empty() {
                                BigRational::one()
                            } else {
                                parse_rational(rest)?
                            }
                        }
                        Some('-') => {
                            let rest = sign_im[1..].trim();
                            if rest.is_empty() {
                                -BigRational::one()
                            } else {
                                -parse_rational(rest)?
                            }
                        }
                        _ => return Err(err()),
                    };
                    Ok(Self { re, im })
                }
                None => {
                    let body = body.trim();
                    let im = if body.is_empty() {
                        BigRational::one()
                    } else if body == "-" {
                        -BigRational::one()
                    } else {
                        parse_rational(body)?
                    };
                    Ok(Self {
                        re: BigRational::zero(),
                        im,
                    })
                }
            }
        } else {
            Ok(Self {
                re: parse_rational(s)?,
                im: BigRational::zero(),
            })
        }
    }
}
