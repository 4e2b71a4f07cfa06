//! Exact truncated q-series: [`QSeries`] in `q` alone, [`XSeries`] with an
//! extra Laurent variable `x`, and the product/theta/eta constructors built on them.

mod dense;
pub mod products;
mod series;
mod xseries;

pub use products::{
    eta_quotient, partition_series, pochhammer_finite, pochhammer_finite_inverse, pochhammer_infinite,
    pochhammer_infinite_inverse, theta_sum, verify_jtp, Comparison, EtaFactor, FactorSpec, ThetaSpec,
};
pub use series::QSeries;
pub use xseries::{Mismatch, XSeries};

pub(crate) use dense::apply_unit_factor;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_rational, Rational};

/// Integer that serializes as a JSON number when it fits in `i64` and as a
/// decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigNum(pub BigInt);

impl Serialize for BigNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BigNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(BigNum(BigInt::from(v))),
            Raw::Str(s) => s.parse().map(BigNum).map_err(serde::de::Error::custom),
        }
    }
}

/// `(x_degree, exponent_numerator, exponent_denominator, coeff_numerator, coeff_denominator)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord(pub i64, pub i64, pub i64, pub BigNum, pub BigNum);

/// Rational exponent as `{num, den}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frac {
    pub num: i64,
    pub den: i64,
}

impl Frac {
    pub fn from_rational(r: &Rational) -> Frac {
        use num_traits::ToPrimitive;
        Frac {
            num: r.numer().to_i64().expect("exponent fits i64"),
            den: r.denom().to_i64().expect("exponent fits i64"),
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.into(), self.den.into())
    }
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&fmt_rational(&self.to_rational()))
    }
}

/// Serialized form of an [`XSeries`] (a [`QSeries`] is the x-degree-0 case).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDump {
    pub trunc: Option<Frac>,
    pub terms: Vec<SeriesRecord>,
}

impl SeriesDump {
    /// Records ordered by x-degree, then exponent.
    pub fn from_xseries(s: &XSeries) -> SeriesDump {
        let mut terms = Vec::new();
        for (x, q) in s.members() {
            for (e, c) in q.terms() {
                let f = Frac::from_rational(&e);
                terms.push(SeriesRecord(
                    x,
                    f.num,
                    f.den,
                    BigNum(c.numer().clone()),
                    BigNum(c.denom().clone()),
                ));
            }
        }
        SeriesDump { trunc: s.trunc().as_ref().map(Frac::from_rational), terms }
    }

    pub fn to_xseries(&self) -> XSeries {
        let trunc = self.trunc.as_ref().map(Frac::to_rational);
        let members = self.terms.iter().map(|r| {
            let e = Rational::new(r.1.into(), r.2.into());
            let c = Rational::new(r.3 .0.clone(), r.4 .0.clone());
            (r.0, QSeries::monomial(c, &e))
        });
        XSeries::from_members(members, trunc.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn dump_roundtrip_keeps_big_coefficients() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let s = XSeries::from_members(
            [
                (0, QSeries::monomial(Rational::from_integer(big), &rat(1, 2))),
                (-3, QSeries::monomial(rat(-2, 7), &int(1))),
            ],
            Some(&int(4)),
        );
        let dump = SeriesDump::from_xseries(&s);
        let json = serde_json::to_string(&dump).unwrap();
        assert!(json.contains("\"123456789012345678901234567890\""));
        let back: SeriesDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_xseries(), s);
        assert_eq!(dump.terms[0], SeriesRecord(-3, 1, 1, BigNum((-2).into()), BigNum(7.into())));
    }
}
