//! Exact arithmetic: rationals, sparse polynomials in the chart variables,
//! and elements of the master ring (polynomials over products of
//! distinguished minors).

mod expr;
mod localized;
mod poly;

pub use expr::{parse_expr, Expr};
pub use localized::{det_localized, LocalizedElement, MasterRing, MinorEntry, MinorId, MinorRef};
pub use poly::{det_poly, Monomial, Polynomial, VariableRegistry};

use num_traits::One;

/// Coefficient field. The base field is fixed to ℚ.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `"3"` or `"-3/4"`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if d == num_bigint::BigInt::from(0) {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<num_bigint::BigInt>().ok().map(Rational::from_integer),
    }
}
