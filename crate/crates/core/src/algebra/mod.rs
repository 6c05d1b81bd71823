//! Exact arithmetic: rationals, monomials, monomial orders and multivariate
//! polynomials.

mod monomial;
mod parse;
mod polynomial;

pub use monomial::{Monomial, MonomialOrder};
pub use polynomial::{poly_arith, scalar_to_f64, ArithOp, Polynomial, Ring};

/// Exact rational in lowest terms with positive denominator.
pub type Scalar = num_rational::BigRational;

/// Parse a decimal literal (`0.1`, `1e-10`, `-3/7`, `2`) into an exact rational.
pub fn parse_scalar(text: &str) -> crate::Result<Scalar> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let t = text.trim();
    let bad = || crate::Error::Parse(format!("not a rational literal: `{text}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Scalar::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Scalar::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Scalar::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Exact rational from a finite float (every finite double is a dyadic rational).
pub fn scalar_from_f64(x: f64) -> Option<Scalar> {
    Scalar::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_scalar("0.1").unwrap(), Scalar::new(1.into(), 10.into()));
        assert_eq!(
            parse_scalar("1e-10").unwrap(),
            Scalar::new(1.into(), num_bigint::BigInt::from(10_000_000_000i64))
        );
        assert_eq!(parse_scalar("-3/6").unwrap(), Scalar::new((-1).into(), 2.into()));
        assert_eq!(parse_scalar("2").unwrap(), Scalar::from_integer(2.into()));
        assert_eq!(parse_scalar("2.5E1").unwrap(), Scalar::from_integer(25.into()));
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("1/0").is_err());
    }
}
