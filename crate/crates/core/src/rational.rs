//! Exact rationals and the conversions between them and floating point.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

pub fn int(v: i64) -> Rational {
    Ratio::from_integer(v)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds `x` to the nearest multiple of `1/den` (ties away from zero).
pub fn snap_to_grid(x: f64, den: i64) -> Rational {
    Ratio::new((x * den as f64).round() as i64, den)
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().ok()?;
            let b: i64 = b.trim().parse().ok()?;
            (b != 0).then(|| Ratio::new(a, b))
        }
        None => s.parse().ok().map(Ratio::from_integer),
    }
}

/// Always prints `num/den`, including for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The fraction with the smallest denominator in the closed interval
/// `[lo, hi]`, found by descending the Stern–Brocot tree with run-length
/// steps. Returns `None` if the interval is empty, contains negative values,
/// or the simplest fraction's denominator exceeds `max_den`.
pub fn simplest_in_interval(lo: f64, hi: f64, max_den: i64) -> Option<Rational> {
    if !(lo <= hi) || hi < 0.0 {
        return None;
    }
    let lo = lo.max(0.0);
    if lo == 0.0 {
        return Some(Rational::zero());
    }
    let fl = lo.floor();
    if fl + 1.0 <= hi || fl == lo {
        let v = if fl == lo { fl } else { fl + 1.0 };
        return Some(int(v as i64));
    }
    // lo and hi share the integer part; recurse on reciprocals of the
    // fractional parts. Iterative continued-fraction form.
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let (mut a, mut b) = (lo, hi);
    loop {
        let k = a.floor();
        if k + 1.0 <= b || k == a {
            let t = if k == a { k } else { k + 1.0 } as i64;
            let p = t.checked_mul(p1)?.checked_add(p0)?;
            let q = t.checked_mul(q1)?.checked_add(q0)?;
            return (q <= max_den).then(|| Ratio::new(p, q));
        }
        let k = k as i64;
        let p = k.checked_mul(p1)?.checked_add(p0)?;
        let q = k.checked_mul(q1)?.checked_add(q0)?;
        if q > max_den {
            return None;
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let (na, nb) = (1.0 / (b - k as f64), 1.0 / (a - k as f64));
        if !na.is_finite() || !nb.is_finite() {
            return None;
        }
        (a, b) = (na, nb);
    }
}

/// Least common multiple of the denominators, or `None` on overflow.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Option<i64> {
    let mut l: i64 = 1;
    for r in it {
        let d = *r.denom();
        let g = l.gcd(&d);
        l = (l / g).checked_mul(d)?;
    }
    Some(l)
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_fraction_search() {
        assert_eq!(simplest_in_interval(1.2 - 1e-9, 1.2 + 1e-9, 100), Some(rat(6, 5)));
        assert_eq!(simplest_in_interval(0.999_999_9, 1.000_000_1, 5), Some(int(1)));
        assert_eq!(
            simplest_in_interval(2.0 / 3.0 - 1e-8, 2.0 / 3.0 + 1e-8, 10),
            Some(rat(2, 3))
        );
        assert_eq!(simplest_in_interval(0.3, 0.36, 100), Some(rat(1, 3)));
        assert_eq!(simplest_in_interval(0.3, 0.36, 2), None);
        assert_eq!(simplest_in_interval(-1.0, 0.5, 2), Some(int(0)));
        assert_eq!(simplest_in_interval(0.5, 0.4, 2), None);
        let x = 355.0 / 113.0;
        assert_eq!(simplest_in_interval(x - 1e-9, x + 1e-9, 1000), Some(rat(355, 113)));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/5"), Some(rat(6, 5)));
        assert_eq!(parse_rational(" 3 "), Some(int(3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(snap_to_grid(1.1, 1_000_000), rat(11, 10));
        assert_eq!(common_denominator(&[rat(1, 4), rat(5, 6)]), Some(12));
    }
}
