//! Decimal display rounding.
//!
//! Rounding operates on the shortest decimal representation of the `f64`
//! (the digits `{}` would print), so a value such as `26.95` rounds to
//! `27.0` as it would by hand, even though its binary value is slightly
//! below the tie.

/// Formats `x` with exactly `decimals` fractional digits, rounding half away
/// from zero.
pub fn format_fixed(x: f64, decimals: u32) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("LowerExp always has an exponent");
    let exp: i64 = exp.parse().expect("LowerExp exponent is an integer");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    // x = digits * 10^shift
    let shift = exp - (digits.len() as i64 - 1);
    let k = shift + i64::from(decimals);

    let scaled: Option<u128> = if k >= 0 {
        digits
            .parse::<u128>()
            .ok()
            .and_then(|n| 10u128.checked_pow(k as u32).and_then(|p| n.checked_mul(p)))
    } else if -k > 38 {
        Some(0)
    } else {
        let n: u128 = digits.parse().expect("mantissa digits fit in u128");
        let div = 10u128.pow((-k) as u32);
        let (q, r) = (n / div, n % div);
        Some(if r >= div / 2 { q + 1 } else { q })
    };

    let Some(scaled) = scaled else {
        // too large to carry a fractional part; exact already
        return format!("{x:.prec$}", prec = decimals as usize);
    };

    let mut body = scaled.to_string();
    if decimals > 0 {
        let d = decimals as usize;
        if body.len() <= d {
            body = format!("{}{}", "0".repeat(d + 1 - body.len()), body);
        }
        body.insert(body.len() - d, '.');
    }
    if x < 0.0 && scaled != 0 {
        body.insert(0, '-');
    }
    body
}

/// Rounds `x` to `decimals` places, half away from zero, on its decimal
/// representation.
pub fn round_half_away(x: f64, decimals: u32) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_fixed(x, decimals)
        .parse()
        .expect("format_fixed yields a decimal literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_away_from_zero() {
        assert_eq!(format_fixed(26.95, 1), "27.0");
        assert_eq!(format_fixed(-26.95, 1), "-27.0");
        assert_eq!(format_fixed(0.125, 2), "0.13");
        assert_eq!(format_fixed(2.5, 0), "3");
        assert_eq!(format_fixed(-2.5, 0), "-3");
    }

    #[test]
    fn table_values() {
        assert_eq!(format_fixed(0.20587, 4), "0.2059");
        assert_eq!(format_fixed(0.0595, 4), "0.0595");
        assert_eq!(format_fixed(3.761_932_330_827_068, 2), "3.76");
        assert_eq!(format_fixed(-26.683_870_967_741_94, 1), "-26.7");
        assert_eq!(round_half_away(0.063_92, 4), 0.0639);
    }

    #[test]
    fn small_large_and_zero() {
        assert_eq!(format_fixed(0.0, 2), "0.00");
        assert_eq!(format_fixed(1e-30, 3), "0.000");
        assert_eq!(format_fixed(-0.0004, 3), "0.000");
        assert_eq!(format_fixed(0.0005, 3), "0.001");
        assert_eq!(format_fixed(12345.0, 1), "12345.0");
        assert_eq!(format_fixed(1e30, 1), "1000000000000000000000000000000.0");
        assert_eq!(format_fixed(7.0, 0), "7");
    }
}
