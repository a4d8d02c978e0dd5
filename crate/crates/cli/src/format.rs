//! Number formatting shared by every text output.

/// Like C's `%.12g`: twelve significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round first so the exponent reflects carries like 9.99...e2 -> 1e3.
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        format!(
            "{}e{}{:02}",
            trim(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (4.0, "4"),
            (0.1 + 0.2, "0.3"),
            (1.0 / 3.0, "0.333333333333"),
            (2f64.sqrt() * 1e6, "1414213.56237"),
            (123456789012345.0, "1.23456789012e+14"),
            (999999999999.9, "1e+12"),
            (0.000012345, "1.2345e-05"),
            (0.00012345, "0.00012345"),
            (-2.5, "-2.5"),
            (-0.0, "0"),
            (53.99999999999999, "54"),
        ];
        for (x, want) in cases {
            assert_eq!(sig12(x), want, "{x}");
        }
    }
}
