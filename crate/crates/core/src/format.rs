//! Fixed text formatting for report files.

/// C-style `%.17g`: 17 significant digits, trailing zeros stripped, exponent
/// form when the decimal exponent is below −4 or at least 17.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Comma-joined `%.17g` fields.
pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| g17(*v)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (-1.25e-300, "-1.25e-300"),
        ];
        for (x, s) in cases {
            assert_eq!(g17(x), s, "{x}");
        }
    }

    #[test]
    fn round_trips() {
        for x in [1.0 / 3.0, 2.0f64.sqrt() * 1e10, -7.77e-12, 6.02214076e23] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
