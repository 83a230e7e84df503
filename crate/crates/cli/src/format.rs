//! Text output: 15 significant digits, fixed layout.

use pkit_core::{CMatrix, C64};

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.15g`-style rendering; `-0` prints as `0`.
pub fn real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.14e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

pub fn complex(z: C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", real(z.re), real(z.im.abs()))
}

/// One bracketed row per line, each prefixed by `indent`.
pub fn matrix(m: &CMatrix, indent: &str) -> String {
    if m.nrows() == 0 || m.ncols() == 0 {
        return format!("{indent}(empty {}x{})\n", m.nrows(), m.ncols());
    }
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| complex(m[(i, j)])).collect();
        out.push_str(&format!("{indent}[ {} ]\n", row.join(", ")));
    }
    out
}

/// Residual-style number with 3 significant digits.
pub fn short(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.2e}")
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

pub fn pass_fail(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pkit_core::c64;

    #[test]
    fn fifteen_digits() {
        assert_eq!(real(0.5000000000000001), "0.5");
        assert_eq!(real(-2.0), "-2");
        assert_eq!(real(-0.0), "0");
        assert_eq!(real(1.0 / 3.0), "0.333333333333333");
        assert_eq!(real(123456.789), "123456.789");
        assert_eq!(real(1e-7), "1e-7");
        assert_eq!(real(-2.5e20), "-2.5e20");
        assert_eq!(real(1e-5), "0.00001");
    }

    #[test]
    fn complex_signs() {
        assert_eq!(complex(c64(-2.0, 0.0)), "-2+0i");
        assert_eq!(complex(c64(0.5, -0.5)), "0.5-0.5i");
        assert_eq!(complex(c64(0.0, -0.0)), "0+0i");
    }
}
