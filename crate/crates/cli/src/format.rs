/// Rounds to `digits` significant digits and prints without trailing zeros
/// or exponent noise: `291.5`, `0.095`, `-556`.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.max(1) - 1, x)
        .parse()
        .expect("exponent formatting parses");
    if rounded == 0.0 {
        return "0".into();
    }
    rounded.to_string()
}

pub fn rounded(x: f64, digits: usize) -> f64 {
    sig(x, digits).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig(-556.0, 10), "-556");
        assert_eq!(sig(291.5, 10), "291.5");
        assert_eq!(sig(0.1 - 2.0 * 0.07 + 0.05, 10), "0.01");
        assert_eq!(sig(0.5 - 3f64.sqrt() / 6.0, 10), "0.2113248654");
        assert_eq!(sig(0.0, 10), "0");
        assert_eq!(sig(-0.0, 10), "0");
        assert_eq!(sig(477611.3744, 3), "478000");
    }
}
