/// Formats a float for CSV output: rounded to 12 significant digits, then
/// printed as the shortest string that reads back to the rounded value.
/// Keeps goldens stable across platforms and summation-order noise.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}
